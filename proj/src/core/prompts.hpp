#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace specforge {

// A prompt asset file is "version: N", a "---" line, then the template body.
// Placeholders are written {{name}}.
struct PromptTemplate {
  std::string name;
  int version = 0;
  std::string body;
};

PromptTemplate parse_prompt_asset(std::string name, std::string_view text);

using PromptVars = std::map<std::string, std::string>;

class PromptLibrary {
 public:
  // Assets compiled in from the repository's prompts/ directory.
  static PromptLibrary builtin();
  // Built-in assets overlaid with every *.txt file found in dir.
  static PromptLibrary with_overrides(const std::filesystem::path& dir);

  const PromptTemplate& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  // Substitutes every placeholder; throws InvalidInput for a placeholder with
  // no value or an unknown template name.
  std::string render(std::string_view name, const PromptVars& vars) const;

  std::map<std::string, int> versions() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

std::string fill_placeholders(std::string_view body, const PromptVars& vars);

}  // namespace specforge
