#include "prompts.hpp"

#include <fstream>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"

namespace specforge {

const std::vector<std::pair<std::string_view, std::string_view>>& embedded_prompt_assets();

namespace fs = std::filesystem;

PromptTemplate parse_prompt_asset(std::string name, std::string_view text) {
  const size_t eol = text.find('\n');
  const std::string first = trim(text.substr(0, eol));
  if (first.rfind("version:", 0) != 0) fail(ErrorCode::InvalidInput, "prompt '" + name + "' lacks a version line");
  int version = 0;
  try {
    version = std::stoi(first.substr(8));
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidInput, "prompt '" + name + "' has a malformed version line");
  }
  const size_t sep = text.find("\n---\n");
  if (sep == std::string_view::npos) fail(ErrorCode::InvalidInput, "prompt '" + name + "' lacks the --- separator");
  std::string body(text.substr(sep + 5));
  while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.pop_back();
  return PromptTemplate{std::move(name), version, std::move(body)};
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  for (const auto& [name, text] : embedded_prompt_assets()) {
    lib.templates_[std::string(name)] = parse_prompt_asset(std::string(name), text);
  }
  return lib;
}

PromptLibrary PromptLibrary::with_overrides(const fs::path& dir) {
  PromptLibrary lib = builtin();
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::Io, "prompt directory not found: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string name = entry.path().stem().string();
    lib.templates_[name] = parse_prompt_asset(name, text);
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) fail(ErrorCode::InvalidInput, "unknown prompt template '" + std::string(name) + "'");
  return it->second;
}

bool PromptLibrary::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

std::string PromptLibrary::render(std::string_view name, const PromptVars& vars) const {
  return fill_placeholders(get(name).body, vars);
}

std::map<std::string, int> PromptLibrary::versions() const {
  std::map<std::string, int> out;
  for (const auto& [name, t] : templates_) out[name] = t.version;
  return out;
}

std::string fill_placeholders(std::string_view body, const PromptVars& vars) {
  std::string out;
  out.reserve(body.size());
  size_t pos = 0;
  while (pos < body.size()) {
    const size_t open = body.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(body.substr(pos));
      break;
    }
    const size_t close = body.find("}}", open + 2);
    if (close == std::string_view::npos) fail(ErrorCode::InvalidInput, "unterminated placeholder in prompt");
    out.append(body.substr(pos, open - pos));
    const std::string key(body.substr(open + 2, close - open - 2));
    auto it = vars.find(key);
    if (it == vars.end()) fail(ErrorCode::InvalidInput, "no value for prompt placeholder '" + key + "'");
    out += it->second;
    pos = close + 2;
  }
  // Empty optional blocks leave runs of blank lines behind.
  std::string squeezed;
  squeezed.reserve(out.size());
  size_t newlines = 0;
  for (char c : out) {
    newlines = c == '\n' ? newlines + 1 : 0;
    if (newlines <= 2) squeezed.push_back(c);
  }
  return trim(squeezed);
}

}  // namespace specforge
