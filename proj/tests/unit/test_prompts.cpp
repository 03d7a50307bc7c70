#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "prompts.hpp"

using namespace specforge;
namespace fs = std::filesystem;

TEST_SUITE("prompts") {
  TEST_CASE("asset parsing") {
    const auto t = parse_prompt_asset("demo", "version: 3\n---\nHello {{name}}.\n");
    CHECK(t.name == "demo");
    CHECK(t.version == 3);
    CHECK(t.body == "Hello {{name}}.");
    CHECK_THROWS_AS(parse_prompt_asset("bad", "no header"), Error);
    CHECK_THROWS_AS(parse_prompt_asset("bad", "version: x\n---\nbody"), Error);
  }

  TEST_CASE("placeholders") {
    CHECK(fill_placeholders("A {{x}} and {{y}}", {{"x", "1"}, {"y", "2"}}) == "A 1 and 2");
    CHECK_THROWS_AS(fill_placeholders("A {{missing}}", {}), Error);
    CHECK(fill_placeholders("a\n\n\n\nb\n\n", {}) == "a\n\nb");
    CHECK(fill_placeholders("{{v}}", {{"v", "{{not expanded}}"}}) == "{{not expanded}}");
  }

  TEST_CASE("built-in library covers every pipeline prompt") {
    const PromptLibrary lib = PromptLibrary::builtin();
    for (const char* name : {"system", "extract_concepts", "contextualize", "section_abstract", "section_background",
                             "section_summary", "section_brief_description_of_drawings",
                             "section_detailed_description", "technical_item", "splice", "baseline_single_gen",
                             "baseline_multi_gen", "baseline_claim_iterative"}) {
      CHECK_MESSAGE(lib.contains(name), name);
      CHECK(lib.get(name).version >= 1);
    }
    const std::string s = lib.render("splice", {{"detailed_description", "[0005] text"}, {"material", "new stuff"}});
    CHECK(s.find("[0005] text") != std::string::npos);
    CHECK(s.find("INSERT_AFTER") != std::string::npos);
    CHECK_THROWS_AS(lib.render("nope", {}), Error);
  }

  TEST_CASE("overrides replace built-ins by file name") {
    const fs::path dir = fs::temp_directory_path() / "sf_prompt_override";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "system.txt") << "version: 9\n---\nCustom system prompt.\n";
    const PromptLibrary lib = PromptLibrary::with_overrides(dir);
    CHECK(lib.get("system").version == 9);
    CHECK(lib.render("system", {}) == "Custom system prompt.");
    CHECK(lib.versions().at("system") == 9);
    CHECK(lib.contains("splice"));
    fs::remove_all(dir);
  }
}
