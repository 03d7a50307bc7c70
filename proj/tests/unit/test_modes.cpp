#include <doctest.h>

#include "drafting_modes.hpp"
#include "errors.hpp"
#include "harness.hpp"

using namespace specforge;

namespace {

PatentDocument doc(size_t n_claims, bool figures) {
  std::vector<Claim> claims;
  for (size_t i = 1; i <= n_claims; ++i) {
    claims.push_back({static_cast<int>(i), "Claim text number " + std::to_string(i) + " about a gearbox."});
  }
  std::vector<FigureText> figs;
  if (figures) figs = {{"FIG. 1", "gear train"}};
  return PatentDocument{ClaimSet("mode-1", claims), figs, std::nullopt};
}

}  // namespace

TEST_SUITE("modes") {
  TEST_CASE("mode names round trip") {
    for (ModeId m : {ModeId::AutoSpecFull, ModeId::AutoSpecTemplate, ModeId::SingleGen, ModeId::MultiGen,
                     ModeId::ClaimIterative}) {
      CHECK(parse_mode(mode_name(m)) == m);
    }
    CHECK_FALSE(parse_mode("Single-Gen"));
  }

  TEST_CASE("heading splitter") {
    const auto sections = split_by_headings(
        "preamble dropped\n## ABSTRACT\nShort.\n\nBACKGROUND OF THE INVENTION\nOld art.\n\nDetailed Description:\nOne.\n\nTwo.");
    REQUIRE(sections.size() == 3);
    CHECK(sections[0].name == SectionName::Abstract);
    CHECK(sections[1].paragraphs[0].text == "Old art.");
    CHECK(sections[2].paragraphs.size() == 2);
    CHECK(split_by_headings("no headings at all").empty());
    // A sentence that merely starts with a heading word is body text.
    CHECK(split_by_headings("SUMMARY\nSummary statistics were gathered.")[0].paragraphs.size() == 1);
  }

  TEST_CASE("single-gen makes exactly one call") {
    sftest::Harness h;
    const auto out = draft(ModeId::SingleGen, doc(3, false), PipelineConfig{}, h.ctx);
    CHECK(h.tags() == std::vector<std::string>{"single_gen"});
    CHECK(out.spec.has_contiguous_numbering());
    CHECK_FALSE(out.spec.find(SectionName::BriefDescriptionOfDrawings));
  }

  TEST_CASE("single-gen adds drawing stubs when the model forgets them") {
    sftest::Harness h;
    const auto out = draft(ModeId::SingleGen, doc(2, true), PipelineConfig{}, h.ctx);
    REQUIRE(out.spec.find(SectionName::BriefDescriptionOfDrawings));
    CHECK(h.warned("figure stubs"));
  }

  TEST_CASE("single-gen without headings keeps the text") {
    sftest::Harness h;
    h.backend->script("single_gen", {"Just prose.\n\nMore prose."});
    const auto out = draft(ModeId::SingleGen, doc(1, false), PipelineConfig{}, h.ctx);
    CHECK(out.spec.paragraph_count() == 2);
    CHECK(h.warned("no recognizable section headings"));
  }

  TEST_CASE("claim-iterative makes one call per claim containing that claim") {
    sftest::Harness h;
    const auto out = draft(ModeId::ClaimIterative, doc(5, false), PipelineConfig{}, h.ctx);
    const auto calls = h.gateway.log().entries();
    REQUIRE(calls.size() == 5);
    for (size_t k = 0; k < 5; ++k) {
      CHECK(calls[k].tag == "claim_iterative:" + std::to_string(k + 1));
      CHECK(calls[k].user_prompt.find("Claim text number " + std::to_string(k + 1)) != std::string::npos);
    }
    CHECK(out.spec.has_contiguous_numbering());
  }

  TEST_CASE("multi-gen passes earlier sections forward") {
    sftest::Harness h;
    h.backend->script("multi_gen:background", {"BACKGROUND-MARKER paragraph."});
    draft(ModeId::MultiGen, doc(2, true), PipelineConfig{}, h.ctx);
    const auto calls = h.gateway.log().entries();
    REQUIRE(calls.size() == 5);
    CHECK(calls[0].tag == "multi_gen:background");
    for (size_t k = 1; k < 5; ++k) CHECK(calls[k].user_prompt.find("BACKGROUND-MARKER") != std::string::npos);
  }

  TEST_CASE("template mode skips extraction, retrieval and splicing") {
    sftest::Harness h;
    const auto out = draft(ModeId::AutoSpecTemplate, doc(3, true), PipelineConfig{}, h.ctx);
    CHECK(h.count_family("extract_concepts") == 0);
    CHECK(h.count_family("splice") == 0);
    CHECK(h.count_family("contextualize") == 0);
    CHECK(out.trace.decisions.empty());
    CHECK(out.spec.sections().size() == 5);
  }

  TEST_CASE("full pipeline with the mock backend") {
    sftest::Harness h;
    h.backend->script("extract_concepts", {"Gear mesh :: x\nBearing :: y\n"});
    const auto out = draft(ModeId::AutoSpecFull, doc(2, false), PipelineConfig{}, h.ctx);
    CHECK(out.trace.decisions.size() == 2);
    CHECK(h.count_family("splice") == 2);
    CHECK(h.count_family("draft_technical") == 2);
    CHECK(out.spec.has_contiguous_numbering());
    CHECK(h.warned("retrieval disabled"));
  }
}
