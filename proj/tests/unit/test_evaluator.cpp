#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "evaluator.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace specforge;

namespace {

Gateway gateway_with(std::function<std::vector<double>(std::string_view)> fn, size_t dim = 2) {
  auto backend = std::make_shared<MockBackend>(dim);
  backend->set_embed_handler(std::move(fn));
  return Gateway(backend, GatewayOptions{3, std::chrono::milliseconds(0), 1.0, 4});
}

Specification spec_of(const std::string& id, std::vector<std::string> paragraphs) {
  Section s{SectionName::DetailedDescription, {}, "template-detailed_description"};
  for (auto& p : paragraphs) s.paragraphs.push_back({0, std::move(p)});
  return renumber(Specification(id, {s}));
}

}  // namespace

TEST_SUITE("evaluator") {
  TEST_CASE("n-gram diversity examples") {
    CHECK(ngram_diversity({"a", "a", "a", "a"}) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    CHECK(ngram_diversity({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"}) == 10.0);
    CHECK(ngram_diversity({}) == 0.0);
    CHECK(ngram_diversity({"x"}) == 1.0);
    const TokenStream ten{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    const TokenStream four{"a", "a", "a", "a"};
    CHECK(diversity_difference(ten, four) == doctest::Approx(10.0 - 25.0 / 12.0));
    CHECK(diversity_difference(ten, four) == doctest::Approx(7.9167).epsilon(1e-4));
    CHECK(diversity_difference(four, ten) == diversity_difference(ten, four));
    CHECK(diversity_difference(four, four) == 0.0);
  }

  TEST_CASE("n-gram diversity matches the set-based oracle") {
    sftest::Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      const auto tokens = sftest::random_tokens(rng, rng() % 300, 1 + rng() % 20);
      const double got = ngram_diversity(tokens);
      CHECK(got == sftest::oracle_ngd(tokens));
      CHECK(got >= 0.0);
      CHECK(got <= 10.0);
    }
  }

  TEST_CASE("profanity examples") {
    ProfanityLexicon lex;
    CHECK(profanity_count("This critical step is crucial as given in claim 1.", lex) == 3);
    CHECK(profanity_count("", lex) == 0);
    CHECK(profanity_count("the prior art teaches", lex) == 1);
    CHECK(profanity_count("Crucially, criticality matters.", lex) == 0);
    CHECK(profanity_count("see claims 3 and claim two", lex) == 1);
    lex.accept_plural_claims = false;
    CHECK(profanity_count("see claims 3", lex) == 0);
    lex.claim_reference_rule = false;
    CHECK(profanity_count("claim 1", lex) == 0);
    // Paragraph tags are not tokens.
    CHECK(profanity_count("[0001] critical", ProfanityLexicon{}) == 1);
  }

  TEST_CASE("longest phrase wins without overlap") {
    ProfanityLexicon lex;
    lex.phrases = {"prior", "prior art", "art"};
    CHECK(profanity_count("prior art art", lex) == 2);
  }

  TEST_CASE("profanity agrees with the regex oracle") {
    sftest::Rng rng(3);
    for (int i = 0; i < 300; ++i) {
      std::uint64_t planted = 0;
      const std::string s = sftest::profanity_sentence(rng, planted);
      CHECK(profanity_count(s, ProfanityLexicon{}) == planted);
      CHECK(sftest::oracle_profanity(s) == planted);
    }
  }

  TEST_CASE("lexicon file") {
    const auto path = std::filesystem::temp_directory_path() / "sf_lexicon.txt";
    std::ofstream(path) << "# comment\nPivotal\n\nsine qua non\n";
    const auto lex = ProfanityLexicon::from_file(path);
    CHECK(lex.phrases == std::vector<std::string>{"pivotal", "sine qua non"});
    CHECK(profanity_count("A pivotal, sine qua non element.", lex) == 2);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(ProfanityLexicon::from_file(path), Error);
  }

  TEST_CASE("chunking and pooling") {
    const TokenStream t{"a", "b", "c", "d", "e"};
    CHECK(chunk_text(t, 2) == std::vector<std::string>{"a b", "c d", "e"});
    CHECK(chunk_text({}, 3).empty());
    CHECK_THROWS_AS(chunk_text(t, 0), Error);
    const std::vector<EmbeddingVector> v{{{1.0, 0.0}}, {{0.0, 1.0}}};
    CHECK(mean_pool(v) == std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(mean_pool(std::span<const EmbeddingVector>{}), Error);
    const std::vector<double> zero{0.0, 0.0}, one{1.0, 0.0};
    try {
      cosine_similarity(zero, one);
      FAIL("expected ZeroVector");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroVector);
    }
  }

  TEST_CASE("similarity examples") {
    auto same = gateway_with([](std::string_view) { return std::vector<double>{0.6, 0.8}; });
    CHECK(embedding_similarity("alpha beta", "gamma delta epsilon", same, 1) == doctest::Approx(1.0).epsilon(1e-12));

    auto by_doc = [](std::vector<double> a, std::vector<double> b) {
      return gateway_with([a, b](std::string_view text) { return text.find("left") != std::string_view::npos ? a : b; });
    };
    auto ortho = by_doc({1.0, 0.0}, {0.0, 1.0});
    CHECK(embedding_similarity("left left left", "right right", ortho, 1) == doctest::Approx(0.0).epsilon(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    auto diag = by_doc({1.0, 0.0}, {r, r});
    CHECK(std::abs(embedding_similarity("left left", "right right right", diag, 1) - 0.7071) < 1e-4);
    CHECK(std::abs(embedding_similarity("left left", "right right right", diag, 1) - r) < 1e-12);
  }

  TEST_CASE("similarity validates inputs") {
    auto gw = gateway_with([](std::string_view) { return std::vector<double>{1.0, 0.0}; });
    CHECK_THROWS_AS(embedding_similarity("", "x", gw, 4), Error);
    CHECK_THROWS_AS(embedding_similarity("x", "y", gw, 0), Error);
    CHECK_THROWS_AS(embedding_similarity("x", "y", gw, 513), Error);
  }

  TEST_CASE("evaluate identical pair and degradation") {
    const auto spec = spec_of("e-1", {"A critical valve.", "Claim 2 covers the spool."});
    Gateway gw(std::make_shared<MockBackend>(8));
    const auto report = evaluate(spec, spec, EvaluatorConfig{}, &gw);
    REQUIRE(report.similarity);
    CHECK(*report.similarity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.diversity_difference == 0.0);
    CHECK(report.profanity_count == 2);
    CHECK(report.source_id == "e-1");

    auto down = std::make_shared<MockBackend>(8);
    down->set_unavailable(true);
    Gateway dgw(down, GatewayOptions{2, std::chrono::milliseconds(0), 1.0, 1});
    const auto degraded = evaluate(spec, spec, EvaluatorConfig{}, &dgw);
    CHECK_FALSE(degraded.similarity);
    CHECK(degraded.similarity_error.find("BackendUnavailable") != std::string::npos);
    CHECK(degraded.profanity_count == 2);
    CHECK(degraded.ngd_generated > 0.0);

    const auto none = evaluate(spec, spec, EvaluatorConfig{}, nullptr);
    CHECK_FALSE(none.similarity);
  }

  TEST_CASE("summaries") {
    const std::vector<double> two{2.0, 4.0};
    const auto s = summarize(two);
    CHECK(s.n == 2);
    CHECK(s.mean == 3.0);
    CHECK(s.sd == doctest::Approx(std::sqrt(2.0)));
    const std::vector<double> one{3.0};
    CHECK(summarize(one).sd == 0.0);
    CHECK(summarize(std::span<const double>{}).n == 0);

    std::vector<EvaluationReport> reports(2);
    reports[0].similarity = 0.5;
    reports[0].profanity_count = 1;
    reports[1].profanity_count = 3;
    const auto agg = aggregate_reports(reports);
    CHECK(agg.pairs == 2);
    CHECK(agg.similarity.n == 1);
    CHECK(agg.similarity.mean == 0.5);
    CHECK(agg.profanity.mean == 2.0);
  }
}
