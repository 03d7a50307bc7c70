#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "annotation_stats.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace specforge;
namespace fs = std::filesystem;

namespace {

AnnotationRecord rec(std::string annotator, std::string source, std::string method, int rank, int score = 3) {
  AnnotationRecord r{std::move(annotator), std::move(source), std::move(method), {}, rank, ""};
  for (Category c : kAllCategories) r.scores[c] = score;
  return r;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

const char* kHeader = "annotator_id,source_id,method_id,LanguageStyle,Elaboration,Diversity,FactualAccuracy,Coverage,rank,comments\n";

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("categories") {
    CHECK(category_name(Category::FactualAccuracy) == "FactualAccuracy");
    CHECK(parse_category("coverage") == Category::Coverage);
    CHECK_FALSE(parse_category("Fluency"));
  }

  TEST_CASE("record validation") {
    auto r = rec("a", "s", "m", 1);
    CHECK_NOTHROW(r.validate());
    r.scores[Category::Diversity] = 6;
    CHECK_THROWS_AS(r.validate(), Error);
    r = rec("a", "s", "m", 0);
    CHECK_THROWS_AS(r.validate(), Error);
    r = rec("a", "s", "m", 1);
    r.scores.erase(Category::Coverage);
    CHECK_THROWS_AS(r.validate(), Error);

    std::vector<AnnotationRecord> dup{rec("a", "s", "m1", 1), rec("a", "s", "m1", 2)};
    CHECK_THROWS_AS(validate_records(dup), Error);
    std::vector<AnnotationRecord> gap{rec("a", "s", "m1", 1), rec("a", "s", "m2", 3)};
    CHECK_THROWS_AS(validate_records(gap), Error);
    std::vector<AnnotationRecord> tie{rec("a", "s", "m1", 1), rec("a", "s", "m2", 1)};
    CHECK_THROWS_AS(validate_records(tie), Error);
  }

  TEST_CASE("score aggregation") {
    std::vector<AnnotationRecord> one{rec("a", "s", "m", 1, 3)};
    auto table = aggregate_scores(one);
    CHECK(table["m"][Category::Coverage].mean == 3.0);
    CHECK(table["m"][Category::Coverage].sd == 0.0);

    std::vector<AnnotationRecord> two{rec("a", "s1", "m", 1, 2), rec("a", "s2", "m", 1, 4)};
    table = aggregate_scores(two);
    CHECK(table["m"][Category::Elaboration].mean == 3.0);
    CHECK(table["m"][Category::Elaboration].sd == doctest::Approx(std::sqrt(2.0)));

    const std::vector<std::string> required{"m", "absent"};
    CHECK(code_of([&] { aggregate_scores(two, required); }) == ErrorCode::EmptyGroup);
    CHECK(code_of([&] { aggregate_scores(std::span<const AnnotationRecord>{}); }) == ErrorCode::EmptyGroup);
  }

  TEST_CASE("win/loss/tie") {
    std::vector<AnnotationRecord> single{rec("a", "s", "x", 1), rec("a", "s", "y", 2)};
    const auto w = win_loss_tie(single, "x", "y");
    CHECK(w.wins == 1);
    CHECK(w.win_pct() == 100.0);
    CHECK(w.loss_pct() == 0.0);
    CHECK(w.tie_pct() == 0.0);
    CHECK(win_loss_tie(single, "y", "x").loss_pct() == 100.0);
    CHECK(code_of([&] { win_loss_tie(single, "x", "z"); }) == ErrorCode::NoOverlap);
    CHECK(code_of([&] { win_loss_tie(single, "x", "x"); }) == ErrorCode::InvalidInput);
  }

  TEST_CASE("win rate units") {
    // Source s1: two annotators prefer x, one prefers y. Source s2: split 1-1.
    std::vector<AnnotationRecord> r{rec("a", "s1", "x", 1), rec("a", "s1", "y", 2), rec("b", "s1", "x", 1),
                                    rec("b", "s1", "y", 2), rec("c", "s1", "x", 2), rec("c", "s1", "y", 1),
                                    rec("a", "s2", "x", 1), rec("a", "s2", "y", 2), rec("b", "s2", "x", 2),
                                    rec("b", "s2", "y", 1)};
    const auto per = win_loss_tie(r, "x", "y", WinRateUnit::PerComparison);
    CHECK(per.wins == 3);
    CHECK(per.losses == 2);
    CHECK(per.ties == 0);
    const auto maj = win_loss_tie(r, "x", "y", WinRateUnit::SourceMajority);
    CHECK(maj.wins == 1);
    CHECK(maj.losses == 0);
    CHECK(maj.ties == 1);
    CHECK(maj.win_pct() + maj.loss_pct() + maj.tie_pct() == 100.0);
  }

  TEST_CASE("fixture win counts") {
    const auto fx = sftest::annotation_fixture(17, 12, 3);
    validate_records(fx.records);
    const auto vb = win_loss_tie(fx.records, "alpha", "beta");
    CHECK(vb.wins == fx.wins_vs_beta);
    CHECK(vb.losses == fx.losses_vs_beta);
    CHECK(vb.ties == fx.ties_vs_beta);
    const auto vg = win_loss_tie(fx.records, "alpha", "gamma");
    CHECK(vg.wins == fx.wins_vs_gamma);
    CHECK(vg.losses == fx.losses_vs_gamma);
  }

  TEST_CASE("kendall tau examples") {
    const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4}, rev{4, 3, 2, 1};
    CHECK(kendall_tau(x, x).tau == doctest::Approx(1.0));
    CHECK(kendall_tau(x, rev).tau == doctest::Approx(-1.0));
    CHECK(kendall_tau(x, y).tau == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    const std::vector<double> c{2, 2, 2, 2};
    CHECK(code_of([&] { kendall_tau(x, c); }) == ErrorCode::DegenerateInput);
    const std::vector<double> shorter{1, 2, 3};
    CHECK(code_of([&] { kendall_tau(x, shorter); }) == ErrorCode::InvalidInput);
  }

  TEST_CASE("kendall tau p-values") {
    // Reference values: scipy.stats.kendalltau(..., method="asymptotic").
    const std::vector<double> a{1, 2, 3, 4, 5, 6}, b{2, 1, 4, 3, 6, 5};
    auto r = kendall_tau(a, b);
    CHECK(r.tau == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.09087393998624903).epsilon(1e-10));
    const std::vector<double> c{1, 1, 2, 3, 3, 4, 5}, d{1, 2, 2, 3, 4, 4, 4};
    r = kendall_tau(c, d);
    CHECK(r.tau == doctest::Approx(0.8346223261119858).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.015024079042239333).epsilon(1e-10));
  }

  TEST_CASE("kendall tau matches pair enumeration") {
    sftest::Rng rng(23);
    for (int i = 0; i < 50; ++i) {
      const size_t n = 2 + rng() % 40;
      std::vector<double> x(n), y(n);
      for (size_t k = 0; k < n; ++k) {
        x[k] = static_cast<double>(rng() % 5);
        y[k] = static_cast<double>(rng() % 5);
      }
      try {
        const auto r = kendall_tau(x, y);
        CHECK(std::abs(r.tau - sftest::oracle_kendall_tau(x, y)) <= 1e-12);
        CHECK(r.p_value >= 0.0);
        CHECK(r.p_value <= 1.0);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateInput);
      }
    }
  }

  TEST_CASE("weighted kappa") {
    const std::vector<int> x{1, 1, 2, 2}, y{1, 2, 1, 2};
    CHECK(weighted_kappa(x, y) == doctest::Approx(0.0));
    CHECK(weighted_kappa(x, x) == doctest::Approx(1.0));
    // Reference values: sklearn.metrics.cohen_kappa_score.
    const std::vector<int> p{1, 2, 3, 4, 5, 3}, q{1, 3, 3, 5, 4, 2};
    CHECK(weighted_kappa(p, q, KappaWeighting::Linear) == doctest::Approx(0.5384615384615384).epsilon(1e-12));
    CHECK(weighted_kappa(p, q, KappaWeighting::Quadratic) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(weighted_kappa(p, q) == weighted_kappa(q, p));
    const std::vector<int> c{3, 3, 3};
    CHECK(code_of([&] { weighted_kappa(c, c); }) == ErrorCode::DegenerateInput);
    CHECK(parse_kappa_weighting("quadratic") == KappaWeighting::Quadratic);
    CHECK(kappa_weighting_name(KappaWeighting::Linear) == "linear");
  }

  TEST_CASE("weighted kappa matches the pairwise oracle") {
    sftest::Rng rng(29);
    for (int i = 0; i < 50; ++i) {
      const size_t n = 3 + rng() % 30;
      std::vector<int> x(n), y(n);
      for (size_t k = 0; k < n; ++k) {
        x[k] = 1 + static_cast<int>(rng() % 5);
        y[k] = 1 + static_cast<int>(rng() % 5);
      }
      for (bool quad : {false, true}) {
        try {
          const double got = weighted_kappa(x, y, quad ? KappaWeighting::Quadratic : KappaWeighting::Linear);
          CHECK(std::abs(got - sftest::oracle_weighted_kappa(x, y, quad)) <= 1e-12);
        } catch (const Error& e) {
          CHECK(e.code() == ErrorCode::DegenerateInput);
        }
      }
    }
  }

  TEST_CASE("agreement") {
    std::vector<AnnotationRecord> solo{rec("a", "s", "x", 1), rec("a", "s", "y", 2)};
    const auto none = agreement(solo);
    CHECK_FALSE(none.result);
    CHECK(none.reason.find("insufficient overlap") != std::string::npos);

    std::vector<AnnotationRecord> twins;
    for (const char* who : {"a", "b"}) {
      for (int s = 0; s < 3; ++s) {
        auto r = rec(who, "s" + std::to_string(s), "x", 1);
        int v = 1;
        for (Category c : kAllCategories) r.scores[c] = 1 + (v++ + s) % 5;
        twins.push_back(r);
      }
    }
    const auto same = agreement(twins, KappaWeighting::Quadratic);
    REQUIRE(same.result);
    CHECK(same.result->kendall_tau == doctest::Approx(1.0));
    CHECK(same.result->weighted_kappa == doctest::Approx(1.0));
    CHECK(same.result->n_items == 15);
    CHECK(same.result->annotator_pairs == 1);
    CHECK(same.result->weighting == KappaWeighting::Quadratic);
  }

  TEST_CASE("csv ingestion") {
    const auto path = write_temp("sf_ann.csv", std::string(kHeader) +
                                                   "a1,s1,alpha,5,4,3,2,1,1,\"plain, \"\"quoted\"\"\ncomment\"\n"
                                                   "a1,s1,beta,1,1,1,1,1,2,\r\n");
    const auto records = load_annotations(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].scores.at(Category::LanguageStyle) == 5);
    CHECK(records[0].scores.at(Category::Coverage) == 1);
    CHECK(records[0].comments == "plain, \"quoted\"\ncomment");
    CHECK(records[1].rank == 2);

    const auto round = write_temp("sf_ann_round.csv", export_annotations_csv(records));
    const auto again = load_annotations_csv(round);
    REQUIRE(again.size() == 2);
    CHECK(again[0].comments == records[0].comments);
    CHECK(again[1].scores == records[1].scores);
    fs::remove(round);

    const auto bad = write_temp("sf_ann_bad.csv", std::string(kHeader) + "a1,s1,alpha,5,4,3,2,1,1,\na1,s1,beta,9,1,1,1,1,2,\n");
    try {
      load_annotations(bad);
      FAIL("expected ParseFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseFailure);
      CHECK(std::string(e.what()).find("sf_ann_bad.csv:3") != std::string::npos);
    }
    const auto header = write_temp("sf_ann_hdr.csv", "annotator,source\n");
    CHECK(code_of([&] { load_annotations(header); }) == ErrorCode::ParseFailure);
    fs::remove(path);
    fs::remove(bad);
    fs::remove(header);
  }

  TEST_CASE("jsonl ingestion") {
    const std::string good =
        R"({"annotator_id":"a1","source_id":"s1","method_id":"alpha","scores":{"LanguageStyle":4,"Elaboration":4,"Diversity":3,"FactualAccuracy":5,"Coverage":4},"rank":1,"comments":"ok"})";
    const auto path = write_temp("sf_ann.jsonl", good + "\n\n");
    const auto records = load_annotations(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].scores.at(Category::FactualAccuracy) == 5);
    CHECK(records[0].comments == "ok");

    const auto bad = write_temp("sf_ann_bad.jsonl", good + "\n{\"annotator_id\":\"a1\"\n");
    try {
      load_annotations(bad);
      FAIL("expected ParseFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseFailure);
      CHECK(std::string(e.what()).find("sf_ann_bad.jsonl:2") != std::string::npos);
    }
    const auto missing = write_temp("sf_ann_missing.jsonl",
                                    R"({"annotator_id":"a1","source_id":"s1","method_id":"alpha","scores":{"LanguageStyle":4},"rank":1})"
                                    "\n");
    CHECK(code_of([&] { load_annotations(missing); }) == ErrorCode::ParseFailure);
    CHECK(code_of([&] { load_annotations(fs::temp_directory_path() / "sf_nope.jsonl"); }) == ErrorCode::Io);
    fs::remove(path);
    fs::remove(bad);
    fs::remove(missing);
  }
}
