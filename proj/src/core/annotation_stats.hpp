#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evaluator.hpp"

namespace specforge {

enum class Category { LanguageStyle, Elaboration, Diversity, FactualAccuracy, Coverage };

inline constexpr std::array<Category, 5> kAllCategories = {Category::LanguageStyle, Category::Elaboration,
                                                           Category::Diversity, Category::FactualAccuracy,
                                                           Category::Coverage};

std::string_view category_name(Category c);
std::optional<Category> parse_category(std::string_view name);

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;

struct AnnotationRecord {
  std::string annotator_id;
  std::string source_id;
  std::string method_id;
  std::map<Category, int> scores;
  // 1 = best among the disclosures this annotator saw for the source.
  int rank = 0;
  std::string comments;

  // Throws InvalidInput on blank ids, missing categories, out-of-range
  // scores or a non-positive rank.
  void validate() const;
};

// Per-record checks plus: at most one record per (annotator, source, method)
// and ranks within each (annotator, source) form 1..k.
void validate_records(std::span<const AnnotationRecord> records);

using ScoreTable = std::map<std::string, std::map<Category, MetricSummary>>;

// Mean and sample sd per method and category. Every method listed in
// required_methods must have records (EmptyGroup otherwise).
ScoreTable aggregate_scores(std::span<const AnnotationRecord> records,
                            std::span<const std::string> required_methods = {});

enum class WinRateUnit {
  // One comparison per (annotator, source) where both methods were ranked.
  PerComparison,
  // One comparison per source, decided by the majority of annotators; an
  // even split counts as a tie.
  SourceMajority,
};

struct WinLossTie {
  size_t wins = 0;
  size_t losses = 0;
  size_t ties = 0;

  size_t total() const noexcept { return wins + losses + ties; }
  double win_pct() const;
  double loss_pct() const;
  // 100 minus the other two, so the three always sum to exactly 100.
  double tie_pct() const;
};

// Throws NoOverlap when no comparison unit has both methods.
WinLossTie win_loss_tie(std::span<const AnnotationRecord> records, const std::string& method_a,
                        const std::string& method_b, WinRateUnit unit = WinRateUnit::PerComparison);

struct KendallResult {
  double tau = 0.0;
  double p_value = 1.0;
};

// Tau-b with the large-sample normal approximation for the two-sided p-value.
// Throws InvalidInput on length mismatch or n < 2, DegenerateInput when
// either list is constant.
KendallResult kendall_tau(std::span<const double> x, std::span<const double> y);

enum class KappaWeighting { Linear, Quadratic };

std::string_view kappa_weighting_name(KappaWeighting w);
std::optional<KappaWeighting> parse_kappa_weighting(std::string_view name);

// Categories span the integer range covered by either rater.
// Throws DegenerateInput when the expected disagreement is zero.
double weighted_kappa(std::span<const int> x, std::span<const int> y, KappaWeighting weighting = KappaWeighting::Linear);

struct AgreementResult {
  double kendall_tau = 0.0;
  double p_value = 1.0;
  double weighted_kappa = 0.0;
  KappaWeighting weighting = KappaWeighting::Linear;
  size_t n_items = 0;
  size_t annotator_pairs = 0;
};

// Pools every category score that two annotators gave the same (source,
// method). nullopt with a reason when there is no such overlap or the pooled
// scores are constant.
struct AgreementOutcome {
  std::optional<AgreementResult> result;
  std::string reason;
};

AgreementOutcome agreement(std::span<const AnnotationRecord> records, KappaWeighting weighting = KappaWeighting::Linear);

// JSON lines, one object per record:
//   {"annotator_id","source_id","method_id","scores":{<Category>:int,...},"rank","comments"}
// Throws ParseFailure naming the file and line of the first bad record.
std::vector<AnnotationRecord> load_annotations_jsonl(const std::filesystem::path& path);
// Header row required:
//   annotator_id,source_id,method_id,LanguageStyle,Elaboration,Diversity,FactualAccuracy,Coverage,rank,comments
std::vector<AnnotationRecord> load_annotations_csv(const std::filesystem::path& path);
// Picks the reader from the extension (.csv, otherwise JSON lines) and
// validates the combined set.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

// Writes the CSV layout above.
std::string export_annotations_csv(std::span<const AnnotationRecord> records);

}  // namespace specforge
