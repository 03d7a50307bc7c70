#include "annotation_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "errors.hpp"

namespace specforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view category_name(Category c) {
  switch (c) {
    case Category::LanguageStyle: return "LanguageStyle";
    case Category::Elaboration: return "Elaboration";
    case Category::Diversity: return "Diversity";
    case Category::FactualAccuracy: return "FactualAccuracy";
    case Category::Coverage: return "Coverage";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view name) {
  const std::string lower = to_lower(name);
  for (Category c : kAllCategories) {
    if (to_lower(category_name(c)) == lower) return c;
  }
  return std::nullopt;
}

void AnnotationRecord::validate() const {
  if (trim(annotator_id).empty() || trim(source_id).empty() || trim(method_id).empty()) {
    fail(ErrorCode::InvalidInput, "annotation needs annotator_id, source_id and method_id");
  }
  for (Category c : kAllCategories) {
    auto it = scores.find(c);
    if (it == scores.end()) fail(ErrorCode::InvalidInput, "missing score for " + std::string(category_name(c)));
    if (it->second < kMinScore || it->second > kMaxScore) {
      fail(ErrorCode::InvalidInput, std::string(category_name(c)) + " score " + std::to_string(it->second) +
                                        " outside " + std::to_string(kMinScore) + ".." + std::to_string(kMaxScore));
    }
  }
  if (scores.size() != kAllCategories.size()) fail(ErrorCode::InvalidInput, "unexpected score category");
  if (rank < 1) fail(ErrorCode::InvalidInput, "rank must be a positive integer");
}

void validate_records(std::span<const AnnotationRecord> records) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::map<std::pair<std::string, std::string>, std::vector<int>> ranks;
  for (const auto& r : records) {
    r.validate();
    if (!seen.emplace(r.annotator_id, r.source_id, r.method_id).second) {
      fail(ErrorCode::InvalidInput, "duplicate annotation for annotator " + r.annotator_id + ", source " +
                                        r.source_id + ", method " + r.method_id);
    }
    ranks[{r.annotator_id, r.source_id}].push_back(r.rank);
  }
  for (auto& [key, list] : ranks) {
    std::sort(list.begin(), list.end());
    for (size_t i = 0; i < list.size(); ++i) {
      if (list[i] != static_cast<int>(i) + 1) {
        fail(ErrorCode::InvalidInput, "ranks of annotator " + key.first + " on source " + key.second +
                                          " are not a permutation of 1.." + std::to_string(list.size()));
      }
    }
  }
}

ScoreTable aggregate_scores(std::span<const AnnotationRecord> records, std::span<const std::string> required_methods) {
  if (records.empty()) fail(ErrorCode::EmptyGroup, "no annotation records");
  std::map<std::string, std::map<Category, std::vector<double>>> values;
  for (const auto& r : records) {
    for (const auto& [c, s] : r.scores) values[r.method_id][c].push_back(static_cast<double>(s));
  }
  for (const auto& m : required_methods) {
    if (!values.count(m)) fail(ErrorCode::EmptyGroup, "no annotation records for method " + m);
  }
  ScoreTable table;
  for (const auto& [method, by_cat] : values) {
    for (const auto& [c, v] : by_cat) table[method][c] = summarize(v);
  }
  return table;
}

double WinLossTie::win_pct() const {
  return total() == 0 ? 0.0 : 100.0 * static_cast<double>(wins) / static_cast<double>(total());
}

double WinLossTie::loss_pct() const {
  return total() == 0 ? 0.0 : 100.0 * static_cast<double>(losses) / static_cast<double>(total());
}

double WinLossTie::tie_pct() const {
  return total() == 0 ? 0.0 : 100.0 - win_pct() - loss_pct();
}

WinLossTie win_loss_tie(std::span<const AnnotationRecord> records, const std::string& method_a,
                        const std::string& method_b, WinRateUnit unit) {
  if (method_a == method_b) fail(ErrorCode::InvalidInput, "win rate needs two different methods");
  // (source, annotator) -> ranks of a and b
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> ranks;
  for (const auto& r : records) {
    if (r.method_id != method_a && r.method_id != method_b) continue;
    auto& slot = ranks[{r.source_id, r.annotator_id}];
    (r.method_id == method_a ? slot.first : slot.second) = r.rank;
  }

  WinLossTie out;
  std::map<std::string, int> margin;  // per source: annotators preferring a minus preferring b
  for (const auto& [key, pair] : ranks) {
    const auto [ra, rb] = pair;
    if (ra == 0 || rb == 0) continue;
    const int vote = ra < rb ? 1 : (rb < ra ? -1 : 0);
    if (unit == WinRateUnit::PerComparison) {
      if (vote > 0) ++out.wins;
      else if (vote < 0) ++out.losses;
      else ++out.ties;
    } else {
      margin[key.first] += vote;
    }
  }
  for (const auto& [source, m] : margin) {
    if (m > 0) ++out.wins;
    else if (m < 0) ++out.losses;
    else ++out.ties;
  }
  if (out.total() == 0) fail(ErrorCode::NoOverlap, "no source was ranked for both " + method_a + " and " + method_b);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct TieSums {
  double pairs = 0;  // sum t(t-1)/2
  double v0 = 0;     // sum t(t-1)(t-2)
  double v1 = 0;     // sum t(t-1)(2t+5)
};

// Tie-group statistics of an already sorted sequence.
template <typename It, typename Eq>
TieSums tie_sums(It first, It last, Eq eq) {
  TieSums s;
  while (first != last) {
    It run = first;
    double t = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++t;
    }
    s.pairs += t * (t - 1) / 2;
    s.v0 += t * (t - 1) * (t - 2);
    s.v1 += t * (t - 1) * (2 * t + 5);
    first = run;
  }
  return s;
}

// Number of pairs i < j with v[i] > v[j]; sorts v as a side effect.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, size_t lo, size_t hi) {
  if (hi - lo < 2) return 0;
  const size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  size_t i = lo;
  size_t j = mid;
  size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += mid - i;
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

KendallResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidInput, "kendall_tau needs lists of equal length");
  const size_t n = x.size();
  if (n < 2) fail(ErrorCode::InvalidInput, "kendall_tau needs at least two observations");
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorCode::InvalidInput, "kendall_tau input is not finite");
  }

  std::vector<std::pair<double, double>> xy(n);
  for (size_t i = 0; i < n; ++i) xy[i] = {x[i], y[i]};
  std::sort(xy.begin(), xy.end());

  const TieSums tx = tie_sums(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a.first == b.first; });
  const TieSums txy = tie_sums(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a == b; });

  std::vector<double> ys(n);
  for (size_t i = 0; i < n; ++i) ys[i] = xy[i].second;
  std::vector<double> scratch(n);
  // Within equal x the y values are ascending, so every inversion is a
  // strictly discordant pair.
  const std::uint64_t discordant = count_inversions(ys, scratch, 0, n);
  const TieSums ty = tie_sums(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  const double nd = static_cast<double>(n);
  const double total = nd * (nd - 1) / 2;
  if (tx.pairs == total || ty.pairs == total) fail(ErrorCode::DegenerateInput, "kendall_tau undefined for a constant list");

  const double s = total - tx.pairs - ty.pairs + txy.pairs - 2.0 * static_cast<double>(discordant);
  KendallResult r;
  r.tau = std::clamp(s / std::sqrt(total - tx.pairs) / std::sqrt(total - ty.pairs), -1.0, 1.0);

  const double m = nd * (nd - 1);
  double var = (m * (2 * nd + 5) - tx.v1 - ty.v1) / 18 + (2 * tx.pairs * ty.pairs) / m;
  if (n > 2) var += tx.v0 * ty.v0 / (9 * m * (nd - 2));
  r.p_value = var > 0 ? std::clamp(std::erfc(std::fabs(s) / std::sqrt(var) / std::sqrt(2.0)), 0.0, 1.0) : 1.0;
  return r;
}

std::string_view kappa_weighting_name(KappaWeighting w) {
  return w == KappaWeighting::Linear ? "linear" : "quadratic";
}

std::optional<KappaWeighting> parse_kappa_weighting(std::string_view name) {
  const std::string lower = to_lower(name);
  if (lower == "linear") return KappaWeighting::Linear;
  if (lower == "quadratic") return KappaWeighting::Quadratic;
  return std::nullopt;
}

double weighted_kappa(std::span<const int> x, std::span<const int> y, KappaWeighting weighting) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidInput, "weighted_kappa needs lists of equal length");
  if (x.empty()) fail(ErrorCode::InvalidInput, "weighted_kappa needs at least one observation");
  const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  const auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  const int lo = std::min(*xlo, *ylo);
  const int hi = std::max(*xhi, *yhi);
  const size_t k = static_cast<size_t>(hi - lo) + 1;
  if (k > 1000) fail(ErrorCode::InvalidInput, "weighted_kappa scale is too wide");

  std::vector<double> observed(k * k, 0.0);
  std::vector<double> rows(k, 0.0);
  std::vector<double> cols(k, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const size_t a = static_cast<size_t>(x[i] - lo);
    const size_t b = static_cast<size_t>(y[i] - lo);
    observed[a * k + b] += 1;
    rows[a] += 1;
    cols[b] += 1;
  }
  const double n = static_cast<double>(x.size());
  double num = 0.0;
  double den = 0.0;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      const double d = std::fabs(static_cast<double>(i) - static_cast<double>(j));
      const double w = weighting == KappaWeighting::Linear ? d : d * d;
      num += w * observed[i * k + j] / n;
      den += w * rows[i] * cols[j] / (n * n);
    }
  }
  if (den == 0.0) fail(ErrorCode::DegenerateInput, "weighted_kappa undefined: no expected disagreement");
  return 1.0 - num / den;
}

AgreementOutcome agreement(std::span<const AnnotationRecord> records, KappaWeighting weighting) {
  // (source, method) -> annotator -> record
  std::map<std::pair<std::string, std::string>, std::map<std::string, const AnnotationRecord*>> by_item;
  for (const auto& r : records) by_item[{r.source_id, r.method_id}][r.annotator_id] = &r;

  std::vector<int> xs;
  std::vector<int> ys;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& [item, annotators] : by_item) {
    for (auto i = annotators.begin(); i != annotators.end(); ++i) {
      for (auto j = std::next(i); j != annotators.end(); ++j) {
        pairs.emplace(i->first, j->first);
        for (Category c : kAllCategories) {
          xs.push_back(i->second->scores.at(c));
          ys.push_back(j->second->scores.at(c));
        }
      }
    }
  }
  AgreementOutcome out;
  if (xs.size() < 2) {
    out.reason = "insufficient overlap: no (source, method) was scored by two annotators";
    return out;
  }
  try {
    const std::vector<double> xd(xs.begin(), xs.end());
    const std::vector<double> yd(ys.begin(), ys.end());
    const KendallResult kt = kendall_tau(xd, yd);
    AgreementResult r;
    r.kendall_tau = kt.tau;
    r.p_value = kt.p_value;
    r.weighted_kappa = weighted_kappa(xs, ys, weighting);
    r.weighting = weighting;
    r.n_items = xs.size();
    r.annotator_pairs = pairs.size();
    out.result = r;
  } catch (const Error& e) {
    out.reason = std::string("agreement undefined: ") + e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void bad_line(const fs::path& path, size_t line, const std::string& message) {
  fail(ErrorCode::ParseFailure, path.string() + ":" + std::to_string(line) + ": " + message);
}

int parse_int_field(std::string_view text, const std::string& field) {
  const std::string t = trim(text);
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(t, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (t.empty() || pos != t.size()) throw std::invalid_argument(field + " is not an integer: '" + t + "'");
  return v;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct CsvRow {
  size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180: quoted fields may hold commas, doubled quotes and line breaks.
std::vector<CsvRow> parse_csv(const std::string& text, const fs::path& path) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  size_t line = 1;
  row.line = 1;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && trim(row.fields[0]).empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      ++line;
      end_row();
    } else if (c != '\r') {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) bad_line(path, row.line, "unterminated quoted field");
  if (field_started || !row.fields.empty()) end_row();
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header = [] {
    std::vector<std::string> h = {"annotator_id", "source_id", "method_id"};
    for (Category c : kAllCategories) h.emplace_back(category_name(c));
    h.emplace_back("rank");
    h.emplace_back("comments");
    return h;
  }();
  return header;
}

}  // namespace

std::vector<AnnotationRecord> load_annotations_jsonl(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<AnnotationRecord> records;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    AnnotationRecord r;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
      r.annotator_id = j.at("annotator_id").get<std::string>();
      r.source_id = j.at("source_id").get<std::string>();
      r.method_id = j.at("method_id").get<std::string>();
      for (const auto& [name, value] : j.at("scores").items()) {
        const auto c = parse_category(name);
        if (!c) throw std::invalid_argument("unknown score category '" + name + "'");
        if (!value.is_number_integer()) throw std::invalid_argument(name + " score is not an integer");
        r.scores[*c] = value.get<int>();
      }
      if (!j.at("rank").is_number_integer()) throw std::invalid_argument("rank is not an integer");
      r.rank = j.at("rank").get<int>();
      if (j.contains("comments") && !j["comments"].is_null()) r.comments = j["comments"].get<std::string>();
      r.validate();
    } catch (const Error& e) {
      bad_line(path, number, e.what());
    } catch (const std::exception& e) {
      bad_line(path, number, e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<AnnotationRecord> load_annotations_csv(const fs::path& path) {
  const auto rows = parse_csv(read_file(path), path);
  if (rows.empty()) bad_line(path, 1, "missing header row");
  const auto& header = csv_header();
  std::map<std::string, size_t> column;
  for (size_t i = 0; i < rows[0].fields.size(); ++i) column[to_lower(trim(rows[0].fields[i]))] = i;
  for (const auto& h : header) {
    if (h != "comments" && !column.count(to_lower(h))) bad_line(path, rows[0].line, "header lacks column '" + h + "'");
  }

  std::vector<AnnotationRecord> records;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    auto cell = [&](const std::string& name) -> std::string {
      auto it = column.find(to_lower(name));
      if (it == column.end()) return {};
      if (it->second >= row.fields.size()) throw std::invalid_argument("missing column '" + name + "'");
      return row.fields[it->second];
    };
    AnnotationRecord r;
    try {
      r.annotator_id = trim(cell("annotator_id"));
      r.source_id = trim(cell("source_id"));
      r.method_id = trim(cell("method_id"));
      for (Category c : kAllCategories) {
        const std::string name(category_name(c));
        r.scores[c] = parse_int_field(cell(name), name);
      }
      r.rank = parse_int_field(cell("rank"), "rank");
      r.comments = cell("comments");
      r.validate();
    } catch (const Error& e) {
      bad_line(path, row.line, e.what());
    } catch (const std::exception& e) {
      bad_line(path, row.line, e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<AnnotationRecord> load_annotations(const fs::path& path) {
  auto records = to_lower(path.extension().string()) == ".csv" ? load_annotations_csv(path)
                                                               : load_annotations_jsonl(path);
  try {
    validate_records(records);
  } catch (const Error& e) {
    fail(ErrorCode::ParseFailure, path.string() + ": " + e.what());
  }
  return records;
}

std::string export_annotations_csv(std::span<const AnnotationRecord> records) {
  std::ostringstream out;
  const auto& header = csv_header();
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : records) {
    out << csv_escape(r.annotator_id) << ',' << csv_escape(r.source_id) << ',' << csv_escape(r.method_id);
    for (Category c : kAllCategories) {
      auto it = r.scores.find(c);
      out << ',' << (it == r.scores.end() ? std::string() : std::to_string(it->second));
    }
    out << ',' << r.rank << ',' << csv_escape(r.comments) << '\n';
  }
  return out.str();
}

}  // namespace specforge
