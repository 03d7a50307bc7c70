// Command-line front end. Talks to the library only through the C API.
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specforge/specforge.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Owns a char* handed out by the C API.
struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { sf_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string status_message(sf_status s) {
  const std::string detail = sf_last_error();
  return detail.empty() ? sf_status_name(s) : detail;
}

void check(sf_status s) {
  if (s != SF_OK) throw CliError(status_message(s));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CliError("cannot read " + p.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("cannot write " + p.string());
  out << content;
  if (!out) throw CliError("write failed for " + p.string());
}

// Keeps source ids usable as file names.
std::string file_stem_for(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(safe ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

// Files directly in a directory with the given extension, sorted; a plain
// file argument is taken as is.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& args, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    const fs::path p(a);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ext) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      throw CliError("input not found: " + a);
    }
  }
  return out;
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
};

// The config file with command-line overrides applied.
Json load_config(const CommonOptions& common) {
  Json cfg = Json::object();
  if (!common.config_path.empty()) {
    try {
      cfg = Json::parse(read_file(common.config_path));
    } catch (const Json::exception& e) {
      throw CliError("config " + common.config_path + ": " + e.what());
    }
    if (!cfg.is_object()) throw CliError("config " + common.config_path + " must be a JSON object");
  }
  return cfg;
}

class Context {
 public:
  explicit Context(const Json& cfg) {
    const std::string text = cfg.dump();
    check(sf_context_create(text.c_str(), &ctx_));
  }
  ~Context() { sf_context_destroy(ctx_); }
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;
  const sf_context* get() const { return ctx_; }

  Json effective_config() const {
    OwnedString s;
    check(sf_context_config(ctx_, &s.p));
    return Json::parse(s.str());
  }

 private:
  sf_context* ctx_ = nullptr;
};

// ---------------------------------------------------------------------------

struct DraftOptions {
  std::vector<std::string> inputs;
  std::string mode;
  bool template_only = false;
  std::string local_corpus;
};

int cmd_draft(const CommonOptions& common, const DraftOptions& opts) {
  Json cfg = load_config(common);
  if (!opts.mode.empty()) cfg["mode"] = opts.mode;
  if (opts.template_only) cfg["orchestrator"]["template_only"] = true;
  if (!opts.local_corpus.empty()) {
    cfg["search"]["type"] = "local";
    cfg["search"]["local_corpus"] = opts.local_corpus;
  }
  Context ctx(cfg);
  const Json effective = ctx.effective_config();
  const std::string label = effective["label"].get<std::string>();
  const int concurrency = std::max(1, effective["concurrency"].get<int>());

  std::vector<std::string> docs;
  for (const auto& path : expand_inputs(opts.inputs, ".json")) {
    OwnedString arr;
    const std::string text = read_file(path);
    if (sf_parse_documents(text.c_str(), &arr.p) != SF_OK) {
      throw CliError(path.string() + ": " + sf_last_error());
    }
    for (const auto& d : Json::parse(arr.str())) docs.push_back(d.dump());
  }
  if (docs.empty()) throw CliError("no input documents");

  const fs::path out(common.out_dir);
  const fs::path run_root = out / "runs" / label;
  fs::create_directories(run_root);
  write_file(run_root / "config.json", effective.dump(2) + "\n");

  std::vector<std::string> lines(docs.size());
  std::vector<bool> failed(docs.size(), false);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < docs.size(); i = next++) {
      sf_result* raw = nullptr;
      const sf_status s = sf_draft(ctx.get(), docs[i].c_str(), nullptr, &raw);
      std::unique_ptr<sf_result, decltype(&sf_result_destroy)> result(raw, &sf_result_destroy);
      if (s != SF_OK) {
        failed[i] = true;
        lines[i] = "FAILED document " + std::to_string(i) + ": " + status_message(s);
        continue;
      }
      const std::string id = sf_result_source_id(result.get());
      const std::string stem = file_stem_for(id);
      try {
        for (size_t k = 0; k < sf_result_artifact_count(result.get()); ++k) {
          write_file(run_root / stem / sf_result_artifact_name(result.get(), k),
                     sf_result_artifact_content(result.get(), k));
        }
        if (sf_result_status(result.get()) == SF_OK) {
          write_file(out / (stem + ".txt"), sf_result_text(result.get()));
          lines[i] = "ok " + id + " -> " + (out / (stem + ".txt")).string();
        } else {
          failed[i] = true;
          lines[i] = "FAILED " + id + ": " + sf_result_error(result.get());
        }
      } catch (const std::exception& e) {
        failed[i] = true;
        lines[i] = "FAILED " + id + ": " + e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const size_t n = std::min<size_t>(static_cast<size_t>(concurrency), docs.size());
    for (size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  size_t n_failed = 0;
  for (size_t i = 0; i < docs.size(); ++i) {
    (failed[i] ? std::cerr : std::cout) << lines[i] << '\n';
    n_failed += failed[i] ? 1 : 0;
  }
  std::cout << (docs.size() - n_failed) << " of " << docs.size() << " documents drafted; artifacts in "
            << run_root.string() << '\n';
  return n_failed == 0 ? 0 : kExitFailure;
}

// ---------------------------------------------------------------------------

struct EvaluateOptions {
  std::vector<std::string> generated;
  std::string reference;
  int chunk_tokens = 0;
  std::string lexicon;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string mean_sd(const Json& summary, int precision = 4) {
  if (summary["n"].get<size_t>() == 0) return "n/a";
  return fmt(summary["mean"].get<double>(), precision) + " (" + fmt(summary["sd"].get<double>(), precision) + ")";
}

// Rendered text of the reference for a stem: <stem>.txt, else the gold
// specification inside <stem>.json.
std::optional<std::string> find_reference(const fs::path& dir, const std::string& stem, std::string& problem) {
  const fs::path txt = dir / (stem + ".txt");
  if (fs::is_regular_file(txt)) return read_file(txt);
  const fs::path json = dir / (stem + ".json");
  if (fs::is_regular_file(json)) {
    const std::string text = read_file(json);
    OwnedString rendered;
    if (sf_render_gold(text.c_str(), &rendered.p) != SF_OK) {
      problem = sf_last_error();
      return std::nullopt;
    }
    return rendered.str();
  }
  problem = "no reference " + txt.filename().string() + " or " + json.filename().string();
  return std::nullopt;
}

int cmd_evaluate(const CommonOptions& common, const EvaluateOptions& opts) {
  Json cfg = load_config(common);
  if (opts.chunk_tokens > 0) cfg["evaluator"]["chunk_tokens"] = opts.chunk_tokens;
  if (!opts.lexicon.empty()) cfg["evaluator"]["lexicon"] = opts.lexicon;
  Context ctx(cfg);

  const fs::path ref_dir(opts.reference);
  if (!fs::is_directory(ref_dir)) throw CliError("reference directory not found: " + opts.reference);

  Json reports = Json::array();
  size_t skipped = 0;
  for (const auto& gen_path : expand_inputs(opts.generated, ".txt")) {
    const std::string stem = gen_path.stem().string();
    std::string problem;
    const auto reference = find_reference(ref_dir, stem, problem);
    if (!reference) {
      std::cerr << "warning: skipping " << gen_path.string() << ": " << problem << '\n';
      ++skipped;
      continue;
    }
    const std::string generated = read_file(gen_path);
    OwnedString report;
    const sf_status s = sf_evaluate(ctx.get(), stem.c_str(), generated.c_str(), reference->c_str(), &report.p);
    if (s != SF_OK) {
      std::cerr << "warning: skipping " << gen_path.string() << ": " << status_message(s) << '\n';
      ++skipped;
      continue;
    }
    Json r = Json::parse(report.str());
    if (r.contains("similarity_error")) {
      std::cerr << "warning: " << stem << ": similarity unavailable: " << r["similarity_error"].get<std::string>()
                << '\n';
    }
    reports.push_back(std::move(r));
  }

  OwnedString agg_text;
  const std::string reports_text = reports.dump();
  check(sf_aggregate(reports_text.c_str(), &agg_text.p));
  const Json agg = Json::parse(agg_text.str());

  const fs::path out(common.out_dir);
  write_file(out / "evaluation" / "reports.json", reports.dump(2) + "\n");
  write_file(out / "evaluation" / "aggregate.json", agg.dump(2) + "\n");

  std::cout << "source_id\tsimilarity\tprofanity\tngd_generated\tngd_reference\tngd_difference\n";
  for (const auto& r : reports) {
    std::cout << r["source_id"].get<std::string>() << '\t'
              << (r["similarity"].is_null() ? std::string("n/a") : fmt(r["similarity"].get<double>())) << '\t'
              << r["profanity_count"].get<std::uint64_t>() << '\t' << fmt(r["ngd_generated"].get<double>()) << '\t'
              << fmt(r["ngd_reference"].get<double>()) << '\t' << fmt(r["diversity_difference"].get<double>())
              << '\n';
  }
  std::cout << "mean (sd)\t" << mean_sd(agg["similarity"]) << '\t' << mean_sd(agg["profanity_count"], 2) << '\t'
            << mean_sd(agg["ngd_generated"]) << '\t' << mean_sd(agg["ngd_reference"]) << '\t'
            << mean_sd(agg["diversity_difference"]) << '\n';
  if (reports.empty()) {
    std::cerr << "warning: no valid generated/reference pairs\n";
    return kExitFailure;
  }
  if (skipped > 0) std::cerr << "warning: " << skipped << " file(s) skipped\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct StatsOptions {
  std::vector<std::string> files;
  std::string kappa;
  std::string win_unit;
};

int cmd_stats(const CommonOptions& common, const StatsOptions& opts) {
  Json cfg = load_config(common);
  if (!opts.kappa.empty()) cfg["stats"]["kappa_weighting"] = opts.kappa;
  if (!opts.win_unit.empty()) cfg["stats"]["win_unit"] = opts.win_unit;
  Context ctx(cfg);

  std::vector<std::string> paths;
  for (const auto& p : opts.files) paths.push_back(p);
  std::vector<const char*> c_paths;
  for (const auto& p : paths) c_paths.push_back(p.c_str());
  OwnedString text;
  check(sf_stats(ctx.get(), c_paths.data(), c_paths.size(), &text.p));
  const Json stats = Json::parse(text.str());
  write_file(fs::path(common.out_dir) / "stats.json", stats.dump(2) + "\n");

  static const char* categories[] = {"LanguageStyle", "Elaboration", "Diversity", "FactualAccuracy", "Coverage"};
  std::cout << stats["records"].get<size_t>() << " records, " << stats["annotators"].get<size_t>() << " annotators, "
            << stats["sources"].get<size_t>() << " sources\n\nmethod";
  for (const char* c : categories) std::cout << '\t' << c;
  std::cout << '\n';
  for (const auto& [method, row] : stats["scores"].items()) {
    std::cout << method;
    for (const char* c : categories) std::cout << '\t' << (row.contains(c) ? mean_sd(row[c], 2) : "n/a");
    std::cout << '\n';
  }

  std::cout << "\nwin/loss/tie (" << stats["win_unit"].get<std::string>() << ")\n";
  for (const auto& w : stats["win_rates"]) {
    std::cout << w["method_a"].get<std::string>() << " vs " << w["method_b"].get<std::string>() << '\t'
              << fmt(w["win_pct"].get<double>(), 1) << " / " << fmt(w["loss_pct"].get<double>(), 1) << " / "
              << fmt(w["tie_pct"].get<double>(), 1) << "\t(" << w["wins"].get<size_t>() << '/'
              << w["losses"].get<size_t>() << '/' << w["ties"].get<size_t>() << ")\n";
  }

  std::cout << "\nagreement\n";
  const Json& a = stats["agreement"];
  if (!a["available"].get<bool>()) {
    std::cout << a["reason"].get<std::string>() << '\n';
  } else {
    std::cout << "kendall_tau\t" << fmt(a["kendall_tau"].get<double>()) << "\tp=" << fmt(a["p_value"].get<double>())
              << "\nweighted_kappa (" << a["weighting"].get<std::string>() << ")\t"
              << fmt(a["weighted_kappa"].get<double>()) << "\nn_items\t" << a["n_items"].get<size_t>() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patent specification drafting and evaluation"};
  app.require_subcommand(1);
  CommonOptions common;
  app.add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  app.set_version_flag("--version", std::string(sf_version()));

  DraftOptions draft;
  auto* draft_cmd = app.add_subcommand("draft", "Draft specifications from claims and figures");
  draft_cmd->add_option("inputs", draft.inputs, "Document JSON files or directories")->required();
  draft_cmd->add_option("--mode", draft.mode, "autospec-full, autospec-template, single-gen, multi-gen, claim-iterative");
  draft_cmd->add_flag("--template-only", draft.template_only, "Skip concept extraction, retrieval and splicing");
  draft_cmd->add_option("--local-corpus", draft.local_corpus, "Directory of text files used for retrieval")
      ->check(CLI::ExistingDirectory);

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score generated specifications against references");
  eval_cmd->add_option("generated", eval.generated, "Rendered .txt files or directories")->required();
  eval_cmd->add_option("--reference", eval.reference, "Directory of <id>.txt or <id>.json references")->required();
  eval_cmd->add_option("--chunk-tokens", eval.chunk_tokens, "Tokens per embedding chunk (max 512)");
  eval_cmd->add_option("--lexicon", eval.lexicon, "Profanity lexicon file, one phrase per line")
      ->check(CLI::ExistingFile);

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Expert annotation statistics");
  stats_cmd->add_option("files", stats.files, "Annotation files (.csv or .jsonl)")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--kappa", stats.kappa, "linear or quadratic");
  stats_cmd->add_option("--win-unit", stats.win_unit, "per-comparison or source-majority");

  // Options are accepted before or after the subcommand name.
  for (auto* sub : {draft_cmd, eval_cmd, stats_cmd}) {
    sub->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out_dir, "Output directory");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (*draft_cmd) return cmd_draft(common, draft);
    if (*eval_cmd) return cmd_evaluate(common, eval);
    if (*stats_cmd) return cmd_stats(common, stats);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
