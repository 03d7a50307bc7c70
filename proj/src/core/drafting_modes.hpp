#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"
#include "drafting_context.hpp"
#include "generator.hpp"
#include "merger.hpp"
#include "orchestrator.hpp"

namespace specforge {

enum class ModeId { AutoSpecFull, AutoSpecTemplate, SingleGen, MultiGen, ClaimIterative };

// "autospec-full", "autospec-template", "single-gen", "multi-gen", "claim-iterative".
std::string_view mode_name(ModeId mode);
std::optional<ModeId> parse_mode(std::string_view name);

struct BaselineConfig {
  int single_gen_max_tokens = 8000;
  int multi_gen_max_tokens = 1200;
  int claim_iterative_max_tokens = 400;
};

struct PipelineConfig {
  OrchestratorConfig orchestrator;
  GeneratorConfig generator;
  MergerConfig merger;
  BaselineConfig baseline;
};

// Intermediate products kept for the run artifacts directory.
struct PipelineTrace {
  std::optional<Outline> outline;
  std::vector<DraftSection> drafts;
  std::vector<std::string> skipped_items;
  std::vector<InsertionRecord> decisions;
};

struct DraftOutcome {
  Specification spec;
  PipelineTrace trace;
};

// Orchestrator -> generator -> merger.
DraftOutcome run_pipeline(const PatentDocument& doc, const PipelineConfig& cfg, DraftingContext& ctx);

// Every mode returns a renumbered specification whose drawings section is
// present exactly when the input has figures.
DraftOutcome draft(ModeId mode, const PatentDocument& doc, const PipelineConfig& cfg, DraftingContext& ctx);

// Splits single-pass output on lines that start with a canonical section
// name (case-insensitive). Returns an empty list when no heading is found.
std::vector<Section> split_by_headings(std::string_view text);

}  // namespace specforge
