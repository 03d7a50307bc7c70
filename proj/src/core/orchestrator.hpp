#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "domain.hpp"
#include "drafting_context.hpp"

namespace specforge {

struct OrchestratorConfig {
  int max_technical_items = 12;
  // Claims longer than this (canonical tokens) are mined for concepts in chunks.
  int multipass_threshold_tokens = 1500;
  // Drafting order of template sections. The drawings entry only becomes an
  // item when the input has figures.
  std::vector<SectionName> template_plan = {SectionName::Background, SectionName::Summary,
                                            SectionName::BriefDescriptionOfDrawings, SectionName::DetailedDescription,
                                            SectionName::Abstract};
  // Skip concept extraction and retrieval entirely.
  bool template_only = false;
  int max_brief_tokens = 80;
  int extract_max_output_tokens = 600;
  int contextualize_max_output_tokens = 800;
  // Parallel enrichment workers.
  int concurrency = 1;

  void validate() const;
};

Outline build_template(const ClaimSet& claims, const std::vector<FigureText>& figures, const OrchestratorConfig& cfg);

struct ConceptLine {
  std::string title;
  std::string brief;
};

// Parses "TITLE :: BRIEF" lines. Lines without the delimiter are ignored;
// nullopt when no line parses.
std::optional<std::vector<ConceptLine>> parse_concept_lines(std::string_view reply);

// Technical items (ids technical-1..k) in first-seen order, deduplicated by
// case-insensitive title and truncated to max_technical_items. A pass whose
// reply does not parse after two retries contributes nothing and logs a warning.
std::vector<OutlineItem> extract_concepts(const ClaimSet& claims, const OrchestratorConfig& cfg, DraftingContext& ctx);

// Retrieves reference material through a guarded query and has the model
// turn it into invention-aligned context. Degrades to claims-only context
// with a warning when retrieval is blocked or finds nothing.
OutlineItem enrich(const OutlineItem& item, const ClaimSet& claims, const OrchestratorConfig& cfg, DraftingContext& ctx);

Outline orchestrate(const ClaimSet& claims, const std::vector<FigureText>& figures, const OrchestratorConfig& cfg,
                    DraftingContext& ctx);

}  // namespace specforge
