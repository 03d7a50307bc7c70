#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domain.hpp"
#include "drafting_context.hpp"
#include "generator.hpp"

namespace specforge {

// Parsed splice reply:
//   REASONING: <text>
//   INSERT_AFTER: [NNNN]
//   REVISED: <text, may continue over following lines>
struct InsertionDecision {
  std::string reasoning;
  int insert_after = 0;
  std::string revised_text;
};

// nullopt unless all three fields are present, the position is a
// non-negative integer and the revised text is non-blank.
std::optional<InsertionDecision> parse_insertion_decision(std::string_view reply);

struct InsertionRecord {
  std::string item_id;
  std::string reasoning;
  // Position requested by the model (after clamping), 0 = start of the detailed description.
  int insert_after = 0;
  // Number of the first inserted paragraph after renumbering.
  int first_number = 0;
  size_t paragraphs_inserted = 0;
  bool fallback = false;
};

struct MergerConfig {
  int splice_max_tokens = 1200;
};

// Concatenates template drafts in canonical section order, splits them into
// paragraphs and numbers them 1..N. Throws MissingSection when a template
// item of the outline has no draft.
Specification assemble_template(std::span<const DraftSection> sections, const Outline& outline);

// Inserts one technical draft into the detailed description where the model
// says it belongs. Positions that point before the detailed description are
// moved to its start; malformed or out-of-range replies are retried twice and
// then the unrevised text is appended at the end with a warning.
Specification splice_technical(const Specification& spec, const DraftSection& section, const MergerConfig& cfg,
                               DraftingContext& ctx, InsertionRecord* record = nullptr);

struct MergeResult {
  Specification spec;
  std::vector<InsertionRecord> decisions;
};

// assemble_template, then one sequential splice per technical draft in order.
MergeResult merge_all(const Outline& outline, std::span<const DraftSection> drafts, const MergerConfig& cfg,
                      DraftingContext& ctx);

}  // namespace specforge
