#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domain.hpp"
#include "drafting_context.hpp"

namespace specforge {

struct DraftSection {
  std::string origin_item;
  ItemKind kind = ItemKind::Template;
  // Sanitized paragraphs separated by blank lines.
  std::string text;

  std::vector<std::string> paragraphs() const { return split_paragraphs(text); }
};

struct GeneratorConfig {
  int abstract_max_tokens = 300;
  int template_max_tokens = 1200;
  int technical_max_tokens = 800;
  // Parallel workers for technical items (template items are always sequential).
  int concurrency = 1;
};

// "background", "brief_description_of_drawings", ...
std::string section_slug(SectionName name);

// Prompt block listing each figure label with its OCR text; empty without figures.
std::string figures_block(const std::vector<FigureText>& figures);

// One chat call tagged draft_<section>. Previously drafted template sections
// are included in the prompt. A blank reply is retried once, then DraftFailure.
DraftSection draft_template_item(const OutlineItem& item, const Outline& outline, std::span<const DraftSection> previous,
                                 const GeneratorConfig& cfg, DraftingContext& ctx);

// Elaborates a technical item against the finished template drafts. Returns
// nullopt (item skipped, warning logged) when the model stays blank after
// one retry. Throws InvalidInput if any template section is still missing.
std::optional<DraftSection> draft_technical_item(const OutlineItem& item, const Outline& outline,
                                                 std::span<const DraftSection> existing, const GeneratorConfig& cfg,
                                                 DraftingContext& ctx);

struct DraftResult {
  std::vector<DraftSection> sections;
  std::vector<std::string> skipped_items;
};

// All template items in outline order, then all technical items.
DraftResult draft_all(const Outline& outline, const GeneratorConfig& cfg, DraftingContext& ctx);

}  // namespace specforge
