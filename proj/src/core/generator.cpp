#include "generator.hpp"

#include <algorithm>

#include "errors.hpp"
#include "parallel.hpp"

namespace specforge {

namespace {

std::string join_paragraphs(const std::vector<std::string>& paragraphs) {
  std::string out;
  for (const auto& p : paragraphs) {
    if (!out.empty()) out += "\n\n";
    out += p;
  }
  return out;
}

// One chat call plus one retry on a blank (or blank-after-cleanup) reply.
std::optional<std::string> draft_with_retry(DraftingContext& ctx, const std::string& tag, const std::string& prompt,
                                            int max_tokens) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      std::string text = join_paragraphs(split_paragraphs(ctx.chat(tag, prompt, max_tokens)));
      if (!text.empty()) return text;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ResponseEmpty) throw;
    }
  }
  return std::nullopt;
}

std::string drafted_sections_block(const Outline& outline, std::span<const DraftSection> drafts) {
  std::string out;
  for (SectionName name : kAllSections) {
    for (const auto& d : drafts) {
      const OutlineItem* item = outline.find(d.origin_item);
      if (d.kind != ItemKind::Template || item == nullptr || item->section != name) continue;
      out += std::string(section_heading(name)) + "\n" + d.text + "\n\n";
    }
  }
  return trim(out);
}

}  // namespace

std::string section_slug(SectionName name) {
  switch (name) {
    case SectionName::Abstract: return "abstract";
    case SectionName::Background: return "background";
    case SectionName::Summary: return "summary";
    case SectionName::BriefDescriptionOfDrawings: return "brief_description_of_drawings";
    case SectionName::DetailedDescription: return "detailed_description";
  }
  return "unknown";
}

std::string figures_block(const std::vector<FigureText>& figures) {
  if (figures.empty()) return "";
  std::string out = "FIGURES:\n";
  for (const auto& f : figures) {
    out += f.label + ": " + (trim(f.ocr_text).empty() ? std::string("(no extracted text)") : trim(f.ocr_text)) + "\n";
  }
  return out;
}

DraftSection draft_template_item(const OutlineItem& item, const Outline& outline, std::span<const DraftSection> previous,
                                 const GeneratorConfig& cfg, DraftingContext& ctx) {
  if (!item.is_template() || !item.section) {
    fail(ErrorCode::InvalidInput, "draft_template_item expects a template item, got '" + item.id + "'");
  }
  const SectionName section = *item.section;
  const std::string slug = section_slug(section);
  const std::string earlier = drafted_sections_block(outline, previous);
  const std::string prompt = ctx.prompts.render(
      "section_" + slug, {{"claims", outline.claims.joined_text()},
                          {"figures", figures_block(outline.figures)},
                          {"previous_sections", earlier.empty() ? "" : "SECTIONS DRAFTED SO FAR:\n" + earlier}});
  const int budget = section == SectionName::Abstract ? cfg.abstract_max_tokens : cfg.template_max_tokens;
  auto text = draft_with_retry(ctx, "draft_" + slug, prompt, budget);
  if (!text) fail(ErrorCode::DraftFailure, "template section " + std::string(section_key(section)) + " came back empty twice");
  return DraftSection{item.id, ItemKind::Template, std::move(*text)};
}

std::optional<DraftSection> draft_technical_item(const OutlineItem& item, const Outline& outline,
                                                 std::span<const DraftSection> existing, const GeneratorConfig& cfg,
                                                 DraftingContext& ctx) {
  if (!item.is_technical()) {
    fail(ErrorCode::InvalidInput, "draft_technical_item expects a technical item, got '" + item.id + "'");
  }
  for (const auto& t : outline.items) {
    if (!t.is_template()) continue;
    const bool drafted = std::any_of(existing.begin(), existing.end(), [&](const DraftSection& d) {
      return d.kind == ItemKind::Template && d.origin_item == t.id;
    });
    if (!drafted) {
      fail(ErrorCode::InvalidInput, "technical item '" + item.id + "' drafted before template item '" + t.id + "'");
    }
  }
  const std::string prompt = ctx.prompts.render(
      "technical_item", {{"title", item.title},
                         {"brief", item.brief.empty() ? "(none)" : item.brief},
                         {"context", item.context ? *item.context : "(none)"},
                         {"claims", outline.claims.joined_text()},
                         {"existing", drafted_sections_block(outline, existing)}});
  auto text = draft_with_retry(ctx, "draft_technical:" + item.id, prompt, cfg.technical_max_tokens);
  if (!text) {
    ctx.warnings.add("SkipItem: technical item '" + item.id + "' (" + item.title + ") came back empty twice");
    return std::nullopt;
  }
  return DraftSection{item.id, ItemKind::Technical, std::move(*text)};
}

DraftResult draft_all(const Outline& outline, const GeneratorConfig& cfg, DraftingContext& ctx) {
  outline.validate();
  DraftResult result;
  for (const auto& item : outline.items) {
    if (!item.is_template()) continue;
    result.sections.push_back(draft_template_item(item, outline, result.sections, cfg, ctx));
  }

  std::vector<const OutlineItem*> technical;
  for (const auto& item : outline.items) {
    if (item.is_technical()) technical.push_back(&item);
  }
  const std::vector<DraftSection> frozen = result.sections;
  std::vector<std::optional<DraftSection>> drafted(technical.size());
  parallel_for(technical.size(), cfg.concurrency,
               [&](size_t i) { drafted[i] = draft_technical_item(*technical[i], outline, frozen, cfg, ctx); });
  for (size_t i = 0; i < technical.size(); ++i) {
    if (drafted[i]) {
      result.sections.push_back(std::move(*drafted[i]));
    } else {
      result.skipped_items.push_back(technical[i]->id);
    }
  }
  return result;
}

}  // namespace specforge
