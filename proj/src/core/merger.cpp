#include "merger.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "errors.hpp"

namespace specforge {

namespace {

bool starts_with_ci(std::string_view line, std::string_view prefix) {
  if (line.size() < prefix.size()) return false;
  return to_lower(line.substr(0, prefix.size())) == to_lower(prefix);
}

std::optional<int> parse_position(std::string_view raw) {
  std::string t = trim(raw);
  if (!t.empty() && t.front() == '[') t.erase(t.begin());
  if (!t.empty() && t.back() == ']') t.pop_back();
  t = trim(t);
  if (t.empty() || t.size() > 9 || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::nullopt;
  }
  return std::stoi(t);
}

std::string numbered_listing(const Section& section) {
  std::string out;
  for (const auto& p : section.paragraphs) out += format_paragraph_tag(p.number) + " " + p.text + "\n";
  return out;
}

}  // namespace

std::optional<InsertionDecision> parse_insertion_decision(std::string_view reply) {
  std::optional<std::string> reasoning;
  std::optional<int> position;
  std::optional<std::string> revised;
  std::istringstream in{std::string(reply)};
  std::string line;
  while (std::getline(in, line)) {
    if (revised) {
      *revised += "\n" + line;
      continue;
    }
    const std::string t = trim(line);
    if (starts_with_ci(t, "REASONING:")) {
      reasoning = trim(t.substr(10));
    } else if (starts_with_ci(t, "INSERT_AFTER:")) {
      position = parse_position(t.substr(13));
      if (!position) return std::nullopt;
    } else if (starts_with_ci(t, "REVISED:")) {
      revised = t.substr(8);
    }
  }
  if (!reasoning || !position || !revised) return std::nullopt;
  std::vector<std::string> paragraphs = split_paragraphs(*revised);
  if (paragraphs.empty()) return std::nullopt;
  std::string text;
  for (const auto& p : paragraphs) text += (text.empty() ? "" : "\n\n") + p;
  return InsertionDecision{*reasoning, *position, std::move(text)};
}

Specification assemble_template(std::span<const DraftSection> sections, const Outline& outline) {
  std::vector<Section> assembled;
  for (SectionName name : kAllSections) {
    for (const auto& item : outline.items) {
      if (!item.is_template() || item.section != name) continue;
      auto draft = std::find_if(sections.begin(), sections.end(), [&](const DraftSection& d) {
        return d.kind == ItemKind::Template && d.origin_item == item.id;
      });
      if (draft == sections.end()) {
        fail(ErrorCode::MissingSection, "no draft for template section " + std::string(section_key(name)));
      }
      Section s{name, {}, item.id};
      for (auto& p : draft->paragraphs()) s.paragraphs.push_back(Paragraph{0, std::move(p)});
      if (s.paragraphs.empty()) {
        fail(ErrorCode::MissingSection, "draft for " + std::string(section_key(name)) + " has no paragraphs");
      }
      assembled.push_back(std::move(s));
    }
  }
  if (assembled.empty()) fail(ErrorCode::MissingSection, "outline has no template sections");
  return renumber(Specification(outline.claims.source_id(), std::move(assembled)));
}

Specification splice_technical(const Specification& spec, const DraftSection& section, const MergerConfig& cfg,
                               DraftingContext& ctx, InsertionRecord* record) {
  if (section.kind != ItemKind::Technical) {
    fail(ErrorCode::InvalidInput, "splice_technical expects a technical draft, got '" + section.origin_item + "'");
  }
  std::vector<Section> sections = spec.sections();
  auto dd = std::find_if(sections.begin(), sections.end(),
                         [](const Section& s) { return s.name == SectionName::DetailedDescription; });
  if (dd == sections.end()) {
    // Detailed description sorts last, so a fresh one is appended.
    sections.push_back(Section{SectionName::DetailedDescription, {}, template_item_id(SectionName::DetailedDescription)});
    dd = std::prev(sections.end());
  }
  const int max_number = static_cast<int>(spec.paragraph_count());
  const int first_dd = dd->paragraphs.empty() ? max_number + 1 : dd->paragraphs.front().number;

  InsertionRecord rec;
  rec.item_id = section.origin_item;
  std::optional<InsertionDecision> decision;
  if (!dd->paragraphs.empty()) {
    const std::string prompt = ctx.prompts.render(
        "splice", {{"detailed_description", numbered_listing(*dd)}, {"material", section.text}});
    for (int attempt = 0; attempt < 3 && !decision; ++attempt) {
      try {
        decision = parse_insertion_decision(ctx.chat("splice:" + section.origin_item, prompt, cfg.splice_max_tokens));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ResponseEmpty) throw;
      }
      if (decision && decision->insert_after > max_number) decision.reset();
    }
  }

  std::vector<std::string> inserted;
  size_t offset = 0;  // index within the detailed description
  if (decision) {
    rec.reasoning = decision->reasoning;
    rec.insert_after = decision->insert_after < first_dd ? 0 : decision->insert_after;
    offset = rec.insert_after == 0 ? 0 : static_cast<size_t>(rec.insert_after - first_dd + 1);
    inserted = split_paragraphs(decision->revised_text);
  } else {
    ctx.warnings.add("splice of '" + section.origin_item +
                     "' fell back to appending the unrevised text after 2 retries");
    rec.fallback = true;
    rec.insert_after = dd->paragraphs.empty() ? 0 : dd->paragraphs.back().number;
    offset = dd->paragraphs.size();
    inserted = section.paragraphs();
  }

  std::vector<Paragraph> fresh;
  for (auto& p : inserted) fresh.push_back(Paragraph{0, std::move(p)});
  dd->paragraphs.insert(dd->paragraphs.begin() + static_cast<std::ptrdiff_t>(offset), fresh.begin(), fresh.end());

  Specification out = renumber(Specification(spec.source_id(), std::move(sections)));
  rec.paragraphs_inserted = fresh.size();
  const Section* out_dd = out.find(SectionName::DetailedDescription);
  rec.first_number = fresh.empty() ? 0 : out_dd->paragraphs[offset].number;
  if (record) *record = rec;
  return out;
}

MergeResult merge_all(const Outline& outline, std::span<const DraftSection> drafts, const MergerConfig& cfg,
                      DraftingContext& ctx) {
  MergeResult result{assemble_template(drafts, outline), {}};
  for (const auto& item : outline.items) {
    if (!item.is_technical()) continue;
    for (const auto& d : drafts) {
      if (d.kind != ItemKind::Technical || d.origin_item != item.id) continue;
      InsertionRecord rec;
      result.spec = splice_technical(result.spec, d, cfg, ctx, &rec);
      result.decisions.push_back(std::move(rec));
    }
  }
  return result;
}

}  // namespace specforge
