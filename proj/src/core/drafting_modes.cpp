#include "drafting_modes.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace specforge {

namespace {

struct HeadingForm {
  std::string_view text;
  SectionName name;
};

// Longest forms first so "brief description of the drawings" wins over shorter prefixes.
constexpr HeadingForm kHeadingForms[] = {
    {"brief description of the drawings", SectionName::BriefDescriptionOfDrawings},
    {"brief description of drawings", SectionName::BriefDescriptionOfDrawings},
    {"detailed description", SectionName::DetailedDescription},
    {"background", SectionName::Background},
    {"abstract", SectionName::Abstract},
    {"summary", SectionName::Summary},
};

std::optional<SectionName> heading_of(std::string_view line) {
  std::string t = trim(line);
  while (!t.empty() && (t.front() == '#' || t.front() == '*' || t.front() == ' ')) t.erase(t.begin());
  if (t.empty() || t.size() > 60) return std::nullopt;
  const std::string lowered = to_lower(t);
  for (const auto& form : kHeadingForms) {
    if (lowered.rfind(form.text, 0) != 0) continue;
    // The rest of the line may only be a short qualifier ("of the invention") or punctuation.
    const std::string rest = trim(std::string_view(lowered).substr(form.text.size()));
    if (rest.empty() || rest.front() == ':' || rest.front() == '*' || rest.rfind("of the", 0) == 0) return form.name;
  }
  return std::nullopt;
}

std::string first_words(std::string_view text, size_t n) {
  std::istringstream in{std::string(text)};
  std::string w;
  std::string out;
  for (size_t i = 0; i < n && in >> w; ++i) out += (out.empty() ? "" : " ") + w;
  return out;
}

std::vector<Paragraph> as_paragraphs(std::vector<std::string> texts) {
  std::vector<Paragraph> out;
  for (auto& t : texts) out.push_back(Paragraph{0, std::move(t)});
  return out;
}

Section drawings_stub(const std::vector<FigureText>& figures) {
  Section s{SectionName::BriefDescriptionOfDrawings, {}, template_item_id(SectionName::BriefDescriptionOfDrawings)};
  for (const auto& f : figures) {
    const std::string ocr = sanitize_paragraph(f.ocr_text);
    s.paragraphs.push_back(Paragraph{0, f.label + " is a drawing of an embodiment of the disclosure" +
                                            (ocr.empty() ? std::string(".") : " showing " + first_words(ocr, 24) + ".")});
  }
  return s;
}

// Enforces "drawings iff figures" on baseline output and numbers the result.
Specification finalize(std::string source_id, std::vector<Section> sections, const std::vector<FigureText>& figures,
                       WarningLog& warnings) {
  std::erase_if(sections, [](const Section& s) { return s.paragraphs.empty(); });
  auto drawings = std::find_if(sections.begin(), sections.end(),
                               [](const Section& s) { return s.name == SectionName::BriefDescriptionOfDrawings; });
  if (figures.empty() && drawings != sections.end()) {
    warnings.add("drawings section produced for an input without figures; moved into the detailed description");
    std::vector<Paragraph> moved = std::move(drawings->paragraphs);
    sections.erase(drawings);
    auto dd = std::find_if(sections.begin(), sections.end(),
                           [](const Section& s) { return s.name == SectionName::DetailedDescription; });
    if (dd == sections.end()) {
      sections.push_back(Section{SectionName::DetailedDescription, {}, template_item_id(SectionName::DetailedDescription)});
      dd = std::prev(sections.end());
    }
    dd->paragraphs.insert(dd->paragraphs.begin(), moved.begin(), moved.end());
  } else if (!figures.empty() && drawings == sections.end()) {
    warnings.add("no drawings section produced although the input has figures; inserted figure stubs");
    sections.push_back(drawings_stub(figures));
  }
  std::sort(sections.begin(), sections.end(),
            [](const Section& a, const Section& b) { return static_cast<int>(a.name) < static_cast<int>(b.name); });
  if (sections.empty()) fail(ErrorCode::DraftFailure, "baseline produced no text");
  return renumber(Specification(std::move(source_id), std::move(sections)));
}

std::string chat_with_retry(DraftingContext& ctx, const std::string& tag, const std::string& prompt, int max_tokens) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      return ctx.chat(tag, prompt, max_tokens);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ResponseEmpty) throw;
    }
  }
  return {};
}

DraftOutcome single_gen(const PatentDocument& doc, const PipelineConfig& cfg, DraftingContext& ctx) {
  const std::string prompt = ctx.prompts.render(
      "baseline_single_gen", {{"claims", doc.claims.joined_text()},
                              {"figures", figures_block(doc.figures)},
                              {"drawings_heading", doc.figures.empty() ? "" : "BRIEF DESCRIPTION OF THE DRAWINGS, "}});
  const std::string reply = ctx.chat("single_gen", prompt, cfg.baseline.single_gen_max_tokens);
  std::vector<Section> sections = split_by_headings(reply);
  if (sections.empty()) {
    ctx.warnings.add("single-gen output had no recognizable section headings; kept as one detailed description");
    Section dd{SectionName::DetailedDescription, as_paragraphs(split_paragraphs(reply)),
               template_item_id(SectionName::DetailedDescription)};
    sections.push_back(std::move(dd));
  }
  return DraftOutcome{finalize(doc.source_id(), std::move(sections), doc.figures, ctx.warnings), {}};
}

DraftOutcome multi_gen(const PatentDocument& doc, const PipelineConfig& cfg, DraftingContext& ctx) {
  const Outline outline = build_template(doc.claims, doc.figures, cfg.orchestrator);
  std::vector<Section> sections;
  std::string previous;
  PipelineTrace trace;
  for (const auto& item : outline.items) {
    const SectionName name = *item.section;
    const std::string prompt = ctx.prompts.render(
        "baseline_multi_gen", {{"section", std::string(section_heading(name))},
                               {"claims", doc.claims.joined_text()},
                               {"figures", figures_block(doc.figures)},
                               {"previous", previous.empty() ? "(none)" : previous}});
    std::vector<std::string> paragraphs =
        split_paragraphs(chat_with_retry(ctx, "multi_gen:" + section_slug(name), prompt, cfg.baseline.multi_gen_max_tokens));
    if (paragraphs.empty()) {
      fail(ErrorCode::DraftFailure, "multi-gen section " + std::string(section_key(name)) + " came back empty twice");
    }
    std::string text;
    for (const auto& p : paragraphs) text += (text.empty() ? "" : "\n\n") + p;
    previous += (previous.empty() ? "" : "\n\n") + std::string(section_heading(name)) + "\n" + text;
    trace.drafts.push_back(DraftSection{item.id, ItemKind::Template, text});
    sections.push_back(Section{name, as_paragraphs(std::move(paragraphs)), item.id});
  }
  trace.outline = outline;
  return DraftOutcome{finalize(doc.source_id(), std::move(sections), doc.figures, ctx.warnings), std::move(trace)};
}

DraftOutcome claim_iterative(const PatentDocument& doc, const PipelineConfig& cfg, DraftingContext& ctx) {
  std::vector<std::string> body;
  std::string previous;
  for (const auto& claim : doc.claims.claims()) {
    const std::string prompt = ctx.prompts.render(
        "baseline_claim_iterative", {{"claim", trim(claim.text)}, {"previous", previous.empty() ? "(none)" : previous}});
    std::vector<std::string> paragraphs = split_paragraphs(chat_with_retry(
        ctx, "claim_iterative:" + std::to_string(claim.number), prompt, cfg.baseline.claim_iterative_max_tokens));
    if (paragraphs.empty()) {
      ctx.warnings.add("claim-iterative: no paragraph produced for claim " + std::to_string(claim.number));
      continue;
    }
    previous = paragraphs.back();
    for (auto& p : paragraphs) body.push_back(std::move(p));
  }
  if (body.empty()) fail(ErrorCode::DraftFailure, "claim-iterative produced no paragraphs");

  const std::string lead = sanitize_paragraph(doc.claims.claims().front().text);
  std::vector<Section> sections;
  sections.push_back(Section{SectionName::Abstract, {{0, "Disclosed is " + first_words(lead, 40) + "."}},
                             template_item_id(SectionName::Abstract)});
  sections.push_back(Section{SectionName::Background,
                             {{0, "The present disclosure relates to " + first_words(lead, 12) + "."}},
                             template_item_id(SectionName::Background)});
  sections.push_back(Section{SectionName::Summary,
                             {{0, "Embodiments of the disclosure are described in detail below."}},
                             template_item_id(SectionName::Summary)});
  if (!doc.figures.empty()) sections.push_back(drawings_stub(doc.figures));
  sections.push_back(Section{SectionName::DetailedDescription, as_paragraphs(std::move(body)),
                             template_item_id(SectionName::DetailedDescription)});
  return DraftOutcome{finalize(doc.source_id(), std::move(sections), doc.figures, ctx.warnings), {}};
}

}  // namespace

std::string_view mode_name(ModeId mode) {
  switch (mode) {
    case ModeId::AutoSpecFull: return "autospec-full";
    case ModeId::AutoSpecTemplate: return "autospec-template";
    case ModeId::SingleGen: return "single-gen";
    case ModeId::MultiGen: return "multi-gen";
    case ModeId::ClaimIterative: return "claim-iterative";
  }
  return "unknown";
}

std::optional<ModeId> parse_mode(std::string_view name) {
  for (ModeId m : {ModeId::AutoSpecFull, ModeId::AutoSpecTemplate, ModeId::SingleGen, ModeId::MultiGen,
                   ModeId::ClaimIterative}) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Section> split_by_headings(std::string_view text) {
  std::map<SectionName, std::string> bodies;
  std::optional<SectionName> current;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = heading_of(line)) {
      current = h;
      bodies.try_emplace(*h);
      continue;
    }
    if (current) bodies[*current] += line + "\n";
  }
  std::vector<Section> out;
  for (auto& [name, body] : bodies) {
    out.push_back(Section{name, as_paragraphs(split_paragraphs(body)), template_item_id(name)});
  }
  return out;
}

DraftOutcome run_pipeline(const PatentDocument& doc, const PipelineConfig& cfg, DraftingContext& ctx) {
  PipelineTrace trace;
  Outline outline = orchestrate(doc.claims, doc.figures, cfg.orchestrator, ctx);
  DraftResult drafted = draft_all(outline, cfg.generator, ctx);
  MergeResult merged = merge_all(outline, drafted.sections, cfg.merger, ctx);
  trace.outline = std::move(outline);
  trace.drafts = std::move(drafted.sections);
  trace.skipped_items = std::move(drafted.skipped_items);
  trace.decisions = std::move(merged.decisions);
  return DraftOutcome{std::move(merged.spec), std::move(trace)};
}

DraftOutcome draft(ModeId mode, const PatentDocument& doc, const PipelineConfig& cfg, DraftingContext& ctx) {
  DraftOutcome out = [&] {
    switch (mode) {
      case ModeId::AutoSpecFull:
      case ModeId::AutoSpecTemplate: {
        PipelineConfig pc = cfg;
        pc.orchestrator.template_only = cfg.orchestrator.template_only || mode == ModeId::AutoSpecTemplate;
        return run_pipeline(doc, pc, ctx);
      }
      case ModeId::SingleGen: return single_gen(doc, cfg, ctx);
      case ModeId::MultiGen: return multi_gen(doc, cfg, ctx);
      case ModeId::ClaimIterative: return claim_iterative(doc, cfg, ctx);
    }
    fail(ErrorCode::InvalidInput, "unknown drafting mode");
  }();
  check_output_invariants(out.spec, !doc.figures.empty());
  return out;
}

}  // namespace specforge
