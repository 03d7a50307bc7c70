#include "orchestrator.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"

namespace specforge {

namespace {

std::string first_words(std::string_view text, int max_words) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::string out;
  int n = 0;
  while (in >> word && n < max_words) {
    if (!out.empty()) out += ' ';
    out += word;
    ++n;
  }
  return out;
}

std::string strip_decoration(std::string_view text) {
  std::string t = trim(text);
  auto decoration = [](char c) { return c == '*' || c == '"' || c == '`' || c == '\''; };
  while (!t.empty() && decoration(t.front())) t.erase(t.begin());
  while (!t.empty() && decoration(t.back())) t.pop_back();
  return trim(t);
}

// Claims grouped in order so that each group stays under the token threshold;
// a single oversized claim forms its own group.
std::vector<std::string> claim_chunks(const ClaimSet& claims, size_t threshold) {
  std::vector<std::string> chunks;
  std::string current;
  size_t current_tokens = 0;
  for (const auto& c : claims.claims()) {
    const size_t n = tokenize(c.text).size();
    if (!current.empty() && current_tokens + n > threshold) {
      chunks.push_back(std::move(current));
      current.clear();
      current_tokens = 0;
    }
    current += std::to_string(c.number) + ". " + trim(c.text) + "\n";
    current_tokens += n;
  }
  if (!current.empty()) chunks.push_back(std::move(current));
  return chunks;
}

}  // namespace

void OrchestratorConfig::validate() const {
  if (max_technical_items <= 0) fail(ErrorCode::InvalidInput, "max_technical_items must be positive");
  if (multipass_threshold_tokens <= 0) fail(ErrorCode::InvalidInput, "multipass_threshold_tokens must be positive");
  if (template_plan.empty()) fail(ErrorCode::InvalidInput, "template_plan is empty");
  std::set<SectionName> seen(template_plan.begin(), template_plan.end());
  if (seen.size() != template_plan.size()) fail(ErrorCode::InvalidInput, "template_plan lists a section twice");
  if (max_brief_tokens <= 0) fail(ErrorCode::InvalidInput, "max_brief_tokens must be positive");
}

Outline build_template(const ClaimSet& claims, const std::vector<FigureText>& figures, const OrchestratorConfig& cfg) {
  cfg.validate();
  Outline outline{{}, claims, figures};
  for (SectionName s : cfg.template_plan) {
    if (s == SectionName::BriefDescriptionOfDrawings && figures.empty()) continue;
    outline.items.push_back(OutlineItem::template_item(s));
  }
  outline.validate();
  return outline;
}

std::optional<std::vector<ConceptLine>> parse_concept_lines(std::string_view reply) {
  std::vector<ConceptLine> out;
  std::istringstream in{std::string(reply)};
  std::string line;
  while (std::getline(in, line)) {
    const size_t delim = line.find("::");
    if (delim == std::string::npos) continue;
    std::string title = strip_decoration(sanitize_paragraph(line.substr(0, delim)));
    std::string brief = strip_decoration(line.substr(delim + 2));
    if (title.empty()) continue;
    out.push_back(ConceptLine{std::move(title), std::move(brief)});
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::vector<OutlineItem> extract_concepts(const ClaimSet& claims, const OrchestratorConfig& cfg, DraftingContext& ctx) {
  cfg.validate();
  const size_t total_tokens = tokenize(claims.joined_text()).size();
  std::vector<std::string> chunks;
  if (total_tokens > static_cast<size_t>(cfg.multipass_threshold_tokens)) {
    chunks = claim_chunks(claims, static_cast<size_t>(cfg.multipass_threshold_tokens));
  } else {
    chunks.push_back(claims.joined_text());
  }

  std::vector<ConceptLine> found;
  std::set<std::string> seen_titles;
  for (size_t pass = 0; pass < chunks.size(); ++pass) {
    const std::string tag = chunks.size() == 1 ? "extract_concepts" : "extract_concepts:pass-" + std::to_string(pass + 1);
    const std::string prompt = ctx.prompts.render(
        "extract_concepts", {{"claims", chunks[pass]}, {"max_items", std::to_string(cfg.max_technical_items)}});
    std::optional<std::vector<ConceptLine>> parsed;
    for (int attempt = 0; attempt < 3 && !parsed; ++attempt) {
      try {
        parsed = parse_concept_lines(ctx.chat(tag, prompt, cfg.extract_max_output_tokens));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ResponseEmpty) throw;
      }
    }
    if (!parsed) {
      ctx.warnings.add("ParseFailure: concept extraction (" + tag + ") produced no TITLE :: BRIEF lines after 2 retries");
      continue;
    }
    for (auto& c : *parsed) {
      if (seen_titles.insert(to_lower(c.title)).second) found.push_back(std::move(c));
    }
  }
  if (found.empty()) ctx.warnings.add("no technical concepts extracted; outline is template-only");

  std::vector<OutlineItem> items;
  for (auto& c : found) {
    if (items.size() == static_cast<size_t>(cfg.max_technical_items)) break;
    items.push_back(OutlineItem::technical_item("technical-" + std::to_string(items.size() + 1), c.title,
                                                first_words(c.brief, cfg.max_brief_tokens)));
  }
  return items;
}

OutlineItem enrich(const OutlineItem& item, const ClaimSet& claims, const OrchestratorConfig& cfg, DraftingContext& ctx) {
  if (!item.is_technical() || !item.needs_retrieval) {
    fail(ErrorCode::InvalidInput, "enrich expects a technical item awaiting retrieval, got '" + item.id + "'");
  }

  std::optional<RetrievedDoc> doc;
  if (ctx.retriever == nullptr) {
    ctx.warnings.add(item.id + ": retrieval disabled; context drawn from the claims alone");
  } else {
    auto attempt = [&](const SearchQuery& query) -> std::optional<ErrorCode> {
      try {
        doc = ctx.retriever->retrieve(query, claims, item.id);
        return std::nullopt;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PrivacyViolation && e.code() != ErrorCode::NoResults &&
            e.code() != ErrorCode::BackendUnavailable) {
          throw;
        }
        return e.code();
      }
    };
    // Title + brief first; the title alone if that overlaps the claims.
    std::optional<ErrorCode> failure = attempt({item.title, item.brief});
    if (failure == ErrorCode::PrivacyViolation && !trim(item.brief).empty()) failure = attempt({item.title, ""});
    if (failure) {
      ctx.warnings.add(item.id + ": retrieval skipped (" + std::string(error_code_name(*failure)) +
                       "); context drawn from the claims alone");
    }
  }

  const std::string reference =
      doc ? "Source: " + doc->url_or_path + "\n" + doc->snippet
          : std::string("No reference material was retrieved. Rely on the claims and general technical knowledge.");
  const std::string prompt = ctx.prompts.render(
      "contextualize",
      {{"title", item.title}, {"brief", item.brief}, {"reference", reference}, {"claims", claims.joined_text()}});

  OutlineItem out = item;
  out.needs_retrieval = false;
  try {
    const std::string context = trim(ctx.chat("contextualize:" + item.id, prompt, cfg.contextualize_max_output_tokens));
    out.context = context;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ResponseEmpty) throw;
    ctx.warnings.add(item.id + ": contextualization returned nothing; item drafted without context");
  }
  return out;
}

Outline orchestrate(const ClaimSet& claims, const std::vector<FigureText>& figures, const OrchestratorConfig& cfg,
                    DraftingContext& ctx) {
  Outline outline = build_template(claims, figures, cfg);
  if (cfg.template_only) return outline;

  std::vector<OutlineItem> technical = extract_concepts(claims, cfg, ctx);
  parallel_for(technical.size(), cfg.concurrency,
               [&](size_t i) { technical[i] = enrich(technical[i], claims, cfg, ctx); });
  for (auto& item : technical) outline.items.push_back(std::move(item));
  outline.validate();
  return outline;
}

}  // namespace specforge
