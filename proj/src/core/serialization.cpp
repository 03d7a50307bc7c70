#include "serialization.hpp"

#include "errors.hpp"

namespace specforge {

namespace {

template <typename T>
T required(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::InvalidInput, where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::InvalidInput, where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

PatentDocument document_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, "document must be a JSON object");
  const auto source_id = required<std::string>(j, "source_id", "document");
  if (trim(source_id).empty()) fail(ErrorCode::InvalidInput, "document source_id is blank");
  const std::string where = "document '" + source_id + "'";

  const Json& claims_json = j.contains("claims") ? j["claims"] : Json();
  if (!claims_json.is_array()) fail(ErrorCode::InvalidInput, where + ": claims must be an array");
  std::vector<Claim> claims;
  for (const auto& c : claims_json) {
    claims.push_back(Claim{required<int>(c, "number", where + " claim"), required<std::string>(c, "text", where + " claim")});
  }

  std::vector<FigureText> figures;
  if (j.contains("figures") && !j["figures"].is_null()) {
    if (!j["figures"].is_array()) fail(ErrorCode::InvalidInput, where + ": figures must be an array");
    for (const auto& f : j["figures"]) {
      figures.push_back(FigureText{required<std::string>(f, "label", where + " figure"),
                                   f.contains("ocr_text") ? required<std::string>(f, "ocr_text", where + " figure") : ""});
    }
  }

  std::optional<Specification> gold;
  if (j.contains("gold_specification") && !j["gold_specification"].is_null()) {
    gold = specification_from_json(source_id, j["gold_specification"]);
  }
  return PatentDocument{ClaimSet(source_id, std::move(claims)), std::move(figures), std::move(gold)};
}

Json document_to_json(const PatentDocument& doc) {
  Json j;
  j["source_id"] = doc.source_id();
  j["claims"] = Json::array();
  for (const auto& c : doc.claims.claims()) j["claims"].push_back({{"number", c.number}, {"text", c.text}});
  j["figures"] = Json::array();
  for (const auto& f : doc.figures) j["figures"].push_back({{"label", f.label}, {"ocr_text", f.ocr_text}});
  if (doc.gold_specification) j["gold_specification"] = specification_to_json(*doc.gold_specification);
  return j;
}

std::vector<PatentDocument> documents_from_json(const Json& j) {
  std::vector<PatentDocument> docs;
  if (!j.is_array()) {
    docs.push_back(document_from_json(j));
    return docs;
  }
  for (size_t i = 0; i < j.size(); ++i) {
    try {
      docs.push_back(document_from_json(j[i]));
    } catch (const Error& e) {
      fail(e.code(), "entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return docs;
}

Json specification_to_json(const Specification& spec) {
  Json sections = Json::array();
  for (const auto& s : spec.sections()) {
    Json paras = Json::array();
    for (const auto& p : s.paragraphs) paras.push_back(p.text);
    sections.push_back({{"section", section_key(s.name)}, {"paragraphs", std::move(paras)}});
  }
  return sections;
}

Specification specification_from_json(const std::string& source_id, const Json& sections) {
  if (!sections.is_array()) fail(ErrorCode::InvalidInput, "specification must be an array of sections");
  std::vector<Section> out;
  for (const auto& s : sections) {
    const auto key = required<std::string>(s, "section", "specification");
    const auto name = parse_section_key(key);
    if (!name) fail(ErrorCode::InvalidInput, "unknown section '" + key + "'");
    Section sec;
    sec.name = *name;
    sec.origin_item = template_item_id(*name);
    for (const auto& p : required<std::vector<std::string>>(s, "paragraphs", "section " + key)) {
      sec.paragraphs.push_back(Paragraph{0, sanitize_paragraph(p)});
    }
    out.push_back(std::move(sec));
  }
  return renumber(Specification(source_id, std::move(out)));
}

Json outline_to_json(const Outline& outline) {
  Json items = Json::array();
  for (const auto& it : outline.items) {
    Json j = {{"id", it.id},
              {"kind", item_kind_name(it.kind)},
              {"title", it.title},
              {"brief", it.brief},
              {"needs_retrieval", it.needs_retrieval}};
    j["section"] = it.section ? Json(section_key(*it.section)) : Json();
    j["context"] = it.context ? Json(*it.context) : Json();
    items.push_back(std::move(j));
  }
  Json figures = Json::array();
  for (const auto& f : outline.figures) figures.push_back(f.label);
  return {{"source_id", outline.claims.source_id()}, {"figures", std::move(figures)}, {"items", std::move(items)}};
}

Json drafts_to_json(std::span<const DraftSection> drafts, std::span<const std::string> skipped) {
  Json list = Json::array();
  for (const auto& d : drafts) {
    list.push_back({{"origin_item", d.origin_item}, {"kind", item_kind_name(d.kind)}, {"paragraphs", d.paragraphs()}});
  }
  Json skip = Json::array();
  for (const auto& s : skipped) skip.push_back(s);
  return {{"drafts", std::move(list)}, {"skipped_items", std::move(skip)}};
}

Json decisions_to_json(std::span<const InsertionRecord> decisions) {
  Json list = Json::array();
  for (const auto& d : decisions) {
    list.push_back({{"item_id", d.item_id},
                    {"reasoning", d.reasoning},
                    {"insert_after", d.insert_after},
                    {"first_number", d.first_number},
                    {"paragraphs_inserted", d.paragraphs_inserted},
                    {"fallback", d.fallback}});
  }
  return list;
}

Json call_entry_to_json(const CallLogEntry& e) {
  return {{"sequence", e.sequence},       {"kind", e.kind},         {"tag", e.tag},
          {"status", e.status},           {"attempts", e.attempts}, {"system_prompt", e.system_prompt},
          {"user_prompt", e.user_prompt}, {"response", e.response}, {"timestamp", e.timestamp}};
}

Json query_entry_to_json(const QueryLogEntry& e) {
  return {{"source_id", e.source_id}, {"item_id", e.item_id}, {"query", e.query},
          {"outcome", e.outcome},     {"sent", e.sent},       {"timestamp", e.timestamp}};
}

Json report_to_json(const EvaluationReport& r) {
  Json j = {{"source_id", r.source_id}};
  j["similarity"] = r.similarity ? Json(*r.similarity) : Json();
  if (!r.similarity_error.empty()) j["similarity_error"] = r.similarity_error;
  j["profanity_count"] = r.profanity_count;
  j["ngd_generated"] = r.ngd_generated;
  j["ngd_reference"] = r.ngd_reference;
  j["diversity_difference"] = r.diversity_difference;
  return j;
}

EvaluationReport report_from_json(const Json& j) {
  EvaluationReport r;
  r.source_id = required<std::string>(j, "source_id", "report");
  if (j.contains("similarity") && !j["similarity"].is_null()) r.similarity = j["similarity"].get<double>();
  r.similarity_error = j.value("similarity_error", std::string());
  r.profanity_count = required<std::uint64_t>(j, "profanity_count", "report");
  r.ngd_generated = required<double>(j, "ngd_generated", "report");
  r.ngd_reference = required<double>(j, "ngd_reference", "report");
  r.diversity_difference = required<double>(j, "diversity_difference", "report");
  return r;
}

namespace {

Json summary_to_json(const MetricSummary& s) { return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}}; }

}  // namespace

Json aggregate_to_json(const AggregateReport& a) {
  return {{"pairs", a.pairs},
          {"similarity", summary_to_json(a.similarity)},
          {"profanity_count", summary_to_json(a.profanity)},
          {"ngd_generated", summary_to_json(a.ngd_generated)},
          {"ngd_reference", summary_to_json(a.ngd_reference)},
          {"diversity_difference", summary_to_json(a.diversity_difference)}};
}

Json score_table_to_json(const ScoreTable& table) {
  Json j = Json::object();
  for (const auto& [method, cats] : table) {
    Json row = Json::object();
    for (Category c : kAllCategories) {
      auto it = cats.find(c);
      if (it != cats.end()) row[std::string(category_name(c))] = summary_to_json(it->second);
    }
    j[method] = std::move(row);
  }
  return j;
}

Json win_loss_tie_to_json(const std::string& a, const std::string& b, const WinLossTie& w) {
  return {{"method_a", a},        {"method_b", b},          {"wins", w.wins},
          {"losses", w.losses},   {"ties", w.ties},         {"win_pct", w.win_pct()},
          {"loss_pct", w.loss_pct()}, {"tie_pct", w.tie_pct()}};
}

Json agreement_to_json(const AgreementOutcome& a) {
  if (!a.result) return {{"available", false}, {"reason", a.reason}};
  const auto& r = *a.result;
  return {{"available", true},
          {"kendall_tau", r.kendall_tau},
          {"p_value", r.p_value},
          {"weighted_kappa", r.weighted_kappa},
          {"weighting", kappa_weighting_name(r.weighting)},
          {"n_items", r.n_items},
          {"annotator_pairs", r.annotator_pairs}};
}

}  // namespace specforge
