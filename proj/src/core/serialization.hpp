#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "annotation_stats.hpp"
#include "domain.hpp"
#include "drafting_modes.hpp"
#include "evaluator.hpp"
#include "llm_gateway.hpp"
#include "retrieval.hpp"

namespace specforge {

using Json = nlohmann::ordered_json;

// Input document:
//   {"source_id": str,
//    "claims": [{"number": int, "text": str}, ...],
//    "figures": [{"label": str, "ocr_text": str}, ...],           optional
//    "gold_specification": [{"section": <SectionName key>,         optional
//                            "paragraphs": [str, ...]}, ...]}
// Gold paragraphs are numbered 1..N in reading order.
PatentDocument document_from_json(const Json& j);
Json document_to_json(const PatentDocument& doc);
// A single object or an array of them. Throws InvalidInput with the index of
// the offending entry.
std::vector<PatentDocument> documents_from_json(const Json& j);

Json specification_to_json(const Specification& spec);
Specification specification_from_json(const std::string& source_id, const Json& sections);

Json outline_to_json(const Outline& outline);
Json drafts_to_json(std::span<const DraftSection> drafts, std::span<const std::string> skipped);
Json decisions_to_json(std::span<const InsertionRecord> decisions);
Json call_entry_to_json(const CallLogEntry& e);
Json query_entry_to_json(const QueryLogEntry& e);

Json report_to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const Json& j);
Json aggregate_to_json(const AggregateReport& a);

Json score_table_to_json(const ScoreTable& table);
Json win_loss_tie_to_json(const std::string& a, const std::string& b, const WinLossTie& w);
Json agreement_to_json(const AgreementOutcome& a);

// One compact JSON object per line.
template <typename T, typename Fn>
std::string to_jsonl(std::span<const T> items, Fn&& convert) {
  std::string out;
  for (const auto& item : items) {
    out += convert(item).dump();
    out += '\n';
  }
  return out;
}

}  // namespace specforge
