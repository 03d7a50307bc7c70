#include "domain.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace specforge {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// "[0001]" style paragraph tags.
bool is_bracket_number(std::string_view token) {
  if (token.size() < 3 || token.front() != '[' || token.back() != ']') return false;
  return std::all_of(token.begin() + 1, token.end() - 1, is_digit);
}

std::string_view strip_punct(std::string_view token) {
  while (!token.empty() && is_punct(token.front())) token.remove_prefix(1);
  while (!token.empty() && is_punct(token.back())) token.remove_suffix(1);
  return token;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

bool is_markdown_header(std::string_view line) {
  std::string t = trim(line);
  return !t.empty() && t.front() == '#';
}

// Removes one leading list marker ("- ", "* ", "• ", "1. ", "2) ").
std::string_view strip_bullet(std::string_view line) {
  while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
  if (line.size() >= 2 && (line[0] == '-' || line[0] == '*' || line[0] == '+') && is_space(line[1])) {
    return line.substr(2);
  }
  if (line.rfind("\xE2\x80\xA2", 0) == 0) return line.substr(3);
  size_t digits = 0;
  while (digits < line.size() && is_digit(line[digits])) ++digits;
  if (digits > 0 && digits <= 3 && digits + 1 < line.size() && (line[digits] == '.' || line[digits] == ')') &&
      is_space(line[digits + 1])) {
    return line.substr(digits + 2);
  }
  return line;
}

}  // namespace

// ---------------------------------------------------------------------------
// ClaimSet

ClaimSet::ClaimSet(std::string source_id, std::vector<Claim> claims)
    : source_id_(std::move(source_id)), claims_(std::move(claims)) {
  if (claims_.empty()) fail(ErrorCode::InvalidInput, "claim set for '" + source_id_ + "' is empty");
  for (size_t i = 0; i < claims_.size(); ++i) {
    const int expected = static_cast<int>(i) + 1;
    if (claims_[i].number != expected) {
      fail(ErrorCode::InvalidInput, "claim numbers must run 1..n without gaps; expected " +
                                        std::to_string(expected) + ", got " + std::to_string(claims_[i].number));
    }
    if (trim(claims_[i].text).empty()) {
      fail(ErrorCode::InvalidInput, "claim " + std::to_string(expected) + " has blank text");
    }
  }
}

std::string ClaimSet::joined_text() const {
  std::string out;
  for (const auto& c : claims_) {
    out += std::to_string(c.number);
    out += ". ";
    out += trim(c.text);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Section names

std::string_view section_key(SectionName name) {
  switch (name) {
    case SectionName::Abstract: return "Abstract";
    case SectionName::Background: return "Background";
    case SectionName::Summary: return "Summary";
    case SectionName::BriefDescriptionOfDrawings: return "BriefDescriptionOfDrawings";
    case SectionName::DetailedDescription: return "DetailedDescription";
  }
  return "Unknown";
}

std::string_view section_heading(SectionName name) {
  switch (name) {
    case SectionName::Abstract: return "ABSTRACT";
    case SectionName::Background: return "BACKGROUND";
    case SectionName::Summary: return "SUMMARY";
    case SectionName::BriefDescriptionOfDrawings: return "BRIEF DESCRIPTION OF THE DRAWINGS";
    case SectionName::DetailedDescription: return "DETAILED DESCRIPTION";
  }
  return "UNKNOWN";
}

std::optional<SectionName> parse_section_key(std::string_view key) {
  const std::string lowered = to_lower(trim(key));
  for (SectionName s : kAllSections) {
    if (to_lower(section_key(s)) == lowered) return s;
  }
  return std::nullopt;
}

std::string_view item_kind_name(ItemKind kind) { return kind == ItemKind::Template ? "Template" : "Technical"; }

// ---------------------------------------------------------------------------
// Outline

std::string template_item_id(SectionName section) {
  return "template-" + to_lower(section_key(section));
}

OutlineItem OutlineItem::template_item(SectionName section) {
  OutlineItem item;
  item.id = template_item_id(section);
  item.kind = ItemKind::Template;
  item.title = std::string(section_key(section));
  item.needs_retrieval = false;
  item.section = section;
  return item;
}

OutlineItem OutlineItem::technical_item(std::string id, std::string title, std::string brief) {
  OutlineItem item;
  item.id = std::move(id);
  item.kind = ItemKind::Technical;
  item.title = std::move(title);
  item.brief = std::move(brief);
  item.needs_retrieval = true;
  return item;
}

void Outline::validate() const {
  std::set<std::string> ids;
  bool seen_technical = false;
  for (const auto& item : items) {
    if (!ids.insert(item.id).second) fail(ErrorCode::InvalidInput, "duplicate outline item id '" + item.id + "'");
    if (item.is_template()) {
      if (seen_technical) fail(ErrorCode::InvalidInput, "template item '" + item.id + "' follows a technical item");
      if (item.needs_retrieval || item.context) {
        fail(ErrorCode::InvalidInput, "template item '" + item.id + "' cannot carry retrieval state");
      }
      if (!item.section) fail(ErrorCode::InvalidInput, "template item '" + item.id + "' has no section");
    } else {
      seen_technical = true;
      if (item.needs_retrieval && item.context) {
        fail(ErrorCode::InvalidInput, "technical item '" + item.id + "' has context but still needs retrieval");
      }
    }
  }
  std::set<std::string> labels;
  for (const auto& f : figures) {
    if (!labels.insert(f.label).second) fail(ErrorCode::InvalidInput, "duplicate figure label '" + f.label + "'");
  }
}

size_t Outline::template_count() const {
  return static_cast<size_t>(std::count_if(items.begin(), items.end(), [](const auto& i) { return i.is_template(); }));
}

size_t Outline::technical_count() const { return items.size() - template_count(); }

const OutlineItem* Outline::find(std::string_view id) const {
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Specification

Specification::Specification(std::string source_id, std::vector<Section> sections)
    : source_id_(std::move(source_id)), sections_(std::move(sections)) {
  if (sections_.empty()) fail(ErrorCode::InvalidInput, "specification has no sections");
  for (size_t i = 0; i < sections_.size(); ++i) {
    const auto& s = sections_[i];
    if (i > 0 && static_cast<int>(sections_[i - 1].name) >= static_cast<int>(s.name)) {
      fail(ErrorCode::InvalidInput, "section " + std::string(section_key(s.name)) + " is out of order or repeated");
    }
    if (s.paragraphs.empty()) {
      fail(ErrorCode::InvalidInput, "section " + std::string(section_key(s.name)) + " has no paragraphs");
    }
    for (const auto& p : s.paragraphs) {
      if (trim(p.text).empty()) fail(ErrorCode::InvalidInput, "blank paragraph in " + std::string(section_key(s.name)));
      if (p.text.find('\n') != std::string::npos) {
        fail(ErrorCode::InvalidInput, "paragraph " + std::to_string(p.number) + " spans multiple lines");
      }
    }
  }
}

const Section* Specification::find(SectionName name) const {
  for (const auto& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

size_t Specification::paragraph_count() const {
  size_t n = 0;
  for (const auto& s : sections_) n += s.paragraphs.size();
  return n;
}

bool Specification::has_contiguous_numbering() const {
  int expected = 1;
  for (const auto& s : sections_) {
    for (const auto& p : s.paragraphs) {
      if (p.number != expected++) return false;
    }
  }
  return true;
}

std::vector<std::string> Specification::paragraph_texts() const {
  std::vector<std::string> out;
  for (const auto& s : sections_) {
    for (const auto& p : s.paragraphs) out.push_back(p.text);
  }
  return out;
}

Specification renumber(const Specification& spec) {
  std::vector<Section> sections = spec.sections();
  int next = 1;
  for (auto& s : sections) {
    for (auto& p : s.paragraphs) p.number = next++;
  }
  return Specification(spec.source_id(), std::move(sections));
}

std::string format_paragraph_tag(int number) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "[%04d]", number);
  return buf;
}

std::string render(const Specification& spec) {
  std::string out;
  bool first = true;
  for (const auto& s : spec.sections()) {
    if (!first) out += '\n';
    first = false;
    out += section_heading(s.name);
    out += '\n';
    for (const auto& p : s.paragraphs) {
      out += format_paragraph_tag(p.number);
      out += ' ';
      out += p.text;
      out += '\n';
    }
  }
  return out;
}

Specification parse_rendered(std::string_view text, std::string source_id) {
  std::vector<Section> sections;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::optional<SectionName> heading;
    for (SectionName s : kAllSections) {
      if (line == section_heading(s)) heading = s;
    }
    if (heading) {
      sections.push_back(Section{*heading, {}, template_item_id(*heading)});
      continue;
    }

    const size_t close = line.find(']');
    if (line.front() != '[' || close == std::string::npos || close + 1 >= line.size() || line[close + 1] != ' ' ||
        !is_bracket_number(std::string_view(line).substr(0, close + 1))) {
      fail(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": expected a section heading or [NNNN] paragraph");
    }
    if (sections.empty()) {
      fail(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": paragraph before any section heading");
    }
    const int number = std::stoi(line.substr(1, close - 1));
    sections.back().paragraphs.push_back(Paragraph{number, line.substr(close + 2)});
  }
  return Specification(std::move(source_id), std::move(sections));
}

void check_output_invariants(const Specification& spec, bool input_had_figures) {
  if (!spec.has_contiguous_numbering()) {
    fail(ErrorCode::InvalidInput, "paragraph numbers of '" + spec.source_id() + "' are not contiguous 1..N");
  }
  const bool has_drawings = spec.find(SectionName::BriefDescriptionOfDrawings) != nullptr;
  if (has_drawings != input_had_figures) {
    fail(ErrorCode::InvalidInput, input_had_figures ? "drawings section missing although the input has figures"
                                                    : "drawings section present although the input has no figures");
  }
}

// ---------------------------------------------------------------------------
// Text

TokenStream tokenize(std::string_view text) {
  TokenStream tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    size_t j = i;
    while (j < n && !is_space(text[j])) ++j;
    if (j > i) {
      std::string_view raw = text.substr(i, j - i);
      if (!is_bracket_number(raw)) {
        std::string_view core = strip_punct(raw);
        if (!core.empty()) tokens.push_back(to_lower(core));
      }
    }
    i = j;
  }
  return tokens;
}

std::string trim(std::string_view text) {
  size_t b = 0;
  size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string sanitize_paragraph(std::string_view text) {
  std::string joined;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (is_markdown_header(line)) continue;
    joined += strip_bullet(line);
    joined += ' ';
  }
  std::string cleaned;
  cleaned.reserve(joined.size());
  for (size_t i = 0; i < joined.size(); ++i) {
    if (joined.compare(i, 2, "**") == 0) {
      ++i;
      continue;
    }
    cleaned.push_back(joined[i]);
  }
  std::string out = collapse_whitespace(cleaned);
  // Leading "[0012]" tags echoed back by a model.
  while (!out.empty() && out.front() == '[') {
    const size_t close = out.find(']');
    if (close == std::string::npos || !is_bracket_number(std::string_view(out).substr(0, close + 1))) break;
    out = trim(std::string_view(out).substr(close + 1));
  }
  return out;
}

std::vector<std::string> split_paragraphs(std::string_view text) {
  std::vector<std::string> out;
  std::string block;
  auto flush = [&] {
    std::string p = sanitize_paragraph(block);
    if (!p.empty()) out.push_back(std::move(p));
    block.clear();
  };
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty() || is_markdown_header(line)) {
      flush();
      continue;
    }
    block += line;
    block += '\n';
  }
  flush();
  return out;
}

}  // namespace specforge
