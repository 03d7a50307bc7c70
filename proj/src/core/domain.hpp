#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specforge {

struct Claim {
  int number = 0;
  std::string text;
};

// The numbered claims of one application. Numbers run 1..n without gaps and
// every claim carries non-blank text; the constructor enforces both.
class ClaimSet {
 public:
  ClaimSet(std::string source_id, std::vector<Claim> claims);

  const std::string& source_id() const noexcept { return source_id_; }
  const std::vector<Claim>& claims() const noexcept { return claims_; }
  size_t size() const noexcept { return claims_.size(); }

  // All claim texts, each prefixed by its number, one claim per line.
  std::string joined_text() const;

 private:
  std::string source_id_;
  std::vector<Claim> claims_;
};

struct FigureText {
  std::string label;
  std::string ocr_text;
};

enum class SectionName { Abstract, Background, Summary, BriefDescriptionOfDrawings, DetailedDescription };

inline constexpr std::array<SectionName, 5> kAllSections = {
    SectionName::Abstract, SectionName::Background, SectionName::Summary,
    SectionName::BriefDescriptionOfDrawings, SectionName::DetailedDescription};

// "Abstract", "BriefDescriptionOfDrawings", ...
std::string_view section_key(SectionName name);
// "ABSTRACT", "BRIEF DESCRIPTION OF THE DRAWINGS", ...
std::string_view section_heading(SectionName name);
// Accepts the key form case-insensitively; nullopt for anything else.
std::optional<SectionName> parse_section_key(std::string_view key);

enum class ItemKind { Template, Technical };

std::string_view item_kind_name(ItemKind kind);

struct OutlineItem {
  std::string id;
  ItemKind kind = ItemKind::Template;
  std::string title;
  std::string brief;
  bool needs_retrieval = false;
  std::optional<std::string> context;
  // Set for template items only.
  std::optional<SectionName> section;

  static OutlineItem template_item(SectionName section);
  static OutlineItem technical_item(std::string id, std::string title, std::string brief);

  bool is_template() const noexcept { return kind == ItemKind::Template; }
  bool is_technical() const noexcept { return kind == ItemKind::Technical; }
};

// Id used for the template item (and the assembled section) of a section name.
std::string template_item_id(SectionName section);

struct Outline {
  std::vector<OutlineItem> items;
  ClaimSet claims;
  std::vector<FigureText> figures;

  // Template items precede technical items, ids are unique, per-kind field
  // rules hold. Throws InvalidInput on the first violation.
  void validate() const;

  size_t template_count() const;
  size_t technical_count() const;
  const OutlineItem* find(std::string_view id) const;
};

struct Paragraph {
  int number = 0;
  std::string text;

  bool operator==(const Paragraph&) const = default;
};

struct Section {
  SectionName name = SectionName::DetailedDescription;
  std::vector<Paragraph> paragraphs;
  std::string origin_item;

  bool operator==(const Section&) const = default;
};

// Ordered, numbered sections. Construction checks structure (section order,
// non-empty sections, single-line non-blank paragraphs); numbering is brought
// to 1..N by renumber().
class Specification {
 public:
  Specification(std::string source_id, std::vector<Section> sections);

  const std::string& source_id() const noexcept { return source_id_; }
  const std::vector<Section>& sections() const noexcept { return sections_; }

  const Section* find(SectionName name) const;
  size_t paragraph_count() const;
  bool has_contiguous_numbering() const;
  // Paragraph texts in reading order.
  std::vector<std::string> paragraph_texts() const;

  bool operator==(const Specification&) const = default;

 private:
  std::string source_id_;
  std::vector<Section> sections_;
};

Specification renumber(const Specification& spec);

// Plain-text rendering: heading line in capitals, then "[0001] text" lines;
// sections separated by a blank line.
std::string render(const Specification& spec);
std::string format_paragraph_tag(int number);

// Inverse of render(). Throws InvalidInput with a line number on malformed text.
Specification parse_rendered(std::string_view text, std::string source_id);

// Throws InvalidInput unless numbering is 1..N and the drawings section is
// present exactly when the input had figures.
void check_output_invariants(const Specification& spec, bool input_had_figures);

using TokenStream = std::vector<std::string>;

// Canonical tokenizer shared by every text metric and the privacy guard.
TokenStream tokenize(std::string_view text);

// Text helpers used when turning model output into paragraphs.
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
// Collapses whitespace and strips markdown headers, list bullets, emphasis
// markers and leading paragraph tags.
std::string sanitize_paragraph(std::string_view text);
// Splits on blank lines, dropping markdown header lines and empty blocks.
std::vector<std::string> split_paragraphs(std::string_view text);

struct PatentDocument {
  ClaimSet claims;
  std::vector<FigureText> figures;
  std::optional<Specification> gold_specification;

  const std::string& source_id() const noexcept { return claims.source_id(); }
};

}  // namespace specforge
