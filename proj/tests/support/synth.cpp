#include "synth.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>

namespace sftest {

using namespace specforge;

namespace {

const std::vector<std::string>& lexicon_words() {
  static const std::vector<std::string> words = {
      "housing",   "rotor",     "sensor",   "controller", "valve",   "spring",    "signal",   "circuit",
      "module",    "bracket",   "channel",  "membrane",   "filter",  "electrode", "substrate", "coil",
      "actuator",  "chamber",   "piston",   "gear",       "shaft",   "bearing",   "lens",     "emitter",
      "receiver",  "antenna",   "battery",  "cell",       "layer",   "coating",   "polymer",  "frame",
      "wheel",     "axle",      "pump",     "nozzle",     "outlet",  "inlet",     "port",     "switch",
      "register",  "buffer",    "memory",   "processor",  "network", "packet",    "node",     "server",
      "threshold", "voltage",   "current",  "frequency",  "phase",   "pulse",     "sample",   "estimate",
      "first",     "second",    "coupled",  "disposed",   "adjacent", "configured", "wherein", "comprising"};
  return words;
}

std::string pick(Rng& rng, const std::vector<std::string>& v) {
  return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
}

std::string sentence(Rng& rng, size_t min_words, size_t max_words) {
  const size_t n = std::uniform_int_distribution<size_t>(min_words, max_words)(rng);
  std::string s;
  for (size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += random_word(rng);
  }
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

std::string paragraphs(Rng& rng, size_t count) {
  std::string out;
  for (size_t i = 0; i < count; ++i) {
    if (i) out += "\n\n";
    out += sentence(rng, 8, 20) + " " + sentence(rng, 6, 14);
  }
  return out;
}

// Block of the prompt following `marker` up to the next blank line.
std::string block_after(const std::string& prompt, const std::string& marker) {
  const size_t pos = prompt.find(marker);
  if (pos == std::string::npos) return {};
  const size_t start = pos + marker.size();
  const size_t end = prompt.find("\n\n", start);
  return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::vector<int> listed_paragraph_numbers(const std::string& prompt) {
  static const std::regex tag(R"(^\[(\d{4})\] )", std::regex::multiline);
  std::vector<int> out;
  const std::string listing = prompt.substr(0, prompt.find("NEW MATERIAL:"));
  for (auto it = std::sregex_iterator(listing.begin(), listing.end(), tag); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stoi((*it)[1]));
  }
  return out;
}

}  // namespace

std::string random_word(Rng& rng) { return pick(rng, lexicon_words()); }

std::vector<std::string> random_tokens(Rng& rng, size_t n, size_t vocabulary) {
  std::vector<std::string> out;
  out.reserve(n);
  std::uniform_int_distribution<size_t> d(0, vocabulary - 1);
  for (size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(d(rng)));
  return out;
}

PatentDocument synthetic_patent(std::uint64_t seed, bool with_figures) {
  Rng rng(seed);
  const size_t n_claims = std::uniform_int_distribution<size_t>(2, 6)(rng);
  std::vector<Claim> claims;
  for (size_t i = 1; i <= n_claims; ++i) {
    std::string text = i == 1 ? "An apparatus comprising " : "The apparatus of claim 1, wherein ";
    text += sentence(rng, 14, 40);
    claims.push_back(Claim{static_cast<int>(i), text});
  }
  std::vector<FigureText> figures;
  if (with_figures) {
    const size_t n_fig = std::uniform_int_distribution<size_t>(1, 3)(rng);
    for (size_t i = 1; i <= n_fig; ++i) {
      figures.push_back(FigureText{"FIG. " + std::to_string(i), random_word(rng) + " 1" + std::to_string(i) + " " +
                                                                  random_word(rng) + " 2" + std::to_string(i)});
    }
  }
  std::vector<Section> gold;
  for (SectionName name : kAllSections) {
    if (name == SectionName::BriefDescriptionOfDrawings && figures.empty()) continue;
    Section s{name, {}, template_item_id(name)};
    const size_t n = name == SectionName::DetailedDescription ? 6 : 2;
    for (size_t i = 0; i < n; ++i) s.paragraphs.push_back(Paragraph{0, sentence(rng, 10, 24)});
    gold.push_back(std::move(s));
  }
  const std::string id = "synth-" + std::to_string(seed);
  return PatentDocument{ClaimSet(id, std::move(claims)), std::move(figures),
                        renumber(Specification(id, std::move(gold)))};
}

std::shared_ptr<MockBackend> scripted_backend(std::uint64_t seed, const ScriptOptions& options) {
  auto backend = std::make_shared<MockBackend>(16);
  auto state = std::make_shared<std::pair<std::mutex, Rng>>();
  state->second.seed(seed);
  backend->set_chat_handler([state, options](const ChatRequest& req) -> std::optional<std::string> {
    // Per-request generator seeded from the shared one keeps replies varied
    // while the lock is held only briefly.
    Rng rng;
    double leak = 0, malformed = 0, blank = 0;
    {
      std::lock_guard lock(state->first);
      rng.seed(state->second());
      std::uniform_real_distribution<double> u(0.0, 1.0);
      leak = u(state->second);
      malformed = u(state->second);
      blank = u(state->second);
    }
    const std::string family = req.family();
    const std::string& prompt = req.user_prompt;
    if (family == "extract_concepts") {
      const std::string claims = prompt.substr(prompt.rfind("CLAIMS:") + 7);
      std::istringstream words(claims);
      std::vector<std::string> claim_words;
      for (std::string w; words >> w;) claim_words.push_back(w);
      std::string out;
      for (size_t i = 0; i < options.concepts; ++i) {
        std::string title = random_word(rng) + " " + random_word(rng) + " " + std::to_string(i);
        std::string brief = sentence(rng, 6, 14);
        if (leak < options.leak_rate && claim_words.size() > 12) {
          // Copy a run of claim words, sometimes with changed case and punctuation.
          const size_t start = std::uniform_int_distribution<size_t>(0, claim_words.size() - 12)(rng);
          std::string copied;
          for (size_t k = start; k < start + 10; ++k) {
            std::string w = claim_words[k];
            if (rng() % 3 == 0) std::transform(w.begin(), w.end(), w.begin(), ::toupper);
            if (rng() % 4 == 0) w += ",";
            copied += (copied.empty() ? "" : " ") + w;
          }
          if (rng() % 2) brief = copied;
          else title = copied;
        }
        out += title + " :: " + brief + "\n";
      }
      return out;
    }
    if (family == "contextualize") return paragraphs(rng, 1);
    if (family == "draft_technical") {
      if (blank < options.blank_technical_rate) return std::string("  \n");
      return paragraphs(rng, std::uniform_int_distribution<size_t>(1, 3)(rng));
    }
    if (family.rfind("draft_", 0) == 0) return paragraphs(rng, std::uniform_int_distribution<size_t>(1, 4)(rng));
    if (family == "splice") {
      if (malformed < options.malformed_splice_rate) return std::string("I would put it somewhere in the middle.");
      const auto numbers = listed_paragraph_numbers(prompt);
      const size_t choice = std::uniform_int_distribution<size_t>(0, numbers.size())(rng);
      const int after = choice == numbers.size() ? 0 : numbers[choice];
      char tag[16];
      std::snprintf(tag, sizeof(tag), "[%04d]", after);
      const std::string material = block_after(prompt, "NEW MATERIAL:\n");
      return "REASONING: fits the surrounding discussion.\nINSERT_AFTER: " + std::string(tag) + "\nREVISED: " +
             (material.empty() ? sentence(rng, 8, 12) : material) + "\n\n" + sentence(rng, 6, 10);
    }
    return std::nullopt;
  });
  return backend;
}

std::string profanity_sentence(Rng& rng, std::uint64_t& planted) {
  static const std::vector<std::string> hits = {"crucial",       "critical",        "Critical,",      "(crucial)",
                                                "prior art",     "Prior Art.",      "prior, art",     "necessary aspect",
                                                "necessary component;", "claim 1",  "Claim 12,",      "claims 3",
                                                "CLAIMS 7."};
  static const std::vector<std::string> misses = {"crucially",  "critically",   "non-critical",  "priority art",
                                                  "art of priority",  "necessary",    "aspects",       "necessary aspects",
                                                  "claimed 3",  "claim one",    "claim 1a",      "claims",
                                                  "prior-art",  "claim-5",      "components",    "the necessary part"};
  std::string text;
  planted = 0;
  const size_t n = std::uniform_int_distribution<size_t>(6, 24)(rng);
  for (size_t i = 0; i < n; ++i) {
    if (!text.empty()) text += ' ';
    const int kind = static_cast<int>(rng() % 10);
    if (kind == 0) {
      text += pick(rng, hits);
      ++planted;
    } else if (kind == 1) {
      text += pick(rng, misses);
    } else {
      text += random_word(rng);
    }
  }
  return text + ".";
}

AnnotationFixture annotation_fixture(std::uint64_t seed, size_t sources, size_t annotators) {
  Rng rng(seed);
  AnnotationFixture fx;
  const std::vector<std::string> methods = {"alpha", "beta", "gamma"};
  for (size_t s = 0; s < sources; ++s) {
    const std::string source = "src-" + std::to_string(s);
    for (size_t a = 0; a < annotators; ++a) {
      std::vector<std::string> order = methods;
      std::shuffle(order.begin(), order.end(), rng);
      auto rank_of = [&](const std::string& m) {
        return static_cast<int>(std::find(order.begin(), order.end(), m) - order.begin()) + 1;
      };
      (rank_of("alpha") < rank_of("beta") ? fx.wins_vs_beta : fx.losses_vs_beta)++;
      (rank_of("alpha") < rank_of("gamma") ? fx.wins_vs_gamma : fx.losses_vs_gamma)++;
      for (const auto& m : methods) {
        AnnotationRecord r;
        r.annotator_id = "ann-" + std::to_string(a);
        r.source_id = source;
        r.method_id = m;
        r.rank = rank_of(m);
        for (Category c : kAllCategories) r.scores[c] = std::uniform_int_distribution<int>(1, 5)(rng);
        fx.records.push_back(std::move(r));
      }
    }
  }
  return fx;
}

}  // namespace sftest
