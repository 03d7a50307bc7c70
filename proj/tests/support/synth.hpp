#pragma once
// Deterministic synthetic inputs for tests: patents, scripted model
// behaviour, sentence corpora and annotation sets.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "annotation_stats.hpp"
#include "domain.hpp"
#include "llm_gateway.hpp"

namespace sftest {

using Rng = std::mt19937_64;

std::string random_word(Rng& rng);
std::vector<std::string> random_tokens(Rng& rng, size_t n, size_t vocabulary);

// 2..6 claims, optionally 1..3 figures, plus a gold specification.
specforge::PatentDocument synthetic_patent(std::uint64_t seed, bool with_figures);

struct ScriptOptions {
  // Chance that a concept line copies a stretch of claim text.
  double leak_rate = 0.0;
  // Chance that a splice reply is malformed (forcing a retry).
  double malformed_splice_rate = 0.0;
  // Chance that a technical draft is blank (forcing a retry, maybe a skip).
  double blank_technical_rate = 0.0;
  size_t concepts = 4;
};

// Mock backend whose replies are valid, varied and derived from the prompt.
// Splice replies pick a real paragraph number listed in the prompt.
std::shared_ptr<specforge::MockBackend> scripted_backend(std::uint64_t seed, const ScriptOptions& options);

// Planted-term sentence: returns the text and sets `planted` to the number
// of lexicon hits it contains.
std::string profanity_sentence(Rng& rng, std::uint64_t& planted);

struct AnnotationFixture {
  std::vector<specforge::AnnotationRecord> records;
  // Expected per-comparison counts of method "alpha" against "beta" and "gamma".
  size_t wins_vs_beta = 0, losses_vs_beta = 0, ties_vs_beta = 0;
  size_t wins_vs_gamma = 0, losses_vs_gamma = 0, ties_vs_gamma = 0;
};

// Three methods ranked by annotators over the given sources; the preferred
// orders are chosen so that alpha's win counts are known in advance.
AnnotationFixture annotation_fixture(std::uint64_t seed, size_t sources, size_t annotators);

}  // namespace sftest
