#pragma once

#include <cstdint>
#include <vector>

#include "plantner/corpus.hpp"
#include "plantner/subword.hpp"

namespace plantner {

/// Generators for the corpora bundled under data/.  Both are deterministic
/// in the seed, use the default 7-class schema, and tag entity tokens with
/// chunk POS (NOUN/PROPN/ADJ) so the post-processing rules apply naturally.

/// Sentences whose entity surface forms are disjoint from the filler
/// vocabulary, one document per 50 sentences.  A log-linear tagger fits
/// this corpus nearly perfectly, which is what the end-to-end training
/// checks rely on.
std::vector<Document> synthetic_separable_corpus(std::size_t sentences,
                                                 std::uint64_t seed);

/// Long filler-heavy sentences (entity tokens < 10%) where a set of
/// ambiguous surface forms occurs both inside entities and as O filler.
std::vector<Document> synthetic_imbalanced_corpus(std::size_t sentences,
                                                  std::uint64_t seed);

/// Piece inventory covering a corpus: every single character, whole-word
/// pieces for short words, and prefix pieces for longer ones so some words
/// actually split.
SubwordVocab synthetic_vocab(std::span<const Document> corpus);

}  // namespace plantner
