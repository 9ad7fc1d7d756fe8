#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "plantner/bio_codec.hpp"
#include "plantner/corpus.hpp"

namespace plantner {

/// POS-driven realignment rules.  The chunk and trim sets must be disjoint.
struct ChunkRuleConfig {
  std::set<std::string> chunk_pos{"NOUN", "PROPN", "ADJ"};
  std::set<std::string> trim_pos{"DET", "PUNCT", "VERB", "ADP", "CCONJ"};
  bool expansion_enabled = true;
  bool trim_enabled = true;

  /// Flat key/value file: `chunk_pos` / `trim_pos` as comma lists,
  /// `expansion_enabled` / `trim_enabled` as true/false, `#` comments.
  static ChunkRuleConfig from_file(const std::string& path);

  void validate() const;  // throws Error when the sets intersect
};

/// Expands each span to the maximal run of chunk-POS tokens around it
/// (never crossing a neighboring span), then strips trim-POS tokens from
/// the edges.  Spans emptied by trimming are dropped.  Input spans must be
/// non-overlapping; output spans are non-overlapping and sorted.
std::vector<EntitySpan> pos_realign(const Sentence& sentence,
                                    std::span<const EntitySpan> spans,
                                    const ChunkRuleConfig& config);

/// repair_bio, then H1: a single-token entity over a trim-POS token becomes
/// O; then H2: two same-class spans separated by exactly one O token with
/// chunk POS are merged.  Needs the sentence for its POS column.
std::vector<std::string> fix_inconsistent(const Sentence& sentence,
                                          std::span<const std::string> labels,
                                          const LabelSchema& schema,
                                          const ChunkRuleConfig& config);

/// fix_inconsistent -> bio_to_spans -> pos_realign -> spans_to_bio.
/// Length-preserving, output valid, idempotent.
std::vector<std::string> run_pipeline(const Sentence& sentence,
                                      std::span<const std::string> labels,
                                      const LabelSchema& schema,
                                      const ChunkRuleConfig& config);

}  // namespace plantner
