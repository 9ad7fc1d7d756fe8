#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "plantner/corpus.hpp"

namespace plantner {

/// Piece inventory for deterministic greedy segmentation.  Continuation
/// pieces are stored with their marker prefix (default "##"), one piece per
/// line in the file form.
class SubwordVocab {
public:
  SubwordVocab(std::vector<std::string> pieces, std::string continuation_marker = "##",
               std::string unknown_piece = "[UNK]");

  static SubwordVocab from_file(const std::string& path);

  /// One piece per line, continuation pieces written with their marker.
  void save(const std::string& path) const;

  bool has_piece(const std::string& piece) const { return pieces_.count(piece) > 0; }
  const std::string& continuation_marker() const { return marker_; }
  const std::string& unknown_piece() const { return unknown_; }
  std::size_t size() const { return pieces_.size(); }
  std::size_t max_piece_bytes() const { return max_piece_bytes_; }

private:
  std::unordered_set<std::string> pieces_;
  std::string marker_;
  std::string unknown_;
  std::size_t max_piece_bytes_ = 0;
};

/// Word-level annotations projected onto subword pieces.  All vectors share
/// one length; supervision_mask is true exactly at the first piece of each
/// word, and word_index maps each piece back to its source word.
struct AlignedSequence {
  std::vector<std::string> pieces;
  std::vector<std::string> labels;
  std::vector<bool> supervision_mask;
  std::vector<std::size_t> word_index;

  std::size_t size() const { return pieces.size(); }
};

/// Greedy longest-match segmentation from the left.  Pieces after the first
/// must exist in the vocab with the continuation marker.  A position where
/// nothing matches consumes one UTF-8 code point as `unknown_piece`, so
/// segmentation is total.  Whenever no unknown fallback fires, stripping the
/// markers and concatenating the pieces reproduces the word exactly.
std::vector<std::string> segment(const std::string& word, const SubwordVocab& vocab);

/// First piece of a word carries the word label; continuation pieces carry
/// `I-X` when the word is inside an X entity, `O` otherwise, and are masked
/// out of supervision.  Throws Error when the sentence labels are not valid
/// BIO under the schema.
AlignedSequence align_labels(const Sentence& sentence, const SubwordVocab& vocab,
                             const LabelSchema& schema);

/// Word label := prediction at the word's first piece, then repair_bio.
/// Throws Error when predicted length differs from the aligned length.
std::vector<std::string> project_to_words(const AlignedSequence& aligned,
                                          std::span<const std::string> predicted,
                                          const LabelSchema& schema);

}  // namespace plantner
