#include "plantner/subword.hpp"

#include <algorithm>
#include <fstream>

#include "plantner/bio_codec.hpp"

namespace plantner {

SubwordVocab::SubwordVocab(std::vector<std::string> pieces,
                           std::string continuation_marker, std::string unknown_piece)
    : marker_(std::move(continuation_marker)), unknown_(std::move(unknown_piece)) {
  if (marker_.empty()) throw Error("continuation marker must be non-empty");
  for (auto& piece : pieces) {
    if (piece.empty()) continue;
    max_piece_bytes_ = std::max(max_piece_bytes_, piece.size());
    pieces_.insert(std::move(piece));
  }
}

SubwordVocab SubwordVocab::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocab file '" + path + "'");
  std::vector<std::string> pieces;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) pieces.push_back(line);
  }
  return SubwordVocab(std::move(pieces));
}

void SubwordVocab::save(const std::string& path) const {
  std::vector<std::string> sorted(pieces_.begin(), pieces_.end());
  std::sort(sorted.begin(), sorted.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocab file '" + path + "'");
  for (const auto& piece : sorted) out << piece << '\n';
}

namespace {

// Number of bytes in the UTF-8 sequence starting at s[i]; 1 for malformed
// leading bytes so progress is always made.
std::size_t utf8_len(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  std::size_t n = 1;
  if ((c & 0xE0) == 0xC0) n = 2;
  else if ((c & 0xF0) == 0xE0) n = 3;
  else if ((c & 0xF8) == 0xF0) n = 4;
  return std::min(n, s.size() - i);
}

}  // namespace

std::vector<std::string> segment(const std::string& word, const SubwordVocab& vocab) {
  if (word.empty()) throw Error("segment: empty word");

  std::vector<std::string> pieces;
  const std::string& marker = vocab.continuation_marker();
  std::size_t pos = 0;
  while (pos < word.size()) {
    const bool initial = pos == 0;
    const std::size_t budget = word.size() - pos;
    std::size_t best = 0;
    std::string candidate;
    candidate.reserve(marker.size() + vocab.max_piece_bytes());

    std::size_t longest = std::min(budget, vocab.max_piece_bytes());
    for (std::size_t len = longest; len >= 1; --len) {
      candidate.clear();
      if (!initial) candidate += marker;
      candidate.append(word, pos, len);
      if (vocab.has_piece(candidate)) {
        best = len;
        break;
      }
    }

    if (best == 0) {
      pieces.push_back(vocab.unknown_piece());
      pos += utf8_len(word, pos);  // consume one code point
    } else {
      std::string piece;
      if (!initial) piece += marker;
      piece.append(word, pos, best);
      pieces.push_back(std::move(piece));
      pos += best;
    }
  }
  return pieces;
}

AlignedSequence align_labels(const Sentence& sentence, const SubwordVocab& vocab,
                             const LabelSchema& schema) {
  const auto word_labels = sentence.labels();
  if (!validate_bio(word_labels, schema).empty())
    throw Error("align_labels: sentence labels are not valid BIO; repair first");

  AlignedSequence aligned;
  for (std::size_t w = 0; w < sentence.tokens.size(); ++w) {
    const auto pieces = segment(sentence.tokens[w].form, vocab);
    const auto& label = word_labels[w];
    auto parsed = parse_label(label);

    std::string continuation = "O";
    if (parsed && parsed->kind != BioKind::O)
      continuation = "I-" + parsed->class_name;

    for (std::size_t p = 0; p < pieces.size(); ++p) {
      aligned.pieces.push_back(pieces[p]);
      aligned.labels.push_back(p == 0 ? label : continuation);
      aligned.supervision_mask.push_back(p == 0);
      aligned.word_index.push_back(w);
    }
  }
  return aligned;
}

std::vector<std::string> project_to_words(const AlignedSequence& aligned,
                                          std::span<const std::string> predicted,
                                          const LabelSchema& schema) {
  if (predicted.size() != aligned.size())
    throw Error("project_to_words: got " + std::to_string(predicted.size()) +
                " predictions for " + std::to_string(aligned.size()) + " pieces");

  std::vector<std::string> word_labels;
  for (std::size_t p = 0; p < aligned.size(); ++p) {
    if (aligned.supervision_mask[p]) word_labels.push_back(predicted[p]);
  }
  return repair_bio(word_labels, schema);
}

}  // namespace plantner
