#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plantner/error.hpp"

namespace plantner {

/// The annotation schema: an ordered list of entity classes and the BIO
/// label inventory derived from it (`O`, then `B-c`, `I-c` per class).
class LabelSchema {
public:
  /// Validates class names: unique, non-empty, no whitespace, no hyphen.
  explicit LabelSchema(std::vector<std::string> entity_classes);

  /// The seven default classes: PlantSpecies, AbioticStress, BioticStress
  /// and the Molecular/Physiological/Agronomic/Biochemical response classes.
  static LabelSchema default_schema();

  const std::vector<std::string>& entity_classes() const { return classes_; }
  const std::vector<std::string>& bio_labels() const { return bio_labels_; }
  std::size_t label_count() const { return bio_labels_.size(); }

  bool has_label(std::string_view label) const;
  /// Index into bio_labels(), or -1 for unknown labels.
  int label_index(std::string_view label) const;

private:
  std::vector<std::string> classes_;
  std::vector<std::string> bio_labels_;
  std::unordered_map<std::string, int> index_;
};

enum class BioKind { O, B, I };

struct ParsedLabel {
  BioKind kind;
  std::string class_name;  // empty for O
};

/// Splits a label into its BIO kind and class name on the first hyphen.
/// Returns nullopt for anything that is not `O`, `B-<c>` or `I-<c>`.
std::optional<ParsedLabel> parse_label(std::string_view label);

struct Token {
  std::string form;
  std::string pos;
  std::string label;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> labels() const;
  std::vector<std::string> forms() const;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

/// parse_conll output plus the 1-based source line of every token,
/// indexed [document][sentence][token].
struct ParsedCorpus {
  std::vector<Document> documents;
  std::vector<std::vector<std::vector<std::size_t>>> token_lines;
};

/// Reads the 3-column TAB-separated format (FORM, POS, LABEL).
///
/// Blank lines separate sentences, `#doc id=<id>` opens a document and other
/// `#` lines are comments.  Input without any `#doc` header goes into a
/// single document with id "default".  CRLF is accepted.  In strict mode a
/// label outside the schema raises ParseError; in lenient mode it is kept
/// verbatim so repair can deal with it later.
ParsedCorpus parse_conll_detailed(std::string_view text, const LabelSchema& schema,
                                  bool strict);

std::vector<Document> parse_conll(std::string_view text, const LabelSchema& schema,
                                  bool strict);

/// Inverse of parse_conll: emits `#doc id=` headers, one token per line,
/// a blank line after every sentence, LF endings.
std::string serialize_conll(std::span<const Document> documents);

}  // namespace plantner
