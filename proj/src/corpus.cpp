#include "plantner/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace plantner {

namespace {

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

LabelSchema::LabelSchema(std::vector<std::string> entity_classes)
    : classes_(std::move(entity_classes)) {
  bio_labels_.reserve(2 * classes_.size() + 1);
  bio_labels_.push_back("O");
  for (const auto& name : classes_) {
    if (name.empty()) throw Error("entity class name must be non-empty");
    if (has_whitespace(name))
      throw Error("entity class name '" + name + "' contains whitespace");
    if (name.find('-') != std::string::npos)
      throw Error("entity class name '" + name + "' contains a hyphen");
    bio_labels_.push_back("B-" + name);
    bio_labels_.push_back("I-" + name);
  }
  for (std::size_t i = 0; i < bio_labels_.size(); ++i) {
    if (!index_.emplace(bio_labels_[i], static_cast<int>(i)).second)
      throw Error("duplicate entity class '" + bio_labels_[i].substr(2) + "'");
  }
}

LabelSchema LabelSchema::default_schema() {
  return LabelSchema({"PlantSpecies", "AbioticStress", "BioticStress",
                      "MolecularResponse", "PhysiologicalResponse",
                      "AgronomicResponse", "BiochemicalResponse"});
}

bool LabelSchema::has_label(std::string_view label) const {
  return index_.find(std::string(label)) != index_.end();
}

int LabelSchema::label_index(std::string_view label) const {
  auto it = index_.find(std::string(label));
  return it == index_.end() ? -1 : it->second;
}

std::optional<ParsedLabel> parse_label(std::string_view label) {
  if (label == "O") return ParsedLabel{BioKind::O, ""};
  if (label.size() < 3 || label[1] != '-') return std::nullopt;
  if (label[0] == 'B') return ParsedLabel{BioKind::B, std::string(label.substr(2))};
  if (label[0] == 'I') return ParsedLabel{BioKind::I, std::string(label.substr(2))};
  return std::nullopt;
}

std::vector<std::string> Sentence::labels() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.label);
  return out;
}

std::vector<std::string> Sentence::forms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.form);
  return out;
}

namespace {

constexpr std::string_view kDocHeader = "#doc id=";

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Builder {
  const LabelSchema& schema;
  bool strict;

  ParsedCorpus out;
  Document current_doc;
  std::vector<std::vector<std::size_t>> current_doc_lines;
  Sentence current_sentence;
  std::vector<std::size_t> current_sentence_lines;
  bool doc_open = false;

  void flush_sentence() {
    if (current_sentence.tokens.empty()) return;
    if (!doc_open) open_doc("default", 0);
    current_doc.sentences.push_back(std::move(current_sentence));
    current_doc_lines.push_back(std::move(current_sentence_lines));
    current_sentence = {};
    current_sentence_lines = {};
  }

  void flush_doc() {
    flush_sentence();
    if (!doc_open) return;
    out.documents.push_back(std::move(current_doc));
    out.token_lines.push_back(std::move(current_doc_lines));
    current_doc = {};
    current_doc_lines = {};
    doc_open = false;
  }

  void open_doc(std::string id, std::size_t line) {
    for (const auto& d : out.documents) {
      if (d.id == id)
        throw ParseError(line, "duplicate document id '" + id + "'");
    }
    current_doc.id = std::move(id);
    doc_open = true;
  }

  void add_token(std::string_view line, std::size_t lineno) {
    std::size_t first = line.find('\t');
    std::size_t second = first == std::string_view::npos
                             ? std::string_view::npos
                             : line.find('\t', first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos ||
        line.find('\t', second + 1) != std::string_view::npos) {
      std::size_t cols = 1;
      for (char c : line) cols += c == '\t';
      throw ParseError(lineno, "expected 3 tab-separated columns, got " +
                                   std::to_string(cols));
    }
    Token token;
    token.form = std::string(line.substr(0, first));
    token.pos = std::string(line.substr(first + 1, second - first - 1));
    token.label = std::string(line.substr(second + 1));
    if (token.form.empty()) throw ParseError(lineno, "empty FORM column");
    if (strict && !schema.has_label(token.label))
      throw ParseError(lineno, "unknown label '" + token.label + "'");
    current_sentence.tokens.push_back(std::move(token));
    current_sentence_lines.push_back(lineno);
  }
};

}  // namespace

ParsedCorpus parse_conll_detailed(std::string_view text, const LabelSchema& schema,
                                  bool strict) {
  Builder b{schema, strict, {}, {}, {}, {}, {}, false};

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    if (nl == std::string_view::npos && line.empty() && pos == text.size()) break;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.rfind(kDocHeader, 0) == 0) {
      b.flush_doc();
      b.open_doc(std::string(trim(line.substr(kDocHeader.size()))), lineno);
    } else if (!line.empty() && line.front() == '#') {
      // comment; does not break the sentence in progress
    } else if (is_blank(line)) {
      b.flush_sentence();
    } else {
      b.add_token(line, lineno);
    }

    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  b.flush_doc();
  return b.out;
}

std::vector<Document> parse_conll(std::string_view text, const LabelSchema& schema,
                                  bool strict) {
  return parse_conll_detailed(text, schema, strict).documents;
}

std::string serialize_conll(std::span<const Document> documents) {
  std::string out;
  for (const auto& doc : documents) {
    out += "#doc id=";
    out += doc.id;
    out += '\n';
    for (const auto& sentence : doc.sentences) {
      for (const auto& token : sentence.tokens) {
        out += token.form;
        out += '\t';
        out += token.pos;
        out += '\t';
        out += token.label;
        out += '\n';
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace plantner
