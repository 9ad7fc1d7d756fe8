#include "plantner/ontology.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace plantner {

std::string to_string(MatchTier tier) {
  switch (tier) {
    case MatchTier::Exact: return "Exact";
    case MatchTier::CaseFold: return "CaseFold";
    case MatchTier::Normalized: return "Normalized";
    case MatchTier::None: return "None";
  }
  return "?";
}

std::string case_fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text)
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  return out;
}

std::string normalize_surface(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (c < 0x80 && std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (c < 0x80 && std::ispunct(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  return out;
}

namespace {

// class-scoped index key; '\x1f' cannot occur in a class name (no whitespace
// rule does not forbid it, but tabs in the TSV do)
std::string key(const std::string& surface, const std::string& class_name) {
  return class_name + '\x1f' + surface;
}

}  // namespace

OntologyDictionary::OntologyDictionary(std::vector<OntologyEntry> entries)
    : entries_(std::move(entries)) {
  for (const auto& entry : entries_) {
    if (entry.canonical_id.empty())
      throw Error("ontology entry '" + entry.surface + "' has an empty canonical id");
    const auto exact_key = key(entry.surface, entry.class_name);
    auto [it, inserted] = exact_.emplace(exact_key, entry.canonical_id);
    if (!inserted && it->second != entry.canonical_id)
      throw Error("conflicting ids for surface '" + entry.surface + "' (class " +
                  entry.class_name + "): '" + it->second + "' vs '" +
                  entry.canonical_id + "'");
    folded_.emplace(key(case_fold(entry.surface), entry.class_name),
                    entry.canonical_id);
    normalized_.emplace(key(normalize_surface(entry.surface), entry.class_name),
                        entry.canonical_id);
  }
}

OntologyDictionary OntologyDictionary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dictionary file '" + path + "'");

  std::vector<OntologyEntry> entries;
  // remembers the first line defining each (surface, class) so conflicts can
  // name both sides
  std::unordered_map<std::string, std::pair<std::size_t, std::string>> seen;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::size_t first = line.find('\t');
    const std::size_t second =
        first == std::string::npos ? std::string::npos : line.find('\t', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        line.find('\t', second + 1) != std::string::npos)
      throw ParseError(lineno, "expected 3 tab-separated columns");

    OntologyEntry entry{line.substr(0, first),
                        line.substr(first + 1, second - first - 1),
                        line.substr(second + 1)};
    if (entry.surface.empty()) throw ParseError(lineno, "empty surface column");
    if (entry.canonical_id.empty()) throw ParseError(lineno, "empty id column");
    if (entry.class_name.empty()) throw ParseError(lineno, "empty class column");

    const auto k = key(entry.surface, entry.class_name);
    auto it = seen.find(k);
    if (it != seen.end()) {
      if (it->second.second != entry.canonical_id)
        throw Error("line " + std::to_string(lineno) + ": surface '" + entry.surface +
                    "' (class " + entry.class_name + ") already mapped to '" +
                    it->second.second + "' on line " + std::to_string(it->second.first));
      continue;  // exact duplicate, ignore
    }
    seen.emplace(k, std::make_pair(lineno, entry.canonical_id));
    entries.push_back(std::move(entry));
  }
  return OntologyDictionary(std::move(entries));
}

OntologyDictionary::Lookup OntologyDictionary::find(const std::string& surface,
                                                    const std::string& class_name) const {
  if (auto it = exact_.find(key(surface, class_name)); it != exact_.end())
    return {it->second, MatchTier::Exact};
  if (auto it = folded_.find(key(case_fold(surface), class_name)); it != folded_.end())
    return {it->second, MatchTier::CaseFold};
  if (auto it = normalized_.find(key(normalize_surface(surface), class_name));
      it != normalized_.end())
    return {it->second, MatchTier::Normalized};
  return {std::nullopt, MatchTier::None};
}

OntologyDictionary::Lookup normalize_entity(const std::string& surface,
                                            const std::string& class_name,
                                            const OntologyDictionary& dict) {
  return dict.find(surface, class_name);
}

std::vector<NormalizedEntity> annotate_document(
    const Document& doc, std::span<const std::vector<EntitySpan>> spans_per_sentence,
    const OntologyDictionary& dict) {
  if (spans_per_sentence.size() != doc.sentences.size())
    throw Error("annotate_document: span lists do not match sentence count");

  std::vector<NormalizedEntity> out;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& sentence = doc.sentences[s];
    for (const auto& span : spans_per_sentence[s]) {
      if (span.start >= span.end || span.end > sentence.size())
        throw Error("annotate_document: span out of range in sentence " +
                    std::to_string(s));
      std::string surface;
      for (std::size_t i = span.start; i < span.end; ++i) {
        if (i > span.start) surface += ' ';
        surface += sentence.tokens[i].form;
      }
      auto lookup = dict.find(surface, span.class_name);
      out.push_back({doc.id, s, span, std::move(surface), std::move(lookup.canonical_id),
                     lookup.tier});
    }
  }
  return out;
}

}  // namespace plantner
