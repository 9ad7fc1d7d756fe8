#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "plantner/bio_codec.hpp"
#include "plantner/corpus.hpp"

namespace plantner {

enum class MatchTier { Exact, CaseFold, Normalized, None };

std::string to_string(MatchTier tier);

struct OntologyEntry {
  std::string surface;
  std::string canonical_id;
  std::string class_name;
};

/// Term dictionary with a three-tier lookup cascade: exact surface, then
/// case-folded, then normalized (case-folded, punctuation stripped,
/// whitespace collapsed).  Lookups are class-scoped; the same surface may
/// map to different ids in different classes, but two entries for one
/// (surface, class) with different ids are rejected at load.
class OntologyDictionary {
public:
  explicit OntologyDictionary(std::vector<OntologyEntry> entries);

  /// 3-column TSV (surface, canonical_id, class_name); `#` comment lines
  /// allowed.  Throws ParseError on malformed rows and Error on conflicts.
  static OntologyDictionary load(const std::string& path);

  std::size_t size() const { return entries_.size(); }
  const std::vector<OntologyEntry>& entries() const { return entries_; }

  struct Lookup {
    std::optional<std::string> canonical_id;
    MatchTier tier = MatchTier::None;
  };

  /// First hit across Exact -> CaseFold -> Normalized; the hit must carry
  /// the queried class.  When derived keys collide, the first-loaded entry
  /// wins, keeping the cascade deterministic.
  Lookup find(const std::string& surface, const std::string& class_name) const;

private:
  std::vector<OntologyEntry> entries_;
  std::unordered_map<std::string, std::string> exact_;
  std::unordered_map<std::string, std::string> folded_;
  std::unordered_map<std::string, std::string> normalized_;
};

/// ASCII lowercase; bytes above 0x7F pass through.
std::string case_fold(std::string_view text);

/// case_fold + ASCII punctuation stripped + whitespace runs collapsed to
/// one space + trimmed.
std::string normalize_surface(std::string_view text);

struct NormalizedEntity {
  std::string doc_id;
  std::size_t sentence_index = 0;
  EntitySpan span;
  std::string surface;
  std::optional<std::string> canonical_id;
  MatchTier tier = MatchTier::None;
};

/// normalize_entity for a bare surface/class pair.
OntologyDictionary::Lookup normalize_entity(const std::string& surface,
                                            const std::string& class_name,
                                            const OntologyDictionary& dict);

/// One NormalizedEntity per span, document order preserved; the surface is
/// the space-joined token forms of the span.
std::vector<NormalizedEntity> annotate_document(
    const Document& doc, std::span<const std::vector<EntitySpan>> spans_per_sentence,
    const OntologyDictionary& dict);

}  // namespace plantner
