#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "plantner/corpus.hpp"

namespace plantner {

/// Half-open token range [start, end) carrying an entity class.
struct EntitySpan {
  std::size_t start;
  std::size_t end;
  std::string class_name;

  bool operator==(const EntitySpan&) const = default;
};

enum class ViolationKind { OrphanI, ClassMismatchI, UnknownLabel };

std::string to_string(ViolationKind kind);

struct BioViolation {
  std::size_t position;
  ViolationKind kind;
  std::string detail;
};

/// How repair treats an `I-X` that continues a span of a different class.
/// NewEntity starts a fresh `B-X` span; MatchPrevious relabels it to
/// continue the running class.
enum class MismatchPolicy { NewEntity, MatchPrevious };

/// Empty result iff the sequence is well-formed under the schema: every
/// label known and every `I-X` preceded by `B-X` or `I-X`.
std::vector<BioViolation> validate_bio(std::span<const std::string> labels,
                                       const LabelSchema& schema);

/// Single left-to-right pass; a repaired tag is valid context for its
/// successor.  R1: orphan `I-X` becomes `B-X`.  R2: `I-X` after a span of
/// class Y is resolved per the policy (default: new `B-X` entity).
/// R3: unknown labels become `O`.  Idempotent, length-preserving, and the
/// output always validates clean.
std::vector<std::string> repair_bio(std::span<const std::string> labels,
                                    const LabelSchema& schema,
                                    MismatchPolicy policy = MismatchPolicy::NewEntity);

/// Decodes a structurally valid sequence into sorted, non-overlapping spans.
/// Throws Error on orphan/mismatched I- tags or unparseable labels; run
/// repair_bio first for raw model output.
std::vector<EntitySpan> bio_to_spans(std::span<const std::string> labels);

/// Encodes non-overlapping spans over `length` tokens; uncovered positions
/// are O.  Throws Error on overlap or out-of-range spans.
std::vector<std::string> spans_to_bio(std::span<const EntitySpan> spans,
                                      std::size_t length);

}  // namespace plantner
