#include "plantner/bio_codec.hpp"

#include <algorithm>

namespace plantner {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::OrphanI: return "OrphanI";
    case ViolationKind::ClassMismatchI: return "ClassMismatchI";
    case ViolationKind::UnknownLabel: return "UnknownLabel";
  }
  return "?";
}

std::vector<BioViolation> validate_bio(std::span<const std::string> labels,
                                       const LabelSchema& schema) {
  std::vector<BioViolation> violations;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!schema.has_label(labels[i])) {
      violations.push_back({i, ViolationKind::UnknownLabel,
                            "label '" + labels[i] + "' not in schema"});
      continue;
    }
    auto parsed = parse_label(labels[i]);
    if (!parsed || parsed->kind != BioKind::I) continue;

    // I-X needs a known B-X or I-X immediately before it.
    if (i == 0) {
      violations.push_back({i, ViolationKind::OrphanI,
                            "'" + labels[i] + "' at sentence start"});
      continue;
    }
    auto prev = schema.has_label(labels[i - 1]) ? parse_label(labels[i - 1])
                                                : std::nullopt;
    if (!prev || prev->kind == BioKind::O) {
      violations.push_back({i, ViolationKind::OrphanI,
                            "'" + labels[i] + "' follows '" + labels[i - 1] + "'"});
    } else if (prev->class_name != parsed->class_name) {
      violations.push_back({i, ViolationKind::ClassMismatchI,
                            "'" + labels[i] + "' continues '" + labels[i - 1] + "'"});
    }
  }
  return violations;
}

std::vector<std::string> repair_bio(std::span<const std::string> labels,
                                    const LabelSchema& schema,
                                    MismatchPolicy policy) {
  std::vector<std::string> repaired;
  repaired.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!schema.has_label(labels[i])) {  // R3
      repaired.push_back("O");
      continue;
    }
    auto parsed = parse_label(labels[i]);
    if (!parsed || parsed->kind != BioKind::I) {
      repaired.push_back(labels[i]);
      continue;
    }
    // predecessor is the already-repaired tag
    auto prev = i == 0 ? std::nullopt : parse_label(repaired[i - 1]);
    if (!prev || prev->kind == BioKind::O) {  // R1
      repaired.push_back("B-" + parsed->class_name);
    } else if (prev->class_name != parsed->class_name) {  // R2
      if (policy == MismatchPolicy::NewEntity)
        repaired.push_back("B-" + parsed->class_name);
      else
        repaired.push_back("I-" + prev->class_name);
    } else {
      repaired.push_back(labels[i]);
    }
  }
  return repaired;
}

std::vector<EntitySpan> bio_to_spans(std::span<const std::string> labels) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;

  auto close = [&] {
    if (open) {
      spans.push_back(std::move(*open));
      open.reset();
    }
  };

  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto parsed = parse_label(labels[i]);
    if (!parsed)
      throw Error("bio_to_spans: unparseable label '" + labels[i] +
                  "' at position " + std::to_string(i) + "; repair first");
    switch (parsed->kind) {
      case BioKind::O:
        close();
        break;
      case BioKind::B:
        close();
        open = EntitySpan{i, i + 1, parsed->class_name};
        break;
      case BioKind::I:
        if (!open || open->class_name != parsed->class_name)
          throw Error("bio_to_spans: invalid I- tag at position " +
                      std::to_string(i) + "; repair first");
        open->end = i + 1;
        break;
    }
  }
  close();
  return spans;
}

std::vector<std::string> spans_to_bio(std::span<const EntitySpan> spans,
                                      std::size_t length) {
  std::vector<EntitySpan> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });

  std::vector<std::string> labels(length, "O");
  std::size_t covered = 0;  // one past the rightmost labeled token
  for (const auto& span : sorted) {
    if (span.start >= span.end || span.end > length)
      throw Error("spans_to_bio: span [" + std::to_string(span.start) + ", " +
                  std::to_string(span.end) + ") out of range for length " +
                  std::to_string(length));
    if (span.start < covered)
      throw Error("spans_to_bio: overlapping spans at position " +
                  std::to_string(span.start));
    labels[span.start] = "B-" + span.class_name;
    for (std::size_t i = span.start + 1; i < span.end; ++i)
      labels[i] = "I-" + span.class_name;
    covered = span.end;
  }
  return labels;
}

}  // namespace plantner
