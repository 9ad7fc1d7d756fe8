#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plantner/bio_codec.hpp"
#include "plantner/corpus.hpp"

namespace plantner {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long support = 0;  // gold occurrences
};

enum class EvalMode { Token, Entity };

/// Per-class and aggregate precision/recall/F1.  The per-class set is the
/// labels observed in gold or prediction (O excluded unless include_o);
/// macro averages them unweighted, weighted averages them by gold support.
/// Divisions by zero resolve to 0 throughout.  accuracy is present in token
/// mode only and is computed over all tokens including O.
struct EvalReport {
  EvalMode mode = EvalMode::Token;
  bool include_o = false;
  std::map<std::string, ClassMetrics> per_class;
  std::optional<double> accuracy;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
  double micro_precision = 0.0, micro_recall = 0.0, micro_f1 = 0.0;
};

/// Token-level scores over BIO labels.  The two corpora must carry identical
/// token streams; the first divergent form is reported in the Error.
EvalReport token_metrics(std::span<const Document> gold, std::span<const Document> pred,
                         bool include_o);

/// Entity-level scores with the exact-match criterion: a predicted span is a
/// true positive iff a gold span in the same sentence has the same start,
/// end and class.  Throws Error when the sentence counts differ.
EvalReport entity_metrics(const std::vector<std::vector<EntitySpan>>& gold,
                          const std::vector<std::vector<EntitySpan>>& pred);

struct MetricDelta {
  std::string name;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;  // b - a
};

struct ReportDiff {
  std::vector<MetricDelta> aggregate;
  std::map<std::string, std::vector<MetricDelta>> per_class;
};

/// Per-metric b-minus-a deltas.  Throws Error when modes or O handling differ.
ReportDiff compare_reports(const EvalReport& a, const EvalReport& b);

/// One-row table with the column order Accuracy, Macro P, Weighted P,
/// Macro R, Weighted R, Macro F1, Weighted F1, plus a per-class block.
std::string render_report_table(const EvalReport& report);

std::string render_diff_table(const ReportDiff& diff);

}  // namespace plantner
