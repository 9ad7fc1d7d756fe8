#include "plantner/metrics.hpp"

#include <cstdio>
#include <map>
#include <set>

#include "plantner/error.hpp"

namespace plantner {

namespace {

struct Tally {
  long long tp = 0, fp = 0, fn = 0;
};

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Aggregates per-class tallies into an EvalReport.  The per-class set is
// everything present in `tallies`; callers decide what goes in.
EvalReport aggregate(std::map<std::string, Tally> tallies, EvalMode mode,
                     bool include_o) {
  EvalReport report;
  report.mode = mode;
  report.include_o = include_o;

  long long micro_tp = 0, micro_fp = 0, micro_fn = 0;
  long long total_support = 0;
  for (const auto& [name, tally] : tallies) {
    ClassMetrics m;
    m.support = tally.tp + tally.fn;
    m.precision = safe_div(static_cast<double>(tally.tp),
                           static_cast<double>(tally.tp + tally.fp));
    m.recall = safe_div(static_cast<double>(tally.tp),
                        static_cast<double>(tally.tp + tally.fn));
    m.f1 = safe_div(2.0 * m.precision * m.recall, m.precision + m.recall);
    report.per_class[name] = m;

    micro_tp += tally.tp;
    micro_fp += tally.fp;
    micro_fn += tally.fn;
    total_support += m.support;
  }

  const auto k = static_cast<double>(report.per_class.size());
  double sum_p = 0, sum_r = 0, sum_f1 = 0;
  double wsum_p = 0, wsum_r = 0, wsum_f1 = 0;
  for (const auto& [name, m] : report.per_class) {
    sum_p += m.precision;
    sum_r += m.recall;
    sum_f1 += m.f1;
    const auto support = static_cast<double>(m.support);
    wsum_p += support * m.precision;
    wsum_r += support * m.recall;
    wsum_f1 += support * m.f1;
  }
  report.macro_precision = safe_div(sum_p, k);
  report.macro_recall = safe_div(sum_r, k);
  report.macro_f1 = safe_div(sum_f1, k);
  const auto support_total = static_cast<double>(total_support);
  report.weighted_precision = safe_div(wsum_p, support_total);
  report.weighted_recall = safe_div(wsum_r, support_total);
  report.weighted_f1 = safe_div(wsum_f1, support_total);

  report.micro_precision = safe_div(static_cast<double>(micro_tp),
                                    static_cast<double>(micro_tp + micro_fp));
  report.micro_recall = safe_div(static_cast<double>(micro_tp),
                                 static_cast<double>(micro_tp + micro_fn));
  report.micro_f1 = safe_div(2.0 * report.micro_precision * report.micro_recall,
                             report.micro_precision + report.micro_recall);
  return report;
}

}  // namespace

EvalReport token_metrics(std::span<const Document> gold, std::span<const Document> pred,
                         bool include_o) {
  std::vector<const Token*> gold_tokens, pred_tokens;
  for (const auto& doc : gold)
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens) gold_tokens.push_back(&t);
  for (const auto& doc : pred)
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens) pred_tokens.push_back(&t);

  if (gold_tokens.size() != pred_tokens.size())
    throw Error("token_metrics: token counts differ (" +
                std::to_string(gold_tokens.size()) + " vs " +
                std::to_string(pred_tokens.size()) + ")");
  for (std::size_t i = 0; i < gold_tokens.size(); ++i) {
    if (gold_tokens[i]->form != pred_tokens[i]->form)
      throw Error("token_metrics: token streams diverge at position " +
                  std::to_string(i) + " ('" + gold_tokens[i]->form + "' vs '" +
                  pred_tokens[i]->form + "')");
  }

  std::map<std::string, Tally> tallies;
  long long correct = 0;
  for (std::size_t i = 0; i < gold_tokens.size(); ++i) {
    const auto& g = gold_tokens[i]->label;
    const auto& p = pred_tokens[i]->label;
    if (g == p) ++correct;
    const bool count_g = include_o || g != "O";
    const bool count_p = include_o || p != "O";
    if (g == p) {
      if (count_g) ++tallies[g].tp;
    } else {
      if (count_g) ++tallies[g].fn;
      if (count_p) ++tallies[p].fp;
    }
  }

  auto report = aggregate(std::move(tallies), EvalMode::Token, include_o);
  // accuracy is over every token, O included, regardless of include_o
  report.accuracy = gold_tokens.empty()
                        ? 0.0
                        : static_cast<double>(correct) /
                              static_cast<double>(gold_tokens.size());
  return report;
}

EvalReport entity_metrics(const std::vector<std::vector<EntitySpan>>& gold,
                          const std::vector<std::vector<EntitySpan>>& pred) {
  if (gold.size() != pred.size())
    throw Error("entity_metrics: sentence counts differ (" +
                std::to_string(gold.size()) + " vs " + std::to_string(pred.size()) +
                ")");

  std::map<std::string, Tally> tallies;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    std::set<std::pair<std::pair<std::size_t, std::size_t>, std::string>> gold_set;
    for (const auto& span : gold[s])
      gold_set.insert({{span.start, span.end}, span.class_name});

    std::set<std::pair<std::pair<std::size_t, std::size_t>, std::string>> matched;
    for (const auto& span : pred[s]) {
      const auto key = std::make_pair(std::make_pair(span.start, span.end),
                                      span.class_name);
      if (gold_set.count(key) && !matched.count(key)) {
        ++tallies[span.class_name].tp;
        matched.insert(key);
      } else {
        ++tallies[span.class_name].fp;
      }
    }
    for (const auto& span : gold[s]) {
      const auto key = std::make_pair(std::make_pair(span.start, span.end),
                                      span.class_name);
      if (!matched.count(key)) ++tallies[span.class_name].fn;
    }
  }
  return aggregate(std::move(tallies), EvalMode::Entity, false);
}

namespace {

void push_deltas(std::vector<MetricDelta>& out, const std::string& name, double a,
                 double b) {
  out.push_back({name, a, b, b - a});
}

}  // namespace

ReportDiff compare_reports(const EvalReport& a, const EvalReport& b) {
  if (a.mode != b.mode) throw Error("compare_reports: mode mismatch");
  if (a.include_o != b.include_o)
    throw Error("compare_reports: include_o mismatch");

  ReportDiff diff;
  if (a.accuracy && b.accuracy)
    push_deltas(diff.aggregate, "accuracy", *a.accuracy, *b.accuracy);
  push_deltas(diff.aggregate, "macro_precision", a.macro_precision, b.macro_precision);
  push_deltas(diff.aggregate, "weighted_precision", a.weighted_precision,
              b.weighted_precision);
  push_deltas(diff.aggregate, "macro_recall", a.macro_recall, b.macro_recall);
  push_deltas(diff.aggregate, "weighted_recall", a.weighted_recall, b.weighted_recall);
  push_deltas(diff.aggregate, "macro_f1", a.macro_f1, b.macro_f1);
  push_deltas(diff.aggregate, "weighted_f1", a.weighted_f1, b.weighted_f1);

  std::set<std::string> names;
  for (const auto& [name, m] : a.per_class) names.insert(name);
  for (const auto& [name, m] : b.per_class) names.insert(name);
  for (const auto& name : names) {
    ClassMetrics ma, mb;
    if (auto it = a.per_class.find(name); it != a.per_class.end()) ma = it->second;
    if (auto it = b.per_class.find(name); it != b.per_class.end()) mb = it->second;
    auto& rows = diff.per_class[name];
    push_deltas(rows, "precision", ma.precision, mb.precision);
    push_deltas(rows, "recall", ma.recall, mb.recall);
    push_deltas(rows, "f1", ma.f1, mb.f1);
  }
  return diff;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string render_report_table(const EvalReport& report) {
  // column order mirrors the usual model-comparison layout
  std::string out;
  out += "Accuracy  Macro P   Weighted P  Macro R   Weighted R  Macro F1  Weighted F1\n";
  out += (report.accuracy ? fmt(*report.accuracy) : std::string("-")) + "    ";
  out += fmt(report.macro_precision) + "    " + fmt(report.weighted_precision) +
         "      " + fmt(report.macro_recall) + "    " + fmt(report.weighted_recall) +
         "      " + fmt(report.macro_f1) + "    " + fmt(report.weighted_f1) + "\n";
  out += "\nclass                          precision  recall    f1        support\n";
  for (const auto& [name, m] : report.per_class) {
    char line[160];
    std::snprintf(line, sizeof line, "%-30s %-10s %-9s %-9s %lld\n", name.c_str(),
                  fmt(m.precision).c_str(), fmt(m.recall).c_str(), fmt(m.f1).c_str(),
                  m.support);
    out += line;
  }
  return out;
}

std::string render_diff_table(const ReportDiff& diff) {
  std::string out = "metric                          a         b         delta\n";
  for (const auto& row : diff.aggregate) {
    char line[160];
    std::snprintf(line, sizeof line, "%-30s %-9s %-9s %+.4f\n", row.name.c_str(),
                  fmt(row.a).c_str(), fmt(row.b).c_str(), row.delta);
    out += line;
  }
  for (const auto& [name, rows] : diff.per_class) {
    for (const auto& row : rows) {
      char line[200];
      std::snprintf(line, sizeof line, "%-30s %-9s %-9s %+.4f\n",
                    (name + "." + row.name).c_str(), fmt(row.a).c_str(),
                    fmt(row.b).c_str(), row.delta);
      out += line;
    }
  }
  return out;
}

}  // namespace plantner
