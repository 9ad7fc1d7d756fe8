#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace plantner {

/// K x K cross-annotator confusion counts: cell (i, j) counts items labeled
/// categories[i] by annotator A and categories[j] by annotator B.
struct AgreementTable {
  std::vector<std::string> categories;
  std::vector<std::vector<std::int64_t>> counts;
  std::int64_t total = 0;

  std::size_t k() const { return categories.size(); }
};

struct IaaReport {
  double p0 = 0.0;
  double pe = 0.0;
  double kappa = 0.0;
  double g_index = 0.0;
  std::size_t k = 0;
};

/// Tabulates two equal-length parallel annotations.  Throws Error on length
/// mismatch, labels outside `categories`, or empty input (total must be > 0).
AgreementTable build_table(std::span<const std::string> ann_a,
                           std::span<const std::string> ann_b,
                           const std::vector<std::string>& categories);

double observed_agreement(const AgreementTable& table);  // P0
double chance_agreement(const AgreementTable& table);    // Pe from the marginals

/// kappa = 1 - (1 - P0) / (1 - Pe).  Throws Error when Pe = 1 (both
/// marginals concentrated in one category), where the metric is undefined.
double cohen_kappa(const AgreementTable& table);

/// G = 1 - (1 - P0) / (1 - Pk) with uniform chance Pk = 1/k.  Requires k >= 2.
double g_index(const AgreementTable& table);

/// All four statistics of one table.
IaaReport iaa_report(const AgreementTable& table);

struct PairwiseIaa {
  struct Pair {
    std::size_t annotator_a;
    std::size_t annotator_b;
    IaaReport report;
  };
  std::vector<Pair> pairs;  // every unordered pair, lexicographic order
  IaaReport mean;           // arithmetic mean over pairs
};

/// Computes kappa and G for every unordered annotator pair and averages.
/// Requires >= 2 annotators with equal-length annotations; a per-pair
/// undefined metric is reported as an Error naming the offending pair.
PairwiseIaa pairwise_iaa(std::span<const std::vector<std::string>> annotations,
                         const std::vector<std::string>& categories);

}  // namespace plantner
