#include "plantner/agreement.hpp"

#include <unordered_map>

#include "plantner/error.hpp"

namespace plantner {

AgreementTable build_table(std::span<const std::string> ann_a,
                           std::span<const std::string> ann_b,
                           const std::vector<std::string>& categories) {
  if (ann_a.size() != ann_b.size())
    throw Error("build_table: annotation lengths differ (" +
                std::to_string(ann_a.size()) + " vs " + std::to_string(ann_b.size()) +
                ")");
  if (ann_a.empty()) throw Error("build_table: no items (total must be > 0)");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < categories.size(); ++i) index[categories[i]] = i;

  AgreementTable table;
  table.categories = categories;
  table.counts.assign(categories.size(),
                      std::vector<std::int64_t>(categories.size(), 0));
  for (std::size_t i = 0; i < ann_a.size(); ++i) {
    auto a = index.find(ann_a[i]);
    auto b = index.find(ann_b[i]);
    if (a == index.end())
      throw Error("build_table: label '" + ann_a[i] + "' not in categories");
    if (b == index.end())
      throw Error("build_table: label '" + ann_b[i] + "' not in categories");
    ++table.counts[a->second][b->second];
  }
  table.total = static_cast<std::int64_t>(ann_a.size());
  return table;
}

double observed_agreement(const AgreementTable& table) {
  if (table.total <= 0) throw Error("agreement table is empty");
  std::int64_t diagonal = 0;
  for (std::size_t i = 0; i < table.k(); ++i) diagonal += table.counts[i][i];
  return static_cast<double>(diagonal) / static_cast<double>(table.total);
}

double chance_agreement(const AgreementTable& table) {
  if (table.total <= 0) throw Error("agreement table is empty");
  const double total = static_cast<double>(table.total);
  double pe = 0.0;
  for (std::size_t i = 0; i < table.k(); ++i) {
    std::int64_t row = 0, col = 0;
    for (std::size_t j = 0; j < table.k(); ++j) {
      row += table.counts[i][j];
      col += table.counts[j][i];
    }
    pe += (static_cast<double>(row) / total) * (static_cast<double>(col) / total);
  }
  return pe;
}

double cohen_kappa(const AgreementTable& table) {
  const double p0 = observed_agreement(table);
  const double pe = chance_agreement(table);
  if (pe >= 1.0)
    throw Error("cohen_kappa undefined: chance agreement Pe = 1 "
                "(all mass in one category for both annotators)");
  return 1.0 - (1.0 - p0) / (1.0 - pe);
}

double g_index(const AgreementTable& table) {
  if (table.k() < 2) throw Error("g_index requires at least 2 categories");
  const double p0 = observed_agreement(table);
  const double pk = 1.0 / static_cast<double>(table.k());
  return 1.0 - (1.0 - p0) / (1.0 - pk);
}

IaaReport iaa_report(const AgreementTable& table) {
  IaaReport report;
  report.p0 = observed_agreement(table);
  report.pe = chance_agreement(table);
  report.kappa = cohen_kappa(table);
  report.g_index = g_index(table);
  report.k = table.k();
  return report;
}

PairwiseIaa pairwise_iaa(std::span<const std::vector<std::string>> annotations,
                         const std::vector<std::string>& categories) {
  if (annotations.size() < 2)
    throw Error("pairwise_iaa requires at least 2 annotators");
  for (std::size_t i = 1; i < annotations.size(); ++i) {
    if (annotations[i].size() != annotations[0].size())
      throw Error("pairwise_iaa: annotator " + std::to_string(i) +
                  " has a different item count");
  }

  PairwiseIaa result;
  for (std::size_t a = 0; a < annotations.size(); ++a) {
    for (std::size_t b = a + 1; b < annotations.size(); ++b) {
      try {
        auto table = build_table(annotations[a], annotations[b], categories);
        result.pairs.push_back({a, b, iaa_report(table)});
      } catch (const Error& e) {
        throw Error("pair (" + std::to_string(a) + ", " + std::to_string(b) +
                    "): " + e.what());
      }
    }
  }

  IaaReport& mean = result.mean;
  for (const auto& pair : result.pairs) {
    mean.p0 += pair.report.p0;
    mean.pe += pair.report.pe;
    mean.kappa += pair.report.kappa;
    mean.g_index += pair.report.g_index;
  }
  const auto n = static_cast<double>(result.pairs.size());
  mean.p0 /= n;
  mean.pe /= n;
  mean.kappa /= n;
  mean.g_index /= n;
  mean.k = categories.size();
  return result;
}

}  // namespace plantner
