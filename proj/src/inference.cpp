#include "pricekit/inference.hpp"

#include <algorithm>
#include <cmath>

#include "pricekit/special.hpp"

namespace pricekit {

ProportionTestResult chi2_proportions(long c1, long n1, long c2, long n2) {
  if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("chi2_proportions: empty sample");
  if (c1 < 0 || c1 > n1 || c2 < 0 || c2 > n2)
    throw std::invalid_argument("chi2_proportions: counts outside [0, n]");

  ProportionTestResult r;
  r.c1 = c1;
  r.n1 = n1;
  r.c2 = c2;
  r.n2 = n2;

  const double a = static_cast<double>(c1), b = static_cast<double>(n1 - c1);
  const double c = static_cast<double>(c2), d = static_cast<double>(n2 - c2);
  const double n = a + b + c + d;
  const double col1 = a + c, col2 = b + d;
  if (col1 == 0.0 || col2 == 0.0) {
    r.degenerate = true;
    r.chi2 = 0.0;
    r.p = 1.0;
    return r;
  }
  const double det = a * d - b * c;
  r.chi2 = n * det * det /
           (static_cast<double>(n1) * static_cast<double>(n2) * col1 * col2);
  r.p = chi2_sf(r.chi2, 1.0);
  return r;
}

RankSumResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("wilcoxon_rank_sum: empty sample");
  const std::size_t n1 = x.size(), n2 = y.size(), n = n1 + n2;

  struct Entry {
    double v;
    bool first;
  };
  std::vector<Entry> pooled;
  pooled.reserve(n);
  for (double v : x) pooled.push_back({v, true});
  for (double v : y) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(), [](const Entry& a, const Entry& b) { return a.v < b.v; });

  // Midranks and tie correction.
  double w = 0.0;
  double tie_sum = 0.0;  // sum over tie groups of (t^3 - t)
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pooled[j].v == pooled[i].v) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].first) w += midrank;
    if (t > 1.0) tie_sum += t * t * t - t;
    i = j;
  }

  RankSumResult r;
  r.w = w;
  const double dn = static_cast<double>(n);
  const double mean = static_cast<double>(n1) * (dn + 1.0) / 2.0;
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
  if (var <= 0.0) {
    r.z = 0.0;  // every pooled value identical
    r.p = 1.0;
    return r;
  }
  r.z = (w - mean) / std::sqrt(var);
  r.p = 2.0 * normal_sf(std::fabs(r.z));
  return r;
}

SyncIndexResult fk_index(const std::vector<BoolVec>& change_matrix) {
  SyncIndexResult r;
  r.n_stores = static_cast<int>(change_matrix.size());
  if (r.n_stores < 2) throw std::invalid_argument("fk_index: need at least 2 stores");
  const std::size_t weeks = change_matrix.front().size();
  if (weeks < 2) throw std::invalid_argument("fk_index: need at least 2 weeks");
  for (const auto& row : change_matrix)
    if (row.size() != weeks) throw std::invalid_argument("fk_index: ragged change matrix");

  r.weeks = static_cast<int>(weeks);
  std::vector<double> w(weeks, 0.0);
  for (std::size_t t = 0; t < weeks; ++t) {
    int changing = 0;
    for (const auto& row : change_matrix) changing += row[t] ? 1 : 0;
    w[t] = static_cast<double>(changing) / static_cast<double>(r.n_stores);
  }
  double wbar = 0.0;
  for (double v : w) wbar += v;
  wbar /= static_cast<double>(weeks);
  if (wbar <= 0.0 || wbar >= 1.0) {
    r.defined = false;
    return r;
  }
  double ss = 0.0;
  for (double v : w) ss += (v - wbar) * (v - wbar);
  r.value = std::sqrt(ss / (static_cast<double>(weeks) * wbar * (1.0 - wbar)));
  r.defined = true;
  return r;
}

}  // namespace pricekit
