#pragma once

#include <vector>

#include "pricekit/types.hpp"

namespace pricekit {

struct ProportionTestResult {
  long c1 = 0, n1 = 0, c2 = 0, n2 = 0;
  double chi2 = 0.0;
  double p = 1.0;          // chi-square df 1
  bool degenerate = false; // pooled margin empty (all successes or all failures)
};

// 2x2 Pearson chi-square test of equal proportions, no continuity
// correction. chi2 = 0 exactly when c1/n1 == c2/n2. An empty pooled margin
// yields statistic 0 with the degenerate flag set.
ProportionTestResult chi2_proportions(long c1, long n1, long c2, long n2);

struct RankSumResult {
  double w = 0.0;   // rank sum of the first sample (midranks)
  double z = 0.0;   // normal approximation, tie-corrected variance
  double p = 1.0;   // two-sided
};

// Wilcoxon/Mann-Whitney rank-sum test with midranks and tie-corrected
// variance, no continuity correction. z = 0 when every pooled value is
// identical.
RankSumResult wilcoxon_rank_sum(const std::vector<double>& x, const std::vector<double>& y);

struct SyncIndexResult {
  double value = 0.0;
  bool defined = false;  // undefined when no series changes, or all change every week
  int n_stores = 0;
  int weeks = 0;
};

// Fisher-Konieczny synchronization index of a stores x weeks change matrix:
// with w_t the fraction of stores changing at week t and wbar its mean,
//   value = sqrt( sum_t (w_t - wbar)^2 / (T * wbar * (1 - wbar)) ).
// 0 = perfect staggering, 1 = perfect synchronization; undefined at
// wbar in {0, 1}.
SyncIndexResult fk_index(const std::vector<BoolVec>& change_matrix);

}  // namespace pricekit
