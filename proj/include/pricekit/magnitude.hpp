#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pricekit/filters.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

// One log price change, conditional on a change (dp != 0), with prices
// converted from minor units at this boundary.
struct ChangeSample {
  int product_index = 0;  // into the FilterResult vector handed in
  std::string store;
  std::string category;
  int week = 0;  // 1-based week of the new price
  double dp = 0.0;
};

// Samples for every unmasked change of the chosen series.
std::vector<ChangeSample> log_changes(const std::vector<FilterResult>& products, SeriesKind kind);
std::vector<double> log_changes_of(const std::vector<Cents>& series, const BoolVec& mask = {});

// Changes per year from the expected-duration path: N = 52 / duration.
double annualized_changes(double expected_duration_weeks);

struct StandardizeResult {
  std::vector<double> z;       // pooled standardized changes over retained groups
  int groups_retained = 0;
  int groups_excluded = 0;     // fewer than 2 samples or zero dispersion
  std::vector<std::string> excluded_groups;
};

// Z = (dp - group mean) / group sd with sample sd (n-1), grouped by
// category x store. Within every retained group mean(Z) = 0 and sd(Z) = 1
// to 1e-10.
StandardizeResult standardize(const std::vector<ChangeSample>& samples);

// Pearson kurtosis m4/m2^2 with population moments (divide by n), not
// excess. Requires n >= 4 and nonzero variance.
double kurtosis(const std::vector<double>& x);

double variance_population(const std::vector<double>& x);
double variance_sample(const std::vector<double>& x);

// N(dp) x var(dp), population variance.
double responsiveness(double annualized_n, const std::vector<double>& dps);

// kur(dp)/N(dp) with the kurtosis taken from standardized pooled changes.
double sufficient_statistic(double standardized_kurtosis, double annualized_n);

struct BootstrapInterval {
  double low = 0.0;
  double high = 0.0;
  int undefined = 0;  // replicates where the statistic was undefined (NaN)
};

// Percentile 2.5/97.5 interval over B cluster resamples. The resampling
// unit is the product: each replicate draws n_items product indices with
// replacement, preserving within-product time dependence. Replicate r uses
// the (seed, r) substream, so results do not depend on evaluation order.
// Throws NumericError when the statistic is undefined on more than 10% of
// replicates.
BootstrapInterval bootstrap_ci(const std::function<double(const std::vector<int>&)>& statistic,
                               int n_items, int b, std::uint64_t seed);

// Type-7 (linear interpolation) quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace pricekit
