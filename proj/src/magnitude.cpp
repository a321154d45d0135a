#include "pricekit/magnitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pricekit/parallel.hpp"
#include "pricekit/random.hpp"

namespace pricekit {

std::vector<double> log_changes_of(const std::vector<Cents>& series, const BoolVec& mask) {
  std::vector<double> out;
  if (series.size() < 2) return out;
  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    if (!mask.empty() && (mask[t] || mask[t + 1])) continue;
    if (series[t + 1] == series[t]) continue;
    out.push_back(std::log(static_cast<double>(series[t + 1])) -
                  std::log(static_cast<double>(series[t])));
  }
  return out;
}

std::vector<ChangeSample> log_changes(const std::vector<FilterResult>& products, SeriesKind kind) {
  std::vector<ChangeSample> out;
  for (std::size_t idx = 0; idx < products.size(); ++idx) {
    const auto& fr = products[idx];
    const auto& s = fr.of(kind);
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
      if (!fr.mask.empty() && (fr.mask[t] || fr.mask[t + 1])) continue;
      if (s[t + 1] == s[t]) continue;
      ChangeSample cs;
      cs.product_index = static_cast<int>(idx);
      cs.store = fr.rec->store;
      cs.category = fr.rec->category;
      cs.week = fr.rec->first_week + static_cast<int>(t) + 1;
      cs.dp = std::log(static_cast<double>(s[t + 1])) - std::log(static_cast<double>(s[t]));
      out.push_back(std::move(cs));
    }
  }
  return out;
}

double annualized_changes(double expected_duration_weeks) {
  if (!(expected_duration_weeks > 0.0) || !std::isfinite(expected_duration_weeks))
    throw NumericError("annualized_changes: undefined duration");
  return 52.0 / expected_duration_weeks;
}

StandardizeResult standardize(const std::vector<ChangeSample>& samples) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& s : samples) groups[{s.store, s.category}].push_back(s.dp);

  StandardizeResult out;
  for (const auto& [key, dps] : groups) {
    if (dps.size() < 2) {
      out.groups_excluded++;
      out.excluded_groups.push_back(key.first + "/" + key.second + " (n<2)");
      continue;
    }
    double mean = 0.0;
    for (double v : dps) mean += v;
    mean /= static_cast<double>(dps.size());
    double ss = 0.0;
    for (double v : dps) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(dps.size() - 1));
    if (!(sd > 0.0)) {
      out.groups_excluded++;
      out.excluded_groups.push_back(key.first + "/" + key.second + " (sd=0)");
      continue;
    }
    for (double v : dps) out.z.push_back((v - mean) / sd);
    out.groups_retained++;
  }
  return out;
}

double variance_population(const std::vector<double>& x) {
  if (x.size() < 1) throw NumericError("variance: empty sample");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size());
}

double variance_sample(const std::vector<double>& x) {
  if (x.size() < 2) throw NumericError("variance_sample: need n >= 2");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

double kurtosis(const std::vector<double>& x) {
  if (x.size() < 4) throw NumericError("kurtosis: need n >= 4");
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw NumericError("kurtosis: zero variance");
  return m4 / (m2 * m2);
}

double responsiveness(double annualized_n, const std::vector<double>& dps) {
  if (dps.size() < 2) throw NumericError("responsiveness: need at least 2 changes");
  return annualized_n * variance_population(dps);
}

double sufficient_statistic(double standardized_kurtosis, double annualized_n) {
  if (!(annualized_n > 0.0)) throw NumericError("sufficient_statistic: N must be positive");
  return standardized_kurtosis / annualized_n;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw NumericError("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

BootstrapInterval bootstrap_ci(const std::function<double(const std::vector<int>&)>& statistic,
                               int n_items, int b, std::uint64_t seed) {
  if (b < 2) throw std::invalid_argument("bootstrap_ci: B < 2");
  if (n_items < 1) throw NumericError("bootstrap_ci: empty cluster set");

  std::vector<double> values(static_cast<std::size_t>(b),
                             std::numeric_limits<double>::quiet_NaN());
  parallel_for(b, [&](int r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    std::vector<int> draw(static_cast<std::size_t>(n_items));
    for (auto& d : draw)
      d = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_items)));
    double v;
    try {
      v = statistic(draw);
    } catch (const NumericError&) {
      v = std::numeric_limits<double>::quiet_NaN();
    }
    values[static_cast<std::size_t>(r)] = v;
  });

  BootstrapInterval ci;
  std::vector<double> defined;
  defined.reserve(values.size());
  for (double v : values) {
    if (std::isnan(v)) {
      ci.undefined++;
    } else {
      defined.push_back(v);
    }
  }
  if (ci.undefined * 10 > b)
    throw NumericError("bootstrap_ci: statistic undefined on " + std::to_string(ci.undefined) +
                       " of " + std::to_string(b) + " resamples (>10%)");
  std::sort(defined.begin(), defined.end());
  ci.low = quantile_sorted(defined, 0.025);
  ci.high = quantile_sorted(defined, 0.975);
  return ci;
}

}  // namespace pricekit
