#include "pricekit/filters.hpp"

#include <algorithm>
#include <map>

namespace pricekit {

SalesFilterResult filter_sales_a(const std::vector<Cents>& tx, int max_sale_len) {
  const int n = static_cast<int>(tx.size());
  if (n < 1) throw std::invalid_argument("filter_sales_a: empty series");
  if (max_sale_len < 1) throw std::invalid_argument("filter_sales_a: max_sale_len < 1");

  SalesFilterResult out;
  out.filtered.resize(tx.size());
  out.flags.assign(tx.size(), 0);

  Cents r = tx[0];
  int t = 0;
  while (t < n) {
    const Cents p = tx[static_cast<std::size_t>(t)];
    if (p >= r) {
      r = p;  // equal: unchanged; above: regular increase
      out.filtered[static_cast<std::size_t>(t)] = r;
      ++t;
      continue;
    }
    // Sale candidate: look for an exact return to r within the window,
    // with every intermediate week strictly below r.
    int ret = -1;
    for (int k = t + 1; k <= t + max_sale_len && k < n; ++k) {
      const Cents q = tx[static_cast<std::size_t>(k)];
      if (q == r) {
        ret = k;
        break;
      }
      if (q > r) break;  // aborts the candidate
    }
    if (ret >= 0) {
      for (int j = t; j < ret; ++j) {
        out.filtered[static_cast<std::size_t>(j)] = r;
        out.flags[static_cast<std::size_t>(j)] = 1;
      }
      t = ret;  // the return week is handled as p == r
    } else {
      r = p;  // regular decrease
      out.filtered[static_cast<std::size_t>(t)] = r;
      ++t;
    }
  }
  return out;
}

namespace {

// Modal price in [lo, hi]; ties prefer `prev`, then `current`, then the
// smallest tied value. prev < 0 means no previous raw value.
Cents window_mode(const std::vector<Cents>& v, int lo, int hi, Cents prev, Cents current) {
  std::map<Cents, int> counts;
  for (int i = lo; i <= hi; ++i) counts[v[static_cast<std::size_t>(i)]]++;
  int best = 0;
  for (const auto& [value, n] : counts) best = std::max(best, n);
  if (prev >= 0 && counts.count(prev) && counts[prev] == best) return prev;
  if (counts.count(current) && counts[current] == best) return current;
  for (const auto& [value, n] : counts)
    if (n == best) return value;  // std::map iterates ascending
  return current;
}

}  // namespace

namespace {

std::vector<Cents> reference_pass(const std::vector<Cents>& tx, int window, int align_radius) {
  const int n = static_cast<int>(tx.size());

  const int h = (window - 1) / 2;
  std::vector<Cents> raw(tx.size());
  Cents prev = -1;
  for (int t = 0; t < n; ++t) {
    const int lo = std::max(0, t - h);
    const int hi = std::min(n - 1, t + h);
    raw[static_cast<std::size_t>(t)] = window_mode(tx, lo, hi, prev, tx[static_cast<std::size_t>(t)]);
    prev = raw[static_cast<std::size_t>(t)];
  }

  // Alignment: move each raw change point to the nearest-from-the-left week
  // where the observed price equals the new value, clamped so change points
  // stay strictly ordered.
  struct Change {
    int at;
    Cents value;
  };
  std::vector<Change> changes;
  for (int t = 1; t < n; ++t)
    if (raw[static_cast<std::size_t>(t)] != raw[static_cast<std::size_t>(t - 1)])
      changes.push_back({t, raw[static_cast<std::size_t>(t)]});

  int prev_cp = -1;  // index of previous aligned change point
  std::vector<Change> aligned;
  for (const auto& ch : changes) {
    const int lo = std::max({ch.at - align_radius, prev_cp + 1, 1});
    const int hi = std::min(ch.at + align_radius, n - 1);
    int target = -1;
    for (int t = lo; t <= hi; ++t) {
      if (tx[static_cast<std::size_t>(t)] == ch.value) {
        target = t;
        break;
      }
    }
    if (target < 0) target = std::max(ch.at, prev_cp + 1);  // keep, clamped past neighbor
    if (target > n - 1) continue;                           // pushed off the series
    if (!aligned.empty() && aligned.back().value == ch.value) {
      // Clamping can collapse an intermediate segment; merge.
      continue;
    }
    aligned.push_back({target, ch.value});
    prev_cp = target;
  }

  std::vector<Cents> ref(tx.size(), raw[0]);
  for (const auto& ch : aligned)
    for (int t = ch.at; t < n; ++t) ref[static_cast<std::size_t>(t)] = ch.value;
  return ref;
}

}  // namespace

std::vector<Cents> reference_prices(const std::vector<Cents>& tx, int window, int align_radius) {
  if (tx.size() < 2) throw std::invalid_argument("reference_prices: series length < 2");
  if (window < 3 || window % 2 == 0)
    throw std::invalid_argument("reference_prices: window must be odd and >= 3");
  if (align_radius < 0) throw std::invalid_argument("reference_prices: align_radius < 0");

  // Iterate the smoothing pass to a fixed point. A single pass can leave
  // one- or two-week orphan segments at the series boundaries (truncated
  // head/tail windows over-weight short-lived prices there); re-passing
  // merges them and makes the operator idempotent. Interior change points
  // are stable across passes because the aligned series attains each value
  // at its own change point.
  auto ref = reference_pass(tx, window, align_radius);
  for (int i = 0; i < 16; ++i) {
    auto next = reference_pass(ref, window, align_radius);
    if (next == ref) break;
    ref = std::move(next);
  }
  return ref;
}

const char* to_string(Baseline b) {
  switch (b) {
    case Baseline::Posted: return "posted";
    case Baseline::Filtered: return "filtered";
    case Baseline::Reference: return "reference";
  }
  return "?";
}

std::vector<SaleEvent> extract_sale_events(const std::vector<Cents>& tx,
                                           const std::vector<Cents>& baseline, Baseline kind) {
  if (tx.size() != baseline.size()) throw DataError("extract_sale_events: length mismatch");
  std::vector<SaleEvent> events;
  const int n = static_cast<int>(tx.size());
  int t = 0;
  while (t < n) {
    if (tx[static_cast<std::size_t>(t)] < baseline[static_cast<std::size_t>(t)]) {
      SaleEvent ev;
      ev.baseline = kind;
      ev.start_week = t + 1;
      ev.depth = 0;
      while (t < n && tx[static_cast<std::size_t>(t)] < baseline[static_cast<std::size_t>(t)]) {
        ev.depth = std::max(ev.depth, baseline[static_cast<std::size_t>(t)] - tx[static_cast<std::size_t>(t)]);
        ++t;
      }
      ev.end_week = t;  // 1-based inclusive
      events.push_back(ev);
    } else {
      ++t;
    }
  }
  return events;
}

EndpointPolicyKind parse_endpoint_policy(const std::string& s) {
  if (s == "none") return EndpointPolicyKind::None;
  if (s == "conditional" || s == "conditional_exclude") return EndpointPolicyKind::ConditionalExclude;
  if (s == "trim") return EndpointPolicyKind::Trim;
  throw std::invalid_argument("unknown endpoint policy: '" + s + "'");
}

const char* to_string(EndpointPolicyKind k) {
  switch (k) {
    case EndpointPolicyKind::None: return "none";
    case EndpointPolicyKind::ConditionalExclude: return "conditional";
    case EndpointPolicyKind::Trim: return "trim";
  }
  return "?";
}

BoolVec endpoint_mask(const std::vector<Cents>& tx, const EndpointPolicy& policy) {
  const int n = static_cast<int>(tx.size());
  BoolVec mask(tx.size(), 0);
  if (policy.kind == EndpointPolicyKind::None) return mask;
  if (policy.margin < 0) throw std::invalid_argument("endpoint policy: margin < 0");
  if (2 * policy.margin >= n) throw DataError("endpoint policy: margin too large for series length");

  if (policy.kind == EndpointPolicyKind::Trim) {
    for (int t = 0; t < policy.margin; ++t) {
      mask[static_cast<std::size_t>(t)] = 1;
      mask[static_cast<std::size_t>(n - 1 - t)] = 1;
    }
    return mask;
  }

  // ConditionalExclude: the earliest decrease within the final `margin`
  // weeks after which the price never moves up again masks everything from
  // the decrease week through the series end.
  for (int t = std::max(1, n - policy.margin); t < n; ++t) {
    if (tx[static_cast<std::size_t>(t)] >= tx[static_cast<std::size_t>(t - 1)]) continue;
    bool bounces = false;
    for (int j = t + 1; j < n; ++j) {
      if (tx[static_cast<std::size_t>(j)] > tx[static_cast<std::size_t>(j - 1)]) {
        bounces = true;
        break;
      }
    }
    if (!bounces) {
      for (int j = t; j < n; ++j) mask[static_cast<std::size_t>(j)] = 1;
      break;
    }
  }
  return mask;
}

FilterResult build_filter_result(const ProductRecord& rec, const FilterParams& params) {
  FilterResult out;
  out.rec = &rec;
  out.series[static_cast<int>(SeriesKind::Transaction)] = rec.transaction;
  out.series[static_cast<int>(SeriesKind::PostedRegular)] = rec.posted_regular;

  auto fs = filter_sales_a(rec.transaction, params.max_sale_len);
  out.series[static_cast<int>(SeriesKind::Filtered)] = std::move(fs.filtered);
  out.sale_filtered = std::move(fs.flags);
  out.series[static_cast<int>(SeriesKind::Reference)] =
      reference_prices(rec.transaction, params.ref_window, params.align_radius);

  const auto n = rec.transaction.size();
  out.sale_posted.assign(n, 0);
  out.sale_reference.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    out.sale_posted[i] = rec.transaction[i] < rec.posted_regular[i] ? 1 : 0;
    out.sale_reference[i] =
        rec.transaction[i] < out.series[static_cast<int>(SeriesKind::Reference)][i] ? 1 : 0;
  }
  out.mask = endpoint_mask(rec.transaction, params.endpoint);
  return out;
}

std::vector<FilterResult> prepare_series(const PricePanel& panel, const FilterParams& params) {
  std::vector<FilterResult> out;
  out.reserve(panel.products.size());
  for (const auto& rec : panel.products) out.push_back(build_filter_result(rec, params));
  return out;
}

}  // namespace pricekit
