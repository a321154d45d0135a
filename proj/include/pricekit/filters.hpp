#pragma once

#include <array>
#include <string>
#include <vector>

#include "pricekit/panel.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

// --- temporary price-cut filtering -----------------------------------------
//
// filter_sales_a lifts V-shaped temporary price cuts back to the running
// regular price. It maintains a regular price r (initialized to the first
// observation). At week t:
//   p_t == r : output r.
//   p_t >  r : regular increase, r <- p_t.
//   p_t <  r : a sale candidate. If some k with t < k <= t + max_sale_len has
//              p_k == r and p_j < r for all j in [t, k-1], weeks [t, k-1] are
//              a sale (output r, flag set) and scanning resumes at k.
//              Otherwise (no exact return within the window, an intermediate
//              price above r, or the series ends first) it is a regular
//              decrease: r <- p_t.
//
// Return-to-regular is decided by exact minor-unit equality. An intermediate
// price above r aborts the candidate; the return week itself is not a sale
// week.
struct SalesFilterResult {
  std::vector<Cents> filtered;
  BoolVec flags;  // true exactly on sale weeks
};
SalesFilterResult filter_sales_a(const std::vector<Cents>& transaction, int max_sale_len = 6);

// Rolling-mode reference price: raw_t is the modal price in the window
// [t-h, t+h] (h = (window-1)/2) truncated at the series bounds, ties broken
// by preferring raw_{t-1}, then the observed price p_t, then the smallest
// tied value. A left-to-right alignment pass then moves each raw change
// point with new value b to the smallest t* within align_radius weeks where
// p_{t*} == b, keeping change points strictly ordered (clamped to one past
// the previous aligned point when needed).
std::vector<Cents> reference_prices(const std::vector<Cents>& transaction, int window = 13,
                                    int align_radius = 6);

// --- sale events ------------------------------------------------------------

enum class Baseline { Posted = 0, Filtered = 1, Reference = 2 };
const char* to_string(Baseline b);

// Maximal contiguous spell with transaction strictly below the baseline.
struct SaleEvent {
  Baseline baseline = Baseline::Posted;
  int start_week = 0;  // 1-based, inclusive
  int end_week = 0;    // inclusive
  Cents depth = 0;     // max(baseline - transaction) over the spell
};

std::vector<SaleEvent> extract_sale_events(const std::vector<Cents>& transaction,
                                           const std::vector<Cents>& baseline, Baseline kind);

// --- endpoint policies ------------------------------------------------------

enum class EndpointPolicyKind { None, ConditionalExclude, Trim };

struct EndpointPolicy {
  EndpointPolicyKind kind = EndpointPolicyKind::None;
  int margin = 6;
};
EndpointPolicyKind parse_endpoint_policy(const std::string& s);
const char* to_string(EndpointPolicyKind k);

// Per-week exclusion mask (true = excluded from downstream statistics).
//   none               : all false.
//   trim               : weeks within `margin` of either end.
//   conditional_exclude: weeks from the first transaction-price decrease in
//                        the final `margin` weeks that never moves up again
//                        through the series end.
BoolVec endpoint_mask(const std::vector<Cents>& transaction, const EndpointPolicy& policy);

// --- per-product bundle -----------------------------------------------------

struct FilterParams {
  int max_sale_len = 6;
  int ref_window = 13;     // odd, >= 3
  int align_radius = 6;
  EndpointPolicy endpoint;
};

// The four aligned series for one product plus sale flags and the endpoint
// exclusion mask. filtered_t >= transaction_t everywhere; the reference
// series has no one-sided bound (it removes spikes too).
struct FilterResult {
  const ProductRecord* rec = nullptr;
  std::array<std::vector<Cents>, kSeriesKinds> series;
  BoolVec sale_posted;     // transaction < posted regular
  BoolVec sale_filtered;   // filtered > transaction
  BoolVec sale_reference;  // reference > transaction
  BoolVec mask;            // endpoint exclusions

  const std::vector<Cents>& of(SeriesKind k) const { return series[static_cast<int>(k)]; }
};

FilterResult build_filter_result(const ProductRecord& rec, const FilterParams& params);

// All products of a panel, in panel order.
std::vector<FilterResult> prepare_series(const PricePanel& panel, const FilterParams& params);

}  // namespace pricekit
