#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pricekit/panel.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

// Weekly pricing policy of a simulated store. Sales are V-shaped by
// construction: the latent regular price is frozen for the length of the
// cut and the transaction price returns to it exactly, so any policy whose
// sale lengths stay within the filter window is oracle-recoverable.
struct StorePolicy {
  std::string format = "HiLo";           // EDLP / HiLo / HYB label (metadata)
  double regular_change_hazard = 0.05;   // per idle week
  double regular_change_mu = -2.5;       // lognormal log-size of |dlog price|
  double regular_change_sigma = 0.35;
  double sale_hazard = 0.10;             // per idle week
  std::vector<double> sale_length_weights = {0.3, 0.3, 0.2, 0.1, 0.06, 0.04};  // lengths 1..k
  double sale_depth_min = 0.10;          // uniform log discount
  double sale_depth_max = 0.45;
  bool promote_sales = true;             // posted regular stays fixed during a cut
  bool label_cuts_as_regular = false;    // posted regular follows the cut
  double nine_ending_prob = 0.9;
  double initial_log_mu = 5.9915;        // ln(400 cents) ~ C$4 median
  double initial_log_sigma = 0.5;

  double mean_sale_length() const;
  void validate() const;
};

// Stationary change frequencies implied by the policy's hazard algebra:
//   f_trans  = (2s + (1-s)q) / (1 + s*m)
//   f_posted = (1-s)q / (1 + s*m)   (promoted cuts; equals f_trans when cuts
//                                    are labeled as regular price changes)
// with s the sale hazard, q the regular-change hazard and m the mean sale
// length.
struct ImpliedFrequencies {
  double transaction = 0.0;
  double posted_regular = 0.0;
};
ImpliedFrequencies implied_frequencies(const StorePolicy& policy);

struct SimStore {
  std::string store_id;
  StorePolicy policy;
  int shared_products = 0;   // products carried by every store (same ids)
  int private_products = 0;  // store-specific private label products
};

struct SimConfig {
  int weeks = 52;
  std::uint64_t seed = 1;
  CivilDate start_date{2003, 7, 30};
  std::vector<SimStore> stores;
};

struct TrueSaleEvent {
  int start_week = 0;  // 1-based
  int end_week = 0;    // inclusive
  Cents regular = 0;
  Cents sale_price = 0;
};

// Per product: the latent regular price, sale flags, and the event list.
// true_regular equals the transaction price on every non-sale week.
struct GroundTruth {
  std::vector<Cents> true_regular;
  BoolVec true_sale;
  std::vector<TrueSaleEvent> events;
};

struct SimResult {
  PricePanel panel;
  std::vector<GroundTruth> truth;  // aligned with panel.products
};

// Deterministic under (config, seed); per-product substreams make the
// generation order irrelevant. Product state starts from the policy's
// stationary distribution, so measured frequencies have no warm-up bias.
SimResult simulate_panel(const SimConfig& config);

// Sidecar ground-truth table: store, product, week, true_regular, true_sale.
void write_ground_truth(const SimResult& result, std::ostream& out);

// Nearest minor-unit price ending in 9 (ties round up).
Cents snap_to_nine(Cents price);

}  // namespace pricekit
