#pragma once

#include <string>
#include <vector>

#include "pricekit/filters.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

// indicator_t = (x_{t+1} != x_t), length T-1. A transition touching a masked
// week on either side is reported as not-a-change and excluded from counts:
// masked gaps break the chain.
BoolVec change_indicators(const std::vector<Cents>& series, const BoolVec& mask = {});

struct ChangeCount {
  long changes = 0;
  long transitions = 0;

  double frequency() const;  // changes / transitions; throws on 0 transitions
};

ChangeCount count_changes(const std::vector<Cents>& series, const BoolVec& mask = {});

// Pooled frequency over a group of per-product counts.
double pooled_frequency(const std::vector<ChangeCount>& group);

// Implied duration -1/ln(1-f). Returns +inf at f = 0 and 0 at f = 1 (the
// documented degenerate limit); throws on f outside [0, 1].
double implied_duration(double f);

struct ExpectedDurationResult {
  double weeks = 0.0;   // mean of per-product implied durations
  int n_used = 0;
  int n_dropped = 0;    // products with zero changes
};

// Mean of -1/ln(1-f_i) over products with f_i > 0; products with no price
// change are dropped and counted. Throws NumericError when every product is
// constant.
ExpectedDurationResult expected_duration(const std::vector<double>& per_product_frequencies);

enum class GroupBy { Panel, Store, Category, StoreCategory };

struct RigidityRow {
  std::string store;     // empty = all
  std::string category;  // empty = all
  SeriesKind kind = SeriesKind::Transaction;
  int n_products = 0;
  long n_changes = 0;
  long n_transitions = 0;
  double frequency = 0.0;
  double implied = 0.0;         // +inf possible
  double expected = 0.0;        // NaN when undefined (all products constant)
  int n_dropped_zero_change = 0;
};

// One row per (group, series kind); group keys are composable so the
// category-level tables fall out of the same operation.
std::vector<RigidityRow> rigidity_table(const std::vector<FilterResult>& products, GroupBy group_by);

}  // namespace pricekit
