#include "pricekit/rigidity.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace pricekit {

BoolVec change_indicators(const std::vector<Cents>& series, const BoolVec& mask) {
  if (series.size() < 2) throw std::invalid_argument("change_indicators: series length < 2");
  if (!mask.empty() && mask.size() != series.size())
    throw std::invalid_argument("change_indicators: mask length mismatch");
  BoolVec out(series.size() - 1, 0);
  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    if (!mask.empty() && (mask[t] || mask[t + 1])) continue;
    out[t] = series[t + 1] != series[t] ? 1 : 0;
  }
  return out;
}

ChangeCount count_changes(const std::vector<Cents>& series, const BoolVec& mask) {
  ChangeCount c;
  if (series.size() < 2) return c;
  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    if (!mask.empty() && (mask[t] || mask[t + 1])) continue;
    c.transitions++;
    if (series[t + 1] != series[t]) c.changes++;
  }
  return c;
}

double ChangeCount::frequency() const {
  if (transitions == 0) throw NumericError("frequency: zero transitions");
  return static_cast<double>(changes) / static_cast<double>(transitions);
}

double pooled_frequency(const std::vector<ChangeCount>& group) {
  long changes = 0, transitions = 0;
  for (const auto& c : group) {
    changes += c.changes;
    transitions += c.transitions;
  }
  if (transitions == 0) throw NumericError("pooled_frequency: zero transitions in group");
  return static_cast<double>(changes) / static_cast<double>(transitions);
}

double implied_duration(double f) {
  if (f < 0.0 || f > 1.0) throw std::invalid_argument("implied_duration: f outside [0, 1]");
  if (f == 0.0) return std::numeric_limits<double>::infinity();
  if (f == 1.0) return 0.0;
  return -1.0 / std::log1p(-f);
}

ExpectedDurationResult expected_duration(const std::vector<double>& per_product_frequencies) {
  ExpectedDurationResult r;
  double sum = 0.0;
  for (double f : per_product_frequencies) {
    if (f <= 0.0) {
      r.n_dropped++;
      continue;
    }
    sum += implied_duration(f);
    r.n_used++;
  }
  if (r.n_used == 0) throw NumericError("expected_duration: all products have zero price changes");
  r.weeks = sum / r.n_used;
  return r;
}

std::vector<RigidityRow> rigidity_table(const std::vector<FilterResult>& products, GroupBy group_by) {
  auto key_of = [group_by](const FilterResult& fr) -> std::pair<std::string, std::string> {
    switch (group_by) {
      case GroupBy::Panel: return {"", ""};
      case GroupBy::Store: return {fr.rec->store, ""};
      case GroupBy::Category: return {"", fr.rec->category};
      case GroupBy::StoreCategory: return {fr.rec->store, fr.rec->category};
    }
    return {"", ""};
  };

  struct Acc {
    int n_products = 0;
    long changes = 0, transitions = 0;
    std::vector<double> per_product_f;
  };
  std::map<std::pair<std::string, std::string>, std::array<Acc, kSeriesKinds>> groups;

  for (const auto& fr : products) {
    auto& accs = groups[key_of(fr)];
    for (int k = 0; k < kSeriesKinds; ++k) {
      const auto c = count_changes(fr.series[static_cast<std::size_t>(k)], fr.mask);
      auto& a = accs[static_cast<std::size_t>(k)];
      a.n_products++;
      a.changes += c.changes;
      a.transitions += c.transitions;
      a.per_product_f.push_back(c.transitions == 0 ? 0.0 : c.frequency());
    }
  }

  std::vector<RigidityRow> rows;
  for (const auto& [key, accs] : groups) {
    for (int k = 0; k < kSeriesKinds; ++k) {
      const auto& a = accs[static_cast<std::size_t>(k)];
      RigidityRow row;
      row.store = key.first;
      row.category = key.second;
      row.kind = static_cast<SeriesKind>(k);
      row.n_products = a.n_products;
      row.n_changes = a.changes;
      row.n_transitions = a.transitions;
      row.frequency =
          a.transitions == 0 ? 0.0 : static_cast<double>(a.changes) / static_cast<double>(a.transitions);
      row.implied = implied_duration(row.frequency);
      try {
        const auto ed = expected_duration(a.per_product_f);
        row.expected = ed.weeks;
        row.n_dropped_zero_change = ed.n_dropped;
      } catch (const NumericError&) {
        row.expected = std::numeric_limits<double>::quiet_NaN();
        row.n_dropped_zero_change = a.n_products;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace pricekit
