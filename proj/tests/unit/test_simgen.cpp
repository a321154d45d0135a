#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pricekit/filters.hpp"
#include "pricekit/rigidity.hpp"
#include "pricekit/config.hpp"
#include "pricekit/panel.hpp"
#include "pricekit/simgen.hpp"

using namespace pricekit;

namespace {

SimConfig small_config(std::uint64_t seed, bool label_cuts = false, int products = 50,
                       int weeks = 52) {
  SimConfig cfg;
  cfg.weeks = weeks;
  cfg.seed = seed;
  SimStore st;
  st.store_id = "s";
  st.shared_products = products;
  st.policy.label_cuts_as_regular = label_cuts;
  st.policy.promote_sales = !label_cuts;
  cfg.stores.push_back(st);
  return cfg;
}

}  // namespace

TEST_CASE("snap_to_nine: nearest 9-ending minor-unit price") {
  CHECK(snap_to_nine(106) == 109);
  CHECK(snap_to_nine(99) == 99);
  CHECK(snap_to_nine(103) == 99);
  CHECK(snap_to_nine(104) == 109);  // tie rounds up
  CHECK(snap_to_nine(9) == 9);
  CHECK(snap_to_nine(10) == 9);
}

TEST_CASE("simulate_panel: deterministic under the seed, byte-identical serialization") {
  const auto a = simulate_panel(small_config(7));
  const auto b = simulate_panel(small_config(7));
  std::ostringstream csv_a, csv_b, truth_a, truth_b;
  write_panel(a.panel, csv_a);
  write_panel(b.panel, csv_b);
  write_ground_truth(a, truth_a);
  write_ground_truth(b, truth_b);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(truth_a.str() == truth_b.str());

  const auto c = simulate_panel(small_config(8));
  std::ostringstream csv_c;
  write_panel(c.panel, csv_c);
  CHECK(csv_a.str() != csv_c.str());
}

TEST_CASE("simulate_panel: ground truth invariants") {
  const auto sim = simulate_panel(small_config(21));
  for (std::size_t i = 0; i < sim.panel.products.size(); ++i) {
    const auto& rec = sim.panel.products[i];
    const auto& truth = sim.truth[i];
    for (int w = 0; w < rec.weeks(); ++w) {
      const auto k = static_cast<std::size_t>(w);
      if (truth.true_sale[k]) {
        CHECK(rec.transaction[k] < truth.true_regular[k]);
      } else {
        CHECK(rec.transaction[k] == truth.true_regular[k]);
      }
      // A promoting store posts the latent regular price throughout.
      CHECK(rec.posted_regular[k] == truth.true_regular[k]);
      CHECK(rec.transaction[k] <= rec.posted_regular[k]);
      CHECK(rec.transaction[k] > 0);
    }
    // Events cover exactly the sale weeks.
    BoolVec from_events(static_cast<std::size_t>(rec.weeks()), 0);
    for (const auto& ev : truth.events)
      for (int w = ev.start_week; w <= ev.end_week; ++w)
        from_events[static_cast<std::size_t>(w - 1)] = 1;
    CHECK(from_events == truth.true_sale);
  }
}

TEST_CASE("simulate_panel: label_cuts_as_regular makes posted track transaction") {
  const auto sim = simulate_panel(small_config(33, true));
  for (const auto& rec : sim.panel.products)
    CHECK(rec.posted_regular == rec.transaction);
}

TEST_CASE("implied frequencies match measured frequencies within 3 MC standard errors") {
  // n_products * T >= 50,000.
  const auto cfg = small_config(3, false, 1000, 52);
  const auto implied = implied_frequencies(cfg.stores[0].policy);
  const auto sim = simulate_panel(cfg);

  long ch_t = 0, ch_p = 0, tr = 0;
  for (const auto& rec : sim.panel.products) {
    const auto ct = count_changes(rec.transaction);
    const auto cp = count_changes(rec.posted_regular);
    ch_t += ct.changes;
    ch_p += cp.changes;
    tr += ct.transitions;
  }
  const double ft = static_cast<double>(ch_t) / static_cast<double>(tr);
  const double fp = static_cast<double>(ch_p) / static_cast<double>(tr);
  const double se_t = std::sqrt(implied.transaction * (1 - implied.transaction) / static_cast<double>(tr));
  const double se_p = std::sqrt(implied.posted_regular * (1 - implied.posted_regular) / static_cast<double>(tr));
  CHECK(std::fabs(ft - implied.transaction) < 3 * se_t);
  CHECK(std::fabs(fp - implied.posted_regular) < 3 * se_p);
}

TEST_CASE("posted-regular rigidity contrast between labeling policies") {
  // Promoting store: posted regular far stickier than transaction.
  const auto promo = simulate_panel(small_config(5, false, 300));
  long ch_t = 0, ch_p = 0;
  for (const auto& rec : promo.panel.products) {
    ch_t += count_changes(rec.transaction).changes;
    ch_p += count_changes(rec.posted_regular).changes;
  }
  CHECK(ch_p * 3 < ch_t);

  // Labeling store: identical frequencies.
  const auto label = simulate_panel(small_config(5, true, 300));
  long lt = 0, lp = 0;
  for (const auto& rec : label.panel.products) {
    lt += count_changes(rec.transaction).changes;
    lp += count_changes(rec.posted_regular).changes;
  }
  CHECK(lt == lp);
}

TEST_CASE("frequency ordering on generated data: transaction >= posted and filtered") {
  const auto sim = simulate_panel(small_config(11, false, 200));
  long ch_t = 0, ch_p = 0, ch_f = 0;
  for (const auto& rec : sim.panel.products) {
    ch_t += count_changes(rec.transaction).changes;
    ch_p += count_changes(rec.posted_regular).changes;
    ch_f += count_changes(filter_sales_a(rec.transaction, 6).filtered).changes;
  }
  CHECK(ch_t >= ch_p);
  CHECK(ch_t >= ch_f);
}

TEST_CASE("policy validation rejects nonsense") {
  StorePolicy p;
  p.sale_hazard = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = StorePolicy{};
  p.sale_length_weights = {};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = StorePolicy{};
  p.promote_sales = true;
  p.label_cuts_as_regular = true;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = StorePolicy{};
  p.sale_depth_min = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  SimConfig cfg;
  CHECK_THROWS_AS(simulate_panel(cfg), std::invalid_argument);  // no stores
  cfg = small_config(1);
  cfg.weeks = 5;
  CHECK_THROWS_AS(simulate_panel(cfg), std::invalid_argument);  // weeks < 13
}

TEST_CASE("canadian-shaped fixture: 3 stores of 99/99/108 products give 15,912 observations") {
  auto cfg = load_preset("canadian");
  cfg.seed = 7;
  const auto sim = simulate_panel(cfg);
  CHECK(sim.panel.stores().size() == 3);
  CHECK(sim.panel.products.size() == 306);
  CHECK(sim.panel.observation_count() == 15912);

  std::ostringstream csv;
  write_panel(sim.panel, csv);
  std::istringstream in(csv.str());
  const auto loaded = load_panel(in);
  CHECK(loaded.panel.observation_count() == 15912);
  CHECK(loaded.rows_per_store.at("edlp") == 99 * 52);
  CHECK(loaded.rows_per_store.at("hilo") == 99 * 52);
  CHECK(loaded.rows_per_store.at("hyb") == 108 * 52);

  // 89 national-brand products are carried by all three stores.
  int shared = 0;
  for (const auto& rec : sim.panel.products)
    if (rec.store == "edlp" && !rec.private_label)
      shared += sim.panel.find("hilo", rec.product) && sim.panel.find("hyb", rec.product) ? 1 : 0;
  CHECK(shared == 89);
}

TEST_CASE("simulated panels load back through the strict loader") {
  const auto sim = simulate_panel(small_config(13, false, 20, 30));
  std::ostringstream csv;
  write_panel(sim.panel, csv);
  std::istringstream in(csv.str());
  const auto loaded = load_panel(in);
  CHECK(loaded.panel.observation_count() == sim.panel.observation_count());
  CHECK(loaded.warnings.empty());  // no transaction>regular rows by construction
  std::ostringstream csv2;
  write_panel(loaded.panel, csv2);
  CHECK(csv.str() == csv2.str());
}
