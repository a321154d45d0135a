#include "pricekit/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "pricekit/csv.hpp"
#include "pricekit/parallel.hpp"
#include "pricekit/random.hpp"

namespace pricekit {

namespace {

constexpr Cents kMinPrice = 29;

// Regular values set within this trailing window are never reused for a new
// regular price, so the regular process cannot form an exact-return V that
// a downstream sales filter would mistake for a cut.
constexpr int kNoReuseWindow = 13;

const char* kCategories[] = {"baby",       "beverages", "breakfast_cereals", "condiments",
                             "dairy",      "frozen",    "health_beauty",     "household",
                             "juices",     "paper_pet", "soups_canned"};
constexpr int kCategoryWeights[] = {5, 8, 12, 9, 11, 7, 11, 13, 6, 4, 3};  // sums to 89

std::string shared_category(int index, int n_shared) {
  int cum[11];
  int total = 0;
  for (int i = 0; i < 11; ++i) {
    total += kCategoryWeights[i];
    cum[i] = total;
  }
  const int scaled = static_cast<int>(
      (static_cast<long long>(index) * total) / std::max(1, n_shared));
  for (int i = 0; i < 11; ++i)
    if (scaled < cum[i]) return kCategories[i];
  return kCategories[10];
}

struct ProductCells {
  ProductRecord rec;
  GroundTruth truth;
};

}  // namespace

double StorePolicy::mean_sale_length() const {
  double total = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < sale_length_weights.size(); ++i) {
    total += sale_length_weights[i];
    acc += sale_length_weights[i] * static_cast<double>(i + 1);
  }
  if (total <= 0.0) throw std::invalid_argument("sale_length_weights sum to 0");
  return acc / total;
}

void StorePolicy::validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(regular_change_hazard) || !in01(sale_hazard) || !in01(nine_ending_prob))
    throw std::invalid_argument("policy hazards/probabilities must lie in [0, 1]");
  if (sale_length_weights.empty()) throw std::invalid_argument("sale_length_weights empty");
  for (double w : sale_length_weights)
    if (w < 0.0) throw std::invalid_argument("negative sale length weight");
  mean_sale_length();  // throws on zero-sum weights
  if (!(sale_depth_min > 0.0) || sale_depth_max < sale_depth_min)
    throw std::invalid_argument("sale depth range invalid");
  if (regular_change_sigma < 0.0 || initial_log_sigma < 0.0)
    throw std::invalid_argument("negative sigma");
  if (promote_sales && label_cuts_as_regular)
    throw std::invalid_argument("promote_sales and label_cuts_as_regular are exclusive");
}

ImpliedFrequencies implied_frequencies(const StorePolicy& policy) {
  policy.validate();
  const double s = policy.sale_hazard;
  const double q = policy.regular_change_hazard;
  const double m = policy.mean_sale_length();
  const double d = 1.0 + s * m;
  ImpliedFrequencies f;
  f.transaction = (2.0 * s + (1.0 - s) * q) / d;
  f.posted_regular = policy.label_cuts_as_regular ? f.transaction : (1.0 - s) * q / d;
  return f;
}

Cents snap_to_nine(Cents price) {
  Cents below = price - (((price % 10) + 10) % 10) + 9;
  if (below > price) below -= 10;
  const Cents above = below + 10;
  return (price - below) < (above - price) ? below : above;
}

namespace {

struct Generator {
  const StorePolicy& policy;
  Rng& rng;
  std::map<Cents, int> last_active;  // regular value -> last week it was held

  Cents snap_maybe(Cents price) {
    if (rng.bernoulli(policy.nine_ending_prob)) price = snap_to_nine(price);
    return std::max<Cents>(price, kMinPrice);
  }

  bool reused(Cents value, int week) const {
    const auto it = last_active.find(value);
    return it != last_active.end() && week - it->second <= kNoReuseWindow;
  }

  Cents draw_regular_change(Cents r, int week) {
    const double size = std::exp(rng.normal(policy.regular_change_mu, policy.regular_change_sigma));
    const bool up = rng.bernoulli(0.5);
    Cents next = snap_maybe(static_cast<Cents>(std::llround(
        static_cast<double>(r) * std::exp(up ? size : -size))));
    Cents step = next >= r ? 10 : -10;
    while (next == r || reused(next, week) || next < kMinPrice) {
      if (next < kMinPrice) {  // restart upward from r
        step = 10;
        next = r;
      }
      next += step;
    }
    return next;
  }

  Cents draw_sale_price(Cents r) {
    const double depth = rng.uniform(policy.sale_depth_min, policy.sale_depth_max);
    Cents sp = snap_maybe(static_cast<Cents>(std::llround(
        static_cast<double>(r) * std::exp(-depth))));
    if (sp >= r) sp = r - 1;
    return std::max<Cents>(sp, 1);
  }

  int draw_sale_length() {
    return static_cast<int>(rng.categorical(policy.sale_length_weights)) + 1;
  }
};

}  // namespace

SimResult simulate_panel(const SimConfig& config) {
  if (config.weeks < 13) throw std::invalid_argument("simulate_panel: need weeks >= 13");
  if (config.stores.empty()) throw std::invalid_argument("simulate_panel: no stores");
  for (const auto& st : config.stores) {
    st.policy.validate();
    if (st.shared_products + st.private_products < 1)
      throw std::invalid_argument("simulate_panel: store without products");
  }

  struct Job {
    int store_index;
    int product_ordinal;  // within store
    bool shared;
    int shared_index;     // identity across stores
  };
  std::vector<Job> jobs;
  for (std::size_t si = 0; si < config.stores.size(); ++si) {
    const auto& st = config.stores[si];
    int ordinal = 0;
    for (int i = 0; i < st.shared_products; ++i)
      jobs.push_back({static_cast<int>(si), ordinal++, true, i});
    for (int i = 0; i < st.private_products; ++i)
      jobs.push_back({static_cast<int>(si), ordinal++, false, i});
  }

  const int T = config.weeks;
  std::vector<ProductCells> cells(jobs.size());

  parallel_for(static_cast<int>(jobs.size()), [&](int ji) {
    const Job& job = jobs[static_cast<std::size_t>(ji)];
    const SimStore& st = config.stores[static_cast<std::size_t>(job.store_index)];
    const StorePolicy& pol = st.policy;
    // Substream keyed by (store, product ordinal): independent of job order.
    Rng rng(config.seed, (static_cast<std::uint64_t>(job.store_index) << 32) |
                             static_cast<std::uint64_t>(job.product_ordinal));

    ProductCells& out = cells[static_cast<std::size_t>(ji)];
    ProductRecord& rec = out.rec;
    rec.store = st.store_id;
    char buf[32];
    if (job.shared) {
      std::snprintf(buf, sizeof(buf), "NB%03d", job.shared_index + 1);
      rec.product = buf;
      rec.category = shared_category(job.shared_index, st.shared_products);
      rec.private_label = false;
    } else {
      std::snprintf(buf, sizeof(buf), "PL-%s-%02d", st.store_id.c_str(), job.shared_index + 1);
      rec.product = buf;
      rec.category = kCategories[job.shared_index % 11];
      rec.private_label = true;
    }
    rec.aisle = static_cast<Aisle>(rng.below(3));
    rec.shelf = static_cast<Shelf>(rng.below(3));
    rec.first_week = 1;

    Generator gen{pol, rng, {}};
    Cents r = gen.snap_maybe(static_cast<Cents>(
        std::llround(rng.lognormal(pol.initial_log_mu, pol.initial_log_sigma))));

    // Stationary initial state: avoids warm-up bias in measured frequencies.
    const double s = pol.sale_hazard;
    const double m = pol.mean_sale_length();
    const double pi_idle = 1.0 / (1.0 + s * m);
    bool in_sale = false;
    int remaining = 0;
    Cents sale_price = 0;
    if (!rng.bernoulli(pi_idle)) {
      // remaining ~ P(length >= j), j = 1..k
      std::vector<double> tails(pol.sale_length_weights.size());
      double tail = 0.0;
      for (std::size_t j = pol.sale_length_weights.size(); j-- > 0;) {
        tail += pol.sale_length_weights[j];
        tails[j] = tail;
      }
      in_sale = true;
      remaining = static_cast<int>(rng.categorical(tails)) + 1;
      sale_price = gen.draw_sale_price(r);
      out.truth.events.push_back({1, std::min(remaining, T), r, sale_price});
    }

    rec.transaction.resize(static_cast<std::size_t>(T));
    rec.posted_regular.resize(static_cast<std::size_t>(T));
    out.truth.true_regular.resize(static_cast<std::size_t>(T));
    out.truth.true_sale.assign(static_cast<std::size_t>(T), 0);

    for (int w = 1; w <= T; ++w) {
      const auto i = static_cast<std::size_t>(w - 1);
      out.truth.true_regular[i] = r;
      if (in_sale) {
        rec.transaction[i] = sale_price;
        rec.posted_regular[i] = pol.label_cuts_as_regular ? sale_price : r;
        out.truth.true_sale[i] = 1;
      } else {
        rec.transaction[i] = r;
        rec.posted_regular[i] = r;
      }
      if (w == T) break;

      if (in_sale) {
        if (--remaining == 0) in_sale = false;  // exact return to r next week
      } else {
        if (rng.bernoulli(s)) {
          in_sale = true;
          remaining = gen.draw_sale_length();
          sale_price = gen.draw_sale_price(r);
          out.truth.events.push_back({w + 1, std::min(w + remaining, T), r, sale_price});
        } else if (rng.bernoulli(pol.regular_change_hazard)) {
          // The outgoing value stays off-limits while a sales filter could
          // still scan back to it; record the week it was last held.
          gen.last_active[r] = w;
          r = gen.draw_regular_change(r, w + 1);
        }
      }
    }
  });

  SimResult result;
  result.panel.start_date = config.start_date;
  for (const auto& st : config.stores) result.panel.store_format[st.store_id] = st.policy.format;

  std::vector<int> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ra = cells[static_cast<std::size_t>(a)].rec;
    const auto& rb = cells[static_cast<std::size_t>(b)].rec;
    return std::tie(ra.store, ra.product) < std::tie(rb.store, rb.product);
  });
  for (int i : order) {
    result.panel.products.push_back(std::move(cells[static_cast<std::size_t>(i)].rec));
    result.truth.push_back(std::move(cells[static_cast<std::size_t>(i)].truth));
  }
  return result;
}

void write_ground_truth(const SimResult& result, std::ostream& out) {
  out << "store,product,week,true_regular,true_sale\n";
  for (std::size_t i = 0; i < result.panel.products.size(); ++i) {
    const auto& rec = result.panel.products[i];
    const auto& truth = result.truth[i];
    for (int w = 0; w < rec.weeks(); ++w) {
      const auto k = static_cast<std::size_t>(w);
      out << csv_escape(rec.store) << ',' << csv_escape(rec.product) << ',' << (rec.first_week + w)
          << ',' << format_cents(truth.true_regular[k]) << ',' << int(truth.true_sale[k]) << '\n';
    }
  }
}

}  // namespace pricekit
