#include "pricekit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pricekit/digest.hpp"
#include "pricekit/hazard.hpp"
#include "pricekit/inference.hpp"
#include "pricekit/magnitude.hpp"
#include "pricekit/parallel.hpp"
#include "pricekit/rigidity.hpp"
#include "pricekit/random.hpp"
#include "pricekit/special.hpp"

namespace pricekit {

namespace {

std::string stage_error(const std::string& stage, const std::string& what) {
  return "stage '" + stage + "': " + what;
}

std::vector<SeriesKind> all_kinds() {
  return {SeriesKind::Transaction, SeriesKind::PostedRegular, SeriesKind::Filtered,
          SeriesKind::Reference};
}

// Store pairs in deterministic order.
std::vector<std::pair<std::string, std::string>> store_pairs(const std::vector<std::string>& stores) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < stores.size(); ++i)
    for (std::size_t j = i + 1; j < stores.size(); ++j) pairs.emplace_back(stores[i], stores[j]);
  return pairs;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag) {
  Digest64 d;
  d.update(tag);
  return Rng::splitmix64(seed ^ d.value());
}

}  // namespace

PipelineInput prepare_input(const RunConfig& config) {
  PipelineInput input;
  if (!config.preset.empty()) {
    SimConfig sim;
    try {
      sim = load_preset(config.preset);
    } catch (const std::exception& e) {
      throw DataError(stage_error("panel", e.what()));
    }
    if (config.sim_weeks) sim.weeks = *config.sim_weeks;
    if (config.sim_start_date) sim.start_date = parse_iso_date(*config.sim_start_date);
    sim.seed = config.seed;

    std::ostringstream resolved;
    resolved << "weeks=" << sim.weeks << " start=" << format_iso_date(sim.start_date)
             << " seed=" << sim.seed << "\n";
    resolved << (config.preset.find('/') == std::string::npos &&
                         config.preset.find('.') == std::string::npos
                     ? preset_text(config.preset)
                     : config.preset);
    input.input_digest = digest_hex(resolved.str());

    SimResult result = simulate_panel(sim);
    input.panel = std::move(result.panel);
    input.truth = std::move(result.truth);
    input.simulated = true;
  } else if (!config.panel_path.empty()) {
    std::ifstream f(config.panel_path, std::ios::binary);
    if (!f) throw DataError(stage_error("panel", "cannot open " + config.panel_path));
    std::ostringstream bytes;
    bytes << f.rdbuf();
    input.input_digest = digest_hex(bytes.str());

    LoadOptions opt;
    opt.delimiter = config.delimiter;
    opt.minor_units = config.minor_units;
    opt.impute_missing = config.impute_missing;
    opt.columns = config.column_renames;
    std::istringstream in(bytes.str());
    try {
      input.panel = load_panel(in, opt).panel;
    } catch (const DataError& e) {
      throw DataError(stage_error("panel", e.what()));
    }
    if (config.input_start_date)
      input.panel.start_date = parse_iso_date(*config.input_start_date);
    for (const auto& [store, format] : config.store_formats)
      input.panel.store_format[store] = format;
  } else {
    throw DataError(stage_error("panel", "no input: set input.panel or simulate.preset"));
  }
  if (input.panel.products.empty())
    throw DataError(stage_error("panel", "empty panel"));
  return input;
}

void stage_validate(const PipelineInput& input, Bundle& bundle) {
  bundle.add("validation.json", report_to_json(validate_panel(input.panel)), false);
}

std::vector<FilterResult> stage_filter(const PipelineInput& input, const RunConfig& config,
                                       Bundle& bundle) {
  std::vector<FilterResult> series;
  try {
    series = prepare_series(input.panel, config.filter);
  } catch (const std::exception& e) {
    throw DataError(stage_error("filter", e.what()));
  }

  std::ostringstream fs;
  fs << "store,product,week,transaction,posted_regular,filtered,reference,"
        "sale_posted,sale_filtered,sale_reference,masked\n";
  for (const auto& fr : series) {
    const auto& rec = *fr.rec;
    for (int w = 0; w < rec.weeks(); ++w) {
      const auto i = static_cast<std::size_t>(w);
      fs << rec.store << ',' << rec.product << ',' << (rec.first_week + w) << ','
         << format_cents(fr.of(SeriesKind::Transaction)[i]) << ','
         << format_cents(fr.of(SeriesKind::PostedRegular)[i]) << ','
         << format_cents(fr.of(SeriesKind::Filtered)[i]) << ','
         << format_cents(fr.of(SeriesKind::Reference)[i]) << ',' << int(fr.sale_posted[i]) << ','
         << int(fr.sale_filtered[i]) << ',' << int(fr.sale_reference[i]) << ','
         << int(fr.mask.empty() ? 0 : fr.mask[i]) << '\n';
    }
  }
  bundle.add("filtered_series.csv", fs.str());

  // Sale events per product and baseline.
  std::ostringstream ev;
  ev << "store,product,baseline,start_week,end_week,depth\n";
  std::map<std::pair<std::string, Baseline>, long> event_counts;
  std::map<std::string, long> store_weeks;
  for (const auto& fr : series) {
    const auto& rec = *fr.rec;
    store_weeks[rec.store] += rec.weeks();
    const auto& tx = fr.of(SeriesKind::Transaction);
    const std::array<std::pair<Baseline, const std::vector<Cents>*>, 3> baselines = {
        std::make_pair(Baseline::Posted, &fr.of(SeriesKind::PostedRegular)),
        std::make_pair(Baseline::Filtered, &fr.of(SeriesKind::Filtered)),
        std::make_pair(Baseline::Reference, &fr.of(SeriesKind::Reference))};
    for (const auto& [kind, baseline] : baselines) {
      for (const auto& e : extract_sale_events(tx, *baseline, kind)) {
        ev << rec.store << ',' << rec.product << ',' << to_string(kind) << ','
           << (rec.first_week + e.start_week - 1) << ',' << (rec.first_week + e.end_week - 1)
           << ',' << format_cents(e.depth) << '\n';
        event_counts[{rec.store, kind}]++;
      }
    }
  }
  bundle.add("sale_events.csv", ev.str());

  // Event-count table with pairwise proportion tests; the trial count is
  // product-weeks per store.
  const auto stores = input.panel.stores();
  std::ostringstream ec;
  ec << "baseline,store,events,product_weeks\n";
  for (const auto& b : {Baseline::Posted, Baseline::Filtered, Baseline::Reference})
    for (const auto& s : stores)
      ec << to_string(b) << ',' << s << ',' << event_counts[{s, b}] << ',' << store_weeks[s] << '\n';
  bundle.add("event_counts.csv", ec.str());

  std::vector<std::vector<std::string>> table;
  table.push_back({"baseline", "store_a", "store_b", "events_a", "events_b", "chi2", "p", "sig"});
  for (const auto& b : {Baseline::Posted, Baseline::Filtered, Baseline::Reference}) {
    for (const auto& [sa, sb] : store_pairs(stores)) {
      const auto t = chi2_proportions(event_counts[{sa, b}], store_weeks[sa], event_counts[{sb, b}],
                                      store_weeks[sb]);
      table.push_back({to_string(b), sa, sb, std::to_string(t.c1), std::to_string(t.c2),
                       fmt(t.chi2, 2), fmt(t.p, 6), stars(t.p)});
    }
  }
  bundle.add("event_tests.txt", render_table(table));
  std::ostringstream etc;
  etc << "baseline,store_a,store_b,events_a,n_a,events_b,n_b,chi2,p\n";
  for (const auto& b : {Baseline::Posted, Baseline::Filtered, Baseline::Reference}) {
    for (const auto& [sa, sb] : store_pairs(stores)) {
      const auto t = chi2_proportions(event_counts[{sa, b}], store_weeks[sa], event_counts[{sb, b}],
                                      store_weeks[sb]);
      etc << to_string(b) << ',' << sa << ',' << sb << ',' << t.c1 << ',' << t.n1 << ',' << t.c2
          << ',' << t.n2 << ',' << fmt(t.chi2, 4) << ',' << fmt(t.p, 6) << '\n';
    }
  }
  bundle.add("event_tests.csv", etc.str());
  return series;
}

void stage_rigidity(const std::vector<FilterResult>& series, Bundle& bundle) {
  auto emit = [](const std::vector<RigidityRow>& rows, std::ostringstream& os) {
    for (const auto& r : rows) {
      os << (r.store.empty() ? "(all)" : r.store) << ','
         << (r.category.empty() ? "(all)" : r.category) << ',' << to_string(r.kind) << ','
         << r.n_products << ',' << r.n_changes << ',' << r.n_transitions << ','
         << fmt(r.frequency, 6) << ',' << fmt(r.implied, 4) << ',' << fmt(r.expected, 4) << ','
         << r.n_dropped_zero_change << '\n';
    }
  };
  std::ostringstream os;
  os << "store,category,series,n_products,n_changes,n_transitions,frequency,"
        "implied_duration,expected_duration,n_dropped_zero_change\n";
  emit(rigidity_table(series, GroupBy::Store), os);
  emit(rigidity_table(series, GroupBy::StoreCategory), os);
  emit(rigidity_table(series, GroupBy::Panel), os);
  bundle.add("rigidity.csv", os.str());

  // Aligned store-level summary.
  std::vector<std::vector<std::string>> table;
  table.push_back({"store", "series", "n_products", "frequency", "implied_dur", "expected_dur",
                   "dropped"});
  for (const auto& r : rigidity_table(series, GroupBy::Store))
    table.push_back({r.store, to_string(r.kind), std::to_string(r.n_products),
                     fmt(r.frequency * 100.0, 2) + "%", fmt(r.implied, 2), fmt(r.expected, 2),
                     std::to_string(r.n_dropped_zero_change)});
  bundle.add("rigidity.txt", render_table(table));
}

void stage_inference(const PipelineInput& input, const std::vector<FilterResult>& series,
                     Bundle& bundle) {
  const auto stores = input.panel.stores();

  // Pairwise frequency tests per series kind (counts = pooled changes and
  // transitions per store).
  struct Counts {
    long changes = 0, transitions = 0;
  };
  std::map<std::pair<std::string, SeriesKind>, Counts> counts;
  for (const auto& fr : series) {
    for (SeriesKind k : all_kinds()) {
      const auto c = count_changes(fr.of(k), fr.mask);
      auto& acc = counts[{fr.rec->store, k}];
      acc.changes += c.changes;
      acc.transitions += c.transitions;
    }
  }
  std::ostringstream ft;
  ft << "series,store_a,store_b,freq_a,freq_b,chi2,p\n";
  std::vector<std::vector<std::string>> table;
  table.push_back({"series", "store_a", "store_b", "freq_a", "freq_b", "chi2", "p", "sig"});
  for (SeriesKind k : all_kinds()) {
    for (const auto& [sa, sb] : store_pairs(stores)) {
      const auto& ca = counts[{sa, k}];
      const auto& cb = counts[{sb, k}];
      if (ca.transitions == 0 || cb.transitions == 0) continue;
      const auto t = chi2_proportions(ca.changes, ca.transitions, cb.changes, cb.transitions);
      const double fa = static_cast<double>(ca.changes) / static_cast<double>(ca.transitions);
      const double fb = static_cast<double>(cb.changes) / static_cast<double>(cb.transitions);
      ft << to_string(k) << ',' << sa << ',' << sb << ',' << fmt(fa, 6) << ',' << fmt(fb, 6) << ','
         << fmt(t.chi2, 4) << ',' << fmt(t.p, 6) << '\n';
      table.push_back({to_string(k), sa, sb, fmt(fa * 100, 2) + "%", fmt(fb * 100, 2) + "%",
                       fmt(t.chi2, 2), fmt(t.p, 6), stars(t.p)});
    }
  }
  bundle.add("frequency_tests.csv", ft.str());
  bundle.add("frequency_tests.txt", render_table(table));

  // Price-level rank-sum tests (pooled weekly prices, in currency units).
  std::map<std::string, std::vector<double>> tx_prices, reg_prices;
  for (const auto& fr : series) {
    for (Cents c : fr.of(SeriesKind::Transaction))
      tx_prices[fr.rec->store].push_back(cents_to_currency(c));
    for (Cents c : fr.of(SeriesKind::PostedRegular))
      reg_prices[fr.rec->store].push_back(cents_to_currency(c));
  }
  std::ostringstream pl;
  pl << "series,store_a,store_b,mean_a,mean_b,z,p\n";
  std::vector<std::vector<std::string>> pltab;
  pltab.push_back({"series", "store_a", "store_b", "mean_a", "mean_b", "z", "p", "sig"});
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  for (const auto& [name, prices] :
       std::vector<std::pair<std::string, std::map<std::string, std::vector<double>>*>>{
           {"transaction", &tx_prices}, {"posted_regular", &reg_prices}}) {
    for (const auto& [sa, sb] : store_pairs(stores)) {
      const auto t = wilcoxon_rank_sum((*prices)[sa], (*prices)[sb]);
      pl << name << ',' << sa << ',' << sb << ',' << fmt(mean((*prices)[sa]), 4) << ','
         << fmt(mean((*prices)[sb]), 4) << ',' << fmt(t.z, 4) << ',' << fmt(t.p, 6) << '\n';
      pltab.push_back({name, sa, sb, fmt(mean((*prices)[sa]), 2), fmt(mean((*prices)[sb]), 2),
                       fmt(t.z, 2), fmt(t.p, 6), stars(t.p)});
    }
  }
  bundle.add("price_level_tests.csv", pl.str());
  bundle.add("price_level_tests.txt", render_table(pltab));

  // Synchronization: per product carried by >= 2 stores, per series kind.
  std::map<std::string, std::vector<const FilterResult*>> by_product;
  for (const auto& fr : series) by_product[fr.rec->product].push_back(&fr);

  std::ostringstream sync;
  sync << "product,series,n_stores,value\n";
  std::map<SeriesKind, std::vector<double>> values;
  for (const auto& [product, frs] : by_product) {
    if (frs.size() < 2) continue;
    for (SeriesKind k : all_kinds()) {
      std::vector<BoolVec> matrix;
      for (const auto* fr : frs) matrix.push_back(change_indicators(fr->of(k), fr->mask));
      const auto idx = fk_index(matrix);
      if (!idx.defined) {
        sync << product << ',' << to_string(k) << ',' << frs.size() << ",NA\n";
        continue;
      }
      sync << product << ',' << to_string(k) << ',' << frs.size() << ',' << fmt(idx.value, 6)
           << '\n';
      values[k].push_back(idx.value);
    }
  }
  bundle.add("sync_index.csv", sync.str());

  std::ostringstream ss;
  ss << "series,n_products,mean,min,max\n";
  for (SeriesKind k : all_kinds()) {
    auto& v = values[k];
    if (v.empty()) {
      ss << to_string(k) << ",0,NA,NA,NA\n";
      continue;
    }
    std::sort(v.begin(), v.end());
    ss << to_string(k) << ',' << v.size() << ',' << fmt(mean(v), 6) << ',' << fmt(v.front(), 6)
       << ',' << fmt(v.back(), 6) << '\n';
  }
  bundle.add("sync_summary.csv", ss.str());

  // Histogram of synchronization indices, bin width 0.05 over [0, 1].
  std::ostringstream sh;
  sh << "series,bin_lo,bin_hi,count\n";
  for (SeriesKind k : all_kinds()) {
    const auto& v = values[k];
    for (int b = 0; b < 20; ++b) {
      const double lo = b * 0.05, hi = lo + 0.05;
      long n = 0;
      for (double x : v)
        if (x >= lo && (x < hi || (b == 19 && x <= hi))) ++n;
      sh << to_string(k) << ',' << fmt(lo, 2) << ',' << fmt(hi, 2) << ',' << n << '\n';
    }
  }
  bundle.add("sync_hist.csv", sh.str());
}

void stage_magnitude(const std::vector<FilterResult>& series, const RunConfig& config,
                     Bundle& bundle) {
  std::set<std::string> store_set;
  for (const auto& fr : series) store_set.insert(fr.rec->store);
  const std::vector<std::string> stores(store_set.begin(), store_set.end());

  std::ostringstream mg;
  mg << "store,series,n_changes,annualized_n,var_dp,kurtosis_raw,kurtosis_std,responsiveness,"
        "resp_ci_low,resp_ci_high,sufficient_statistic,suff_ci_low,suff_ci_high\n";
  std::ostringstream zh;
  zh << "store,series,bin_lo,bin_hi,count\n";

  for (const auto& store : stores) {
    std::vector<const FilterResult*> mine;
    for (const auto& fr : series)
      if (fr.rec->store == store) mine.push_back(&fr);

    for (SeriesKind k : all_kinds()) {
      // Statistic evaluator over a multiset of product indices (the cluster
      // bootstrap resampling unit is the product).
      auto compute = [&](const std::vector<int>& idx, bool with_all) -> std::array<double, 7> {
        std::vector<ChangeSample> samples;
        std::vector<double> dps;
        std::vector<double> freqs;
        for (int i : idx) {
          const auto* fr = mine[static_cast<std::size_t>(i)];
          const auto c = count_changes(fr->of(k), fr->mask);
          freqs.push_back(c.transitions == 0 ? 0.0 : c.frequency());
          const auto& s = fr->of(k);
          for (std::size_t t = 0; t + 1 < s.size(); ++t) {
            if (!fr->mask.empty() && (fr->mask[t] || fr->mask[t + 1])) continue;
            if (s[t + 1] == s[t]) continue;
            ChangeSample cs;
            cs.store = store;
            cs.category = fr->rec->category;
            cs.dp = std::log(static_cast<double>(s[t + 1])) - std::log(static_cast<double>(s[t]));
            samples.push_back(std::move(cs));
            dps.push_back(samples.back().dp);
          }
        }
        if (dps.size() < 4) throw NumericError("too few changes");
        double n_annual;
        if (config.duration_basis_implied) {
          double ch = 0, tr = 0;
          for (int i : idx) {
            const auto c = count_changes(mine[static_cast<std::size_t>(i)]->of(k),
                                         mine[static_cast<std::size_t>(i)]->mask);
            ch += static_cast<double>(c.changes);
            tr += static_cast<double>(c.transitions);
          }
          n_annual = annualized_changes(implied_duration(tr == 0 ? 0.0 : ch / tr));
        } else {
          n_annual = annualized_changes(expected_duration(freqs).weeks);
        }
        const double var = variance_population(dps);
        const auto std_res = standardize(samples);
        if (std_res.z.size() < 4) throw NumericError("too few standardized changes");
        double kur_std = kurtosis(std_res.z);
        double kur_raw = with_all ? kurtosis(dps) : kur_std;
        if (config.excess_kurtosis) {
          kur_std -= 3.0;
          kur_raw -= 3.0;
        }
        return {static_cast<double>(dps.size()), n_annual,          var,
                kur_raw,                         kur_std,           n_annual * var,
                kur_std / n_annual};
      };

      std::vector<int> all(mine.size());
      for (std::size_t i = 0; i < mine.size(); ++i) all[i] = static_cast<int>(i);

      std::array<double, 7> stats{};
      bool defined = true;
      try {
        stats = compute(all, true);
      } catch (const NumericError&) {
        defined = false;
      }
      if (!defined) {
        mg << store << ',' << to_string(k) << ",0,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA\n";
        continue;
      }

      const int b = config.bootstrap;
      auto resp_stat = [&](const std::vector<int>& idx) { return compute(idx, false)[5]; };
      auto suff_stat = [&](const std::vector<int>& idx) { return compute(idx, false)[6]; };
      BootstrapInterval resp_ci{stats[5], stats[5], 0}, suff_ci{stats[6], stats[6], 0};
      if (b >= 2 && !mine.empty()) {
        try {
          resp_ci = bootstrap_ci(resp_stat, static_cast<int>(mine.size()), b,
                                 derive_seed(bundle.seed(), store + "/resp/" + to_string(k)));
          suff_ci = bootstrap_ci(suff_stat, static_cast<int>(mine.size()), b,
                                 derive_seed(bundle.seed(), store + "/suff/" + to_string(k)));
        } catch (const NumericError& e) {
          throw NumericError(stage_error("magnitude", e.what()));
        }
      }

      mg << store << ',' << to_string(k) << ',' << static_cast<long>(stats[0]) << ','
         << fmt(stats[1], 6) << ',' << fmt(stats[2], 8) << ',' << fmt(stats[3], 4) << ','
         << fmt(stats[4], 4) << ',' << fmt(stats[5], 6) << ',' << fmt(resp_ci.low, 6) << ','
         << fmt(resp_ci.high, 6) << ',' << fmt(stats[6], 6) << ',' << fmt(suff_ci.low, 6) << ','
         << fmt(suff_ci.high, 6) << '\n';

      // Standardized-change histogram: bin width 0.25 over [-6, 6].
      const auto std_res = standardize([&] {
        std::vector<ChangeSample> s;
        for (const auto* fr : mine) {
          const auto& v = fr->of(k);
          for (std::size_t t = 0; t + 1 < v.size(); ++t) {
            if (!fr->mask.empty() && (fr->mask[t] || fr->mask[t + 1])) continue;
            if (v[t + 1] == v[t]) continue;
            ChangeSample cs;
            cs.store = store;
            cs.category = fr->rec->category;
            cs.dp = std::log(static_cast<double>(v[t + 1])) - std::log(static_cast<double>(v[t]));
            s.push_back(std::move(cs));
          }
        }
        return s;
      }());
      std::vector<long> bins(48, 0);
      long below = 0, above = 0;
      for (double z : std_res.z) {
        if (z < -6.0) {
          ++below;
        } else if (z >= 6.0) {
          ++above;
        } else {
          bins[static_cast<std::size_t>((z + 6.0) / 0.25)]++;
        }
      }
      zh << store << ',' << to_string(k) << ",-inf,-6.00," << below << '\n';
      for (int i = 0; i < 48; ++i)
        zh << store << ',' << to_string(k) << ',' << fmt(-6.0 + 0.25 * i, 2) << ','
           << fmt(-6.0 + 0.25 * (i + 1), 2) << ',' << bins[static_cast<std::size_t>(i)] << '\n';
      zh << store << ',' << to_string(k) << ",6.00,inf," << above << '\n';
    }
  }
  bundle.add("magnitude.csv", mg.str());
  bundle.add("z_histogram.csv", zh.str());
}

void stage_hazard(const PipelineInput& input, const std::vector<FilterResult>& series,
                  Bundle& bundle, bool efron_ties) {
  std::ostringstream hz;
  hz << "series,covariate,hazard_ratio,coef,robust_se,z,p\n";
  std::ostringstream summary;
  summary << "series,n_events,n_spells,wald_chi2,converged,iterations,dropped\n";

  std::vector<std::vector<std::string>> table;
  table.push_back({"series", "covariate", "hazard_ratio", "robust_se", "sig"});

  for (SeriesKind k : all_kinds()) {
    auto rows = build_spells(series, k, input.panel);
    long events = 0;
    for (const auto& r : rows)
      if (r.event) ++events;
    if (rows.empty() || events == 0) {
      summary << to_string(k) << ",0,0,NA,false,0,\n";
      continue;
    }
    CoxFit fit;
    CoxOptions options;
    options.ties = efron_ties ? TieMethod::Efron : TieMethod::Breslow;
    try {
      fit = fit_cox(rows, spell_covariate_names(), options);
    } catch (const NumericError& e) {
      throw NumericError(stage_error("hazard", e.what()));
    }
    for (std::size_t j = 0; j < fit.names.size(); ++j) {
      const double se_hr = fit.se_robust[j] * fit.hazard_ratio[j];  // delta method
      const double z = fit.se_robust[j] > 0 ? fit.beta[j] / fit.se_robust[j] : 0.0;
      const double p = 2.0 * normal_sf(std::fabs(z));
      hz << to_string(k) << ',' << fit.names[j] << ',' << fmt(fit.hazard_ratio[j], 6) << ','
         << fmt(fit.beta[j], 6) << ',' << fmt(fit.se_robust[j], 6) << ',' << fmt(z, 4) << ','
         << fmt(p, 6) << '\n';
      table.push_back({to_string(k), fit.names[j], fmt(fit.hazard_ratio[j], 2),
                       "(" + fmt(se_hr, 3) + ")", stars(p)});
    }
    std::string dropped;
    for (const auto& d : fit.dropped) dropped += (dropped.empty() ? "" : ";") + d;
    summary << to_string(k) << ',' << fit.n_events << ',' << fit.n_spells << ','
            << fmt(fit.wald_chi2, 2) << ',' << (fit.converged ? "true" : "false") << ','
            << fit.iterations << ',' << dropped << '\n';
    const double global_p = chi2_sf(fit.wald_chi2, static_cast<double>(fit.names.size()));
    table.push_back({to_string(k), "global_chi2", fmt(fit.wald_chi2, 2), "", stars(global_p)});
    table.push_back({to_string(k), "n_events", std::to_string(fit.n_events), "", ""});
    table.push_back({to_string(k), "n_spells", std::to_string(fit.n_spells), "", ""});
  }
  bundle.add("hazard.csv", hz.str());
  bundle.add("hazard_summary.csv", summary.str());
  bundle.add("hazard.txt", render_table(table));
}

void stage_endings(const PipelineInput& input, Bundle& bundle) {
  std::ostringstream os;
  os << "store,digits,ending,share\n";
  for (int digits : {1, 2}) {
    const auto all = price_ending_histogram(input.panel, digits);
    for (const auto& [ending, share] : all)
      os << "(all)," << digits << ',' << ending << ',' << fmt(share, 6) << '\n';
    for (const auto& [store, hist] : price_ending_histogram_by_store(input.panel, digits))
      for (const auto& [ending, share] : hist)
        os << store << ',' << digits << ',' << ending << ',' << fmt(share, 6) << '\n';
  }
  bundle.add("price_endings.csv", os.str());
}

std::vector<std::string> run_pipeline(const RunConfig& config) {
  if (config.workers > 0) set_worker_count(config.workers);
  PipelineInput input = prepare_input(config);

  Bundle bundle(input.input_digest, config.seed);
  if (input.simulated) {
    std::ostringstream panel_csv;
    write_panel(input.panel, panel_csv);
    bundle.add("panel.csv", panel_csv.str(), false);
    std::ostringstream truth_csv;
    SimResult tmp;
    tmp.panel = input.panel;
    tmp.truth = input.truth;
    write_ground_truth(tmp, truth_csv);
    bundle.add("ground_truth.csv", truth_csv.str(), false);
  }

  stage_validate(input, bundle);
  const auto series = stage_filter(input, config, bundle);
  stage_rigidity(series, bundle);
  stage_inference(input, series, bundle);
  stage_magnitude(series, config, bundle);
  stage_hazard(input, series, bundle, config.efron_ties);
  stage_endings(input, bundle);

  return bundle.write(config.out_dir, config.echo());
}

}  // namespace pricekit
