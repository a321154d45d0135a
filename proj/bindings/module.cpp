#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pricekit/filters.hpp"
#include "pricekit/hazard.hpp"
#include "pricekit/inference.hpp"
#include "pricekit/magnitude.hpp"
#include "pricekit/rigidity.hpp"
#include "pricekit/simgen.hpp"

namespace py = pybind11;
using namespace pricekit;

namespace {

std::vector<bool> to_pybool(const BoolVec& v) {
  return std::vector<bool>(v.begin(), v.end());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Price rigidity toolkit: sales filters, reference prices, "
            "duration estimators and test statistics";

  m.def(
      "filter_sales_a",
      [](const std::vector<Cents>& tx, int max_sale_len) {
        auto r = filter_sales_a(tx, max_sale_len);
        return py::make_tuple(r.filtered, to_pybool(r.flags));
      },
      py::arg("transaction"), py::arg("max_sale_len") = 6,
      "Lift V-shaped temporary cuts to the running regular price; returns "
      "(filtered, sale_flags). Prices are minor-unit integers.");

  m.def("reference_prices", &reference_prices, py::arg("transaction"), py::arg("window") = 13,
        py::arg("align_radius") = 6,
        "Rolling-mode reference price series with change-point alignment.");

  m.def(
      "sale_events",
      [](const std::vector<Cents>& tx, const std::vector<Cents>& baseline) {
        std::vector<std::tuple<int, int, Cents>> out;
        for (const auto& e : extract_sale_events(tx, baseline, Baseline::Posted))
          out.emplace_back(e.start_week, e.end_week, e.depth);
        return out;
      },
      py::arg("transaction"), py::arg("baseline"),
      "Maximal spells with transaction < baseline as (start, end, depth) tuples.");

  m.def("implied_duration", &implied_duration, py::arg("frequency"),
        "-1/ln(1-f) weeks; inf at f = 0.");

  m.def(
      "expected_duration",
      [](const std::vector<double>& freqs) {
        const auto r = expected_duration(freqs);
        return py::make_tuple(r.weeks, r.n_dropped);
      },
      py::arg("frequencies"),
      "Mean per-product implied duration, dropping zero-change products; "
      "returns (weeks, n_dropped).");

  m.def(
      "chi2_proportions",
      [](long c1, long n1, long c2, long n2) {
        const auto r = chi2_proportions(c1, n1, c2, n2);
        return py::make_tuple(r.chi2, r.p);
      },
      py::arg("c1"), py::arg("n1"), py::arg("c2"), py::arg("n2"),
      "Pearson 2x2 proportion test without continuity correction; (chi2, p).");

  m.def(
      "wilcoxon_rank_sum",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        const auto r = wilcoxon_rank_sum(x, y);
        return py::make_tuple(r.z, r.p);
      },
      py::arg("x"), py::arg("y"),
      "Rank-sum test with midranks and tie-corrected variance; (z, p).");

  m.def(
      "fk_index",
      [](const std::vector<std::vector<bool>>& matrix) -> py::object {
        std::vector<BoolVec> rows;
        for (const auto& r : matrix) rows.emplace_back(r.begin(), r.end());
        const auto idx = fk_index(rows);
        if (!idx.defined) return py::none();
        return py::float_(idx.value);
      },
      py::arg("change_matrix"),
      "Fisher-Konieczny synchronization index of a stores x weeks change "
      "matrix; None when undefined.");

  m.def("kurtosis", &kurtosis, py::arg("x"), "Pearson kurtosis m4/m2^2 (population moments).");

  m.def(
      "standardize",
      [](const std::vector<double>& dps, const std::vector<std::string>& groups) {
        if (dps.size() != groups.size())
          throw std::invalid_argument("dps and groups must have equal length");
        std::vector<ChangeSample> samples(dps.size());
        for (std::size_t i = 0; i < dps.size(); ++i) {
          samples[i].dp = dps[i];
          samples[i].category = groups[i];
        }
        const auto r = standardize(samples);
        return py::make_tuple(r.z, r.groups_excluded);
      },
      py::arg("dp"), py::arg("group"),
      "Group-wise standardization (sample sd); returns (z, groups_excluded).");

  m.def(
      "change_indicators",
      [](const std::vector<Cents>& series) { return to_pybool(change_indicators(series)); },
      py::arg("series"), "Boolean change indicators of length T-1.");

  m.def(
      "fit_cox",
      [](const std::vector<std::tuple<int, int, int, double, double, bool, std::vector<double>>>& rows,
         const std::vector<std::string>& names, bool efron) {
        std::vector<RiskRow> rs;
        rs.reserve(rows.size());
        for (const auto& [spell, cluster, stratum, start, stop, event, x] : rows) {
          RiskRow r;
          r.spell_id = spell;
          r.cluster_id = cluster;
          r.stratum = stratum;
          r.start = start;
          r.stop = stop;
          r.event = event;
          r.x = x;
          rs.push_back(std::move(r));
        }
        CoxOptions opt;
        opt.ties = efron ? TieMethod::Efron : TieMethod::Breslow;
        const auto fit = fit_cox(rs, names, opt);
        py::dict out;
        out["names"] = fit.names;
        out["beta"] = fit.beta;
        out["hazard_ratio"] = fit.hazard_ratio;
        out["se_robust"] = fit.se_robust;
        out["se_model"] = fit.se_model;
        out["loglik"] = fit.loglik;
        out["converged"] = fit.converged;
        out["iterations"] = fit.iterations;
        out["n_events"] = fit.n_events;
        out["dropped"] = fit.dropped;
        return out;
      },
      py::arg("rows"), py::arg("names"), py::arg("efron") = false,
      "Stratified Cox fit over (spell, cluster, stratum, start, stop, event, x) rows.");

  m.def(
      "simulate_store",
      [](double regular_change_hazard, double sale_hazard, int products, int weeks,
         std::uint64_t seed, bool label_cuts_as_regular) {
        SimConfig cfg;
        cfg.weeks = weeks;
        cfg.seed = seed;
        SimStore st;
        st.store_id = "sim";
        st.policy.regular_change_hazard = regular_change_hazard;
        st.policy.sale_hazard = sale_hazard;
        st.policy.label_cuts_as_regular = label_cuts_as_regular;
        st.policy.promote_sales = !label_cuts_as_regular;
        st.shared_products = products;
        cfg.stores.push_back(st);
        const auto result = simulate_panel(cfg);
        py::list out;
        for (std::size_t i = 0; i < result.panel.products.size(); ++i) {
          py::dict p;
          p["product"] = result.panel.products[i].product;
          p["transaction"] = result.panel.products[i].transaction;
          p["posted_regular"] = result.panel.products[i].posted_regular;
          p["true_regular"] = result.truth[i].true_regular;
          p["true_sale"] = to_pybool(result.truth[i].true_sale);
          out.append(p);
        }
        return out;
      },
      py::arg("regular_change_hazard"), py::arg("sale_hazard"), py::arg("products"),
      py::arg("weeks"), py::arg("seed"), py::arg("label_cuts_as_regular") = false,
      "Simulate one store's weekly panel with ground truth.");
}
