#include "pricekit/hazard.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "pricekit/dates.hpp"

namespace pricekit {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct StratumIndex {
  std::vector<int> rows;          // indices into the row vector
  std::vector<double> event_times;  // ascending, times with >= 1 event
};

// Per event time, the quantities needed for likelihood, score, information
// and score residuals. Under Breslow the sub-step aggregates collapse to
// d/S0 terms; under Efron they carry the tie adjustment.
struct TimeStats {
  double time = 0.0;
  int d = 0;                // deaths
  double a0 = 0.0;          // sum_j 1/S0j
  VectorXd a1;              // sum_j xbar_j/S0j
  double b0 = 0.0;          // sum_j (j/d)/S0j        (death-set correction)
  VectorXd b1;              // sum_j (j/d) xbar_j/S0j
  VectorXd xbar_mean;       // (1/d) sum_j xbar_j
};

struct Workspace {
  std::vector<StratumIndex> strata;
  int p = 0;
};

Workspace index_rows(const std::vector<RiskRow>& rows) {
  Workspace ws;
  int max_stratum = -1;
  for (const auto& r : rows) max_stratum = std::max(max_stratum, r.stratum);
  ws.strata.resize(static_cast<std::size_t>(max_stratum + 1));
  for (std::size_t i = 0; i < rows.size(); ++i)
    ws.strata[static_cast<std::size_t>(rows[i].stratum)].rows.push_back(static_cast<int>(i));
  for (auto& s : ws.strata) {
    std::set<double> times;
    for (int i : s.rows)
      if (rows[static_cast<std::size_t>(i)].event) times.insert(rows[static_cast<std::size_t>(i)].stop);
    s.event_times.assign(times.begin(), times.end());
  }
  ws.p = rows.empty() ? 0 : static_cast<int>(rows.front().x.size());
  return ws;
}

// Accumulates loglik / score / information over one stratum; optionally
// collects per-time statistics for the residual pass.
void accumulate_stratum(const std::vector<RiskRow>& rows, const StratumIndex& stratum,
                        const VectorXd& beta, TieMethod ties, double* loglik, VectorXd* score,
                        MatrixXd* info, std::vector<TimeStats>* time_stats) {
  const int p = static_cast<int>(beta.size());
  if (stratum.event_times.empty()) return;

  // Rows sorted by stop descending (entry into the backwards sweep) and by
  // start descending (exit from the risk set).
  std::vector<int> by_stop = stratum.rows;
  std::sort(by_stop.begin(), by_stop.end(), [&](int a, int b) {
    return rows[static_cast<std::size_t>(a)].stop > rows[static_cast<std::size_t>(b)].stop;
  });
  std::vector<int> by_start = stratum.rows;
  std::sort(by_start.begin(), by_start.end(), [&](int a, int b) {
    return rows[static_cast<std::size_t>(a)].start > rows[static_cast<std::size_t>(b)].start;
  });

  std::vector<double> risk(rows.size(), 0.0);  // exp(eta), filled lazily
  auto risk_of = [&](int i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    double eta = 0.0;
    for (int j = 0; j < p; ++j) eta += beta[j] * r.x[static_cast<std::size_t>(j)];
    return std::exp(eta);
  };

  double s0 = 0.0;
  VectorXd s1 = VectorXd::Zero(p);
  MatrixXd s2 = MatrixXd::Zero(p, p);
  std::size_t next_add = 0, next_del = 0;

  auto xvec = [&](int i) {
    return Eigen::Map<const VectorXd>(rows[static_cast<std::size_t>(i)].x.data(), p);
  };

  // Sweep event times from the largest down; the running sums hold all rows
  // with start < tau <= stop.
  for (auto it = stratum.event_times.rbegin(); it != stratum.event_times.rend(); ++it) {
    const double tau = *it;
    while (next_add < by_stop.size() && rows[static_cast<std::size_t>(by_stop[next_add])].stop >= tau) {
      const int i = by_stop[next_add++];
      const double w = (risk[static_cast<std::size_t>(i)] = risk_of(i));
      s0 += w;
      s1 += w * xvec(i);
      s2 += w * xvec(i) * xvec(i).transpose();
    }
    while (next_del < by_start.size() && rows[static_cast<std::size_t>(by_start[next_del])].start >= tau) {
      const int i = by_start[next_del++];
      const double w = risk[static_cast<std::size_t>(i)];
      s0 -= w;
      s1 -= w * xvec(i);
      s2 -= w * xvec(i) * xvec(i).transpose();
    }

    // Death set at tau.
    double s0d = 0.0;
    VectorXd s1d = VectorXd::Zero(p);
    MatrixXd s2d = MatrixXd::Zero(p, p);
    int d = 0;
    VectorXd xsum = VectorXd::Zero(p);
    double eta_sum = 0.0;
    for (int i : stratum.rows) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      if (!r.event || r.stop != tau) continue;
      ++d;
      xsum += xvec(i);
      const double w = risk[static_cast<std::size_t>(i)];
      eta_sum += std::log(w);
      s0d += w;
      s1d += w * xvec(i);
      s2d += w * xvec(i) * xvec(i).transpose();
    }
    if (d == 0) continue;

    TimeStats ts;
    ts.time = tau;
    ts.d = d;
    ts.a1 = VectorXd::Zero(p);
    ts.b1 = VectorXd::Zero(p);
    ts.xbar_mean = VectorXd::Zero(p);

    const int substeps = ties == TieMethod::Efron ? d : 1;
    for (int j = 0; j < substeps; ++j) {
      const double frac = ties == TieMethod::Efron ? static_cast<double>(j) / d : 0.0;
      const double s0j = s0 - frac * s0d;
      const VectorXd s1j = s1 - frac * s1d;
      const MatrixXd s2j = s2 - frac * s2d;
      const VectorXd xbar = s1j / s0j;
      const double mult = ties == TieMethod::Efron ? 1.0 : static_cast<double>(d);

      if (loglik) *loglik -= mult * std::log(s0j);
      if (score) *score -= mult * xbar;
      if (info) *info += mult * (s2j / s0j - xbar * xbar.transpose());

      ts.a0 += mult / s0j;
      ts.a1 += mult * xbar / s0j;
      ts.b0 += mult * frac / s0j;
      ts.b1 += mult * frac * xbar / s0j;
      ts.xbar_mean += (ties == TieMethod::Efron ? xbar / d : xbar);
    }
    if (loglik) *loglik += eta_sum;
    if (score) *score += xsum;
    if (time_stats) time_stats->push_back(std::move(ts));
  }
  if (time_stats)
    std::sort(time_stats->begin(), time_stats->end(),
              [](const TimeStats& a, const TimeStats& b) { return a.time < b.time; });
}

void evaluate(const std::vector<RiskRow>& rows, const Workspace& ws, const VectorXd& beta,
              TieMethod ties, double* loglik, VectorXd* score, MatrixXd* info) {
  if (loglik) *loglik = 0.0;
  if (score) score->setZero();
  if (info) info->setZero();
  for (const auto& stratum : ws.strata)
    accumulate_stratum(rows, stratum, beta, ties, loglik, score, info, nullptr);
}

// Score residuals per row; Breslow terms plus the Efron death-set
// correction when enabled.
std::vector<std::vector<double>> score_residuals(const std::vector<RiskRow>& rows,
                                                 const Workspace& ws, const VectorXd& beta,
                                                 TieMethod ties) {
  const int p = static_cast<int>(beta.size());
  std::vector<std::vector<double>> resid(rows.size(), std::vector<double>(static_cast<std::size_t>(p), 0.0));

  for (const auto& stratum : ws.strata) {
    if (stratum.event_times.empty()) continue;
    std::vector<TimeStats> stats;
    accumulate_stratum(rows, stratum, beta, ties, nullptr, nullptr, nullptr, &stats);

    // Prefix sums over ascending event times.
    const std::size_t m = stats.size();
    std::vector<double> pa0(m + 1, 0.0);
    std::vector<VectorXd> pa1(m + 1, VectorXd::Zero(p));
    std::vector<double> times(m);
    for (std::size_t k = 0; k < m; ++k) {
      times[k] = stats[k].time;
      pa0[k + 1] = pa0[k] + stats[k].a0;
      pa1[k + 1] = pa1[k] + stats[k].a1;
    }

    for (int i : stratum.rows) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      double eta = 0.0;
      for (int j = 0; j < p; ++j) eta += beta[j] * r.x[static_cast<std::size_t>(j)];
      const double w = std::exp(eta);
      const auto x = Eigen::Map<const VectorXd>(r.x.data(), p);

      // Event times in (start, stop].
      const auto lo = static_cast<std::size_t>(
          std::upper_bound(times.begin(), times.end(), r.start) - times.begin());
      const auto hi = static_cast<std::size_t>(
          std::upper_bound(times.begin(), times.end(), r.stop) - times.begin());
      VectorXd v = VectorXd::Zero(p);
      if (hi > lo) v -= w * (x * (pa0[hi] - pa0[lo]) - (pa1[hi] - pa1[lo]));
      if (r.event) {
        const auto k = static_cast<std::size_t>(
            std::lower_bound(times.begin(), times.end(), r.stop) - times.begin());
        if (k < m && times[k] == r.stop) {
          v += x - stats[k].xbar_mean;
          // Efron: deaths see reduced weight at their own time.
          v += w * (x * stats[k].b0 - stats[k].b1);
        }
      }
      for (int j = 0; j < p; ++j) resid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v[j];
    }
  }
  return resid;
}

}  // namespace

CoxEval cox_loglik(const std::vector<RiskRow>& rows, const std::vector<double>& beta,
                   TieMethod ties) {
  if (rows.empty()) throw std::invalid_argument("cox_loglik: no rows");
  const Workspace ws = index_rows(rows);
  if (static_cast<int>(beta.size()) != ws.p)
    throw std::invalid_argument("cox_loglik: beta size mismatch");
  VectorXd b = Eigen::Map<const VectorXd>(beta.data(), ws.p);
  double ll = 0.0;
  VectorXd score = VectorXd::Zero(ws.p);
  evaluate(rows, ws, b, ties, &ll, &score, nullptr);
  CoxEval out;
  out.loglik = ll;
  out.gradient.assign(score.data(), score.data() + ws.p);
  return out;
}

CoxFit fit_cox(const std::vector<RiskRow>& rows_in, const std::vector<std::string>& names,
               const CoxOptions& options) {
  if (rows_in.empty()) throw std::invalid_argument("fit_cox: no rows");
  const int p_in = static_cast<int>(rows_in.front().x.size());
  if (static_cast<int>(names.size()) != p_in)
    throw std::invalid_argument("fit_cox: names/covariate count mismatch");
  for (const auto& r : rows_in) {
    if (static_cast<int>(r.x.size()) != p_in) throw std::invalid_argument("fit_cox: ragged covariates");
    if (!(r.start < r.stop)) throw std::invalid_argument("fit_cox: start must be < stop");
  }

  CoxFit fit;
  fit.n_rows = static_cast<long>(rows_in.size());
  std::set<int> spells;
  for (const auto& r : rows_in) {
    spells.insert(r.spell_id);
    if (r.event) fit.n_events++;
  }
  fit.n_spells = static_cast<long>(spells.size());
  if (fit.n_events == 0) throw NumericError("fit_cox: no events");

  // Drop zero-variance covariates.
  std::vector<int> keep;
  for (int j = 0; j < p_in; ++j) {
    const double v0 = rows_in.front().x[static_cast<std::size_t>(j)];
    bool varies = false;
    for (const auto& r : rows_in) {
      if (r.x[static_cast<std::size_t>(j)] != v0) {
        varies = true;
        break;
      }
    }
    if (varies) {
      keep.push_back(j);
      fit.names.push_back(names[static_cast<std::size_t>(j)]);
    } else {
      fit.dropped.push_back(names[static_cast<std::size_t>(j)]);
    }
  }
  const int p = static_cast<int>(keep.size());
  if (p == 0) throw NumericError("fit_cox: all covariates constant");

  std::vector<RiskRow> rows = rows_in;
  for (auto& r : rows) {
    std::vector<double> x(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) x[static_cast<std::size_t>(j)] = r.x[static_cast<std::size_t>(keep[static_cast<std::size_t>(j)])];
    r.x = std::move(x);
  }

  const Workspace ws = index_rows(rows);
  VectorXd beta = VectorXd::Zero(p);
  double loglik = 0.0;
  VectorXd score = VectorXd::Zero(p);
  MatrixXd info = MatrixXd::Zero(p, p);
  evaluate(rows, ws, beta, options.ties, &loglik, &score, &info);
  fit.loglik_null = loglik;

  bool converged = false;
  int iter = 0;
  std::string diagnostic;
  while (iter < options.max_iter) {
    if (score.cwiseAbs().maxCoeff() < options.grad_tol) {
      converged = true;
      break;
    }
    ++iter;
    Eigen::LDLT<MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
      throw NumericError("fit_cox: singular information matrix");
    VectorXd step = ldlt.solve(score);
    if ((info * step - score).norm() > 1e-6 * (1.0 + score.norm()))
      throw NumericError("fit_cox: singular information matrix (collinear covariates?)");

    // Step-halving: never accept a likelihood decrease.
    double new_ll = 0.0;
    VectorXd candidate;
    int halvings = 0;
    while (true) {
      candidate = beta + step;
      evaluate(rows, ws, candidate, options.ties, &new_ll, nullptr, nullptr);
      if (new_ll >= loglik || halvings >= 30) break;
      step *= 0.5;
      ++halvings;
    }
    beta = candidate;
    loglik = new_ll;
    evaluate(rows, ws, beta, options.ties, nullptr, &score, &info);

    if (beta.cwiseAbs().maxCoeff() > options.beta_cap) {
      diagnostic = "monotone likelihood: |beta| exceeded " + std::to_string(options.beta_cap);
      break;
    }
  }
  if (!converged && diagnostic.empty() && iter >= options.max_iter)
    diagnostic = "no convergence in " + std::to_string(options.max_iter) + " iterations";

  fit.converged = converged;
  fit.iterations = iter;
  fit.diagnostic = diagnostic;
  fit.loglik = loglik;
  fit.beta.assign(beta.data(), beta.data() + p);
  fit.hazard_ratio.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) fit.hazard_ratio[static_cast<std::size_t>(j)] = std::exp(beta[j]);

  Eigen::LDLT<MatrixXd> ldlt(info);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("fit_cox: singular information matrix at solution");
  MatrixXd cov_model = ldlt.solve(MatrixXd::Identity(p, p));

  // Cluster-robust sandwich A^-1 B A^-1 from cluster-summed score residuals.
  fit.score_residuals = score_residuals(rows, ws, beta, options.ties);
  std::map<int, VectorXd> cluster_sum;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [it, inserted] = cluster_sum.try_emplace(rows[i].cluster_id, VectorXd::Zero(p));
    it->second += Eigen::Map<const VectorXd>(fit.score_residuals[i].data(), p);
  }
  MatrixXd b_mat = MatrixXd::Zero(p, p);
  for (const auto& [cid, s] : cluster_sum) b_mat += s * s.transpose();
  MatrixXd cov_robust = cov_model * b_mat * cov_model;

  fit.cov_model.assign(cov_model.data(), cov_model.data() + p * p);
  fit.cov_robust.assign(cov_robust.data(), cov_robust.data() + p * p);
  fit.se_model.resize(static_cast<std::size_t>(p));
  fit.se_robust.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    fit.se_model[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov_model(j, j)));
    fit.se_robust[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov_robust(j, j)));
  }

  Eigen::LDLT<MatrixXd> robust_ldlt(cov_robust);
  if (robust_ldlt.info() == Eigen::Success)
    fit.wald_chi2 = beta.dot(robust_ldlt.solve(beta));
  return fit;
}

std::vector<std::string> spell_covariate_names() {
  return {"edlp",    "hyb",          "price_level",     "private_label", "january",
          "christmas", "aisle_middle", "aisle_front",     "shelf_eye_level", "shelf_top"};
}

namespace {

bool format_is(const std::string& label, const char* target) {
  std::string low;
  for (char c : label)
    if (c != '-' && c != '_' && c != ' ') low += static_cast<char>(std::tolower(c));
  return low == target;
}

}  // namespace

std::vector<RiskRow> build_spells(const std::vector<FilterResult>& products, SeriesKind kind,
                                  const PricePanel& panel) {
  std::map<std::string, int> strata;
  for (const auto& fr : products)
    strata.emplace(fr.rec->category, 0);
  int next = 0;
  for (auto& [cat, id] : strata) id = next++;

  std::vector<RiskRow> rows;
  int spell_id = 0;
  for (std::size_t idx = 0; idx < products.size(); ++idx) {
    const auto& fr = products[idx];
    const auto& rec = *fr.rec;
    const auto& series = fr.of(kind);
    const int n = static_cast<int>(series.size());
    if (n < 2) continue;

    double price_sum = 0.0;
    for (Cents c : rec.transaction) price_sum += cents_to_currency(c);
    const double price_level = price_sum / static_cast<double>(rec.weeks());

    std::string format;
    if (auto it = panel.store_format.find(rec.store); it != panel.store_format.end())
      format = it->second;
    const double edlp = format_is(format, "edlp") ? 1.0 : 0.0;
    const double hyb = format_is(format, "hyb") || format_is(format, "hybrid") ? 1.0 : 0.0;

    std::vector<double> base = {edlp,
                                hyb,
                                price_level,
                                rec.private_label ? 1.0 : 0.0,
                                0.0,
                                0.0,
                                rec.aisle == Aisle::Middle ? 1.0 : 0.0,
                                rec.aisle == Aisle::Front ? 1.0 : 0.0,
                                rec.shelf == Shelf::EyeLevel ? 1.0 : 0.0,
                                rec.shelf == Shelf::Top ? 1.0 : 0.0};

    // Unmasked runs; the gap-time clock restarts at each change and at each
    // run start. Position t is 0-based; week = first_week + t.
    int run_start = 0;
    while (run_start < n) {
      while (run_start < n && !fr.mask.empty() && fr.mask[static_cast<std::size_t>(run_start)])
        ++run_start;
      if (run_start >= n) break;
      int run_end = run_start;
      while (run_end + 1 < n && (fr.mask.empty() || !fr.mask[static_cast<std::size_t>(run_end + 1)]))
        ++run_end;

      int spell_start = run_start;
      while (spell_start < run_end) {
        // Transitions spell_start -> ... within the run until a change.
        int t = spell_start;
        bool event = false;
        while (t < run_end) {
          if (series[static_cast<std::size_t>(t + 1)] != series[static_cast<std::size_t>(t)]) {
            event = true;
            break;
          }
          ++t;
        }
        const int len = t - spell_start + (event ? 1 : 0);
        const int risk_weeks = event ? len : run_end - spell_start;
        if (risk_weeks > 0) {
          ++spell_id;
          for (int r = 1; r <= risk_weeks; ++r) {
            RiskRow row;
            row.spell_id = spell_id;
            row.cluster_id = static_cast<int>(idx);
            row.stratum = strata[rec.category];
            row.start = r - 1;
            row.stop = r;
            row.event = event && r == risk_weeks;
            row.x = base;
            const int week = rec.first_week + spell_start + r;  // arrival week
            row.x[4] = week_in_january(panel.start_date, week) ? 1.0 : 0.0;
            row.x[5] = week_contains_christmas(panel.start_date, week) ? 1.0 : 0.0;
            rows.push_back(std::move(row));
          }
        }
        if (!event) break;
        spell_start = spell_start + len;  // week of the new price
      }
      run_start = run_end + 1;
    }
  }
  return rows;
}

}  // namespace pricekit
