#pragma once

#include <string>
#include <vector>

#include "pricekit/filters.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

// One counting-process interval (start, stop] at risk of a price change.
struct RiskRow {
  int spell_id = 0;
  int cluster_id = 0;  // product x store
  int stratum = 0;     // category
  double start = 0.0;
  double stop = 0.0;
  bool event = false;
  std::vector<double> x;
};

enum class TieMethod { Breslow, Efron };

struct CoxOptions {
  double grad_tol = 1e-8;   // max-norm of the score at convergence
  int max_iter = 50;
  TieMethod ties = TieMethod::Breslow;
  double beta_cap = 20.0;   // |beta| beyond this flags a monotone likelihood
};

struct CoxFit {
  std::vector<std::string> names;       // covariates kept in the fit
  std::vector<std::string> dropped;     // zero-variance covariates removed
  std::vector<double> beta;
  std::vector<double> hazard_ratio;     // exp(beta)
  std::vector<double> se_model;
  std::vector<double> se_robust;
  std::vector<double> cov_model;        // p x p, row-major
  std::vector<double> cov_robust;       // cluster-robust sandwich
  std::vector<std::vector<double>> score_residuals;  // per input row, p columns
  double loglik = 0.0;
  double loglik_null = 0.0;
  double wald_chi2 = 0.0;               // beta' * robust^-1 * beta
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
  long n_events = 0;
  long n_spells = 0;
  long n_rows = 0;
};

// Log partial likelihood and analytic score at an arbitrary beta (exposed
// for gradient checks and grid-search oracles).
struct CoxEval {
  double loglik = 0.0;
  std::vector<double> gradient;
};
CoxEval cox_loglik(const std::vector<RiskRow>& rows, const std::vector<double>& beta,
                   TieMethod ties = TieMethod::Breslow);

// Maximizes the stratified partial likelihood by Newton-Raphson with
// step-halving on likelihood decrease. Covariates with zero variance across
// rows are dropped with a warning entry; a singular information matrix
// raises NumericError. Divergence (|beta| > beta_cap) returns a
// non-converged fit with a diagnostic.
CoxFit fit_cox(const std::vector<RiskRow>& rows, const std::vector<std::string>& names,
               const CoxOptions& options = {});

// Gap-time spell construction: the clock restarts after every price change,
// one row per risk week so the January / Christmas-week dummies can vary
// within a spell. Calendar dummies are evaluated at the week where the
// change would be observed (the transition's arrival week). Masked weeks
// split the series into independent runs, censored at each run end.
// Strata are categories; clusters are products (good x store).
std::vector<RiskRow> build_spells(const std::vector<FilterResult>& products, SeriesKind kind,
                                  const PricePanel& panel);

// Covariate names produced by build_spells, in column order.
std::vector<std::string> spell_covariate_names();

}  // namespace pricekit
