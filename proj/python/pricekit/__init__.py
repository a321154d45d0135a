"""Price rigidity toolkit: sales filters, reference prices, duration
estimators and the associated test statistics, backed by the C++ core."""

from pricekit._core import (
    change_indicators,
    chi2_proportions,
    expected_duration,
    filter_sales_a,
    fit_cox,
    fk_index,
    implied_duration,
    kurtosis,
    reference_prices,
    sale_events,
    simulate_store,
    standardize,
    wilcoxon_rank_sum,
)

__all__ = [
    "change_indicators",
    "chi2_proportions",
    "expected_duration",
    "filter_sales_a",
    "fit_cox",
    "fk_index",
    "implied_duration",
    "kurtosis",
    "reference_prices",
    "sale_events",
    "simulate_store",
    "standardize",
    "wilcoxon_rank_sum",
]
