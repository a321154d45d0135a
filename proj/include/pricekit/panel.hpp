#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "pricekit/dates.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

// One (store, product) weekly series pair plus shelf metadata. Weeks are
// contiguous; `first_week` is the panel-wide first week index (1-based).
struct ProductRecord {
  std::string store;
  std::string product;
  std::string category;
  bool private_label = false;
  Aisle aisle = Aisle::Middle;
  Shelf shelf = Shelf::EyeLevel;
  int first_week = 1;
  std::vector<Cents> transaction;
  std::vector<Cents> posted_regular;
  BoolVec imputed;  // weeks filled by carry-forward (empty when none)

  int weeks() const { return static_cast<int>(transaction.size()); }
};

// Immutable after load; safe to share across concurrent readers.
struct PricePanel {
  std::vector<ProductRecord> products;  // sorted by (store, product)
  std::map<std::string, std::string> store_format;  // optional EDLP/HiLo/HYB labels
  CivilDate start_date{2003, 7, 30};  // calendar date of week `first_week`

  std::size_t observation_count() const;
  int weeks() const;  // common T; 0 when empty
  std::vector<std::string> stores() const;
  const ProductRecord* find(const std::string& store, const std::string& product) const;
  std::vector<const ProductRecord*> store_products(const std::string& store) const;
};

struct PanelWarning {
  std::string check;    // e.g. "transaction_exceeds_regular"
  std::string store;
  std::string product;
  int week = 0;
  std::string detail;
};

struct LoadOptions {
  char delimiter = ',';
  bool minor_units = false;      // prices given as integer cents
  bool impute_missing = false;   // carry the last price forward over week gaps
  // canonical name -> actual column name; canonical names:
  // store, product, category, week, price, regular_price, private_label, aisle, shelf
  std::map<std::string, std::string> columns;
};

struct LoadResult {
  PricePanel panel;
  std::vector<PanelWarning> warnings;
  std::map<std::string, std::size_t> rows_per_store;
};

// Strict loader: malformed rows, duplicates, non-positive prices and week
// gaps (without `impute_missing`) raise DataError with the line number.
// A transaction price above the posted regular price is a warning, not an
// error.
LoadResult load_panel(std::istream& in, const LoadOptions& options = {});
LoadResult load_panel_file(const std::string& path, const LoadOptions& options = {});

// Canonical serialization: fixed column order, rows sorted by
// (store, product, week), prices as 2-digit decimals, LF line endings.
// load -> write -> load -> write is byte-stable.
void write_panel(const PricePanel& panel, std::ostream& out);

struct ValidationReport {
  std::map<std::string, std::size_t> counts;  // per-check counts
  std::vector<PanelWarning> warnings;
  std::size_t observations = 0;
  std::size_t products = 0;
  std::size_t stores = 0;
  bool clean() const;
};

// Pure report over a loaded panel: imputed week gaps, transaction>regular
// rows, zero-change transaction/regular products.
ValidationReport validate_panel(const PricePanel& panel);

// Lenient single-pass audit of a raw stream: reports malformed rows,
// duplicates, gaps, non-positive prices and the panel checks without
// rejecting the input.
ValidationReport validate_stream(std::istream& in, const LoadOptions& options = {});

std::string report_to_json(const ValidationReport& report);

// Share of price endings over all transaction prices; keys are the last
// `n_digits` digits of the minor-unit price ("9", "99", ...). Shares sum
// to 1 within 1e-12. n_digits must be 1 or 2. Throws DataError on an empty
// panel.
std::map<std::string, double> price_ending_histogram(const PricePanel& panel, int n_digits);
std::map<std::string, std::map<std::string, double>> price_ending_histogram_by_store(
    const PricePanel& panel, int n_digits);

}  // namespace pricekit
