#include "pricekit/panel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pricekit/csv.hpp"

namespace pricekit {

namespace {

constexpr const char* kCanonicalColumns[] = {"store",         "product", "category",
                                             "week",          "price",   "regular_price",
                                             "private_label", "aisle",   "shelf"};

struct RawRow {
  std::string store, product, category;
  int week = 0;
  Cents price = 0, regular = 0;
  bool private_label = false;
  Aisle aisle = Aisle::Middle;
  Shelf shelf = Shelf::EyeLevel;
  long line = 0;
};

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

// Shared row scanner for the strict loader and the lenient auditor.
// on_error(line, message) decides whether to throw.
template <typename ErrorFn>
void scan_rows(std::istream& in, const LoadOptions& opt, std::vector<RawRow>& rows,
               ErrorFn on_error) {
  CsvReader reader(in, opt.delimiter);
  if (reader.header().empty()) {
    on_error(0L, "missing header row");
    return;
  }

  int col[9];
  for (int i = 0; i < 9; ++i) {
    std::string name = kCanonicalColumns[i];
    auto it = opt.columns.find(name);
    if (it != opt.columns.end()) name = it->second;
    col[i] = reader.column(name);
    if (col[i] < 0) {
      on_error(1L, "required column missing: '" + name + "'");
      return;
    }
  }

  std::vector<std::string> f;
  while (reader.next(f)) {
    const long line = reader.line();
    if (f.size() < reader.header().size()) {
      on_error(line, "row has " + std::to_string(f.size()) + " fields, expected " +
                         std::to_string(reader.header().size()));
      continue;
    }
    RawRow r;
    r.line = line;
    try {
      r.store = f[static_cast<std::size_t>(col[0])];
      r.product = f[static_cast<std::size_t>(col[1])];
      r.category = f[static_cast<std::size_t>(col[2])];
      r.week = std::stoi(f[static_cast<std::size_t>(col[3])]);
      if (opt.minor_units) {
        r.price = std::stoll(f[static_cast<std::size_t>(col[4])]);
        r.regular = std::stoll(f[static_cast<std::size_t>(col[5])]);
      } else {
        r.price = parse_price(f[static_cast<std::size_t>(col[4])]);
        r.regular = parse_price(f[static_cast<std::size_t>(col[5])]);
      }
      r.private_label = parse_bool(f[static_cast<std::size_t>(col[6])]);
      r.aisle = parse_aisle(f[static_cast<std::size_t>(col[7])]);
      r.shelf = parse_shelf(f[static_cast<std::size_t>(col[8])]);
    } catch (const std::exception& e) {
      on_error(line, std::string("malformed row: ") + e.what());
      continue;
    }
    if (r.week < 1) {
      on_error(line, "week index must be >= 1");
      continue;
    }
    if (r.price <= 0 || r.regular <= 0) {
      on_error(line, "non-positive price");
      continue;
    }
    rows.push_back(std::move(r));
  }
}

struct ProductBuilder {
  std::vector<RawRow> rows;
};

}  // namespace

std::size_t PricePanel::observation_count() const {
  std::size_t n = 0;
  for (const auto& p : products) n += p.transaction.size();
  return n;
}

int PricePanel::weeks() const { return products.empty() ? 0 : products.front().weeks(); }

std::vector<std::string> PricePanel::stores() const {
  std::vector<std::string> out;
  for (const auto& p : products)
    if (out.empty() || out.back() != p.store) out.push_back(p.store);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const ProductRecord* PricePanel::find(const std::string& store, const std::string& product) const {
  for (const auto& p : products)
    if (p.store == store && p.product == product) return &p;
  return nullptr;
}

std::vector<const ProductRecord*> PricePanel::store_products(const std::string& store) const {
  std::vector<const ProductRecord*> out;
  for (const auto& p : products)
    if (p.store == store) out.push_back(&p);
  return out;
}

LoadResult load_panel(std::istream& in, const LoadOptions& options) {
  std::vector<RawRow> rows;
  scan_rows(in, options, rows, [](long line, const std::string& msg) {
    throw DataError("line " + std::to_string(line) + ": " + msg);
  });

  LoadResult result;
  std::map<std::pair<std::string, std::string>, ProductBuilder> groups;
  for (auto& r : rows) {
    result.rows_per_store[r.store]++;
    groups[{r.store, r.product}].rows.push_back(std::move(r));
  }

  for (auto& [key, builder] : groups) {
    auto& rs = builder.rows;
    std::sort(rs.begin(), rs.end(), [](const RawRow& a, const RawRow& b) { return a.week < b.week; });
    for (std::size_t i = 1; i < rs.size(); ++i) {
      if (rs[i].week == rs[i - 1].week)
        throw DataError("line " + std::to_string(rs[i].line) + ": duplicate (store, product, week) = (" +
                        key.first + ", " + key.second + ", " + std::to_string(rs[i].week) + ")");
    }

    ProductRecord rec;
    rec.store = key.first;
    rec.product = key.second;
    rec.category = rs.front().category;
    rec.private_label = rs.front().private_label;
    rec.aisle = rs.front().aisle;
    rec.shelf = rs.front().shelf;
    rec.first_week = rs.front().week;

    bool any_imputed = false;
    int expect = rec.first_week;
    for (const auto& r : rs) {
      while (r.week > expect) {
        if (!options.impute_missing)
          throw DataError("line " + std::to_string(r.line) + ": gap in weeks for (" + key.first +
                          ", " + key.second + "): missing week " + std::to_string(expect));
        rec.transaction.push_back(rec.transaction.back());
        rec.posted_regular.push_back(rec.posted_regular.back());
        rec.imputed.push_back(1);
        any_imputed = true;
        result.warnings.push_back({"imputed_week", key.first, key.second, expect,
                                   "carried forward from week " + std::to_string(expect - 1)});
        ++expect;
      }
      rec.transaction.push_back(r.price);
      rec.posted_regular.push_back(r.regular);
      rec.imputed.push_back(0);
      if (r.price > r.regular)
        result.warnings.push_back({"transaction_exceeds_regular", key.first, key.second, r.week,
                                   format_cents(r.price) + " > " + format_cents(r.regular)});
      ++expect;
    }
    if (!any_imputed) rec.imputed.clear();
    result.panel.products.push_back(std::move(rec));
  }

  std::sort(result.panel.products.begin(), result.panel.products.end(),
            [](const ProductRecord& a, const ProductRecord& b) {
              return std::tie(a.store, a.product) < std::tie(b.store, b.product);
            });

  // All products must share one contiguous week range; cross-store
  // statistics (synchronization, pairwise tests) assume aligned weeks.
  if (!result.panel.products.empty()) {
    const auto& first = result.panel.products.front();
    for (const auto& p : result.panel.products) {
      if (p.first_week != first.first_week || p.weeks() != first.weeks())
        throw DataError("week range mismatch: (" + p.store + ", " + p.product + ") covers weeks " +
                        std::to_string(p.first_week) + ".." +
                        std::to_string(p.first_week + p.weeks() - 1) + " but (" + first.store +
                        ", " + first.product + ") covers " + std::to_string(first.first_week) +
                        ".." + std::to_string(first.first_week + first.weeks() - 1));
    }
  }
  return result;
}

LoadResult load_panel_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open panel file: " + path);
  return load_panel(in, options);
}

void write_panel(const PricePanel& panel, std::ostream& out) {
  out << "store,product,category,week,price,regular_price,private_label,aisle,shelf\n";
  for (const auto& p : panel.products) {
    for (int w = 0; w < p.weeks(); ++w) {
      out << csv_escape(p.store) << ',' << csv_escape(p.product) << ',' << csv_escape(p.category)
          << ',' << (p.first_week + w) << ',' << format_cents(p.transaction[static_cast<std::size_t>(w)])
          << ',' << format_cents(p.posted_regular[static_cast<std::size_t>(w)]) << ','
          << (p.private_label ? 1 : 0) << ',' << to_string(p.aisle) << ',' << to_string(p.shelf)
          << '\n';
    }
  }
}

bool ValidationReport::clean() const {
  for (const auto& [check, n] : counts)
    if (n != 0) return false;
  return true;
}

namespace {

void panel_checks(const PricePanel& panel, ValidationReport& rep) {
  rep.counts["week_gaps"];
  rep.counts["transaction_exceeds_regular"];
  rep.counts["zero_change_transaction"];
  rep.counts["zero_change_regular"];
  for (const auto& p : panel.products) {
    for (std::size_t w = 0; w < p.imputed.size(); ++w) {
      if (p.imputed[w]) {
        rep.counts["week_gaps"]++;
        rep.warnings.push_back({"week_gaps", p.store, p.product, p.first_week + static_cast<int>(w),
                                "imputed by carry-forward"});
      }
    }
    for (int w = 0; w < p.weeks(); ++w) {
      const auto i = static_cast<std::size_t>(w);
      if (p.transaction[i] > p.posted_regular[i]) {
        rep.counts["transaction_exceeds_regular"]++;
        rep.warnings.push_back({"transaction_exceeds_regular", p.store, p.product, p.first_week + w,
                                format_cents(p.transaction[i]) + " > " +
                                    format_cents(p.posted_regular[i])});
      }
    }
    auto constant = [](const std::vector<Cents>& v) {
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[0]) return false;
      return true;
    };
    if (p.weeks() >= 1 && constant(p.transaction)) {
      rep.counts["zero_change_transaction"]++;
      rep.warnings.push_back({"zero_change_transaction", p.store, p.product, p.first_week,
                              "transaction price never changes"});
    }
    if (p.weeks() >= 1 && constant(p.posted_regular)) {
      rep.counts["zero_change_regular"]++;
      rep.warnings.push_back({"zero_change_regular", p.store, p.product, p.first_week,
                              "posted regular price never changes"});
    }
  }
  rep.observations = panel.observation_count();
  rep.products = panel.products.size();
  rep.stores = panel.stores().size();
}

}  // namespace

ValidationReport validate_panel(const PricePanel& panel) {
  ValidationReport rep;
  panel_checks(panel, rep);
  return rep;
}

ValidationReport validate_stream(std::istream& in, const LoadOptions& options) {
  ValidationReport rep;
  rep.counts["malformed_rows"];
  rep.counts["duplicate_rows"];

  std::vector<RawRow> rows;
  scan_rows(in, options, rows, [&rep](long line, const std::string& msg) {
    rep.counts["malformed_rows"]++;
    rep.warnings.push_back({"malformed_rows", "", "", 0, "line " + std::to_string(line) + ": " + msg});
  });

  // Drop duplicates, then build a panel from surviving rows for the
  // structural checks.
  std::map<std::pair<std::string, std::string>, std::set<int>> seen;
  std::ostringstream rebuilt;
  rebuilt << "store,product,category,week,price,regular_price,private_label,aisle,shelf\n";
  for (const auto& r : rows) {
    if (!seen[{r.store, r.product}].insert(r.week).second) {
      rep.counts["duplicate_rows"]++;
      rep.warnings.push_back({"duplicate_rows", r.store, r.product, r.week,
                              "line " + std::to_string(r.line)});
      continue;
    }
    rebuilt << csv_escape(r.store) << ',' << csv_escape(r.product) << ',' << csv_escape(r.category)
            << ',' << r.week << ',' << format_cents(r.price) << ',' << format_cents(r.regular)
            << ',' << (r.private_label ? 1 : 0) << ',' << to_string(r.aisle) << ','
            << to_string(r.shelf) << '\n';
  }
  std::istringstream in2(rebuilt.str());
  LoadOptions lenient;
  lenient.impute_missing = true;
  try {
    LoadResult loaded = load_panel(in2, lenient);
    panel_checks(loaded.panel, rep);
  } catch (const DataError& e) {
    rep.counts["structural_errors"]++;
    rep.warnings.push_back({"structural_errors", "", "", 0, e.what()});
  }
  return rep;
}

std::string report_to_json(const ValidationReport& report) {
  std::ostringstream os;
  os << "{\n  \"observations\": " << report.observations << ",\n  \"products\": " << report.products
     << ",\n  \"stores\": " << report.stores << ",\n  \"clean\": " << (report.clean() ? "true" : "false")
     << ",\n  \"counts\": {";
  bool first = true;
  for (const auto& [check, n] : report.counts) {
    os << (first ? "\n" : ",\n") << "    \"" << check << "\": " << n;
    first = false;
  }
  os << "\n  },\n  \"warnings\": [";
  first = true;
  for (const auto& w : report.warnings) {
    os << (first ? "\n" : ",\n") << "    {\"check\": \"" << w.check << "\", \"store\": \"" << w.store
       << "\", \"product\": \"" << w.product << "\", \"week\": " << w.week << ", \"detail\": \""
       << w.detail << "\"}";
    first = false;
  }
  os << "\n  ]\n}\n";
  return os.str();
}

std::map<std::string, double> price_ending_histogram(const PricePanel& panel, int n_digits) {
  if (panel.products.empty()) throw DataError("price_ending_histogram: empty panel");
  if (n_digits != 1 && n_digits != 2) throw std::invalid_argument("n_digits must be 1 or 2");
  const Cents mod = n_digits == 1 ? 10 : 100;
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& p : panel.products) {
    for (Cents c : p.transaction) {
      Cents e = ((c % mod) + mod) % mod;
      char buf[8];
      std::snprintf(buf, sizeof(buf), n_digits == 1 ? "%lld" : "%02lld", static_cast<long long>(e));
      counts[buf]++;
      ++total;
    }
  }
  std::map<std::string, double> shares;
  for (const auto& [k, n] : counts) shares[k] = static_cast<double>(n) / static_cast<double>(total);
  return shares;
}

std::map<std::string, std::map<std::string, double>> price_ending_histogram_by_store(
    const PricePanel& panel, int n_digits) {
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& store : panel.stores()) {
    PricePanel sub;
    for (const auto& p : panel.products)
      if (p.store == store) sub.products.push_back(p);
    out[store] = price_ending_histogram(sub, n_digits);
  }
  return out;
}

}  // namespace pricekit
