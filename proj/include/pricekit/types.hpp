#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pricekit {

// Prices are exact minor-unit integers (cents) end to end. Log/ratio math
// converts at the boundary, never before: equality tests (modal prices,
// return-to-regular) must be exact.
using Cents = std::int64_t;

// 0/1 flag vectors (avoids std::vector<bool> proxy semantics).
using BoolVec = std::vector<std::uint8_t>;

enum class Aisle { Back, Middle, Front };
enum class Shelf { Bottom, EyeLevel, Top };

enum class SeriesKind { Transaction = 0, PostedRegular = 1, Filtered = 2, Reference = 3 };
inline constexpr int kSeriesKinds = 4;

const char* to_string(Aisle a);
const char* to_string(Shelf s);
const char* to_string(SeriesKind k);
Aisle parse_aisle(const std::string& s);
Shelf parse_shelf(const std::string& s);
SeriesKind parse_series_kind(const std::string& s);

inline double cents_to_currency(Cents c) { return static_cast<double>(c) / 100.0; }

// "X.YY" with exactly two fraction digits.
std::string format_cents(Cents c);

// Parses a decimal price string with at most two fraction digits into minor
// units. Throws std::invalid_argument on malformed input or >2 fraction digits.
Cents parse_price(const std::string& text);

// Recoverable input/data problems: CLI maps these to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failures (non-convergence, undefined statistics): exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pricekit
