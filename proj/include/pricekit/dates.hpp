#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pricekit {

// Minimal proleptic-Gregorian calendar helpers for mapping week indices to
// calendar weeks (January / Christmas-week covariates).
struct CivilDate {
  int year = 2003;
  int month = 7;
  int day = 30;
  bool operator==(const CivilDate&) const = default;
};

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t z);

CivilDate parse_iso_date(const std::string& s);  // "YYYY-MM-DD"
std::string format_iso_date(const CivilDate& d);

// Start date of 1-based week w given the start of week 1.
CivilDate week_start(const CivilDate& start, int week);

// Week w starts in January.
bool week_in_january(const CivilDate& start, int week);

// Week w contains December 25.
bool week_contains_christmas(const CivilDate& start, int week);

}  // namespace pricekit
