#include "pricekit/types.hpp"

#include <cctype>
#include <cstdio>

namespace pricekit {

const char* to_string(Aisle a) {
  switch (a) {
    case Aisle::Back: return "back";
    case Aisle::Middle: return "middle";
    case Aisle::Front: return "front";
  }
  return "?";
}

const char* to_string(Shelf s) {
  switch (s) {
    case Shelf::Bottom: return "bottom";
    case Shelf::EyeLevel: return "eye_level";
    case Shelf::Top: return "top";
  }
  return "?";
}

const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::Transaction: return "transaction";
    case SeriesKind::PostedRegular: return "posted_regular";
    case SeriesKind::Filtered: return "filtered";
    case SeriesKind::Reference: return "reference";
  }
  return "?";
}

Aisle parse_aisle(const std::string& s) {
  if (s == "back") return Aisle::Back;
  if (s == "middle") return Aisle::Middle;
  if (s == "front") return Aisle::Front;
  throw std::invalid_argument("unknown aisle: '" + s + "'");
}

Shelf parse_shelf(const std::string& s) {
  if (s == "bottom") return Shelf::Bottom;
  if (s == "eye_level" || s == "eye-level") return Shelf::EyeLevel;
  if (s == "top") return Shelf::Top;
  throw std::invalid_argument("unknown shelf: '" + s + "'");
}

SeriesKind parse_series_kind(const std::string& s) {
  if (s == "transaction") return SeriesKind::Transaction;
  if (s == "posted_regular" || s == "regular") return SeriesKind::PostedRegular;
  if (s == "filtered") return SeriesKind::Filtered;
  if (s == "reference") return SeriesKind::Reference;
  throw std::invalid_argument("unknown series kind: '" + s + "'");
}

std::string format_cents(Cents c) {
  char buf[32];
  const char* sign = c < 0 ? "-" : "";
  Cents a = c < 0 ? -c : c;
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", sign,
                static_cast<long long>(a / 100), static_cast<long long>(a % 100));
  return buf;
}

Cents parse_price(const std::string& text) {
  std::size_t i = 0, n = text.size();
  while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t end = n;
  while (end > i && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (i >= end) throw std::invalid_argument("empty price");

  bool neg = false;
  if (text[i] == '+' || text[i] == '-') {
    neg = text[i] == '-';
    ++i;
  }
  Cents whole = 0;
  bool any_digit = false;
  for (; i < end && text[i] != '.'; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw std::invalid_argument("malformed price: '" + text + "'");
    whole = whole * 10 + (text[i] - '0');
    any_digit = true;
  }
  Cents frac = 0;
  if (i < end) {  // at '.'
    ++i;
    int digits = 0;
    for (; i < end; ++i, ++digits) {
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw std::invalid_argument("malformed price: '" + text + "'");
      if (digits >= 2)
        throw std::invalid_argument("price has more than 2 fraction digits: '" + text + "'");
      frac = frac * 10 + (text[i] - '0');
    }
    if (digits == 0 && !any_digit)
      throw std::invalid_argument("malformed price: '" + text + "'");
    if (digits == 1) frac *= 10;
  } else if (!any_digit) {
    throw std::invalid_argument("malformed price: '" + text + "'");
  }
  Cents v = whole * 100 + frac;
  return neg ? -v : v;
}

}  // namespace pricekit
