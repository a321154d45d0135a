#include "pricekit/csv.hpp"

#include "pricekit/types.hpp"

namespace pricekit {

CsvReader::CsvReader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {
  std::vector<std::string> fields;
  if (read_record(fields)) header_ = std::move(fields);
}

int CsvReader::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return static_cast<int>(i);
  return -1;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  while (read_record(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    return true;
  }
  return false;
}

bool CsvReader::read_record(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::string field;
  bool in_quotes = false;
  std::size_t i = 0;
  while (true) {
    if (in_quotes) {
      if (i >= line.size()) {
        // Embedded newline inside a quoted field.
        if (!std::getline(in_, line)) throw DataError("unterminated quoted field at line " + std::to_string(line_));
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        field += '\n';
        i = 0;
        continue;
      }
      const char c = line[i++];
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else {
      if (i >= line.size()) break;
      const char c = line[i++];
      if (c == '"' && field.empty()) {
        in_quotes = true;
      } else if (c == delim_) {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field += c;
      }
    }
  }
  fields.push_back(std::move(field));
  return true;
}

std::string csv_escape(const std::string& field, char delimiter) {
  bool needs = false;
  for (char c : field)
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') needs = true;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace pricekit
