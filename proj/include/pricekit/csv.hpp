#pragma once

#include <istream>
#include <string>
#include <vector>

namespace pricekit {

// Minimal delimited-text reader: header row, configurable delimiter,
// double-quoted fields with "" escapes. Stops carrying state beyond the
// current row; line numbers are 1-based including the header.
class CsvReader {
 public:
  CsvReader(std::istream& in, char delimiter = ',');

  const std::vector<std::string>& header() const { return header_; }
  // Index of a header column, or -1.
  int column(const std::string& name) const;

  // Reads next row into `fields`; returns false at EOF. Blank lines are
  // skipped. Throws DataError on unbalanced quotes.
  bool next(std::vector<std::string>& fields);

  long line() const { return line_; }

 private:
  bool read_record(std::vector<std::string>& fields);

  std::istream& in_;
  char delim_;
  std::vector<std::string> header_;
  long line_ = 0;
};

std::string csv_escape(const std::string& field, char delimiter = ',');

}  // namespace pricekit
