#pragma once

#include <map>
#include <string>
#include <vector>

namespace pricekit {

// Deterministic numeric formatting for report files (snprintf, fixed
// precision, locale independent). NaN renders as NA, infinities as inf.
std::string fmt(double v, int precision);
std::string fmt_sig(double v, int significant);

// Significance stars at 10/5/1%.
std::string stars(double p);

// Aligned plain-text table; first row is the header.
std::string render_table(const std::vector<std::vector<std::string>>& rows);

// Collects bundle files in memory, then writes them under a directory with
// LF endings. Every text file starts with a header naming the file and
// embedding the input digest and seed, so identical inputs reproduce
// identical bytes.
class Bundle {
 public:
  Bundle(std::string input_digest, std::uint64_t seed)
      : digest_(std::move(input_digest)), seed_(seed) {}

  void add(const std::string& name, const std::string& body, bool with_header = true);
  const std::string& input_digest() const { return digest_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<std::string, std::string>& files() const { return files_; }

  // Writes all files plus manifest.json; returns the file names written.
  std::vector<std::string> write(const std::string& dir, const std::string& config_echo) const;

 private:
  std::string digest_;
  std::uint64_t seed_;
  std::map<std::string, std::string> files_;
};

}  // namespace pricekit
