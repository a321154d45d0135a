#include "pricekit/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pricekit/digest.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

std::string fmt(double v, int precision) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string fmt_sig(double v, int significant) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
  return buf;
}

std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return "";
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream os;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) os << "  ";
      os << rows[r][i];
      if (i + 1 < rows[r].size())
        os << std::string(width[i] - rows[r][i].size(), ' ');
    }
    os << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 2 : 0);
      os << std::string(total, '-') << '\n';
    }
  }
  return os.str();
}

void Bundle::add(const std::string& name, const std::string& body, bool with_header) {
  std::string content;
  if (with_header) {
    content = "# pricekit " + name + "\n# input_digest=" + digest_ +
              " seed=" + std::to_string(seed_) + "\n";
  }
  content += body;
  files_[name] = std::move(content);
}

std::vector<std::string> Bundle::write(const std::string& dir, const std::string& config_echo) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  // Manifest embeds the digest of every other file.
  std::ostringstream manifest;
  manifest << "{\n  \"input_digest\": \"" << digest_ << "\",\n  \"seed\": " << seed_
           << ",\n  \"config\": [";
  {
    std::istringstream lines(config_echo);
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
      std::string escaped;
      for (char c : line) {
        if (c == '"' || c == '\\') escaped += '\\';
        escaped += c;
      }
      manifest << (first ? "\n" : ",\n") << "    \"" << escaped << "\"";
      first = false;
    }
  }
  manifest << "\n  ],\n  \"files\": {";
  bool first = true;
  for (const auto& [name, content] : files_) {
    manifest << (first ? "\n" : ",\n") << "    \"" << name << "\": \"" << digest_hex(content)
             << "\"";
    first = false;
  }
  manifest << "\n  }\n}\n";

  std::vector<std::string> written;
  for (const auto& [name, content] : files_) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + name);
    out << content;
    written.push_back(name);
  }
  std::ofstream mout(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!mout) throw DataError("cannot write manifest.json");
  mout << manifest.str();
  written.push_back("manifest.json");
  return written;
}

}  // namespace pricekit
