#pragma once

#include <cstdint>
#include <string>

namespace pricekit {

// FNV-1a 64-bit content digest; used to address stage inputs in report
// bundles (integrity tagging, not cryptography).
class Digest64 {
 public:
  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void update(const std::string& s) { update(s.data(), s.size()); }

  std::uint64_t value() const { return h_; }

  std::string hex() const {
    static const char* d = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = h_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = d[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string digest_hex(const std::string& bytes) {
  Digest64 d;
  d.update(bytes);
  return d.hex();
}

}  // namespace pricekit
