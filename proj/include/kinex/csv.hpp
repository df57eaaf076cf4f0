#ifndef KINEX_CSV_HPP_
#define KINEX_CSV_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kinex/analytics.hpp"

namespace kinex::csv {

/// Shortest round-trip decimal form; independent of the global locale.
/// NaN renders as an empty field.
inline std::string format(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format(std::uint64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format(std::optional<std::uint64_t> v) { return v ? format(*v) : std::string{}; }

inline std::string format(std::string_view s) { return std::string(s); }

/// Writes header-first CSV with '\n' line endings.
class Writer {
 public:
  Writer(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    row_strings(std::vector<std::string>(header.begin(), header.end()));
  }

  template <typename... Ts>
  void row(const Ts&... fields) {
    row_strings({format(fields)...});
  }

  void row_strings(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void write_histogram(const std::filesystem::path& path, const Histogram& h) {
  Writer w(path, {"bin_left", "bin_right", "density"});
  for (std::size_t b = 0; b < h.bins(); ++b) w.row(h.edges[b], h.edges[b + 1], h.densities[b]);
}

}  // namespace kinex::csv

#endif  // KINEX_CSV_HPP_
