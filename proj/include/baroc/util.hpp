#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace baroc {

// Raised for invalid experiment/CLI configuration; carries the field name.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace util {

// Shortest round-trip decimal representation (std::to_chars), so CSV output
// is byte-stable and save/load is lossless.
std::string format_double(double v);

std::vector<std::string_view> split(std::string_view s, char sep);

double parse_double(std::string_view s, const std::string& context);
std::int64_t parse_int(std::string_view s, const std::string& context);

}  // namespace util
}  // namespace baroc
