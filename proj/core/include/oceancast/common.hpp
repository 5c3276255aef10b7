#pragma once

#include <stdexcept>
#include <string>

namespace ocean {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy shared by the library and the CLI exit codes:
// config errors -> 2, data errors -> 3, numerical failures -> 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ocean
