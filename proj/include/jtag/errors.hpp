#pragma once

#include <stdexcept>
#include <string>

namespace jtag {

// Error taxonomy mirrored by CLI exit codes:
//   UsageError -> 1, DataError -> 2, NumericError -> 3.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace jtag
