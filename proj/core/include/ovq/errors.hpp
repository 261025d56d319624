#pragma once

#include <stdexcept>
#include <string>

namespace ovq {

// Caller passed something structurally wrong (bad dimensions, out-of-range index).
class ArgumentError : public std::invalid_argument {
public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Input data violates its contract (truncated stream, malformed row, bad schema).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ovq
