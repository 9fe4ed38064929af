#pragma once

#include <stdexcept>
#include <string>

namespace dygraf {

/// File or directory access failed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs exist but their shapes or contents are mutually inconsistent.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation produced non-finite values or an unsolvable system.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dygraf
