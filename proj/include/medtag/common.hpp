#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace medtag {

// Error taxonomy, mapped to process exit codes by the CLI:
// usage errors -> 1, data errors -> 2, numeric failures -> 3.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All floats in exported CSV files are printed with 9 significant digits.
inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

}  // namespace medtag
