#pragma once

#include <stdexcept>

namespace gravitom {

// A computation that cannot produce a result from otherwise well-formed
// input (no admissible probes, non-finite objective, ...). The CLI maps
// this to exit code 2, as opposed to validation failures (exit code 1).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gravitom
