#pragma once

#include <stdexcept>
#include <string>

namespace twodisk {

/// Error categories shared between the C++ core and the C API.
enum class Status : int {
  ok = 0,
  invalid_config = 1,
  invalid_argument = 2,
  ambiguous_evaluation = 3,
  pole = 4,
  degenerate_map = 5,
  singular_evaluation = 6,
  truncation_failure = 7,
  quadrature_failure = 8,
  invalid_contour = 9,
  under_resolved = 10,
  solver_failure = 11,
  too_close_to_interface = 12,
  shape_mismatch = 13,
  io_error = 14,
};

class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& msg) : std::runtime_error(msg), status_(s) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

/// Truncation failures carry the partial sum so callers can salvage it.
class TruncationFailure : public Error {
 public:
  TruncationFailure(const std::string& msg, double partial, double tail, int terms)
      : Error(Status::truncation_failure, msg), partial_value(partial), tail_estimate(tail), terms_used(terms) {}
  double partial_value;
  double tail_estimate;
  int terms_used;
};

}  // namespace twodisk
