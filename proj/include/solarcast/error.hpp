#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace solarcast {

enum class ErrorKind {
  parse,
  duplicate_timestamp,
  unrecoverable_gap,
  too_many_missing,
  degenerate_range,
  bounds,
  fit_impossible,
  reshape,
  degenerate_residual,
  insufficient_history,
  insufficient_data,
  collinearity,
  empty_input,
  shape,
  divergence,
  degenerate_series,
  instability,
  boundary,
  undefined_denominator,
  schema,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace solarcast
