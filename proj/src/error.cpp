#include "solarcast/error.hpp"

namespace solarcast {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::duplicate_timestamp: return "duplicate timestamp";
    case ErrorKind::unrecoverable_gap: return "unrecoverable gap";
    case ErrorKind::too_many_missing: return "too many missing values";
    case ErrorKind::degenerate_range: return "degenerate range";
    case ErrorKind::bounds: return "bounds error";
    case ErrorKind::fit_impossible: return "fit impossible";
    case ErrorKind::reshape: return "reshape error";
    case ErrorKind::degenerate_residual: return "degenerate residual";
    case ErrorKind::insufficient_history: return "insufficient history";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::collinearity: return "collinearity";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::degenerate_series: return "degenerate series";
    case ErrorKind::instability: return "instability";
    case ErrorKind::boundary: return "boundary error";
    case ErrorKind::undefined_denominator: return "undefined denominator";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::io: return "io error";
  }
  return "error";
}

}  // namespace solarcast
