#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

namespace solarcast {

// AR(p) on the standardized series: z(t+1) = sum_i phi_i z(t+1-i).
struct ArModel {
  std::size_t p = 0;
  std::vector<double> phi;
  double mean = 0.0;  // training moments used for standardization
  double std = 1.0;

  void validate() const;
};

// Biased (1/n) sample autocovariances of `x` at lags 0..max_lag.
std::vector<double> autocovariance(std::span<const double> x, std::size_t max_lag);

// Yule-Walker through Levinson-Durbin.
ArModel fit_yule_walker(std::span<const double> s, std::size_t p);

// `recent` holds at least p values, most recent last.
double predict_one(const ArModel& m, std::span<const double> recent);

// One-step forecasts for targets s[first..); needs first >= p.
std::vector<double> predict_series(const ArModel& m, std::span<const double> s, std::size_t first);

// True when every root of 1 - sum phi_i z^i lies outside the unit circle.
bool is_stationary(std::span<const double> phi);

// Fits p = 1..p_max on the first 80% and scores nRMSE on the rest. Scores
// within `tie_tolerance` (relative) of the best count as ties and resolve to
// the smaller order.
inline constexpr double kOrderTieTolerance = 0.005;
std::size_t choose_order(std::span<const double> s, std::size_t p_max = 5, double train_fraction = 0.8,
                         double tie_tolerance = kOrderTieTolerance);

struct WhitenessReport {
  std::vector<double> autocorrelation;  // lags 1..L
  double band = 0.0;                    // 1.96 / sqrt(n)
  double fraction_inside = 0.0;
  bool degenerate = false;
  bool white = false;
};

inline constexpr std::size_t kWhitenessLags = 20;

WhitenessReport whiteness(std::span<const double> residuals, std::size_t lags = kWhitenessLags);

nlohmann::json to_json(const ArModel& m);
ArModel ar_from_json(const nlohmann::json& j);

}  // namespace solarcast
