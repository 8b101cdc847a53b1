#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "solarcast/series.hpp"

namespace solarcast {

// Pre-input layer: 10 endogenous CSI* lags, then two forecast lags (t+1, t)
// for pressure, nebulosity, rain and temperature.
inline constexpr std::size_t kEndogenousLags = 10;
inline constexpr std::size_t kExogenousFeatures = 8;
inline constexpr std::size_t kFeatureCount = kEndogenousLags + kExogenousFeatures;  // 18
inline constexpr double kDefaultTThreshold = 1.96;

using FeatureVector = std::array<double, kFeatureCount>;

std::string feature_name(std::size_t index);

// Raw pre-input vector used to forecast slot t + 1.
FeatureVector raw_features(const HourlySeries& csi_star, const ExogenousPanel& panel, std::size_t t);
bool has_features(const HourlySeries& csi_star, std::size_t t) noexcept;

class InputMask {
 public:
  InputMask() = default;
  explicit InputMask(std::vector<bool> keep) : keep_(std::move(keep)) {}
  static InputMask all(std::size_t n) { return InputMask(std::vector<bool>(n, true)); }

  std::size_t size() const noexcept { return keep_.size(); }
  std::size_t width() const noexcept;
  bool operator[](std::size_t i) const { return keep_[i]; }
  const std::vector<bool>& bits() const noexcept { return keep_; }
  std::vector<std::size_t> kept_indices() const;

  std::vector<double> apply(std::span<const double> full) const;

  friend bool operator==(const InputMask&, const InputMask&) = default;

 private:
  std::vector<bool> keep_;
};

// Validates a selection mask for an MLP with `mlp_input_width` candidate inputs.
InputMask apply_mask(const InputMask& mask, std::size_t mlp_input_width = kFeatureCount);

// e.g. "Endo^{1:5,9,10} PR^{1,2} N^{1,2} P^{1,2} T^{1,2}"
std::string architecture_string(const InputMask& mask);

struct DesignMatrix {
  Eigen::MatrixXd raw;       // N_T x 18, unstandardized
  Eigen::MatrixXd features;  // N_T x 19, column 0 is the intercept, the rest standardized
  Eigen::VectorXd target;    // CSI*(t + 1)
  std::vector<std::size_t> origin;  // t of each row
  Eigen::VectorXd column_mean;
  Eigen::VectorXd column_std;
};

struct DesignOptions {
  std::size_t min_rows = 100;
};

DesignMatrix build_design(const HourlySeries& csi_star, const ExogenousPanel& panel, const DesignOptions& opts = {});
// Standardizes an arbitrary N x k predictor block and prepends the intercept.
DesignMatrix design_from_columns(Eigen::MatrixXd raw, Eigen::VectorXd target);

struct SelectionReport {
  std::vector<double> weights;     // intercept first
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  InputMask mask;                  // predictors only; intercept always kept
  double threshold = kDefaultTThreshold;
};

// OLS on the standardized design plus a Student t-test per weight.
SelectionReport fit_ols(const DesignMatrix& d, double threshold = kDefaultTThreshold);

nlohmann::json to_json(const SelectionReport& r);
SelectionReport selection_from_json(const nlohmann::json& j);

}  // namespace solarcast
