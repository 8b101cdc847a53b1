#include "solarcast/selection.hpp"

#include <algorithm>
#include <cmath>

#include "solarcast/error.hpp"

namespace solarcast {

namespace {

constexpr std::array<const char*, 4> kExoNames{"P", "N", "PR", "T"};

const HourlySeries& exo_column(const ExogenousPanel& panel, std::size_t k) {
  switch (k) {
    case 0: return panel.pressure;
    case 1: return panel.nebulosity;
    case 2: return panel.rain;
    default: return panel.temperature;
  }
}

std::string compress_runs(const std::vector<int>& idx) {
  std::string out;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && idx[j + 1] == idx[j] + 1) ++j;
    if (!out.empty()) out += ',';
    if (j - i >= 2) {
      out += std::to_string(idx[i]) + ":" + std::to_string(idx[j]);
    } else {
      for (std::size_t k = i; k <= j; ++k) {
        if (k > i) out += ',';
        out += std::to_string(idx[k]);
      }
    }
    i = j + 1;
  }
  return out;
}

}  // namespace

std::string feature_name(std::size_t index) {
  if (index < kEndogenousLags) return "Endo" + std::to_string(index + 1);
  const std::size_t e = index - kEndogenousLags;
  return std::string(kExoNames[e / 2]) + std::to_string(e % 2 + 1);
}

bool has_features(const HourlySeries& csi_star, std::size_t t) noexcept {
  return t + 1 >= kEndogenousLags && t + 1 < csi_star.size();
}

FeatureVector raw_features(const HourlySeries& csi_star, const ExogenousPanel& panel, std::size_t t) {
  if (!has_features(csi_star, t))
    throw Error(ErrorKind::boundary, "features at t=" + std::to_string(t) + " need lags t-9..t and slot t+1");
  FeatureVector f{};
  for (std::size_t j = 0; j < kEndogenousLags; ++j) f[j] = csi_star[t - j];
  for (std::size_t k = 0; k < 4; ++k) {
    const HourlySeries& col = exo_column(panel, k);
    f[kEndogenousLags + 2 * k] = col[t + 1];
    f[kEndogenousLags + 2 * k + 1] = col[t];
  }
  return f;
}

std::size_t InputMask::width() const noexcept {
  return static_cast<std::size_t>(std::count(keep_.begin(), keep_.end(), true));
}

std::vector<std::size_t> InputMask::kept_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < keep_.size(); ++i)
    if (keep_[i]) out.push_back(i);
  return out;
}

std::vector<double> InputMask::apply(std::span<const double> full) const {
  if (full.size() != keep_.size())
    throw Error(ErrorKind::shape, "input has " + std::to_string(full.size()) + " columns, mask expects " +
                                      std::to_string(keep_.size()));
  std::vector<double> out;
  out.reserve(width());
  for (std::size_t i = 0; i < keep_.size(); ++i)
    if (keep_[i]) out.push_back(full[i]);
  return out;
}

InputMask apply_mask(const InputMask& mask, std::size_t mlp_input_width) {
  if (mask.size() != mlp_input_width)
    throw Error(ErrorKind::shape, "mask length " + std::to_string(mask.size()) + " != " +
                                      std::to_string(mlp_input_width));
  if (mask.width() == 0) throw Error(ErrorKind::empty_input, "selection kept no input");
  return mask;
}

std::string architecture_string(const InputMask& mask) {
  if (mask.size() != kFeatureCount) throw Error(ErrorKind::shape, "architecture string needs an 18-wide mask");
  std::vector<std::string> parts;
  std::vector<int> endo;
  for (std::size_t j = 0; j < kEndogenousLags; ++j)
    if (mask[j]) endo.push_back(static_cast<int>(j + 1));
  if (!endo.empty()) parts.push_back("Endo^{" + compress_runs(endo) + "}");
  // printed in the conventional PR, N, P, T order
  for (std::size_t k : {2u, 1u, 0u, 3u}) {
    std::vector<int> lags;
    for (std::size_t l = 0; l < 2; ++l)
      if (mask[kEndogenousLags + 2 * k + l]) lags.push_back(static_cast<int>(l + 1));
    if (!lags.empty()) parts.push_back(std::string(kExoNames[k]) + "^{" + compress_runs(lags) + "}");
  }
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

DesignMatrix design_from_columns(Eigen::MatrixXd raw, Eigen::VectorXd target) {
  if (raw.rows() != target.size()) throw Error(ErrorKind::shape, "design rows and target length differ");
  DesignMatrix d;
  const Eigen::Index n = raw.rows(), k = raw.cols();
  d.column_mean = raw.colwise().mean().transpose();
  d.column_std.resize(k);
  d.features.resize(n, k + 1);
  d.features.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::VectorXd centred = raw.col(j).array() - d.column_mean(j);
    const double sd = n > 0 ? std::sqrt(centred.squaredNorm() / static_cast<double>(n)) : 0.0;
    d.column_std(j) = sd;
    if (sd > 0.0)
      d.features.col(j + 1) = centred / sd;
    else
      d.features.col(j + 1).setZero();
  }
  d.raw = std::move(raw);
  d.target = std::move(target);
  return d;
}

DesignMatrix build_design(const HourlySeries& csi_star, const ExogenousPanel& panel, const DesignOptions& opts) {
  panel.validate(csi_star);
  std::vector<std::size_t> origin;
  for (std::size_t t = kEndogenousLags - 1; t + 1 < csi_star.size(); ++t) origin.push_back(t);
  if (origin.size() < std::max<std::size_t>(opts.min_rows, 1))
    throw Error(ErrorKind::insufficient_data, std::to_string(origin.size()) + " usable rows, need " +
                                                  std::to_string(opts.min_rows));
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(origin.size()), static_cast<Eigen::Index>(kFeatureCount));
  Eigen::VectorXd y(static_cast<Eigen::Index>(origin.size()));
  for (std::size_t r = 0; r < origin.size(); ++r) {
    const auto f = raw_features(csi_star, panel, origin[r]);
    for (std::size_t j = 0; j < kFeatureCount; ++j) raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = f[j];
    y(static_cast<Eigen::Index>(r)) = csi_star[origin[r] + 1];
  }
  if (!raw.allFinite() || !y.allFinite()) throw Error(ErrorKind::insufficient_data, "design contains missing values");
  DesignMatrix d = design_from_columns(std::move(raw), std::move(y));
  d.origin = std::move(origin);
  return d;
}

SelectionReport fit_ols(const DesignMatrix& d, double threshold) {
  const Eigen::Index n = d.features.rows(), k = d.features.cols();
  if (n <= k) throw Error(ErrorKind::insufficient_data, "OLS needs more rows than weights");
  const Eigen::MatrixXd xtx = d.features.transpose() * d.features;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xtx);
  const double lmin = eig.eigenvalues()(0), lmax = eig.eigenvalues()(k - 1);
  if (!(lmin > 0.0) || lmax / lmin >= 1e12) {
    const Eigen::VectorXd v = eig.eigenvectors().col(0);
    std::string names;
    for (Eigen::Index j = 1; j < k; ++j) {
      if (std::abs(v(j)) < 0.2) continue;
      if (!names.empty()) names += ", ";
      names += k - 1 == static_cast<Eigen::Index>(kFeatureCount) ? feature_name(static_cast<std::size_t>(j - 1))
                                                                 : "x" + std::to_string(j);
    }
    if (names.empty()) names = "intercept";
    throw Error(ErrorKind::collinearity, "design is singular or ill-conditioned; offending columns: " + names);
  }

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const Eigen::VectorXd w = ldlt.solve(d.features.transpose() * d.target);
  const Eigen::VectorXd resid = d.target - d.features * w;
  const double s2 = resid.squaredNorm() / static_cast<double>(n - k);
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(k, k));

  const double ymean = d.target.mean();
  const double tss = (d.target.array() - ymean).square().sum();
  const bool no_signal = tss <= 1e-20 * static_cast<double>(n) * std::max(1.0, ymean * ymean);

  SelectionReport r;
  r.threshold = threshold;
  r.weights.resize(static_cast<std::size_t>(k));
  r.std_errors.resize(static_cast<std::size_t>(k));
  r.t_stats.resize(static_cast<std::size_t>(k));
  std::vector<bool> keep(static_cast<std::size_t>(k - 1));
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto u = static_cast<std::size_t>(j);
    r.weights[u] = w(j);
    r.std_errors[u] = std::sqrt(std::max(0.0, s2 * inv(j, j)));
    r.t_stats[u] = (no_signal || r.std_errors[u] == 0.0) ? 0.0 : w(j) / r.std_errors[u];
    if (j > 0) keep[u - 1] = std::abs(r.t_stats[u]) > threshold;
  }
  r.mask = InputMask(std::move(keep));
  return r;
}

nlohmann::json to_json(const SelectionReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["threshold"] = r.threshold;
  j["weights"] = r.weights;
  j["std_errors"] = r.std_errors;
  j["t_stats"] = r.t_stats;
  j["mask"] = r.mask.bits();
  if (r.mask.size() == kFeatureCount) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < kFeatureCount; ++i) names.push_back(feature_name(i));
    j["features"] = names;
    j["architecture"] = architecture_string(r.mask);
  }
  return j;
}

SelectionReport selection_from_json(const nlohmann::json& j) {
  SelectionReport r;
  r.threshold = j.at("threshold").get<double>();
  r.weights = j.at("weights").get<std::vector<double>>();
  r.std_errors = j.at("std_errors").get<std::vector<double>>();
  r.t_stats = j.at("t_stats").get<std::vector<double>>();
  r.mask = InputMask(j.at("mask").get<std::vector<bool>>());
  return r;
}

}  // namespace solarcast
