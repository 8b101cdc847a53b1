#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "solarcast/error.hpp"
#include "solarcast/kernels.hpp"
#include "solarcast/selection.hpp"
#include "solarcast/series.hpp"

namespace solarcast {

inline constexpr std::size_t kMaxHidden = 20;

// One hidden tanh layer, identity output. `mask` selects the network inputs
// out of the candidate columns; masked columns have no first-layer weights.
struct MlpModel {
  InputMask mask;
  std::size_t hidden = 0;
  Eigen::MatrixXd w1;  // hidden x inputs
  Eigen::VectorXd b1;  // hidden
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;

  std::size_t inputs() const noexcept { return mask.width(); }
  std::size_t parameter_count() const noexcept { return hidden * inputs() + 2 * hidden + 1; }

  static MlpModel zeros(InputMask mask, std::size_t hidden);
  // Uniform in [-0.5, 0.5] / sqrt(fan-in).
  static MlpModel random(InputMask mask, std::size_t hidden, std::uint64_t seed);

  std::vector<double> parameters() const;  // packed kernel layout
  void set_parameters(std::span<const double> packed);
  void validate() const;
};

double forward(const MlpModel& m, std::span<const double> input);
// Applies the mask to a full candidate vector first.
double forward_full(const MlpModel& m, std::span<const double> candidates);

// Samples are rows; columns are the masked network inputs.
struct TrainingData {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  std::size_t size() const noexcept { return static_cast<std::size_t>(targets.size()); }
  TrainingData rows(std::size_t first, std::size_t count) const;
};

Eigen::VectorXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& inputs,
                              kernels::Backend backend = kernels::Backend::parallel);
// d e_k / d w with e = target - prediction; N x P in the packed layout.
Eigen::MatrixXd jacobian(const MlpModel& m, const Eigen::MatrixXd& inputs,
                         kernels::Backend backend = kernels::Backend::parallel);

struct TrainerConfig {
  double mu0 = 1e-3;
  double mu_dec = 0.1;
  double mu_inc = 10.0;
  double mu_max = 1e10;
  int max_fail = 5;
  int max_epochs = 1000;
  double train_fraction = 0.8;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  kernels::Backend backend = kernels::Backend::parallel;

  void validate() const;
};

struct TraceRow {
  int epoch = 0;
  double mu = 0.0;
  double train_sse = 0.0;
  double val_nrmse = 0.0;
  bool accepted = false;
};

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

struct TrainingResult {
  MlpModel model;  // validation-best parameters
  std::vector<TraceRow> trace;
  double best_val_nrmse = 0.0;
  int epochs = 0;
  std::string stop_reason;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<TraceRow> trace)
      : Error(ErrorKind::divergence, what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

// The proposed update -(J^T J + mu I)^{-1} J^T e on `train`.
Eigen::VectorXd lm_step(const MlpModel& m, const TrainingData& train, double mu,
                        kernels::Backend backend = kernels::Backend::parallel);

// Levenberg-Marquardt with early stopping. The first train_fraction of the
// rows trains, the remainder validates (chronological split).
TrainingResult train_lm(const MlpModel& init, const TrainingData& data, const TrainerConfig& cfg);

double nrmse_fraction(const Eigen::VectorXd& measured, const Eigen::VectorXd& predicted);

struct EnsembleModel {
  std::vector<MlpModel> members;

  double predict(std::span<const double> input) const;
  Eigen::VectorXd predict_batch(const Eigen::MatrixXd& inputs) const;
};

struct EnsembleResult {
  EnsembleModel ensemble;
  double val_nrmse = 0.0;  // of the member mean on the validation rows
  std::vector<double> member_val_nrmse;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<TraceRow>> traces;
};

inline constexpr std::size_t kEnsembleSize = 5;

// Members use seeds seed..seed+n-1 (or all `seed` when same_seed is set).
EnsembleResult ensemble_train(const TrainingData& data, const InputMask& mask, std::size_t hidden,
                              const TrainerConfig& cfg, std::size_t n = kEnsembleSize, bool same_seed = false);

struct HiddenRange {
  std::size_t lo = 1;
  std::size_t hi = kMaxHidden;
  std::size_t step = 1;
};

struct HiddenSearchResult {
  std::size_t best_hidden = 0;
  EnsembleResult best;
  std::vector<std::pair<std::size_t, double>> scores;  // (H, validation nRMSE)
};

// Ties resolve to the smaller H.
HiddenSearchResult search_hidden(const TrainingData& data, const InputMask& mask, const TrainerConfig& cfg,
                                 const HiddenRange& range = {}, std::size_t members = kEnsembleSize);

// Masked pre-input vector for forecasting slot t + 1.
std::vector<double> assemble_features(const HourlySeries& csi_star, const ExogenousPanel& panel,
                                      const InputMask& mask, std::size_t t);

// Mask, [-0.9, 0.9] scaling and ensemble bundled as a CSI* forecaster.
struct AnnForecaster {
  InputMask mask;                 // over the 18 candidate features
  std::vector<AffineMap> input_scaling;  // one per kept feature
  AffineMap target_scaling;
  EnsembleModel ensemble;
  std::size_t hidden = 0;
  double val_nrmse = 0.0;
  std::vector<std::vector<TraceRow>> traces;  // per member; not serialized

  double predict(const FeatureVector& raw) const;
};

struct AnnFitOptions {
  TrainerConfig trainer;
  HiddenRange hidden;
  std::size_t members = kEnsembleSize;
  double lo = -0.9;
  double hi = 0.9;
};

AnnForecaster fit_ann(const DesignMatrix& design, const InputMask& mask, const AnnFitOptions& opts);

nlohmann::json to_json(const MlpModel& m);
MlpModel mlp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnnForecaster& f);
AnnForecaster ann_from_json(const nlohmann::json& j);

}  // namespace solarcast
