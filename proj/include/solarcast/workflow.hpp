#pragma once

#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "solarcast/ar_model.hpp"
#include "solarcast/clearsky.hpp"
#include "solarcast/evaluation.hpp"
#include "solarcast/hybrid.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/selection.hpp"
#include "solarcast/series.hpp"
#include "solarcast/stationarity.hpp"
#include "solarcast/synthetic.hpp"

namespace solarcast {

inline constexpr int kRunConfigSchema = 1;

struct SynthSettings {
  std::string kind = "regime";  // "regime" | "radiation"
  int years = 6;
  RegimeConfig regime;
  SynthConfig radiation;
};

struct RunConfig {
  SiteGeometry site{41.92, 8.73, 10.0};
  bool fit_solis = false;
  SolisParams solis;
  std::string input;   // dataset CSV
  TimeBasis basis = TimeBasis::solar;
  std::string output = "out";
  std::string models;  // trained-model directory read by `forecast`; defaults to output
  int train_years = 4;
  double max_missing_fraction = 0.10;
  std::size_t p_max = 5;
  HiddenRange h_range;
  std::size_t members = kEnsembleSize;
  double selection_threshold = kDefaultTThreshold;
  std::size_t min_rows = 100;
  TrainerConfig trainer;
  std::uint64_t seed = 0;
  SynthSettings synth;

  void validate() const;
};

// Unknown keys and type mismatches raise a schema error naming the field path.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

// Independent seed per named component of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t component);

// Cleaned series, chronological split and the stationarity transform fitted
// on the training years only.
struct Prepared {
  Dataset data;
  std::size_t split = 0;  // first test slot
  StationarityPipeline pipeline;
  std::optional<SolisFit> solis_fit;
  HourlySeries csi;
  HourlySeries csi_star;
};

Prepared prepare(const Dataset& raw, const RunConfig& cfg);

struct StationarityRow {
  std::string series;
  VcResult vc;
  FisherResult daily;
  FisherResult yearly;
};

std::vector<StationarityRow> stationarity_rows(const Prepared& p);
nlohmann::json stationarity_report(const Prepared& p);

struct TrainedModels {
  StationarityPipeline pipeline;
  ArModel ar;
  SelectionReport selection;
  AnnForecaster ann;
  ConfidenceTable confidence;
};

TrainedModels train_models(const Prepared& p, const RunConfig& cfg);

nlohmann::json pipeline_to_json(const StationarityPipeline& p);
StationarityPipeline pipeline_from_json(const nlohmann::json& j);

// Hybrid forecasts with intervals for every test slot.
std::vector<IntervalForecast> forecast_test(const Prepared& p, const TrainedModels& m);

struct Evaluation {
  ComparisonReport report;
  nlohmann::json summary;  // model choices, coverage, magnitudes
  std::vector<IntervalForecast> hybrid;
  std::vector<std::size_t> targets;
  std::vector<double> measured;
};

// Persistence, AR+PC, ANN, ANN+PC, ANN+exo, ANN+exo+PC and the hybrid, scored
// on the test years.
Evaluation evaluate(const Prepared& p, const RunConfig& cfg);

nlohmann::json evaluation_json(const Evaluation& e);

}  // namespace solarcast
