#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "solarcast/ar_model.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/series.hpp"
#include "solarcast/stationarity.hpp"

namespace solarcast {

enum class Predictor { ar, ann };

std::string to_string(Predictor p);

// Previous-hour residual switch: AR when |e_AR(t)| <= |e_ANN(t)|, ANN before
// any residual exists.
class SwitchRule {
 public:
  Predictor next() const noexcept;
  void observe(double actual, double ar_forecast, double ann_forecast) noexcept;
  bool primed() const noexcept { return primed_; }
  double ar_residual() const noexcept { return eps_ar_; }
  double ann_residual() const noexcept { return eps_ann_; }
  void reset() noexcept { *this = SwitchRule{}; }

 private:
  bool primed_ = false;
  double eps_ar_ = 0.0;
  double eps_ann_ = 0.0;
};

struct HybridStep {
  std::size_t target = 0;   // index of the forecast slot t + 1
  double ar = 0.0;          // CSI*
  double ann = 0.0;         // CSI*
  Predictor chosen = Predictor::ann;
  double csi_star = 0.0;    // emitted forecast, CSI*
  double whm2 = 0.0;        // emitted forecast, Wh/m2
};

class HybridForecaster {
 public:
  HybridForecaster(ArModel ar, AnnForecaster ann, StationarityPipeline pipeline);

  // Forecasts slot t + 1 of `csi_star` from history up to t. Every call must be
  // followed by observe() before the next step.
  HybridStep forecast_step(const HourlySeries& csi_star, const ExogenousPanel& panel, std::size_t t);
  // Feeds the measured CSI* at the last forecast slot into the switch.
  void observe(double actual_csi_star);

  // Sequential step/observe over targets first..last-1 (indices of t + 1).
  std::vector<HybridStep> run(const HourlySeries& csi_star, const ExogenousPanel& panel, std::size_t first,
                              std::size_t last);

  // First t from which both sub-models have the lags they need.
  std::size_t first_origin() const noexcept;

  std::pair<std::size_t, std::size_t> usage_ratio() const noexcept { return {ar_count_, ann_count_}; }
  const SwitchRule& rule() const noexcept { return rule_; }
  void reset() noexcept;

  const ArModel& ar() const noexcept { return ar_; }
  const AnnForecaster& ann() const noexcept { return ann_; }
  const StationarityPipeline& pipeline() const noexcept { return pipeline_; }

 private:
  ArModel ar_;
  AnnForecaster ann_;
  StationarityPipeline pipeline_;
  SwitchRule rule_;
  std::size_t ar_count_ = 0;
  std::size_t ann_count_ = 0;
  bool pending_ = false;
  double pending_ar_ = 0.0;
  double pending_ann_ = 0.0;
};

std::pair<std::size_t, std::size_t> usage_ratio(const HybridForecaster& h) noexcept;

// Per hour-of-year mean absolute CSI* residual.
struct ConfidenceTable {
  std::vector<double> ci_star = std::vector<double>(SeriesLayout::slots_per_year, 0.0);
  int years = 0;

  void validate() const;
};

// `residuals` is years * 3285 long, year-major.
ConfidenceTable build_confidence(std::span<const double> residuals, int years);
// Groups the residuals of a calendar series by hour-of-year; NaN entries are
// skipped and slots without any residual take the overall mean.
ConfidenceTable build_confidence(const HourlySeries& residuals);

struct IntervalForecast {
  HybridStep step;
  double lower = 0.0;
  double upper = 0.0;
};

IntervalForecast forecast_with_interval(const HybridStep& step, const HourlySeries& grid,
                                        const StationarityPipeline& pipeline, const ConfidenceTable& table);

// Columns: timestamp,forecast_whm2,lower,upper,chosen_model
void write_forecast_csv(std::ostream& out, const HourlySeries& grid, std::span<const IntervalForecast> rows);

void write_confidence_table(std::ostream& out, const ConfidenceTable& table);
ConfidenceTable read_confidence_table(std::istream& in);

}  // namespace solarcast
