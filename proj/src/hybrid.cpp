#include "solarcast/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "solarcast/error.hpp"
#include "solarcast/selection.hpp"

namespace solarcast {

std::string to_string(Predictor p) { return p == Predictor::ar ? "AR" : "ANN"; }

Predictor SwitchRule::next() const noexcept {
  if (!primed_) return Predictor::ann;
  return std::abs(eps_ar_) <= std::abs(eps_ann_) ? Predictor::ar : Predictor::ann;
}

void SwitchRule::observe(double actual, double ar_forecast, double ann_forecast) noexcept {
  eps_ar_ = actual - ar_forecast;
  eps_ann_ = actual - ann_forecast;
  primed_ = true;
}

HybridForecaster::HybridForecaster(ArModel ar, AnnForecaster ann, StationarityPipeline pipeline)
    : ar_(std::move(ar)), ann_(std::move(ann)), pipeline_(std::move(pipeline)) {
  ar_.validate();
  if (ann_.ensemble.members.empty()) throw Error(ErrorKind::empty_input, "hybrid needs a trained ANN ensemble");
}

std::size_t HybridForecaster::first_origin() const noexcept {
  return std::max<std::size_t>(kEndogenousLags, ar_.p) - 1;
}

HybridStep HybridForecaster::forecast_step(const HourlySeries& csi_star, const ExogenousPanel& panel, std::size_t t) {
  if (t < first_origin() || t + 1 >= csi_star.size())
    throw Error(ErrorKind::boundary, "hybrid step at t=" + std::to_string(t) + " lacks history or target slot");
  if (pending_) throw Error(ErrorKind::boundary, "previous hybrid step was never observed");
  HybridStep s;
  s.target = t + 1;
  s.ar = predict_one(ar_, csi_star.values().subspan(t + 1 - ar_.p, ar_.p));
  s.ann = ann_.predict(raw_features(csi_star, panel, t));
  s.chosen = rule_.next();
  s.csi_star = s.chosen == Predictor::ar ? s.ar : s.ann;
  s.whm2 = s.csi_star * pipeline_.scale(csi_star, s.target);
  ++(s.chosen == Predictor::ar ? ar_count_ : ann_count_);
  pending_ = true;
  pending_ar_ = s.ar;
  pending_ann_ = s.ann;
  return s;
}

void HybridForecaster::observe(double actual_csi_star) {
  if (!pending_) throw Error(ErrorKind::boundary, "observe() without a pending forecast");
  rule_.observe(actual_csi_star, pending_ar_, pending_ann_);
  pending_ = false;
}

std::vector<HybridStep> HybridForecaster::run(const HourlySeries& csi_star, const ExogenousPanel& panel,
                                              std::size_t first, std::size_t last) {
  std::vector<HybridStep> out;
  if (first < 1 || last > csi_star.size()) throw Error(ErrorKind::boundary, "hybrid run range outside series");
  for (std::size_t target = first; target < last; ++target) {
    out.push_back(forecast_step(csi_star, panel, target - 1));
    observe(csi_star[target]);
  }
  return out;
}

void HybridForecaster::reset() noexcept {
  rule_.reset();
  ar_count_ = ann_count_ = 0;
  pending_ = false;
}

std::pair<std::size_t, std::size_t> usage_ratio(const HybridForecaster& h) noexcept { return h.usage_ratio(); }

void ConfidenceTable::validate() const {
  if (ci_star.size() != static_cast<std::size_t>(SeriesLayout::slots_per_year))
    throw Error(ErrorKind::shape, "confidence table must hold 3285 entries");
  for (double v : ci_star)
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::shape, "confidence entries must be finite and >= 0");
}

ConfidenceTable build_confidence(std::span<const double> residuals, int years) {
  constexpr auto kSlots = static_cast<std::size_t>(SeriesLayout::slots_per_year);
  if (years < 2 || residuals.size() != static_cast<std::size_t>(years) * kSlots)
    throw Error(ErrorKind::reshape, std::to_string(residuals.size()) + " residuals do not form " +
                                        std::to_string(years) + " (>= 2) years of 3285 slots");
  ConfidenceTable t;
  t.years = years;
  for (std::size_t s = 0; s < kSlots; ++s) {
    double acc = 0.0;
    for (int y = 0; y < years; ++y) acc += std::abs(residuals[static_cast<std::size_t>(y) * kSlots + s]);
    t.ci_star[s] = acc / years;
  }
  return t;
}

ConfidenceTable build_confidence(const HourlySeries& residuals) {
  constexpr auto kSlots = static_cast<std::size_t>(SeriesLayout::slots_per_year);
  std::vector<double> sum(kSlots, 0.0);
  std::vector<std::size_t> count(kSlots, 0);
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (std::isnan(residuals[i])) continue;
    const double a = std::abs(residuals[i]);
    sum[residuals.year_slot(i)] += a;
    ++count[residuals.year_slot(i)];
    total += a;
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::empty_input, "no residuals to build a confidence table");
  ConfidenceTable t;
  t.years = calendar_years(residuals);
  for (std::size_t s = 0; s < kSlots; ++s)
    t.ci_star[s] = count[s] > 0 ? sum[s] / static_cast<double>(count[s]) : total / static_cast<double>(n);
  return t;
}

IntervalForecast forecast_with_interval(const HybridStep& step, const HourlySeries& grid,
                                        const StationarityPipeline& pipeline, const ConfidenceTable& table) {
  if (step.target >= grid.size()) throw Error(ErrorKind::boundary, "forecast slot outside the grid");
  const double half = table.ci_star[grid.year_slot(step.target)] * pipeline.scale(grid, step.target);
  return {step, step.whm2 - half, step.whm2 + half};
}

void write_forecast_csv(std::ostream& out, const HourlySeries& grid, std::span<const IntervalForecast> rows) {
  out << "timestamp,forecast_whm2,lower,upper,chosen_model\n";
  for (const auto& r : rows) {
    const std::size_t i = r.step.target;
    out << format_timestamp(grid.day(i), HourlySeries::hour(i)) << ',' << format_number(r.step.whm2) << ','
        << format_number(r.lower) << ',' << format_number(r.upper) << ',' << to_string(r.step.chosen) << '\n';
  }
}

void write_confidence_table(std::ostream& out, const ConfidenceTable& table) {
  out << "slot,ci_star\n";
  for (std::size_t s = 0; s < table.ci_star.size(); ++s) out << s << ',' << format_number(table.ci_star[s]) << '\n';
}

ConfidenceTable read_confidence_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("slot,ci_star", 0) != 0)
    throw Error(ErrorKind::parse, "confidence table header 'slot,ci_star' expected");
  ConfidenceTable t;
  std::vector<bool> seen(t.ci_star.size(), false);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::parse, "bad confidence table row: " + line);
    const std::size_t slot = std::stoul(line.substr(0, comma));
    if (slot >= t.ci_star.size()) throw Error(ErrorKind::parse, "slot index out of range: " + line);
    t.ci_star[slot] = std::stod(line.substr(comma + 1));
    seen[slot] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorKind::parse, "confidence table is missing slots");
  t.validate();
  return t;
}

}  // namespace solarcast
