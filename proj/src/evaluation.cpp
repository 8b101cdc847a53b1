#include "solarcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "solarcast/error.hpp"

namespace solarcast {

namespace {

double bucket_nrmse(std::span<const std::size_t> positions, std::span<const double> measured,
                    std::span<const double> predicted) {
  if (positions.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> m, p;
  m.reserve(positions.size());
  p.reserve(positions.size());
  for (std::size_t k : positions) {
    m.push_back(measured[k]);
    p.push_back(predicted[k]);
  }
  return nrmse(m, p);
}

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

}  // namespace

double nrmse(std::span<const double> measured, std::span<const double> predicted) {
  if (measured.size() != predicted.size()) throw Error(ErrorKind::shape, "nrmse needs equal lengths");
  if (measured.empty()) throw Error(ErrorKind::empty_input, "nrmse of an empty series");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    const double e = measured[k] - predicted[k];
    num += e * e;
    den += measured[k] * measured[k];
  }
  if (!(den > 0.0)) throw Error(ErrorKind::undefined_denominator, "measured series is identically zero");
  return 100.0 * std::sqrt(num / den);
}

std::vector<double> persistence(std::span<const double> measured) {
  if (measured.size() < 2) throw Error(ErrorKind::insufficient_data, "persistence needs at least two values");
  return {measured.begin(), measured.end() - 1};
}

Season season_of_month(unsigned month) {
  if (month < 1 || month > 12) throw Error(ErrorKind::bounds, "month out of range");
  if (month == 12 || month <= 2) return Season::winter;
  if (month <= 5) return Season::spring;
  if (month <= 8) return Season::summer;
  return Season::autumn;
}

SeasonIndex seasonal_split(const HourlySeries& grid, std::span<const std::size_t> targets) {
  SeasonIndex out;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (targets[k] >= grid.size()) throw Error(ErrorKind::bounds, "target index outside the grid");
    out[static_cast<std::size_t>(season_of_month(grid.month(targets[k])))].push_back(k);
  }
  return out;
}

SeasonIndex seasonal_split(const HourlySeries& grid) {
  std::vector<std::size_t> all(grid.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return seasonal_split(grid, all);
}

ScoreReport score(const std::string& model, const HourlySeries& grid, std::span<const std::size_t> targets,
                  std::span<const double> measured, std::span<const double> predicted) {
  if (measured.size() != targets.size() || predicted.size() != targets.size())
    throw Error(ErrorKind::shape, "model '" + model + "' is not aligned with the targets");
  ScoreReport r;
  r.model = model;
  r.annual = nrmse(measured, predicted);
  r.n_annual = targets.size();
  const SeasonIndex buckets = seasonal_split(grid, targets);
  for (std::size_t s = 0; s < kSeasons; ++s) {
    r.seasonal[s] = bucket_nrmse(buckets[s], measured, predicted);
    r.n_seasonal[s] = buckets[s].size();
  }
  return r;
}

ComparisonReport compare_models(const HourlySeries& grid, std::span<const std::size_t> targets,
                                std::span<const double> measured, std::span<const ModelForecast> models) {
  ComparisonReport r;
  for (const auto& m : models) r.rows.push_back(score(m.name, grid, targets, measured, m.predicted));
  if (r.rows.empty()) return r;

  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) best = std::min(best, row.annual);
  for (auto& row : r.rows) row.best_annual = row.annual == best;
  for (std::size_t s = 0; s < kSeasons; ++s) {
    double b = std::numeric_limits<double>::infinity();
    for (const auto& row : r.rows)
      if (!std::isnan(row.seasonal[s])) b = std::min(b, row.seasonal[s]);
    for (auto& row : r.rows) row.best_seasonal[s] = row.seasonal[s] == b;
  }
  return r;
}

UsageBreakdown usage_breakdown(const HourlySeries& grid, std::span<const std::size_t> targets,
                               const std::vector<bool>& chose_ar) {
  if (chose_ar.size() != targets.size()) throw Error(ErrorKind::shape, "usage flags not aligned with targets");
  UsageBreakdown u;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto s = static_cast<std::size_t>(season_of_month(grid.month(targets[k])));
    if (chose_ar[k]) {
      ++u.ar_annual;
      ++u.ar[s];
    } else {
      ++u.ann_annual;
      ++u.ann[s];
    }
  }
  return u;
}

nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  nlohmann::json cols = nlohmann::json::array({"annual"});
  for (const char* s : kSeasonNames) cols.push_back(s);
  j["columns"] = cols;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json o;
    o["model"] = row.model;
    nlohmann::json v, n, b;
    v["annual"] = row.annual;
    n["annual"] = row.n_annual;
    b["annual"] = row.best_annual;
    for (std::size_t s = 0; s < kSeasons; ++s) {
      v[kSeasonNames[s]] = number_or_null(row.seasonal[s]);
      n[kSeasonNames[s]] = row.n_seasonal[s];
      b[kSeasonNames[s]] = row.best_seasonal[s];
    }
    o["nrmse_percent"] = v;
    o["n_samples"] = n;
    o["best"] = b;
    rows.push_back(o);
  }
  j["rows"] = rows;
  if (r.has_usage) {
    nlohmann::json u;
    u["annual"] = {{"ar", r.usage.ar_annual}, {"ann", r.usage.ann_annual}};
    for (std::size_t s = 0; s < kSeasons; ++s) u[kSeasonNames[s]] = {{"ar", r.usage.ar[s]}, {"ann", r.usage.ann[s]}};
    j["hybrid_usage"] = u;
  }
  return j;
}

void write_report_csv(std::ostream& out, const ComparisonReport& r) {
  out << "model,annual,winter,spring,summer,autumn,best\n";
  for (const auto& row : r.rows) {
    out << row.model << ',' << format_number(row.annual);
    std::string best = row.best_annual ? "annual" : "";
    for (std::size_t s = 0; s < kSeasons; ++s) {
      out << ',' << format_number(row.seasonal[s]);
      if (row.best_seasonal[s]) best += std::string(best.empty() ? "" : ";") + kSeasonNames[s];
    }
    out << ',' << best << '\n';
  }
  if (r.has_usage) {
    out << "hybrid_ar_count," << r.usage.ar_annual;
    for (std::size_t s = 0; s < kSeasons; ++s) out << ',' << r.usage.ar[s];
    out << ",\nhybrid_ann_count," << r.usage.ann_annual;
    for (std::size_t s = 0; s < kSeasons; ++s) out << ',' << r.usage.ann[s];
    out << ",\n";
  }
}

void write_scatter_csv(std::ostream& out, const HourlySeries& grid, std::span<const std::size_t> targets,
                       std::span<const double> measured, std::span<const double> predicted) {
  if (measured.size() != targets.size() || predicted.size() != targets.size())
    throw Error(ErrorKind::shape, "scatter columns not aligned with targets");
  out << "timestamp,measured,predicted\n";
  for (std::size_t k = 0; k < targets.size(); ++k)
    out << format_timestamp(grid.day(targets[k]), HourlySeries::hour(targets[k])) << ','
        << format_number(measured[k]) << ',' << format_number(predicted[k]) << '\n';
}

}  // namespace solarcast
