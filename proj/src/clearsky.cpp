#include "solarcast/clearsky.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "solarcast/astro.hpp"
#include "solarcast/error.hpp"

namespace solarcast {

void SolisParams::validate() const {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::schema, "solis tau must be >= 0");
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorKind::schema, "solis b must be > 0");
}

SolarPosition solar_position(const SiteGeometry& geo, int day_of_year, int slot) {
  const double lat = astro::deg2rad(geo.latitude);
  const double decl = astro::declination(day_of_year);
  const double omega = astro::hour_angle(SeriesLayout::day_start_hour + slot);
  const double sin_h = std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(omega);
  return {std::asin(std::clamp(sin_h, -1.0, 1.0)),
          astro::solar_constant * astro::eccentricity_correction(day_of_year)};
}

double solis_ghi(const SolarPosition& pos, const SolisParams& params) noexcept {
  if (pos.elevation <= 0.0) return 0.0;
  const double s = std::sin(pos.elevation);
  return pos.extraterrestrial * std::exp(-params.tau / std::pow(s, params.b)) * s;
}

double clear_sky_ghi(const SiteGeometry& geo, const SolisParams& params, int day_of_year, int slot) {
  return solis_ghi(solar_position(geo, day_of_year, slot), params);
}

HourlySeries clear_sky_series(const HourlySeries& grid, const SiteGeometry& geo, const SolisParams& params) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = clear_sky_ghi(geo, params, grid.day_of_year(i), HourlySeries::slot(i));
  return HourlySeries(grid.first_day(), std::move(out));
}

std::vector<std::size_t> detect_clear_days(const HourlySeries& ghi, const ClearDayOptions& opts) {
  constexpr int H = SeriesLayout::hours_per_day;
  const std::size_t days = ghi.days();
  const auto w = static_cast<std::size_t>(std::max(opts.envelope_half_width_days, 0));
  std::vector<std::size_t> clear;
  for (std::size_t d = 0; d < days; ++d) {
    const std::size_t lo = d >= w ? d - w : 0;
    const std::size_t hi = std::min(days - 1, d + w);
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    bool usable = true;
    for (int k = 0; k < H && usable; ++k) {
      const std::size_t i = d * H + static_cast<std::size_t>(k);
      if (ghi.missing(i)) {
        usable = false;
        break;
      }
      double env = 0.0;
      for (std::size_t e = lo; e <= hi; ++e) {
        const std::size_t j = e * H + static_cast<std::size_t>(k);
        if (!ghi.missing(j)) env = std::max(env, ghi[j]);
      }
      if (env <= 0.0) continue;
      const double r = ghi[i] / env;
      sum += r;
      sum2 += r * r;
      ++n;
    }
    if (!usable || n < H / 2) continue;
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    if (mean >= opts.min_mean_ratio && var <= opts.max_ratio_variance) clear.push_back(d);
  }
  return clear;
}

namespace {

struct Sample {
  double s;   // sin(elevation)
  double h0;  // extraterrestrial
  double x;   // measured
};

double sse(const std::vector<Sample>& samples, double tau, double b) {
  double acc = 0.0;
  for (const auto& p : samples) {
    const double r = p.x - p.h0 * p.s * std::exp(-tau / std::pow(p.s, b));
    acc += r * r;
  }
  return acc;
}

}  // namespace

SolisFit fit_solis(const HourlySeries& ghi, const SiteGeometry& geo, const ClearDayOptions& opts) {
  geo.validate();
  const auto clear = detect_clear_days(ghi, opts);
  if (clear.empty()) throw Error(ErrorKind::fit_impossible, "no clear days detected; supply tau and b manually");
  if (clear.size() < opts.min_clear_days)
    throw Error(ErrorKind::fit_impossible, "only " + std::to_string(clear.size()) + " clear days detected (need " +
                                               std::to_string(opts.min_clear_days) + ")");

  std::vector<Sample> samples;
  double sum_x2 = 0.0;
  for (std::size_t d : clear) {
    for (int k = 0; k < SeriesLayout::hours_per_day; ++k) {
      const std::size_t i = d * SeriesLayout::hours_per_day + static_cast<std::size_t>(k);
      const auto pos = solar_position(geo, ghi.day_of_year(i), k);
      if (pos.elevation <= 0.0) continue;
      samples.push_back({std::sin(pos.elevation), pos.extraterrestrial, ghi[i]});
      sum_x2 += ghi[i] * ghi[i];
    }
  }
  if (samples.size() < 3 || sum_x2 <= 0.0)
    throw Error(ErrorKind::fit_impossible, "clear days carry no daylight samples");

  double best_tau = 0.0, best_b = 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= 30; ++it) {
    for (int ib = 1; ib <= 20; ++ib) {
      const double tau = 0.05 * it, b = 0.1 * ib;
      const double e = sse(samples, tau, b);
      if (e < best) {
        best = e;
        best_tau = tau;
        best_b = b;
      }
    }
  }

  // 2-parameter LM, projected onto tau >= 0, b >= 1e-3.
  double tau = best_tau, b = best_b, mu = 1e-3;
  for (int iter = 0; iter < 200; ++iter) {
    double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
    for (const auto& p : samples) {
      const double sb = std::pow(p.s, -b);
      const double f = p.h0 * p.s * std::exp(-tau * sb);
      const double r = p.x - f;
      const double dtau = -f * sb;
      const double db = f * tau * sb * std::log(p.s);
      a11 += dtau * dtau;
      a12 += dtau * db;
      a22 += db * db;
      g1 += dtau * r;
      g2 += db * r;
    }
    bool accepted = false;
    while (mu < 1e12) {
      const double m11 = a11 * (1 + mu) + 1e-300, m22 = a22 * (1 + mu) + mu * 1e-12;
      const double det = m11 * m22 - a12 * a12;
      if (det <= 0.0) {
        mu *= 10;
        continue;
      }
      const double step_tau = (m22 * g1 - a12 * g2) / det;
      const double step_b = (m11 * g2 - a12 * g1) / det;
      const double nt = std::max(0.0, tau + step_tau);
      const double nb = std::max(1e-3, b + step_b);
      const double e = sse(samples, nt, nb);
      if (e < best) {
        const double moved = std::abs(nt - tau) + std::abs(nb - b);
        tau = nt;
        b = nb;
        best = e;
        mu = std::max(mu * 0.1, 1e-12);
        accepted = true;
        if (moved < 1e-12) iter = 200;
        break;
      }
      mu *= 10;
    }
    if (!accepted) break;
  }

  SolisFit fit;
  fit.params = {tau, b};
  fit.nrmse = std::sqrt(best / sum_x2);
  fit.clear_days = clear.size();
  return fit;
}

}  // namespace solarcast
