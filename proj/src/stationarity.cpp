#include "solarcast/stationarity.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "solarcast/error.hpp"

namespace solarcast {

namespace {

constexpr std::size_t kSlots = SeriesLayout::slots_per_year;

}  // namespace

void PeriodicTable::validate() const {
  if (coefficients.size() != kSlots)
    throw Error(ErrorKind::shape, "periodic table must hold exactly 3285 coefficients");
  for (double c : coefficients)
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::shape, "periodic coefficients must be > 0");
}

void write_periodic_table(std::ostream& out, const PeriodicTable& table) {
  out << "slot,coefficient\n";
  char buf[32];
  for (std::size_t k = 0; k < table.coefficients.size(); ++k) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, table.coefficients[k]);
    out << k << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  }
}

PeriodicTable read_periodic_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("slot,coefficient", 0) != 0)
    throw Error(ErrorKind::parse, "periodic table header 'slot,coefficient' expected");
  PeriodicTable t;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::parse, "bad periodic table row: " + line);
    const std::size_t slot = std::stoul(line.substr(0, comma));
    if (slot >= kSlots) throw Error(ErrorKind::parse, "slot index out of range: " + line);
    t.coefficients[slot] = std::stod(line.substr(comma + 1));
    ++count;
  }
  if (count != kSlots) throw Error(ErrorKind::reshape, "periodic table must have 3285 rows");
  t.validate();
  return t;
}

double StationarityPipeline::clear_sky(const HourlySeries& grid, std::size_t i) const {
  return std::max(clear_sky_ghi(geo, solis, grid.day_of_year(i), HourlySeries::slot(i)), kClearSkyFloor);
}

double StationarityPipeline::scale(const HourlySeries& grid, std::size_t i) const {
  return table[grid.year_slot(i)] * clear_sky(grid, i);
}

HourlySeries to_csi(const HourlySeries& x, const StationarityPipeline& pipeline) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / pipeline.clear_sky(x, i);
  return x.with_values(std::move(out));
}

HourlySeries moving_average(const HourlySeries& csi, int half_width) {
  if (half_width < 0) throw Error(ErrorKind::bounds, "moving-average half width must be >= 0");
  const auto w = static_cast<std::size_t>(half_width);
  const std::size_t n = csi.size();
  if (n < 2 * w + 1) throw Error(ErrorKind::bounds, "series shorter than the moving-average window");
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= w ? t - w : 0;
    const std::size_t hi = std::min(n - 1, t + w);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (csi.missing(k)) continue;
      sum += csi[k];
      ++count;
    }
    out[t] = count > 0 ? sum / static_cast<double>(count) : std::nan("");
  }
  return csi.with_values(std::move(out));
}

HourlySeries periodic_coefficients(const HourlySeries& csi, const HourlySeries& mm) {
  if (!csi.same_grid(mm)) throw Error(ErrorKind::shape, "CSI and moving average are not aligned");
  std::vector<double> out(csi.size());
  for (std::size_t i = 0; i < csi.size(); ++i) out[i] = csi[i] / std::max(mm[i], kRatioFloor);
  return csi.with_values(std::move(out));
}

PeriodicTable build_periodic_table(const HourlySeries& c) {
  if (c.days() < 2 * static_cast<std::size_t>(SeriesLayout::days_per_year))
    throw Error(ErrorKind::insufficient_history, "periodic table needs at least two whole years");
  std::vector<double> sum(kSlots, 0.0);
  std::vector<std::size_t> count(kSlots, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.missing(i)) continue;
    const std::size_t k = c.year_slot(i);
    sum[k] += c[i];
    ++count[k];
  }
  PeriodicTable t;
  t.years_averaged = static_cast<int>(c.days() / SeriesLayout::days_per_year);
  for (std::size_t k = 0; k < kSlots; ++k) {
    if (count[k] == 0) throw Error(ErrorKind::insufficient_history, "slot " + std::to_string(k) + " never observed");
    t.coefficients[k] = std::max(sum[k] / static_cast<double>(count[k]), kRatioFloor);
  }
  return t;
}

StationarityPipeline fit_pipeline(const HourlySeries& x, const SiteGeometry& geo, const SolisParams& solis,
                                  int ma_half_width) {
  geo.validate();
  solis.validate();
  StationarityPipeline p{solis, geo, PeriodicTable::ones(), ma_half_width};
  const HourlySeries csi = to_csi(x, p);
  const HourlySeries mm = moving_average(csi, ma_half_width);
  p.table = build_periodic_table(periodic_coefficients(csi, mm));
  return p;
}

HourlySeries to_csi_star(const HourlySeries& x, const StationarityPipeline& pipeline) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = (x[i] / pipeline.clear_sky(x, i)) / pipeline.table[x.year_slot(i)];
  return x.with_values(std::move(out));
}

HourlySeries invert_csi_star(const HourlySeries& csi_star, const StationarityPipeline& pipeline) {
  std::vector<double> out(csi_star.size());
  for (std::size_t i = 0; i < csi_star.size(); ++i)
    out[i] = csi_star[i] * pipeline.table[csi_star.year_slot(i)] * pipeline.clear_sky(csi_star, i);
  return csi_star.with_values(std::move(out));
}

VcResult variation_coefficient(std::span<const double> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  if (n == 0) return {0.0, true};
  const double mean = sum / static_cast<double>(n);
  if (std::abs(mean) < 1e-12) return {0.0, true};
  double ss = 0.0;
  for (double v : values)
    if (!std::isnan(v)) ss += (v - mean) * (v - mean);
  return {std::sqrt(ss / static_cast<double>(n)) / mean, false};
}

FisherResult fisher_test(std::span<const double> values, std::size_t period, double alpha) {
  const std::size_t p = period;
  if (p < 2 || values.size() % p != 0 || values.size() / p < 2)
    throw Error(ErrorKind::reshape, std::to_string(values.size()) + " values do not form >= 2 periods of " +
                                        std::to_string(p));
  const std::size_t n = values.size() / p;
  std::vector<double> row_mean(n, 0.0), col_mean(p, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double v = values[i * p + j];
      if (!std::isfinite(v)) throw Error(ErrorKind::reshape, "non-finite value in Fisher test input");
      row_mean[i] += v;
      col_mean[j] += v;
      grand += v;
    }
  }
  for (auto& m : row_mean) m /= static_cast<double>(p);
  for (auto& m : col_mean) m /= static_cast<double>(n);
  grand /= static_cast<double>(n * p);

  double vp = 0.0;
  for (std::size_t j = 0; j < p; ++j) vp += static_cast<double>(n) * (col_mean[j] - grand) * (col_mean[j] - grand);
  vp /= static_cast<double>(p - 1);

  double vr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double r = values[i * p + j] - row_mean[i] - col_mean[j] + grand;
      vr += r * r;
    }
  }
  vr /= static_cast<double>((p - 1) * (n - 1));
  if (!(vr > 0.0)) throw Error(ErrorKind::degenerate_residual, "residual variance is zero");

  FisherResult r;
  r.v_p = vp;
  r.v_r = vr;
  r.f_c = vp / vr;
  r.p = p;
  r.n = n;
  const boost::math::fisher_f dist(static_cast<double>(p - 1), static_cast<double>((n - 1) * (p - 1)));
  r.f_limit = boost::math::quantile(dist, 1.0 - alpha);
  r.seasonal = r.f_c > r.f_limit;
  return r;
}

FisherResult fisher_test(const HourlySeries& s, FisherMode mode, double alpha) {
  if (mode == FisherMode::yearly) return fisher_test(s.values(), SeriesLayout::hours_per_day, alpha);
  std::vector<double> kept;
  kept.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.day_of_year(i) <= SeriesLayout::days_per_year) kept.push_back(s[i]);
  return fisher_test(kept, SeriesLayout::slots_per_year, alpha);
}

}  // namespace solarcast
