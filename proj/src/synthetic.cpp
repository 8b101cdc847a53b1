#include "solarcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "solarcast/ar_model.hpp"
#include "solarcast/error.hpp"

namespace solarcast {

namespace {

using Rng = std::mt19937_64;

// Independent stream per (seed, component).
Rng stream(std::uint64_t seed, std::uint32_t component) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), component};
  return Rng(seq);
}

double beta_draw(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng), y = gb(rng);
  return x / (x + y);
}

// Stationary AR(1) with marginal std `sigma`.
class Ar1 {
 public:
  Ar1(double phi, double sigma) : phi_(phi), innov_(sigma * std::sqrt(std::max(0.0, 1.0 - phi * phi))) {}
  double next(Rng& rng) {
    x_ = phi_ * x_ + innov_ * n_(rng);
    return x_;
  }

 private:
  double phi_, innov_;
  double x_ = 0.0;
  std::normal_distribution<double> n_{0.0, 1.0};
};

struct Calendar {
  Day first;
  std::size_t days;
};

Calendar calendar(int start_year, int years) {
  if (years < 1) throw Error(ErrorKind::bounds, "years must be >= 1");
  using namespace std::chrono;
  const Day first{year{start_year} / January / 1};
  const Day end{year{start_year + years} / January / 1};
  return {first, static_cast<std::size_t>((end - first).count())};
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::schema, std::string(name) + " must lie in [0, 1]");
}

// All NWP columns derive from one forecast cloud cover, so a forecast error
// shows up coherently across them.
ExogenousPanel make_panel(Day first, const std::vector<double>& forecast_cover, const ForecastNoise& noise,
                          double solstice_day, Rng& rng) {
  const std::size_t n = forecast_cover.size();
  Ar1 p_err(0.9, noise.pressure_sigma), t_err(0.8, noise.temperature_sigma), r_err(0.3, noise.rain_sigma);
  std::vector<double> neb(n), pres(n), temp(n), rain(n);
  double slow_cover = 0.0;
  const double w1 = 2.0 * 3.14159265358979323846 / 365.25;
  const double w2 = 2.0 * 3.14159265358979323846 / 24.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = forecast_cover[i];
    const Day d = first + std::chrono::days{static_cast<int>(i / SeriesLayout::hours_per_day)};
    const int doy = day_of_year(d);
    const int hour = HourlySeries::hour(i);
    const double nb = noise.quantize_octas ? std::round(8.0 * c) : 8.0 * c;
    neb[i] = std::clamp(nb, 0.0, 8.0);
    slow_cover = 0.8 * slow_cover + 0.2 * c;
    pres[i] = 101500.0 - 1200.0 * slow_cover + p_err.next(rng);
    temp[i] = 15.0 + 7.0 * std::cos(w1 * (doy - solstice_day)) + 3.0 * std::cos(w2 * (hour - 14)) - 3.0 * c +
              t_err.next(rng);
    rain[i] = std::max(0.0, 4.0 * (c - 0.5) + r_err.next(rng));
  }
  return {HourlySeries(first, std::move(neb)), HourlySeries(first, std::move(pres)), HourlySeries(first, std::move(temp)),
          HourlySeries(first, std::move(rain))};
}

}  // namespace

void CloudProcess::validate() const {
  check_probability(p_clear_to_cloudy, "cloud.p_clear_to_cloudy");
  check_probability(p_cloudy_to_clear, "cloud.p_cloudy_to_clear");
  if (!(beta_alpha > 0.0 && beta_beta > 0.0)) throw Error(ErrorKind::schema, "cloud Beta parameters must be > 0");
}

void SynthConfig::validate() const {
  cloud.validate();
  if (!(a0 >= 0.0 && b0 > 0.0)) throw Error(ErrorKind::schema, "envelope amplitudes must be positive");
  if (!(std::abs(envelope_drift) < 1.0)) throw Error(ErrorKind::schema, "envelope_drift must lie in (-1, 1)");
}

double synth_envelope(const SynthConfig& cfg, Day d, int slot) {
  using namespace std::chrono;
  const double t_days = static_cast<double>((d - Day{year{cfg.start_year} / January / 1}).count());
  const double drift = 1.0 + cfg.envelope_drift * std::sin(2.0 * 3.14159265358979323846 * t_days / (4.0 * 365.25));
  const double a = cfg.a0 * drift, b = cfg.b0 * drift;
  const double hour = SeriesLayout::day_start_hour + slot;
  const double x = a * std::cos(cfg.omega1 * (day_of_year(d) - cfg.solstice_day)) + b * std::cos(cfg.omega2 * (hour - 12.0));
  return std::max(0.0, x);
}

RadiationSample gen_radiation(const SynthConfig& cfg, int years) {
  cfg.validate();
  const Calendar cal = calendar(cfg.start_year, years);
  const std::size_t n = cal.days * SeriesLayout::hours_per_day;
  Rng cloud_rng = stream(cfg.seed, 1), nwp_rng = stream(cfg.seed, 2), exo_rng = stream(cfg.seed, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Ar1 neb_err(cfg.noise.nebulosity_phi, cfg.noise.nebulosity_sigma);

  std::vector<double> x(n), r(n), forecast(n);
  bool cloudy = cfg.cloud.start_cloudy;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) cloudy = cloudy ? u(cloud_rng) >= cfg.cloud.p_cloudy_to_clear : u(cloud_rng) < cfg.cloud.p_clear_to_cloudy;
    // Attenuation in (0, 1]; the lower end is kept off zero.
    r[i] = cloudy ? std::max(1e-3, beta_draw(cloud_rng, cfg.cloud.beta_alpha, cfg.cloud.beta_beta)) : 1.0;
    const Day d = cal.first + std::chrono::days{static_cast<int>(i / SeriesLayout::hours_per_day)};
    x[i] = synth_envelope(cfg, d, HourlySeries::slot(i)) * r[i];
    forecast[i] = std::clamp(1.0 - r[i] + neb_err.next(nwp_rng) / 8.0, 0.0, 1.0);
  }
  RadiationSample out;
  out.data.panel = make_panel(cal.first, forecast, cfg.noise, cfg.solstice_day, exo_rng);
  out.data.ghi = HourlySeries(cal.first, std::move(x));
  out.attenuation = HourlySeries(cal.first, std::move(r));
  return out;
}

std::vector<double> gen_ar(std::span<const double> phi, double sigma, std::size_t n, std::uint64_t seed) {
  if (!is_stationary(phi)) throw Error(ErrorKind::instability, "AR coefficients are not stationary");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::bounds, "innovation sigma must be >= 0");
  constexpr std::size_t kBurnIn = 1000;
  Rng rng = stream(seed, 0);
  std::normal_distribution<double> eps(0.0, sigma > 0.0 ? sigma : 1.0);
  const double scale = sigma > 0.0 ? 1.0 : 0.0;
  const std::size_t p = phi.size();
  std::vector<double> buf(kBurnIn + n, 0.0);
  for (std::size_t t = 0; t < buf.size(); ++t) {
    double v = scale * eps(rng);
    for (std::size_t i = 0; i < p && i < t; ++i) v += phi[i] * buf[t - 1 - i];
    buf[t] = v;
  }
  return {buf.begin() + static_cast<std::ptrdiff_t>(kBurnIn), buf.end()};
}

void RegimeConfig::validate() const {
  site.validate();
  solis.validate();
  check_probability(p_sunny_to_cloudy, "p_sunny_to_cloudy");
  check_probability(p_cloudy_to_sunny, "p_cloudy_to_sunny");
  check_probability(false_alarm_start, "false_alarm_start");
  check_probability(false_alarm_stop, "false_alarm_stop");
  if (!(winter_cloudiness >= 0.0 && winter_cloudiness < 1.0))
    throw Error(ErrorKind::schema, "winter_cloudiness must lie in [0, 1)");
  if (!(std::abs(sunny_phi) < 1.0 && std::abs(cover_phi) < 1.0 && std::abs(nwp_phi) < 1.0))
    throw Error(ErrorKind::schema, "regime AR coefficients must lie in (-1, 1)");
  if (!(sunny_sigma >= 0.0 && cover_sigma >= 0.0 && cloudy_sigma >= 0.0 && nwp_sigma >= 0.0))
    throw Error(ErrorKind::schema, "regime noise levels must be >= 0");
}

RegimeSample gen_regime_switch(const RegimeConfig& cfg, int years) {
  cfg.validate();
  const Calendar cal = calendar(cfg.start_year, years);
  const std::size_t n = cal.days * SeriesLayout::hours_per_day;
  Rng regime_rng = stream(cfg.seed, 11), sky_rng = stream(cfg.seed, 12), nwp_rng = stream(cfg.seed, 13),
      exo_rng = stream(cfg.seed, 14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  Ar1 base_err(cfg.nwp_phi, cfg.nwp_sigma);

  std::vector<double> k(n), ghi(n), forecast(n);
  std::vector<bool> cloudy(n);
  bool cloudy_now = cfg.start_cloudy;
  bool alarm = false;
  double cover = cfg.cover_mean;
  double prev_k = cfg.sunny_mean;
  const double cover_innov = cfg.cover_sigma * std::sqrt(1.0 - cfg.cover_phi * cfg.cover_phi);
  const double sunny_innov = cfg.sunny_sigma * std::sqrt(1.0 - cfg.sunny_phi * cfg.sunny_phi);

  for (std::size_t i = 0; i < n; ++i) {
    const int slot = HourlySeries::slot(i);
    const Day d = cal.first + std::chrono::days{static_cast<int>(i / SeriesLayout::hours_per_day)};
    const double w1 = 2.0 * 3.14159265358979323846 / 365.25, w2 = 2.0 * 3.14159265358979323846 / 24.0;
    const double winter = cfg.winter_cloudiness * std::cos(w1 * (day_of_year(d) - 15));
    if (i > 0)
      cloudy_now = cloudy_now ? u(regime_rng) >= cfg.p_cloudy_to_sunny * (1.0 - winter)
                              : u(regime_rng) < cfg.p_sunny_to_cloudy * (1.0 + winter);
    cover = std::clamp(cfg.cover_mean + cfg.cover_phi * (cover - cfg.cover_mean) + cover_innov * z(sky_rng), 0.0, 1.0);
    const double eps = z(sky_rng);
    double value;
    if (cloudy_now) {
      value = 1.0 - cfg.cloud_depth * cover * cover + cfg.cloudy_sigma * eps;
    } else {
      value = cfg.sunny_mean + cfg.sunny_phi * (prev_k - cfg.sunny_mean) + sunny_innov * eps;
    }
    value = std::clamp(value, 0.02, 1.2);
    prev_k = value;
    k[i] = value;
    cloudy[i] = cloudy_now;

    const double haze = 1.0 - cfg.haze_amplitude * std::sin(w2 * (SeriesLayout::day_start_hour + slot - 12)) *
                                   (0.5 + 0.5 * std::cos(w1 * (day_of_year(d) - 172)));
    ghi[i] = value * haze * clear_sky_ghi(cfg.site, cfg.solis, day_of_year(d), slot);

    alarm = alarm ? u(nwp_rng) >= cfg.false_alarm_stop : (!cloudy_now && u(nwp_rng) < cfg.false_alarm_start);
    if (cloudy_now) alarm = false;
    const double truth = cloudy_now ? cover : 0.0;
    forecast[i] = std::clamp(truth + (base_err.next(nwp_rng) + (alarm ? cfg.false_alarm_octas : 0.0)) / 8.0, 0.0, 1.0);
  }

  RegimeSample out;
  out.data.panel = make_panel(cal.first, forecast, cfg.noise, 172.0, exo_rng);
  out.data.ghi = HourlySeries(cal.first, std::move(ghi));
  out.csi = HourlySeries(cal.first, std::move(k));
  out.cloudy = std::move(cloudy);
  return out;
}

}  // namespace solarcast
