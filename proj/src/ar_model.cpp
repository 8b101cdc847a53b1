#include "solarcast/ar_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "solarcast/error.hpp"

namespace solarcast {

void ArModel::validate() const {
  if (p < 1 || phi.size() != p) throw Error(ErrorKind::shape, "AR order and coefficient count disagree");
  if (!(std > 0.0) || !std::isfinite(mean)) throw Error(ErrorKind::degenerate_series, "AR standardization is degenerate");
  for (double c : phi)
    if (!std::isfinite(c)) throw Error(ErrorKind::shape, "non-finite AR coefficient");
}

std::vector<double> autocovariance(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorKind::empty_input, "autocovariance of an empty series");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> gamma(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag && k < n; ++k) {
    double acc = 0.0;
    for (std::size_t t = k; t < n; ++t) acc += (x[t] - mean) * (x[t - k] - mean);
    gamma[k] = acc / static_cast<double>(n);
  }
  return gamma;
}

ArModel fit_yule_walker(std::span<const double> s, std::size_t p) {
  if (p < 1) throw Error(ErrorKind::bounds, "AR order must be >= 1");
  if (s.size() < 10 * p)
    throw Error(ErrorKind::insufficient_data,
                "Yule-Walker needs at least " + std::to_string(10 * p) + " samples, got " + std::to_string(s.size()));
  const std::vector<double> gamma = autocovariance(s, p);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  if (!(gamma[0] > 1e-14 * std::max(1.0, mean * mean)))
    throw Error(ErrorKind::degenerate_series, "constant series: Toeplitz system is singular");

  // Standardizing rescales every autocovariance by gamma0, so rho drives the solve.
  std::vector<double> rho(p + 1);
  for (std::size_t k = 0; k <= p; ++k) rho[k] = gamma[k] / gamma[0];

  std::vector<double> phi(p, 0.0), prev(p, 0.0);
  double err = 1.0;
  for (std::size_t m = 1; m <= p; ++m) {
    double acc = rho[m];
    for (std::size_t i = 1; i < m; ++i) acc -= prev[i - 1] * rho[m - i];
    const double k = acc / err;
    if (!(std::abs(k) < 1.0)) throw Error(ErrorKind::instability, "reflection coefficient outside (-1, 1)");
    phi[m - 1] = k;
    for (std::size_t i = 1; i < m; ++i) phi[i - 1] = prev[i - 1] - k * prev[m - i - 1];
    err *= 1.0 - k * k;
    prev = phi;
  }
  if (!is_stationary(phi)) throw Error(ErrorKind::instability, "fitted AR polynomial is not stationary");

  ArModel m;
  m.p = p;
  m.phi = std::move(phi);
  m.mean = mean;
  m.std = std::sqrt(gamma[0]);
  return m;
}

double predict_one(const ArModel& m, std::span<const double> recent) {
  if (recent.size() < m.p)
    throw Error(ErrorKind::boundary, "AR(" + std::to_string(m.p) + ") needs " + std::to_string(m.p) + " lags");
  const std::size_t last = recent.size() - 1;
  double z = 0.0;
  for (std::size_t i = 0; i < m.p; ++i) z += m.phi[i] * (recent[last - i] - m.mean) / m.std;
  return m.mean + m.std * z;
}

std::vector<double> predict_series(const ArModel& m, std::span<const double> s, std::size_t first) {
  if (first < m.p) throw Error(ErrorKind::boundary, "first forecast target lacks AR history");
  std::vector<double> out;
  out.reserve(s.size() > first ? s.size() - first : 0);
  for (std::size_t t = first; t < s.size(); ++t) out.push_back(predict_one(m, s.subspan(t - m.p, m.p)));
  return out;
}

bool is_stationary(std::span<const double> phi) {
  // Step-down recursion: stationary iff every reflection coefficient has |k| < 1.
  std::vector<double> a(phi.begin(), phi.end());
  for (std::size_t m = a.size(); m >= 1; --m) {
    const double k = a[m - 1];
    if (!(std::abs(k) < 1.0)) return false;
    std::vector<double> down(m - 1);
    for (std::size_t i = 1; i < m; ++i) down[i - 1] = (a[i - 1] + k * a[m - i - 1]) / (1.0 - k * k);
    a = std::move(down);
  }
  return true;
}

std::size_t choose_order(std::span<const double> s, std::size_t p_max, double train_fraction, double tie_tolerance) {
  if (p_max < 1) throw Error(ErrorKind::bounds, "p_max must be >= 1");
  if (p_max == 1) return 1;
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(s.size())));
  if (n_train < p_max || n_train >= s.size()) throw Error(ErrorKind::insufficient_data, "no validation segment");
  const auto train = s.first(n_train);
  std::vector<double> scores;
  for (std::size_t p = 1; p <= p_max; ++p) {
    const ArModel m = fit_yule_walker(train, p);
    const auto pred = predict_series(m, s, n_train);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      const double x = s[n_train + k];
      num += (x - pred[k]) * (x - pred[k]);
      den += x * x;
    }
    scores.push_back(den > 0.0 ? std::sqrt(num / den) : std::sqrt(num));
  }
  const double best = *std::min_element(scores.begin(), scores.end());
  std::size_t p = 1;
  while (scores[p - 1] > best * (1.0 + tie_tolerance)) ++p;
  return p;
}

WhitenessReport whiteness(std::span<const double> residuals, std::size_t lags) {
  const std::size_t n = residuals.size();
  if (n < 100) throw Error(ErrorKind::insufficient_data, "whiteness needs at least 100 residuals");
  WhitenessReport r;
  r.band = 1.96 / std::sqrt(static_cast<double>(n));
  const std::vector<double> gamma = autocovariance(residuals, lags);
  const double mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / static_cast<double>(n);
  if (!(gamma[0] > 1e-14 * std::max(1.0, mean * mean))) {
    r.degenerate = true;
    r.autocorrelation.assign(lags, 0.0);
    return r;
  }
  std::size_t inside = 0;
  for (std::size_t k = 1; k <= lags; ++k) {
    const double rho = gamma[k] / gamma[0];
    r.autocorrelation.push_back(rho);
    if (std::abs(rho) <= r.band) ++inside;
  }
  r.fraction_inside = lags > 0 ? static_cast<double>(inside) / static_cast<double>(lags) : 1.0;
  r.white = r.fraction_inside >= 0.95;
  return r;
}

nlohmann::json to_json(const ArModel& m) {
  return {{"schema_version", 1}, {"p", m.p}, {"phi", m.phi}, {"mean", m.mean}, {"std", m.std}};
}

ArModel ar_from_json(const nlohmann::json& j) {
  ArModel m;
  m.p = j.at("p").get<std::size_t>();
  m.phi = j.at("phi").get<std::vector<double>>();
  m.mean = j.at("mean").get<double>();
  m.std = j.at("std").get<double>();
  m.validate();
  return m;
}

}  // namespace solarcast
