#include <doctest.h>

#include "solarcast/error.hpp"
#include "solarcast/selection.hpp"
#include "util.hpp"

using namespace solarcast;
using testutil::ymd;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io;
}

Eigen::VectorXd standardized(const std::vector<double>& v) {
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  x.array() -= x.mean();
  x /= std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
  return x;
}

}  // namespace

TEST_CASE("feature vector layout") {
  const HourlySeries s = testutil::random_series(ymd(2010, 1, 1), 4, 0.0, 1.2, 1);
  const ExogenousPanel panel = testutil::random_panel(s, 2);
  const std::size_t t = 9;
  const FeatureVector f = raw_features(s, panel, t);
  for (std::size_t j = 0; j < 10; ++j) CHECK(f[j] == s[t - j]);
  CHECK(f[10] == panel.pressure[t + 1]);
  CHECK(f[11] == panel.pressure[t]);
  CHECK(f[12] == panel.nebulosity[t + 1]);
  CHECK(f[13] == panel.nebulosity[t]);
  CHECK(f[14] == panel.rain[t + 1]);
  CHECK(f[15] == panel.rain[t]);
  CHECK(f[16] == panel.temperature[t + 1]);
  CHECK(f[17] == panel.temperature[t]);
  CHECK(kind_of([&] { raw_features(s, panel, 8); }) == ErrorKind::boundary);
  CHECK(kind_of([&] { raw_features(s, panel, s.size() - 1); }) == ErrorKind::boundary);
}

TEST_CASE("build_design row count and lag-matrix oracle") {
  const HourlySeries two_days = testutil::random_series(ymd(2010, 1, 1), 2, 0.0, 1.2, 3);
  const DesignMatrix small = build_design(two_days, testutil::random_panel(two_days, 4), {1});
  CHECK(small.raw.rows() == 8);
  CHECK(kind_of([&] { build_design(two_days, testutil::random_panel(two_days, 4)); }) == ErrorKind::insufficient_data);

  const HourlySeries s = testutil::random_series(ymd(2010, 1, 1), 30, 0.0, 1.2, 5);
  const ExogenousPanel panel = testutil::random_panel(s, 6);
  const DesignMatrix d = build_design(s, panel);
  const HourlySeries* exo[4] = {&panel.pressure, &panel.nebulosity, &panel.rain, &panel.temperature};
  REQUIRE(d.raw.rows() == static_cast<Eigen::Index>(s.size() - 10));
  for (std::size_t r = 0; r < s.size() - 10; ++r) {
    const std::size_t t = r + 9;
    const auto row = static_cast<Eigen::Index>(r);
    for (std::size_t lag = 0; lag < 10; ++lag) CHECK(d.raw(row, static_cast<Eigen::Index>(lag)) == s[t - lag]);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(d.raw(row, static_cast<Eigen::Index>(10 + 2 * k)) == (*exo[k])[t + 1]);
      CHECK(d.raw(row, static_cast<Eigen::Index>(11 + 2 * k)) == (*exo[k])[t]);
    }
    CHECK(d.target(row) == s[t + 1]);
    CHECK(d.origin[r] == t);
  }
  for (Eigen::Index j = 1; j < d.features.cols(); ++j) {
    CHECK(std::abs(d.features.col(j).mean()) < 1e-12);
    CHECK(d.features.col(j).squaredNorm() / static_cast<double>(d.features.rows()) == doctest::Approx(1.0));
  }
}

namespace {

SelectionReport planted_single_predictor() {
  const std::size_t n = 2000;
  Eigen::MatrixXd raw(n, 18);
  for (Eigen::Index j = 0; j < 18; ++j) raw.col(j) = standardized(testutil::gaussian(n, 0.0, 1.0, 100 + static_cast<std::uint64_t>(j)));
  const auto noise = testutil::gaussian(n, 0.0, 0.01, 7);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) y(i) = 3.0 * raw(i, 0) + noise[static_cast<std::size_t>(i)];
  return fit_ols(design_from_columns(raw, y));
}

}  // namespace

TEST_CASE("fit_ols planted single predictor is selected with its weight") {
  const SelectionReport r = planted_single_predictor();
  CHECK(r.mask[0]);
  CHECK(r.weights[1] >= 2.99);
  CHECK(r.weights[1] <= 3.01);
}

TEST_CASE("fit_ols planted single predictor is the only column kept") {
  CHECK(planted_single_predictor().mask.width() == 1);
}

TEST_CASE("fit_ols weights match an independent QR solve") {
  const std::size_t n = 400;
  Eigen::MatrixXd raw(n, 5);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const auto c = testutil::gaussian(n, 2.0, 3.0, 40 + static_cast<std::uint64_t>(j));
    raw.col(j) = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(n));
  }
  const auto e = testutil::gaussian(n, 0.0, 1.0, 50);
  Eigen::VectorXd y = 0.5 * raw.col(1) - 0.2 * raw.col(3) + Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(n));
  const DesignMatrix d = design_from_columns(raw, y);
  const Eigen::VectorXd w = d.features.householderQr().solve(y);
  const SelectionReport r = fit_ols(d);
  for (Eigen::Index j = 0; j < w.size(); ++j) CHECK(r.weights[static_cast<std::size_t>(j)] == doctest::Approx(w(j)).epsilon(1e-10));
  const Eigen::VectorXd res = y - d.features * w;
  const double s2 = res.squaredNorm() / static_cast<double>(n - 6);
  const Eigen::MatrixXd cov = s2 * (d.features.transpose() * d.features).inverse();
  for (Eigen::Index j = 0; j < w.size(); ++j)
    CHECK(r.t_stats[static_cast<std::size_t>(j)] == doctest::Approx(w(j) / std::sqrt(cov(j, j))).epsilon(1e-8));
  CHECK(r.mask[1]);
  CHECK(r.mask[3]);
}

TEST_CASE("fit_ols constant target keeps nothing") {
  const std::size_t n = 300;
  Eigen::MatrixXd raw(n, 18);
  for (Eigen::Index j = 0; j < 18; ++j) {
    const auto c = testutil::gaussian(n, 0.0, 1.0, 200 + static_cast<std::uint64_t>(j));
    raw.col(j) = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(n));
  }
  const SelectionReport r = fit_ols(design_from_columns(raw, Eigen::VectorXd::Constant(n, 0.8)));
  CHECK(r.mask.width() == 0);
  CHECK(r.weights[0] == doctest::Approx(0.8));
}

TEST_CASE("fit_ols duplicate columns") {
  const std::size_t n = 300;
  Eigen::MatrixXd raw(n, 3);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const auto c = testutil::gaussian(n, 0.0, 1.0, 300 + static_cast<std::uint64_t>(j));
    raw.col(j) = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(n));
  }
  raw.col(2) = raw.col(1);
  try {
    fit_ols(design_from_columns(raw, raw.col(0)));
    FAIL("expected collinearity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::collinearity);
    CHECK(std::string(e.what()).find("x2") != std::string::npos);
    CHECK(std::string(e.what()).find("x3") != std::string::npos);
  }
}

TEST_CASE("masks and architecture strings") {
  CHECK(apply_mask(InputMask::all(18)).width() == 18);
  std::vector<bool> five(18, false);
  for (std::size_t i : {0, 3, 7, 12, 17}) five[i] = true;
  CHECK(apply_mask(InputMask(five)).width() == 5);
  CHECK(kind_of([] { apply_mask(InputMask(std::vector<bool>(18, false))); }) == ErrorKind::empty_input);
  CHECK(kind_of([] { apply_mask(InputMask::all(17)); }) == ErrorKind::shape);

  std::vector<bool> v(18, true);
  v[5] = v[6] = v[7] = false;
  const InputMask selected(v);
  CHECK(selected.width() == 15);
  CHECK(architecture_string(selected) == "Endo^{1:5,9,10} PR^{1,2} N^{1,2} P^{1,2} T^{1,2}");

  const std::vector<double> full = testutil::uniform(18, 0, 1, 3);
  const auto masked = selected.apply(full);
  REQUIRE(masked.size() == 15);
  CHECK(masked[5] == full[8]);
}

TEST_CASE("selection report json round trip") {
  SelectionReport r;
  r.weights = {0.1, 0.2};
  r.std_errors = {0.01, 0.02};
  r.t_stats = {10.0, 10.0};
  r.mask = InputMask({true});
  const SelectionReport back = selection_from_json(to_json(r));
  CHECK(back.weights == r.weights);
  CHECK(back.t_stats == r.t_stats);
  CHECK(back.mask == r.mask);
}
