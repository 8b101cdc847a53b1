#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "solarcast/error.hpp"
#include "solarcast/stationarity.hpp"
#include "util.hpp"

using namespace solarcast;
using testutil::ymd;

namespace {

const SiteGeometry kSite{41.92, 8.73, 10.0};

StationarityPipeline neutral_pipeline() { return {SolisParams{}, kSite, PeriodicTable::ones(), 4}; }

HourlySeries clear_curve(const HourlySeries& grid, const StationarityPipeline& p) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = clear_sky_ghi(p.geo, p.solis, grid.day_of_year(i), HourlySeries::slot(i));
  return grid.with_values(std::move(v));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("to_csi identities") {
  const auto p = neutral_pipeline();
  const HourlySeries grid = HourlySeries::constant(ymd(2010, 1, 1), 40, 0.0);
  const HourlySeries clear = clear_curve(grid, p);
  const HourlySeries ones = to_csi(clear, p);
  for (std::size_t i = 0; i < ones.size(); ++i)
    if (clear[i] > kClearSkyFloor) CHECK(ones[i] == doctest::Approx(1.0).epsilon(1e-14));
  const HourlySeries zeros = to_csi(grid, p);
  for (double v : zeros.values()) CHECK(v == 0.0);

  const HourlySeries x = testutil::random_series(ymd(2010, 1, 1), 40, 0.0, 900.0, 2);
  const HourlySeries csi = to_csi(x, p);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (clear[i] > kClearSkyFloor) CHECK(std::abs(csi[i] * clear[i] - x[i]) <= 1e-10 * std::max(1.0, x[i]));
}

TEST_CASE("moving_average") {
  SUBCASE("constant") {
    const HourlySeries c = moving_average(HourlySeries::constant(ymd(2010, 1, 1), 3, 0.7), 4);
    for (double v : c.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("impulse") {
    std::vector<double> v(27, 0.0);
    v[13] = 1.0;
    const HourlySeries m = moving_average(HourlySeries(ymd(2010, 1, 1), v), 4);
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(m[i] == doctest::Approx(i >= 9 && i <= 17 ? 1.0 / 9.0 : 0.0).epsilon(1e-15));
  }
  SUBCASE("brute force window") {
    const HourlySeries r = testutil::random_series(ymd(2010, 1, 1), 20, 0.0, 1.2, 6);
    const HourlySeries m = moving_average(r, 4);
    const long n = static_cast<long>(r.size());
    for (long t = 0; t < n; ++t) {
      double s = 0.0;
      int c = 0;
      for (long k = std::max(0L, t - 4); k <= std::min(n - 1, t + 4); ++k, ++c) s += r[static_cast<std::size_t>(k)];
      CHECK(m[static_cast<std::size_t>(t)] == doctest::Approx(s / c).epsilon(1e-14));
    }
  }
  SUBCASE("too short") {
    CHECK(kind_of([] { moving_average(HourlySeries(ymd(2010, 1, 1), std::vector<double>(9, 1.0)), 5); }) ==
          ErrorKind::bounds);
  }
}

TEST_CASE("periodic_coefficients") {
  const HourlySeries mm = testutil::random_series(ymd(2010, 1, 1), 10, 0.2, 1.2, 1);
  std::vector<double> twice(mm.size());
  for (std::size_t i = 0; i < mm.size(); ++i) twice[i] = 2.0 * mm[i];
  const HourlySeries same = periodic_coefficients(mm, mm);
  for (double v : same.values()) CHECK(v == 1.0);
  const HourlySeries doubled = periodic_coefficients(mm.with_values(twice), mm);
  for (double v : doubled.values()) CHECK(v == 2.0);
  const HourlySeries other = testutil::random_series(ymd(2010, 1, 1), 10, 0.0, 1.2, 2);
  const HourlySeries c = periodic_coefficients(other, mm);
  for (std::size_t i = 0; i < mm.size(); ++i) CHECK(c[i] == other[i] / mm[i]);
}

TEST_CASE("build_periodic_table") {
  SUBCASE("identical years reproduce one year") {
    const auto one = testutil::uniform(3285, 0.5, 1.5, 3);
    std::vector<double> v;
    for (int y = 0; y < 3; ++y) v.insert(v.end(), one.begin(), one.end());
    const PeriodicTable t = build_periodic_table(HourlySeries(ymd(2097, 1, 1), v));
    for (std::size_t k = 0; k < 3285; ++k) CHECK(t[k] == doctest::Approx(one[k]).epsilon(1e-15));
  }
  SUBCASE("ones") {
    const PeriodicTable t = build_periodic_table(HourlySeries::constant(ymd(2097, 1, 1), 730, 1.0));
    for (double c : t.coefficients) CHECK(c == 1.0);
  }
  SUBCASE("group-by-slot oracle over 4 years") {
    const HourlySeries c = testutil::plain_years(4, 0.3, 1.7, 9);
    std::vector<double> oracle(3285, 0.0);
    for (std::size_t y = 0; y < 4; ++y)
      for (std::size_t k = 0; k < 3285; ++k) oracle[k] += c[y * 3285 + k] / 4.0;
    const PeriodicTable t = build_periodic_table(c);
    CHECK(t.years_averaged == 4);
    for (std::size_t k = 0; k < 3285; ++k) CHECK(t[k] == doctest::Approx(oracle[k]).epsilon(1e-13));
  }
  SUBCASE("less than two years") {
    CHECK(kind_of([] { build_periodic_table(HourlySeries::constant(ymd(2097, 1, 1), 400, 1.0)); }) ==
          ErrorKind::insufficient_history);
  }
  SUBCASE("csv round trip") {
    PeriodicTable t;
    t.coefficients = testutil::uniform(3285, 0.5, 1.5, 4);
    std::stringstream io;
    write_periodic_table(io, t);
    const PeriodicTable back = read_periodic_table(io);
    CHECK(back.coefficients == t.coefficients);
  }
}

TEST_CASE("CSI* transform") {
  const HourlySeries grid = HourlySeries::constant(ymd(2097, 1, 1), 730, 0.0);
  SUBCASE("table of ones equals CSI") {
    const auto p = neutral_pipeline();
    const HourlySeries x = testutil::random_series(ymd(2097, 1, 1), 730, 0.0, 900.0, 5);
    CHECK(to_csi_star(x, p).data() == to_csi(x, p).data());
  }
  SUBCASE("clear-sky curve normalizes itself") {
    const HourlySeries clear = clear_curve(grid, neutral_pipeline());
    const StationarityPipeline p = fit_pipeline(clear, kSite, SolisParams{});
    const HourlySeries s = to_csi_star(clear, p);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (clear[i] > kClearSkyFloor) CHECK(s[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("forward then invert") {
    const HourlySeries x = testutil::random_series(ymd(2097, 1, 1), 730, 0.0, 900.0, 6);
    const StationarityPipeline p = fit_pipeline(x, kSite, SolisParams{});
    const HourlySeries back = invert_csi_star(to_csi_star(x, p), p);
    const HourlySeries clear = clear_curve(grid, p);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (clear[i] > kClearSkyFloor) CHECK(std::abs(back[i] - x[i]) <= 1e-9 * std::max(1.0, x[i]));
  }
}

TEST_CASE("variation_coefficient") {
  CHECK(variation_coefficient(std::vector<double>(50, 3.0)).vc == 0.0);
  CHECK(variation_coefficient(std::vector<double>{-1.0, 1.0}).undefined);
  const VcResult r = variation_coefficient(testutil::gaussian(100000, 10.0, 2.0, 8));
  CHECK_FALSE(r.undefined);
  CHECK(r.vc >= 0.19);
  CHECK(r.vc <= 0.21);
}

TEST_CASE("fisher_test against a two-way decomposition") {
  const auto noise = testutil::gaussian(12, 0.0, 0.01, 10);
  std::vector<double> v(12);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) v[i * 3 + j] = 10.0 * static_cast<double>(j) + noise[i * 3 + j];

  // Additive model y_ij = a_i + b_j fitted by least squares with dummy columns.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(12, 6);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      x(i * 3 + j, i) = 1.0;
      if (j > 0) x(i * 3 + j, 3 + j) = 1.0;
      y(i * 3 + j) = v[static_cast<std::size_t>(i * 3 + j)];
    }
  const Eigen::VectorXd resid = y - x * x.colPivHouseholderQr().solve(y);
  const double vr = resid.squaredNorm() / 6.0;
  const double grand = y.mean();
  double vp = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double m = (y(j) + y(3 + j) + y(6 + j) + y(9 + j)) / 4.0;
    vp += 4.0 * (m - grand) * (m - grand) / 2.0;
  }

  const FisherResult r = fisher_test(v, 3);
  CHECK(std::abs(r.v_p - vp) <= 1e-10 * vp);
  CHECK(std::abs(r.v_r - vr) <= 1e-10 * vr);
  CHECK(std::abs(r.f_c - vp / vr) <= 1e-10 * (vp / vr));
  CHECK(r.f_limit == doctest::Approx(5.14325).epsilon(1e-5));  // F(2, 6) upper 5% point
  CHECK(r.seasonal);
  CHECK(r.n == 4);
  CHECK(r.p == 3);
}

TEST_CASE("fisher_test null calibration") {
  int rejected = 0;
  for (std::uint64_t s = 0; s < 1000; ++s)
    if (fisher_test(testutil::gaussian(450, 0.0, 1.0, 1000 + s), 9).seasonal) ++rejected;
  CHECK(rejected >= 30);
  CHECK(rejected <= 70);
}

TEST_CASE("fisher_test errors") {
  CHECK(kind_of([] { fisher_test(std::vector<double>(10, 1.0), 3); }) == ErrorKind::reshape);
  std::vector<double> additive;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) additive.push_back(i + 10.0 * j);
  CHECK(kind_of([&] { fisher_test(additive, 3); }) == ErrorKind::degenerate_residual);
}

TEST_CASE("fisher daily mode drops day 366") {
  const HourlySeries s = testutil::random_series(ymd(2003, 1, 1), 365 + 366, 0.0, 1.0, 12);
  const FisherResult r = fisher_test(s, FisherMode::daily);
  CHECK(r.n == 2);
  CHECK(r.p == 3285);
}
