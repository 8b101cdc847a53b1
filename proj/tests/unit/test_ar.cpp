#include <doctest.h>

#include <cmath>
#include <numeric>

#include "solarcast/ar_model.hpp"
#include "solarcast/error.hpp"
#include "solarcast/synthetic.hpp"
#include "util.hpp"

using namespace solarcast;

namespace {

double lag1_autocorrelation(const std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c0 += (x[i] - mean) * (x[i] - mean);
    if (i > 0) c1 += (x[i] - mean) * (x[i - 1] - mean);
  }
  return c1 / c0;
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

TEST_CASE("gen_ar") {
  const auto white = gen_ar(std::vector<double>{0.0}, 1.0, 100000, 1);
  CHECK(std::abs(lag1_autocorrelation(white)) < 0.02);
  const auto ar1 = gen_ar(std::vector<double>{0.7}, 1.0, 100000, 2);
  CHECK(lag1_autocorrelation(ar1) >= 0.69);
  CHECK(lag1_autocorrelation(ar1) <= 0.71);
  CHECK(gen_ar(std::vector<double>{0.5, -0.3}, 1.0, 500, 3) == gen_ar(std::vector<double>{0.5, -0.3}, 1.0, 500, 3));
  CHECK(kind_of([] { gen_ar(std::vector<double>{1.2}, 1.0, 10, 1); }) == ErrorKind::instability);
}

TEST_CASE("fit_yule_walker recovers known processes") {
  SUBCASE("AR(1)") {
    const ArModel m = fit_yule_walker(gen_ar(std::vector<double>{0.7}, 1.0, 100000, 10), 1);
    CHECK(m.phi[0] >= 0.69);
    CHECK(m.phi[0] <= 0.71);
  }
  SUBCASE("white noise") {
    CHECK(std::abs(fit_yule_walker(gen_ar(std::vector<double>{0.0}, 1.0, 100000, 11), 1).phi[0]) < 0.02);
  }
  SUBCASE("AR(2) against a direct 2x2 solve") {
    const auto x = gen_ar(std::vector<double>{0.5, -0.3}, 1.0, 100000, 12);
    const ArModel m = fit_yule_walker(x, 2);
    CHECK(std::abs(m.phi[0] - 0.5) <= 0.02);
    CHECK(std::abs(m.phi[1] + 0.3) <= 0.02);
    const auto g = autocovariance(x, 2);
    const double det = g[0] * g[0] - g[1] * g[1];
    const double phi1 = (g[1] * g[0] - g[1] * g[2]) / det;
    const double phi2 = (g[0] * g[2] - g[1] * g[1]) / det;
    CHECK(m.phi[0] == doctest::Approx(phi1).epsilon(1e-12));
    CHECK(m.phi[1] == doctest::Approx(phi2).epsilon(1e-12));
  }
  SUBCASE("p = 1 equals the lag-1 autocorrelation") {
    const auto x = gen_ar(std::vector<double>{0.4}, 2.0, 5000, 13);
    CHECK(std::abs(fit_yule_walker(x, 1).phi[0] - lag1_autocorrelation(x)) <= 1e-10);
  }
  SUBCASE("consistency loop") {
    const ArModel first = fit_yule_walker(gen_ar(std::vector<double>{0.6, 0.2}, 1.0, 100000, 14), 2);
    const ArModel again = fit_yule_walker(gen_ar(first.phi, 1.0, 100000, 15), 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(again.phi[i] - first.phi[i]) <= 0.02);
  }
  SUBCASE("errors") {
    CHECK(kind_of([] { fit_yule_walker(std::vector<double>(500, 0.4), 1); }) == ErrorKind::degenerate_series);
    CHECK(kind_of([] { fit_yule_walker(testutil::gaussian(25, 0, 1, 3), 3); }) == ErrorKind::insufficient_data);
  }
}

TEST_CASE("autocovariance uses the biased normalization") {
  const std::vector<double> x{1.0, 2.0, 4.0, 3.0};
  const double m = 2.5;
  const auto g = autocovariance(x, 1);
  CHECK(g[0] == doctest::Approx(((1 - m) * (1 - m) + (2 - m) * (2 - m) + (4 - m) * (4 - m) + (3 - m) * (3 - m)) / 4));
  CHECK(g[1] == doctest::Approx(((2 - m) * (1 - m) + (4 - m) * (2 - m) + (3 - m) * (4 - m)) / 4));
}

TEST_CASE("predict_one") {
  SUBCASE("zero coefficients give the mean") {
    const ArModel m{2, {0.0, 0.0}, 0.83, 0.2};
    CHECK(predict_one(m, std::vector<double>{0.1, 1.9}) == doctest::Approx(0.83).epsilon(1e-15));
  }
  SUBCASE("unit coefficient is persistence") {
    const ArModel m{1, {1.0}, 0.6, 0.3};
    CHECK(predict_one(m, std::vector<double>{0.2, 0.95}) == doctest::Approx(0.95).epsilon(1e-15));
  }
  SUBCASE("hand-unrolled dot product") {
    const ArModel m{3, {0.4, -0.2, 0.1}, 0.7, 0.25};
    const std::vector<double> r{0.9, 0.5, 0.8, 1.1};
    const double z = 0.4 * (1.1 - 0.7) / 0.25 - 0.2 * (0.8 - 0.7) / 0.25 + 0.1 * (0.5 - 0.7) / 0.25;
    CHECK(predict_one(m, r) == doctest::Approx(0.7 + 0.25 * z).epsilon(1e-14));
    const auto series = predict_series(m, r, 3);
    REQUIRE(series.size() == 1);
    CHECK(series[0] == doctest::Approx(predict_one(m, std::vector<double>{0.9, 0.5, 0.8})).epsilon(1e-15));
  }
  SUBCASE("short history") {
    const ArModel m{2, {0.3, 0.1}, 0.0, 1.0};
    CHECK(kind_of([&] { predict_one(m, std::vector<double>{1.0}); }) == ErrorKind::boundary);
  }
}

TEST_CASE("prediction is equivariant under affine maps of the series") {
  const auto x = gen_ar(std::vector<double>{0.5, -0.2}, 1.0, 3000, 21);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] + 7.0;
  const ArModel mx = fit_yule_walker(x, 2), my = fit_yule_walker(y, 2);
  for (std::size_t t = 10; t < 20; ++t) {
    const double px = predict_one(mx, std::span<const double>(x).subspan(0, t));
    const double py = predict_one(my, std::span<const double>(y).subspan(0, t));
    CHECK(py == doctest::Approx(3.0 * px + 7.0).epsilon(1e-12));
  }
}

TEST_CASE("is_stationary") {
  CHECK(is_stationary(std::vector<double>{0.5, -0.3}));
  CHECK(is_stationary(std::vector<double>{0.99}));
  CHECK_FALSE(is_stationary(std::vector<double>{1.0}));
  CHECK_FALSE(is_stationary(std::vector<double>{0.5, 0.6}));
  CHECK_FALSE(is_stationary(std::vector<double>{-1.2}));
}

TEST_CASE("choose_order") {
  int ones = 0;
  for (std::uint64_t s = 0; s < 20; ++s)
    if (choose_order(gen_ar(std::vector<double>{0.7}, 1.0, 5000, 100 + s)) == 1) ++ones;
  MESSAGE("AR(1) order recovered in " << ones << " of 20 trials");
  CHECK(ones >= 18);
  CHECK(choose_order(gen_ar(std::vector<double>{0.2, 0.6}, 1.0, 5000, 200)) == 2);
  CHECK(choose_order(gen_ar(std::vector<double>{0.7}, 1.0, 2000, 201), 1) == 1);
}

TEST_CASE("whiteness") {
  int white = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    if (whiteness(testutil::gaussian(10000, 0.0, 1.0, 300 + s)).white) ++white;
  MESSAGE("iid residuals judged white in " << white << " of 100 trials");
  CHECK(white >= 90);

  const WhitenessReport ar = whiteness(gen_ar(std::vector<double>{0.7}, 1.0, 10000, 5));
  CHECK_FALSE(ar.white);
  CHECK(ar.autocorrelation[0] == doctest::Approx(0.7).epsilon(0.03));
  CHECK(ar.band == doctest::Approx(1.96 / 100.0));

  const WhitenessReport c = whiteness(std::vector<double>(200, 1.0));
  CHECK(c.degenerate);
  CHECK_FALSE(c.white);
}

TEST_CASE("ar json round trip") {
  const ArModel m{2, {0.51, -0.27}, 0.84, 0.21};
  const ArModel back = ar_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.phi == m.phi);
  CHECK(back.mean == m.mean);
  CHECK(back.std == m.std);
  CHECK(back.p == 2);
}
