#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <sstream>

#include "solarcast/error.hpp"
#include "solarcast/kernels.hpp"
#include "solarcast/mlp.hpp"
#include "util.hpp"

using namespace solarcast;

namespace {

Eigen::MatrixXd random_inputs(std::size_t n, std::size_t k, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  const auto v = testutil::uniform(n * k, lo, hi, seed);
  Eigen::MatrixXd x(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i * k + j];
  return x;
}

MlpModel scaled_random(std::size_t inputs, std::size_t hidden, std::uint64_t seed, double scale) {
  MlpModel m = MlpModel::zeros(InputMask::all(inputs), hidden);
  auto p = testutil::uniform(m.parameter_count(), -scale, scale, seed);
  m.set_parameters(p);
  return m;
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

TrainingData teacher_data(const MlpModel& teacher, std::size_t n, std::uint64_t seed) {
  TrainingData d;
  d.inputs = random_inputs(n, teacher.inputs(), seed);
  d.targets = forward_batch(teacher, d.inputs);
  return d;
}

}  // namespace

TEST_CASE("forward reference cases") {
  CHECK(forward(MlpModel::zeros(InputMask::all(4), 3), std::vector<double>{1, 2, 3, 4}) == 0.0);

  MlpModel bias = MlpModel::zeros(InputMask::all(2), 3);
  bias.w2 = Eigen::VectorXd::Constant(3, 0.7);
  bias.b2 = 1.25;
  CHECK(forward(bias, std::vector<double>{0.3, -0.4}) == 1.25);

  const MlpModel m = MlpModel::random(InputMask::all(2), 3, 5);
  const double x0 = 0.3, x1 = -0.8;
  double y = m.b2;
  for (int h = 0; h < 3; ++h) y += m.w2(h) * std::tanh(m.w1(h, 0) * x0 + m.w1(h, 1) * x1 + m.b1(h));
  CHECK(forward(m, std::vector<double>{x0, x1}) == doctest::Approx(y).epsilon(1e-15));

  try {
    forward(m, std::vector<double>{1.0, 2.0, 3.0});
    FAIL("expected shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape);
  }
}

TEST_CASE("random init is bounded by the fan-in rule and seed-deterministic") {
  const MlpModel a = MlpModel::random(InputMask::all(9), 6, 42);
  const MlpModel b = MlpModel::random(InputMask::all(9), 6, 42);
  CHECK(a.parameters() == b.parameters());
  CHECK(a.w1.cwiseAbs().maxCoeff() <= 0.5 / 3.0);
  CHECK(a.w2.cwiseAbs().maxCoeff() <= 0.5 / std::sqrt(6.0));
}

TEST_CASE("forward_full applies the mask") {
  std::vector<bool> keep(18, false);
  keep[0] = keep[4] = keep[12] = true;
  const MlpModel m = MlpModel::random(InputMask(keep), 2, 9);
  const auto full = testutil::uniform(18, -1, 1, 1);
  CHECK(forward_full(m, full) == forward(m, std::vector<double>{full[0], full[4], full[12]}));
}

TEST_CASE("forward is Lipschitz-bounded") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const MlpModel m = scaled_random(5, 4, 100 + s, 1.5);
    const auto a = testutil::uniform(5, -1, 1, 200 + s);
    auto b = a;
    const auto d = testutil::uniform(5, -0.1, 0.1, 300 + s);
    double dinf = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      b[j] += d[j];
      dinf = std::max(dinf, std::abs(d[j]));
    }
    double row_max = 0.0;
    for (Eigen::Index h = 0; h < 4; ++h) row_max = std::max(row_max, m.w1.row(h).cwiseAbs().sum());
    CHECK(std::abs(forward(m, a) - forward(m, b)) <= m.w2.cwiseAbs().sum() * row_max * dinf + 1e-15);
  }
}

TEST_CASE("jacobian matches central finite differences") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t in = 2 + s % 5, hidden = s == 0 ? 5 : 1 + s % 7;
    const MlpModel m = scaled_random(in, hidden, 500 + s, 1.0);
    const Eigen::MatrixXd x = random_inputs(12, in, 600 + s);
    const Eigen::MatrixXd jac = jacobian(m, x);
    const auto p0 = m.parameters();
    const double h = 1e-6;
    for (std::size_t k = 0; k < p0.size(); ++k) {
      auto pp = p0, pm = p0;
      pp[k] += h;
      pm[k] -= h;
      MlpModel a = m, b = m;
      a.set_parameters(pp);
      b.set_parameters(pm);
      // e = y - y_hat, so d e / d w = -d y_hat / d w.
      const Eigen::VectorXd fd = -(forward_batch(a, x) - forward_batch(b, x)) / (2.0 * h);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double j = jac(i, static_cast<Eigen::Index>(k));
        CHECK(std::abs(j - fd(i)) <= 1e-5 * std::max(std::abs(j), 1e-3));
      }
    }
  }
}

TEST_CASE("jacobian structure") {
  const MlpModel m = scaled_random(4, 3, 7, 1.0);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 4);
  const Eigen::MatrixXd jz = jacobian(m, zero);
  for (Eigen::Index c = 0; c < 12; ++c) CHECK(jz.col(c).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index c = 12; c < jz.cols(); ++c) CHECK(jz.col(c).cwiseAbs().maxCoeff() > 0.0);

  Eigen::MatrixXd x = random_inputs(4, 4, 8);
  x.row(3) = x.row(1);
  const Eigen::MatrixXd j = jacobian(m, x);
  CHECK(j.row(3) == j.row(1));
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  const int saved = omp_get_max_threads();
  for (std::uint64_t s = 0; s < 6; ++s) {
    const std::size_t in = 3 + 3 * s, hidden = 2 + 3 * s, n = 97 + 50 * s;
    const MlpModel m = scaled_random(in, hidden, 900 + s, 1.0);
    const Eigen::MatrixXd x = random_inputs(n, in, 950 + s);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(testutil::uniform(n, -1, 1, 990 + s).data(),
                                                                static_cast<Eigen::Index>(n));
    const Eigen::VectorXd f_ref = forward_batch(m, x, kernels::Backend::serial);
    const Eigen::MatrixXd j_ref = jacobian(m, x, kernels::Backend::serial);
    TrainingData d{x, y};
    const Eigen::VectorXd step_ref = lm_step(m, d, 0.01, kernels::Backend::serial);
    for (int threads : {1, 2, 3, 8}) {
      omp_set_num_threads(threads);
      CHECK(forward_batch(m, x, kernels::Backend::parallel) == f_ref);
      CHECK(jacobian(m, x, kernels::Backend::parallel) == j_ref);
      CHECK(lm_step(m, d, 0.01, kernels::Backend::parallel) == step_ref);
    }
  }
  omp_set_num_threads(saved);
}

TEST_CASE("normal equations match Eigen products") {
  const std::size_t n = 40, p = 7;
  const auto jv = testutil::uniform(n * p, -1, 1, 3);
  const auto e = testutil::uniform(n, -1, 1, 4);
  std::vector<double> jtj(p * p), jte(p);
  kernels::normal_equations_serial(jv, n, p, e, jtj, jte);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> jm(
      jv.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  const Eigen::MatrixXd ref = jm.transpose() * jm;
  const Eigen::VectorXd rte = jm.transpose() * Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < p; ++a) {
    CHECK(jte[a] == doctest::Approx(rte(static_cast<Eigen::Index>(a))).epsilon(1e-13));
    for (std::size_t b = 0; b < p; ++b)
      CHECK(jtj[a * p + b] == doctest::Approx(ref(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))).epsilon(1e-13));
  }
}

TEST_CASE("huge damping gives a vanishing step") {
  const MlpModel m = scaled_random(3, 4, 11, 1.0);
  TrainingData d;
  d.inputs = random_inputs(50, 3, 12);
  d.targets = Eigen::VectorXd::Ones(50);
  CHECK(lm_step(m, d, 1e12).norm() < 1e-9);
}

TEST_CASE("teacher-student recovery") {
  const MlpModel teacher = scaled_random(2, 3, 21, 1.5);
  const TrainingData data = teacher_data(teacher, 250, 22);
  TrainerConfig cfg;
  cfg.max_epochs = 200;
  cfg.max_fail = 200;
  const TrainingResult r = train_lm(MlpModel::random(InputMask::all(2), 3, 23), data, cfg);
  CHECK(rmse(forward_batch(r.model, data.inputs), data.targets) < 1e-3);
  CHECK(r.epochs <= 200);
}

TEST_CASE("accepted steps never increase training SSE") {
  const MlpModel teacher = scaled_random(3, 4, 31, 1.5);
  TrainingData data = teacher_data(teacher, 200, 32);
  const auto noise = testutil::gaussian(200, 0.0, 0.05, 33);
  for (Eigen::Index i = 0; i < data.targets.size(); ++i) data.targets(i) += noise[static_cast<std::size_t>(i)];
  TrainerConfig cfg;
  cfg.max_epochs = 60;
  const TrainingResult r = train_lm(MlpModel::random(InputMask::all(3), 5, 34), data, cfg);
  double last = std::numeric_limits<double>::infinity();
  std::size_t accepted = 0;
  for (const TraceRow& row : r.trace) {
    if (!row.accepted) continue;
    CHECK(row.train_sse <= last);
    last = row.train_sse;
    ++accepted;
  }
  CHECK(accepted > 0);
  std::ostringstream csv;
  write_trace_csv(csv, r.trace);
  CHECK(csv.str().rfind("epoch,mu,train_sse,val_nrmse,accepted\n", 0) == 0);
}

TEST_CASE("linear target") {
  TrainingData data;
  data.inputs = random_inputs(300, 1, 41);
  data.targets = 0.5 * data.inputs.col(0);
  TrainerConfig cfg;
  cfg.max_epochs = 300;
  cfg.max_fail = 50;
  const TrainingResult r = train_lm(MlpModel::random(InputMask::all(1), 2, 42), data, cfg);
  Eigen::MatrixXd grid(101, 1);
  for (int i = 0; i <= 100; ++i) grid(i, 0) = -1.0 + 0.02 * i;
  CHECK(rmse(forward_batch(r.model, grid), 0.5 * grid.col(0)) < 1e-3);
}

TEST_CASE("hidden search on a linear target picks a small network") {
  TrainingData data;
  data.inputs = random_inputs(300, 1, 41);
  data.targets = 0.5 * data.inputs.col(0);
  TrainerConfig cfg;
  cfg.max_epochs = 100;
  const HiddenSearchResult search = search_hidden(data, InputMask::all(1), cfg, {1, 6, 1}, 3);
  for (auto [h, v] : search.scores) MESSAGE("H=" << h << " val nRMSE " << v);
  CHECK(search.scores.size() == 6);
  CHECK(search.best_hidden <= 3);
}

TEST_CASE("singleton hidden range") {
  TrainingData data;
  data.inputs = random_inputs(120, 2, 51);
  data.targets = data.inputs.col(0).array().sin();
  TrainerConfig cfg;
  cfg.max_epochs = 20;
  const HiddenSearchResult r = search_hidden(data, InputMask::all(2), cfg, {5, 5, 1}, 2);
  CHECK(r.best_hidden == 5);
  CHECK(r.best.ensemble.members.size() == 2);
}

TEST_CASE("ensemble of identical members equals one member") {
  TrainingData data;
  data.inputs = random_inputs(150, 2, 61);
  data.targets = (data.inputs.col(0).array() * data.inputs.col(1).array()).matrix();
  TrainerConfig cfg;
  cfg.max_epochs = 30;
  cfg.seed = 77;
  const EnsembleResult e = ensemble_train(data, InputMask::all(2), 3, cfg, 5, true);
  REQUIRE(e.ensemble.members.size() == 5);
  const TrainingResult single = train_lm(MlpModel::random(InputMask::all(2), 3, 77), data, cfg);
  for (const MlpModel& m : e.ensemble.members) CHECK(m.parameters() == single.model.parameters());
  const Eigen::VectorXd pe = e.ensemble.predict_batch(data.inputs), ps = forward_batch(single.model, data.inputs);
  for (Eigen::Index i = 0; i < pe.size(); ++i) CHECK(pe(i) == doctest::Approx(ps(i)).epsilon(1e-15));
}

TEST_CASE("ensemble training is deterministic and uses consecutive seeds") {
  TrainingData data;
  data.inputs = random_inputs(150, 2, 71);
  data.targets = data.inputs.col(0).array().tanh();
  TrainerConfig cfg;
  cfg.max_epochs = 15;
  cfg.seed = 5;
  const EnsembleResult a = ensemble_train(data, InputMask::all(2), 2, cfg, 3);
  const EnsembleResult b = ensemble_train(data, InputMask::all(2), 2, cfg, 3);
  CHECK(a.seeds == std::vector<std::uint64_t>{5, 6, 7});
  for (std::size_t k = 0; k < 3; ++k) CHECK(a.ensemble.members[k].parameters() == b.ensemble.members[k].parameters());
}

TEST_CASE("trainer config validation") {
  TrainerConfig cfg;
  cfg.mu_dec = 2.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.train_fraction = 0.9;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("model json round trip") {
  std::vector<bool> keep(18, true);
  keep[3] = false;
  const MlpModel m = MlpModel::random(InputMask(keep), 4, 3);
  const MlpModel back = mlp_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.parameters() == m.parameters());
  CHECK(back.mask == m.mask);
}

TEST_CASE("ann forecaster scaling, prediction and json") {
  const HourlySeries s = testutil::random_series(testutil::ymd(2010, 1, 1), 40, 0.0, 1.2, 81);
  const ExogenousPanel panel = testutil::random_panel(s, 82);
  const DesignMatrix d = build_design(s, panel);
  std::vector<bool> keep(18, false);
  keep[0] = keep[1] = keep[12] = true;
  AnnFitOptions opts;
  opts.trainer.max_epochs = 10;
  opts.hidden = {2, 2, 1};
  opts.members = 2;
  const AnnForecaster f = fit_ann(d, InputMask(keep), opts);
  CHECK(f.input_scaling.size() == 3);
  CHECK(f.traces.size() == 2);

  const std::size_t t = 50;
  const FeatureVector raw = raw_features(s, panel, t);
  std::vector<double> z;
  for (std::size_t k = 0; k < 3; ++k) z.push_back(f.input_scaling[k].apply(raw[f.mask.kept_indices()[k]]));
  const double expected = f.target_scaling.invert(f.ensemble.predict(z));
  CHECK(f.predict(raw) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(assemble_features(s, panel, f.mask, t) == std::vector<double>{raw[0], raw[1], raw[12]});

  const AnnForecaster back = ann_from_json(nlohmann::json::parse(to_json(f).dump()));
  CHECK(back.predict(raw) == f.predict(raw));
  CHECK(back.hidden == f.hidden);
}
