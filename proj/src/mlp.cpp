#include "solarcast/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <random>

namespace solarcast {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

kernels::NetView view(const MlpModel& m, std::span<const double> params) {
  return {m.inputs(), m.hidden, params};
}

std::span<const double> flat(const RowMatrix& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

double sum_squared_error(const Eigen::VectorXd& y, std::span<const double> y_hat) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double r = y(k) - y_hat[static_cast<std::size_t>(k)];
    acc += r * r;
  }
  return acc;
}

}  // namespace

// --- model ------------------------------------------------------------------

MlpModel MlpModel::zeros(InputMask mask, std::size_t hidden) {
  MlpModel m;
  m.mask = std::move(mask);
  m.hidden = hidden;
  const auto h = static_cast<Eigen::Index>(hidden);
  m.w1 = Eigen::MatrixXd::Zero(h, static_cast<Eigen::Index>(m.inputs()));
  m.b1 = Eigen::VectorXd::Zero(h);
  m.w2 = Eigen::VectorXd::Zero(h);
  return m;
}

MlpModel MlpModel::random(InputMask mask, std::size_t hidden, std::uint64_t seed) {
  MlpModel m = zeros(std::move(mask), hidden);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(m.inputs(), 1)));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden, 1)));
  for (Eigen::Index i = 0; i < m.w1.rows(); ++i)
    for (Eigen::Index j = 0; j < m.w1.cols(); ++j) m.w1(i, j) = u(rng) * s1;
  for (Eigen::Index i = 0; i < m.b1.size(); ++i) m.b1(i) = u(rng) * s1;
  for (Eigen::Index i = 0; i < m.w2.size(); ++i) m.w2(i) = u(rng) * s2;
  m.b2 = u(rng) * s2;
  return m;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (Eigen::Index i = 0; i < w1.rows(); ++i)
    for (Eigen::Index j = 0; j < w1.cols(); ++j) p.push_back(w1(i, j));
  for (Eigen::Index i = 0; i < b1.size(); ++i) p.push_back(b1(i));
  for (Eigen::Index i = 0; i < w2.size(); ++i) p.push_back(w2(i));
  p.push_back(b2);
  return p;
}

void MlpModel::set_parameters(std::span<const double> packed) {
  if (packed.size() != parameter_count()) throw Error(ErrorKind::shape, "packed parameter length mismatch");
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < w1.rows(); ++i)
    for (Eigen::Index j = 0; j < w1.cols(); ++j) w1(i, j) = packed[k++];
  for (Eigen::Index i = 0; i < b1.size(); ++i) b1(i) = packed[k++];
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2(i) = packed[k++];
  b2 = packed[k];
}

void MlpModel::validate() const {
  if (hidden < 1 || hidden > kMaxHidden) throw Error(ErrorKind::shape, "hidden width must lie in [1, 20]");
  if (inputs() == 0) throw Error(ErrorKind::empty_input, "network has no inputs");
  const auto h = static_cast<Eigen::Index>(hidden);
  if (w1.rows() != h || w1.cols() != static_cast<Eigen::Index>(inputs()) || b1.size() != h || w2.size() != h)
    throw Error(ErrorKind::shape, "weight dimensions disagree with mask and hidden width");
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !std::isfinite(b2))
    throw Error(ErrorKind::shape, "non-finite network parameter");
}

double forward(const MlpModel& m, std::span<const double> input) {
  if (input.size() != m.inputs())
    throw Error(ErrorKind::shape, "input width " + std::to_string(input.size()) + " != " +
                                      std::to_string(m.inputs()));
  double out = m.b2;
  for (Eigen::Index i = 0; i < m.w1.rows(); ++i) {
    double a = m.b1(i);
    for (Eigen::Index j = 0; j < m.w1.cols(); ++j) a += m.w1(i, j) * input[static_cast<std::size_t>(j)];
    out += m.w2(i) * std::tanh(a);
  }
  return out;
}

double forward_full(const MlpModel& m, std::span<const double> candidates) {
  const auto masked = m.mask.apply(candidates);
  return forward(m, masked);
}

TrainingData TrainingData::rows(std::size_t first, std::size_t count) const {
  return {inputs.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)),
          targets.segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count))};
}

Eigen::VectorXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& inputs, kernels::Backend backend) {
  if (static_cast<std::size_t>(inputs.cols()) != m.inputs()) throw Error(ErrorKind::shape, "batch width mismatch");
  const RowMatrix x = inputs;
  const auto params = m.parameters();
  Eigen::VectorXd out(inputs.rows());
  kernels::forward_batch(backend, view(m, params), flat(x), static_cast<std::size_t>(x.rows()),
                         {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

Eigen::MatrixXd jacobian(const MlpModel& m, const Eigen::MatrixXd& inputs, kernels::Backend backend) {
  if (static_cast<std::size_t>(inputs.cols()) != m.inputs()) throw Error(ErrorKind::shape, "batch width mismatch");
  const RowMatrix x = inputs;
  const auto params = m.parameters();
  const auto n = static_cast<std::size_t>(x.rows());
  RowMatrix jac(x.rows(), static_cast<Eigen::Index>(m.parameter_count()));
  std::vector<double> y_hat(n);
  kernels::jacobian(backend, view(m, params), flat(x), n, {jac.data(), static_cast<std::size_t>(jac.size())},
                    y_hat);
  return jac;
}

// --- training ---------------------------------------------------------------

void TrainerConfig::validate() const {
  if (!(mu0 > 0.0)) throw Error(ErrorKind::schema, "trainer.mu0 must be > 0");
  if (!(mu_dec > 0.0 && mu_dec < 1.0)) throw Error(ErrorKind::schema, "trainer.mu_dec must lie in (0, 1)");
  if (!(mu_inc > 1.0)) throw Error(ErrorKind::schema, "trainer.mu_inc must be > 1");
  if (max_fail < 1) throw Error(ErrorKind::schema, "trainer.max_fail must be >= 1");
  if (max_epochs < 1) throw Error(ErrorKind::schema, "trainer.max_epochs must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0) || !(val_fraction >= 0.0) ||
      std::abs(train_fraction + val_fraction - 1.0) > 1e-9)
    throw Error(ErrorKind::schema, "trainer fractions must be positive and sum to 1");
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "epoch,mu,train_sse,val_nrmse,accepted\n";
  for (const auto& r : trace) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", r.epoch, r.mu, r.train_sse, r.val_nrmse,
                  r.accepted ? 1 : 0);
    out << buf;
  }
}

double nrmse_fraction(const Eigen::VectorXd& measured, const Eigen::VectorXd& predicted) {
  const double den = measured.squaredNorm();
  if (!(den > 0.0)) return (measured - predicted).squaredNorm() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::sqrt((measured - predicted).squaredNorm() / den);
}

namespace {

struct NormalSystem {
  std::vector<double> jtj;
  std::vector<double> jte;
};

class LmProblem {
 public:
  LmProblem(const MlpModel& shape, const TrainingData& train, kernels::Backend backend)
      : shape_(shape), x_(train.inputs), y_(train.targets), backend_(backend),
        n_(static_cast<std::size_t>(train.targets.size())), p_(shape.parameter_count()),
        jac_(n_ * p_), y_hat_(n_), e_(n_) {}

  double sse(std::span<const double> params) {
    kernels::forward_batch(backend_, view(shape_, params), flat(x_), n_, y_hat_);
    return sum_squared_error(y_, y_hat_);
  }

  // Fills J^T J and J^T e at `params`; returns the SSE there.
  double linearize(std::span<const double> params, NormalSystem& sys) {
    kernels::jacobian(backend_, view(shape_, params), flat(x_), n_, jac_, y_hat_);
    for (std::size_t k = 0; k < n_; ++k) e_[k] = y_(static_cast<Eigen::Index>(k)) - y_hat_[k];
    sys.jtj.resize(p_ * p_);
    sys.jte.resize(p_);
    kernels::normal_equations(backend_, jac_, n_, p_, e_, sys.jtj, sys.jte);
    double acc = 0.0;
    for (double r : e_) acc += r * r;
    return acc;
  }

  std::size_t parameter_count() const noexcept { return p_; }

 private:
  const MlpModel& shape_;
  RowMatrix x_;
  Eigen::VectorXd y_;
  kernels::Backend backend_;
  std::size_t n_, p_;
  std::vector<double> jac_, y_hat_, e_;
};

// Solves (A + mu I) d = -g; false when the damped matrix is not SPD.
bool damped_solve(const NormalSystem& sys, std::size_t p, double mu, Eigen::VectorXd& delta) {
  const Eigen::Map<const RowMatrix> a(sys.jtj.data(), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  Eigen::MatrixXd m = a;
  m.diagonal().array() += mu;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::Map<const Eigen::VectorXd> g(sys.jte.data(), static_cast<Eigen::Index>(p));
  delta = -llt.solve(g);
  return delta.allFinite();
}

}  // namespace

Eigen::VectorXd lm_step(const MlpModel& m, const TrainingData& train, double mu, kernels::Backend backend) {
  m.validate();
  LmProblem problem(m, train, backend);
  NormalSystem sys;
  const auto params = m.parameters();
  problem.linearize(params, sys);
  Eigen::VectorXd delta;
  if (!damped_solve(sys, problem.parameter_count(), mu, delta))
    throw Error(ErrorKind::divergence, "damped normal matrix is not positive definite");
  return delta;
}

TrainingResult train_lm(const MlpModel& init, const TrainingData& data, const TrainerConfig& cfg) {
  cfg.validate();
  init.validate();
  if (static_cast<std::size_t>(data.inputs.cols()) != init.inputs() || data.inputs.rows() != data.targets.size())
    throw Error(ErrorKind::shape, "training data does not match the network inputs");
  const std::size_t n = data.size();
  const std::size_t n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(n))), 1, n);
  if (n == 0) throw Error(ErrorKind::empty_input, "no training samples");
  const TrainingData train = data.rows(0, n_train);
  const TrainingData val = data.rows(n_train, n - n_train);
  const bool has_val = val.size() > 0;

  LmProblem problem(init, train, cfg.backend);
  const std::size_t p = problem.parameter_count();
  std::vector<double> w = init.parameters();
  std::vector<double> trial(p);

  auto val_nrmse = [&](std::span<const double> params) {
    const TrainingData& ref = has_val ? val : train;
    MlpModel probe = init;
    probe.set_parameters(params);
    return nrmse_fraction(ref.targets, forward_batch(probe, ref.inputs, cfg.backend));
  };

  TrainingResult result;
  NormalSystem sys;
  double sse = problem.sse(w);
  if (!std::isfinite(sse)) throw DivergenceError("initial training loss is not finite", {});
  double best_val = val_nrmse(w);
  std::vector<double> best_w = w;
  double mu = cfg.mu0;
  int fails = 0;
  result.stop_reason = "max_epochs";

  int epoch = 1;
  for (; epoch <= cfg.max_epochs; ++epoch) {
    sse = problem.linearize(w, sys);
    if (!std::isfinite(sse)) throw DivergenceError("training loss became non-finite", result.trace);
    if (sse == 0.0) {
      result.stop_reason = "zero_error";
      break;
    }
    double gmax = 0.0;
    for (double g : sys.jte) gmax = std::max(gmax, std::abs(g));
    if (gmax < 1e-14) {
      result.stop_reason = "min_gradient";
      break;
    }

    bool accepted = false;
    Eigen::VectorXd delta;
    while (mu <= cfg.mu_max) {
      if (!damped_solve(sys, p, mu, delta)) {
        mu *= cfg.mu_inc;
        continue;
      }
      for (std::size_t k = 0; k < p; ++k) trial[k] = w[k] + delta(static_cast<Eigen::Index>(k));
      const double trial_sse = problem.sse(trial);
      if (std::isfinite(trial_sse) && trial_sse < sse) {
        w.swap(trial);
        sse = trial_sse;
        mu = std::max(mu * cfg.mu_dec, 1e-20);
        accepted = true;
        break;
      }
      result.trace.push_back({epoch, mu, trial_sse, best_val, false});
      mu *= cfg.mu_inc;
    }
    if (!accepted) {
      result.stop_reason = "mu_max";
      break;
    }

    const double v = val_nrmse(w);
    result.trace.push_back({epoch, mu, sse, v, true});
    if (!std::isfinite(v)) throw DivergenceError("validation error became non-finite", result.trace);
    if (v < best_val || !has_val) {
      best_val = v;
      best_w = w;
      fails = 0;
    } else if (++fails >= cfg.max_fail) {
      result.stop_reason = "max_fail";
      break;
    }
  }

  result.model = init;
  result.model.set_parameters(best_w);
  result.best_val_nrmse = best_val;
  result.epochs = std::min(epoch, cfg.max_epochs);
  return result;
}

// --- ensembles --------------------------------------------------------------

double EnsembleModel::predict(std::span<const double> input) const {
  if (members.empty()) throw Error(ErrorKind::empty_input, "empty ensemble");
  double acc = 0.0;
  for (const auto& m : members) acc += forward(m, input);
  return acc / static_cast<double>(members.size());
}

Eigen::VectorXd EnsembleModel::predict_batch(const Eigen::MatrixXd& inputs) const {
  if (members.empty()) throw Error(ErrorKind::empty_input, "empty ensemble");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(inputs.rows());
  for (const auto& m : members) acc += forward_batch(m, inputs);
  return acc / static_cast<double>(members.size());
}

namespace {

struct Job {
  std::size_t hidden = 0;
  std::uint64_t seed = 0;
  TrainingResult result;
  std::uint64_t used_seed = 0;
  std::exception_ptr error;
};

constexpr int kMaxRetries = 3;

void run_job(Job& job, const TrainingData& data, const InputMask& mask, const TrainerConfig& cfg) {
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    const std::uint64_t seed = job.seed + static_cast<std::uint64_t>(attempt) * 1000003ULL;
    try {
      job.result = train_lm(MlpModel::random(mask, job.hidden, seed), data, cfg);
      job.used_seed = seed;
      job.error = nullptr;
      return;
    } catch (const DivergenceError&) {
      job.error = std::current_exception();
    } catch (...) {
      job.error = std::current_exception();
      return;
    }
  }
}

void run_jobs(std::vector<Job>& jobs, const TrainingData& data, const InputMask& mask, const TrainerConfig& cfg) {
  // Members train concurrently; kernels inside a job then run single-threaded.
  TrainerConfig inner = cfg;
  if (jobs.size() > 1) inner.backend = kernels::Backend::serial;
  const auto count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < count; ++k) run_job(jobs[static_cast<std::size_t>(k)], data, mask, inner);
  for (const auto& j : jobs)
    if (j.error) std::rethrow_exception(j.error);
}

EnsembleResult collect(std::vector<Job>::const_iterator first, std::size_t n, const TrainingData& data,
                       const TrainerConfig& cfg) {
  EnsembleResult r;
  for (std::size_t k = 0; k < n; ++k, ++first) {
    r.ensemble.members.push_back(first->result.model);
    r.member_val_nrmse.push_back(first->result.best_val_nrmse);
    r.seeds.push_back(first->used_seed);
    r.traces.push_back(first->result.trace);
  }
  const std::size_t total = data.size();
  const std::size_t n_train =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(total))),
                              1, total);
  const TrainingData val = n_train < total ? data.rows(n_train, total - n_train) : data;
  r.val_nrmse = nrmse_fraction(val.targets, r.ensemble.predict_batch(val.inputs));
  return r;
}

}  // namespace

EnsembleResult ensemble_train(const TrainingData& data, const InputMask& mask, std::size_t hidden,
                              const TrainerConfig& cfg, std::size_t n, bool same_seed) {
  if (n == 0) throw Error(ErrorKind::empty_input, "ensemble needs at least one member");
  std::vector<Job> jobs(n);
  for (std::size_t k = 0; k < n; ++k) {
    jobs[k].hidden = hidden;
    jobs[k].seed = same_seed ? cfg.seed : cfg.seed + k;
  }
  run_jobs(jobs, data, mask, cfg);
  return collect(jobs.cbegin(), n, data, cfg);
}

HiddenSearchResult search_hidden(const TrainingData& data, const InputMask& mask, const TrainerConfig& cfg,
                                 const HiddenRange& range, std::size_t members) {
  if (range.lo < 1 || range.hi > kMaxHidden || range.lo > range.hi || range.step < 1)
    throw Error(ErrorKind::schema, "hidden range must satisfy 1 <= lo <= hi <= 20, step >= 1");
  if (members == 0) throw Error(ErrorKind::empty_input, "ensemble needs at least one member");
  std::vector<std::size_t> widths;
  for (std::size_t h = range.lo; h <= range.hi; h += range.step) widths.push_back(h);
  std::vector<Job> jobs;
  for (std::size_t h : widths) {
    for (std::size_t k = 0; k < members; ++k) {
      Job j;
      j.hidden = h;
      j.seed = cfg.seed + k;
      jobs.push_back(std::move(j));
    }
  }
  run_jobs(jobs, data, mask, cfg);

  HiddenSearchResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < widths.size(); ++w) {
    EnsembleResult r = collect(jobs.cbegin() + static_cast<std::ptrdiff_t>(w * members), members, data, cfg);
    out.scores.emplace_back(widths[w], r.val_nrmse);
    if (r.val_nrmse < best) {
      best = r.val_nrmse;
      out.best_hidden = widths[w];
      out.best = std::move(r);
    }
  }
  return out;
}

// --- forecaster -------------------------------------------------------------

std::vector<double> assemble_features(const HourlySeries& csi_star, const ExogenousPanel& panel,
                                      const InputMask& mask, std::size_t t) {
  const FeatureVector raw = raw_features(csi_star, panel, t);
  return mask.apply(raw);
}

double AnnForecaster::predict(const FeatureVector& raw) const {
  std::vector<double> x = mask.apply(raw);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = input_scaling[k].apply(x[k]);
  return target_scaling.invert(ensemble.predict(x));
}

AnnForecaster fit_ann(const DesignMatrix& design, const InputMask& mask, const AnnFitOptions& opts) {
  const InputMask checked = apply_mask(mask, static_cast<std::size_t>(design.raw.cols()));
  const auto kept = checked.kept_indices();
  const Eigen::Index n = design.raw.rows();

  AnnForecaster f;
  f.mask = checked;
  TrainingData data;
  data.inputs.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const Eigen::VectorXd col = design.raw.col(static_cast<Eigen::Index>(kept[c]));
    const AffineMap map = fit_interval({col.data(), static_cast<std::size_t>(col.size())}, opts.lo, opts.hi);
    f.input_scaling.push_back(map);
    data.inputs.col(static_cast<Eigen::Index>(c)) = (col.array() * map.scale + map.offset).matrix();
  }
  f.target_scaling =
      fit_interval({design.target.data(), static_cast<std::size_t>(design.target.size())}, opts.lo, opts.hi);
  data.targets = (design.target.array() * f.target_scaling.scale + f.target_scaling.offset).matrix();

  // The network sees only the kept columns.
  const InputMask dense = InputMask::all(kept.size());
  HiddenSearchResult search = search_hidden(data, dense, opts.trainer, opts.hidden, opts.members);
  f.ensemble = std::move(search.best.ensemble);
  for (auto& m : f.ensemble.members) m.mask = dense;
  f.hidden = search.best_hidden;
  f.val_nrmse = search.best.val_nrmse;
  f.traces = std::move(search.best.traces);
  return f;
}

// --- serialization ----------------------------------------------------------

nlohmann::json to_json(const MlpModel& m) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "mlp";
  j["inputs"] = m.inputs();
  j["hidden"] = m.hidden;
  j["mask"] = m.mask.bits();
  nlohmann::json w1 = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.w1.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.w1.cols()));
    for (Eigen::Index c = 0; c < m.w1.cols(); ++c) row[static_cast<std::size_t>(c)] = m.w1(i, c);
    w1.push_back(row);
  }
  j["w1"] = w1;
  j["b1"] = std::vector<double>(m.b1.data(), m.b1.data() + m.b1.size());
  j["w2"] = std::vector<double>(m.w2.data(), m.w2.data() + m.w2.size());
  j["b2"] = m.b2;
  return j;
}

MlpModel mlp_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != 1 || j.at("kind").get<std::string>() != "mlp")
    throw Error(ErrorKind::schema, "unsupported mlp model document");
  MlpModel m = MlpModel::zeros(InputMask(j.at("mask").get<std::vector<bool>>()), j.at("hidden").get<std::size_t>());
  if (j.at("inputs").get<std::size_t>() != m.inputs()) throw Error(ErrorKind::schema, "mlp.inputs disagrees with mask");
  const auto w1 = j.at("w1").get<std::vector<std::vector<double>>>();
  if (w1.size() != m.hidden) throw Error(ErrorKind::schema, "mlp.w1 row count");
  for (std::size_t i = 0; i < w1.size(); ++i) {
    if (w1[i].size() != m.inputs()) throw Error(ErrorKind::schema, "mlp.w1 column count");
    for (std::size_t c = 0; c < w1[i].size(); ++c)
      m.w1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = w1[i][c];
  }
  const auto b1 = j.at("b1").get<std::vector<double>>();
  const auto w2 = j.at("w2").get<std::vector<double>>();
  if (b1.size() != m.hidden || w2.size() != m.hidden) throw Error(ErrorKind::schema, "mlp bias/output sizes");
  m.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(), static_cast<Eigen::Index>(b1.size()));
  m.w2 = Eigen::Map<const Eigen::VectorXd>(w2.data(), static_cast<Eigen::Index>(w2.size()));
  m.b2 = j.at("b2").get<double>();
  m.validate();
  return m;
}

nlohmann::json to_json(const AnnForecaster& f) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "ann_forecaster";
  j["mask"] = f.mask.bits();
  if (f.mask.size() == kFeatureCount) j["architecture"] = architecture_string(f.mask);
  j["hidden"] = f.hidden;
  j["val_nrmse"] = f.val_nrmse;
  nlohmann::json scaling = nlohmann::json::array();
  for (const auto& s : f.input_scaling) scaling.push_back({s.scale, s.offset});
  j["input_scaling"] = scaling;
  j["target_scaling"] = {f.target_scaling.scale, f.target_scaling.offset};
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : f.ensemble.members) members.push_back(to_json(m));
  j["members"] = members;
  return j;
}

AnnForecaster ann_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != 1 || j.at("kind").get<std::string>() != "ann_forecaster")
    throw Error(ErrorKind::schema, "unsupported ann forecaster document");
  AnnForecaster f;
  f.mask = InputMask(j.at("mask").get<std::vector<bool>>());
  f.hidden = j.at("hidden").get<std::size_t>();
  f.val_nrmse = j.at("val_nrmse").get<double>();
  for (const auto& s : j.at("input_scaling")) f.input_scaling.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  const auto& t = j.at("target_scaling");
  f.target_scaling = {t.at(0).get<double>(), t.at(1).get<double>()};
  for (const auto& m : j.at("members")) f.ensemble.members.push_back(mlp_from_json(m));
  if (f.input_scaling.size() != f.mask.width()) throw Error(ErrorKind::schema, "input_scaling width mismatch");
  return f;
}

}  // namespace solarcast
