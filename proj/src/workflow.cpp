#include "solarcast/workflow.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <type_traits>

#include "solarcast/error.hpp"

namespace solarcast {

namespace {

// Reads one JSON object, tracking consumed keys so leftovers can be rejected.
class FieldReader {
 public:
  FieldReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorKind::schema, label() + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  void read(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    out = convert<T>(j_.at(key), field(key));
  }

  const nlohmann::json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  FieldReader child(const char* key) {
    seen_.insert(key);
    return FieldReader(j_.at(key), field(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw Error(ErrorKind::schema, "unknown field " + field(k.c_str()));
  }

  template <class T>
  static T convert(const nlohmann::json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw Error(ErrorKind::schema, where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw Error(ErrorKind::schema, where + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
          throw Error(ErrorKind::schema, where + ": expected a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw Error(ErrorKind::schema, where + ": expected a number");
      return v.get<T>();
    } else {
      if (!v.is_string()) throw Error(ErrorKind::schema, where + ": expected a string");
      return v.get<T>();
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_trainer(FieldReader r, TrainerConfig& t) {
  r.read("mu0", t.mu0);
  r.read("mu_dec", t.mu_dec);
  r.read("mu_inc", t.mu_inc);
  r.read("mu_max", t.mu_max);
  r.read("max_fail", t.max_fail);
  r.read("max_epochs", t.max_epochs);
  r.read("train_fraction", t.train_fraction);
  r.read("val_fraction", t.val_fraction);
  r.finish();
}

void read_regime(FieldReader r, RegimeConfig& g) {
  r.read("p_sunny_to_cloudy", g.p_sunny_to_cloudy);
  r.read("p_cloudy_to_sunny", g.p_cloudy_to_sunny);
  r.read("start_cloudy", g.start_cloudy);
  r.read("winter_cloudiness", g.winter_cloudiness);
  r.read("sunny_mean", g.sunny_mean);
  r.read("sunny_phi", g.sunny_phi);
  r.read("sunny_sigma", g.sunny_sigma);
  r.read("cover_mean", g.cover_mean);
  r.read("cover_phi", g.cover_phi);
  r.read("cover_sigma", g.cover_sigma);
  r.read("cloud_depth", g.cloud_depth);
  r.read("cloudy_sigma", g.cloudy_sigma);
  r.read("nwp_sigma", g.nwp_sigma);
  r.read("nwp_phi", g.nwp_phi);
  r.read("false_alarm_start", g.false_alarm_start);
  r.read("false_alarm_stop", g.false_alarm_stop);
  r.read("false_alarm_octas", g.false_alarm_octas);
  r.read("haze_amplitude", g.haze_amplitude);
  r.finish();
}

void read_noise(FieldReader r, ForecastNoise& n) {
  r.read("nebulosity_sigma", n.nebulosity_sigma);
  r.read("nebulosity_phi", n.nebulosity_phi);
  r.read("quantize_octas", n.quantize_octas);
  r.read("pressure_sigma", n.pressure_sigma);
  r.read("temperature_sigma", n.temperature_sigma);
  r.read("rain_sigma", n.rain_sigma);
  r.finish();
}

void read_radiation(FieldReader r, SynthConfig& s) {
  r.read("a0", s.a0);
  r.read("b0", s.b0);
  r.read("envelope_drift", s.envelope_drift);
  r.read("solstice_day", s.solstice_day);
  if (r.has("cloud")) {
    FieldReader c = r.child("cloud");
    c.read("p_clear_to_cloudy", s.cloud.p_clear_to_cloudy);
    c.read("p_cloudy_to_clear", s.cloud.p_cloudy_to_clear);
    c.read("beta_alpha", s.cloud.beta_alpha);
    c.read("beta_beta", s.cloud.beta_beta);
    c.read("start_cloudy", s.cloud.start_cloudy);
    c.finish();
  }
  if (r.has("noise")) read_noise(r.child("noise"), s.noise);
  r.finish();
}

// Mask over the 18 candidates keeping only significant endogenous lags.
InputMask endogenous_selection(const DesignMatrix& d, double threshold) {
  const DesignMatrix sub = design_from_columns(d.raw.leftCols(static_cast<Eigen::Index>(kEndogenousLags)), d.target);
  const SelectionReport r = fit_ols(sub, threshold);
  std::vector<bool> bits(kFeatureCount, false);
  for (std::size_t j = 0; j < kEndogenousLags; ++j) bits[j] = r.mask[j];
  return InputMask(std::move(bits));
}

AnnFitOptions ann_options(const RunConfig& cfg, std::uint32_t component) {
  AnnFitOptions o;
  o.trainer = cfg.trainer;
  o.trainer.seed = derive_seed(cfg.seed, component);
  o.hidden = cfg.h_range;
  o.members = cfg.members;
  return o;
}

std::size_t whole_days(std::size_t slots) { return slots / SeriesLayout::hours_per_day; }

nlohmann::json fisher_json(const FisherResult& f) {
  return {{"f_c", f.f_c}, {"f_limit", f.f_limit}, {"v_p", f.v_p}, {"v_r", f.v_r},
          {"p", f.p},     {"n", f.n},             {"seasonal", f.seasonal}};
}

}  // namespace

void RunConfig::validate() const {
  site.validate();
  solis.validate();
  trainer.validate();
  if (train_years < 1) throw Error(ErrorKind::schema, "split.train_years must be >= 1");
  if (p_max < 1) throw Error(ErrorKind::schema, "model.p_max must be >= 1");
  if (h_range.lo < 1 || h_range.hi > kMaxHidden || h_range.lo > h_range.hi || h_range.step < 1)
    throw Error(ErrorKind::schema, "model.h_range must satisfy 1 <= lo <= hi <= 20 and step >= 1");
  if (members < 1) throw Error(ErrorKind::schema, "model.members must be >= 1");
  if (!(selection_threshold > 0.0)) throw Error(ErrorKind::schema, "model.selection_threshold must be > 0");
  if (!(max_missing_fraction > 0.0 && max_missing_fraction <= 1.0))
    throw Error(ErrorKind::schema, "data.max_missing_fraction must lie in (0, 1]");
  if (synth.kind != "regime" && synth.kind != "radiation")
    throw Error(ErrorKind::schema, "synth.kind must be \"regime\" or \"radiation\"");
  if (synth.years < 1) throw Error(ErrorKind::schema, "synth.years must be >= 1");
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  FieldReader root(j, "");
  int version = 0;
  if (!root.has("schema_version")) throw Error(ErrorKind::schema, "schema_version: required");
  root.read("schema_version", version);
  if (version != kRunConfigSchema)
    throw Error(ErrorKind::schema, "schema_version: unsupported value " + std::to_string(version));
  root.read("seed", c.seed);

  if (root.has("site")) {
    FieldReader s = root.child("site");
    s.read("latitude", c.site.latitude);
    s.read("longitude", c.site.longitude);
    s.read("altitude", c.site.altitude);
    s.finish();
  }
  if (root.has("solis")) {
    const nlohmann::json& v = root.raw("solis");
    if (v.is_string()) {
      if (v.get<std::string>() != "fit") throw Error(ErrorKind::schema, "solis: expected \"fit\" or an object");
      c.fit_solis = true;
    } else {
      FieldReader s(v, "solis");
      s.read("tau", c.solis.tau);
      s.read("b", c.solis.b);
      s.finish();
    }
  }
  if (root.has("data")) {
    FieldReader d = root.child("data");
    d.read("input", c.input);
    std::string basis = "solar";
    d.read("basis", basis);
    if (basis == "utc")
      c.basis = TimeBasis::utc;
    else if (basis != "solar")
      throw Error(ErrorKind::schema, "data.basis: expected \"solar\" or \"utc\"");
    d.read("max_missing_fraction", c.max_missing_fraction);
    d.finish();
  }
  if (root.has("split")) {
    FieldReader s = root.child("split");
    s.read("train_years", c.train_years);
    s.finish();
  }
  if (root.has("model")) {
    FieldReader m = root.child("model");
    m.read("p_max", c.p_max);
    m.read("members", c.members);
    m.read("selection_threshold", c.selection_threshold);
    m.read("min_rows", c.min_rows);
    if (m.has("h_range")) {
      const nlohmann::json& h = m.raw("h_range");
      const std::string where = m.field("h_range");
      if (!h.is_array() || h.size() < 2 || h.size() > 3)
        throw Error(ErrorKind::schema, where + ": expected [lo, hi] or [lo, hi, step]");
      c.h_range.lo = FieldReader::convert<std::size_t>(h[0], where + "[0]");
      c.h_range.hi = FieldReader::convert<std::size_t>(h[1], where + "[1]");
      c.h_range.step = h.size() == 3 ? FieldReader::convert<std::size_t>(h[2], where + "[2]") : 1;
    }
    if (m.has("trainer")) read_trainer(m.child("trainer"), c.trainer);
    m.finish();
  }
  if (root.has("output")) {
    FieldReader o = root.child("output");
    o.read("dir", c.output);
    o.read("models", c.models);
    o.finish();
  }
  if (root.has("synth")) {
    FieldReader s = root.child("synth");
    s.read("kind", c.synth.kind);
    s.read("years", c.synth.years);
    s.read("start_year", c.synth.regime.start_year);
    c.synth.radiation.start_year = c.synth.regime.start_year;
    if (s.has("regime")) read_regime(s.child("regime"), c.synth.regime);
    if (s.has("radiation")) read_radiation(s.child("radiation"), c.synth.radiation);
    s.finish();
  }
  root.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw;
    throw Error(ErrorKind::schema, std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["schema_version"] = kRunConfigSchema;
  j["seed"] = c.seed;
  j["site"] = {{"latitude", c.site.latitude}, {"longitude", c.site.longitude}, {"altitude", c.site.altitude}};
  if (c.fit_solis)
    j["solis"] = "fit";
  else
    j["solis"] = {{"tau", c.solis.tau}, {"b", c.solis.b}};
  j["data"] = {{"input", c.input},
               {"basis", c.basis == TimeBasis::utc ? "utc" : "solar"},
               {"max_missing_fraction", c.max_missing_fraction}};
  j["split"] = {{"train_years", c.train_years}};
  j["model"] = {{"p_max", c.p_max},
                {"h_range", {c.h_range.lo, c.h_range.hi, c.h_range.step}},
                {"members", c.members},
                {"selection_threshold", c.selection_threshold},
                {"min_rows", c.min_rows},
                {"trainer",
                 {{"mu0", c.trainer.mu0},
                  {"mu_dec", c.trainer.mu_dec},
                  {"mu_inc", c.trainer.mu_inc},
                  {"mu_max", c.trainer.mu_max},
                  {"max_fail", c.trainer.max_fail},
                  {"max_epochs", c.trainer.max_epochs},
                  {"train_fraction", c.trainer.train_fraction},
                  {"val_fraction", c.trainer.val_fraction}}}};
  j["output"] = {{"dir", c.output}, {"models", c.models}};
  j["synth"] = {{"kind", c.synth.kind}, {"years", c.synth.years}, {"start_year", c.synth.regime.start_year}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema, "config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t component) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), component};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Prepared prepare(const Dataset& raw, const RunConfig& cfg) {
  cfg.validate();
  raw.validate();
  Prepared p;
  p.data = clean_missing(raw, cfg.max_missing_fraction);
  const auto [train, test] = split_train_test(p.data, cfg.train_years);
  p.split = train.ghi.size();
  SolisParams solis = cfg.solis;
  if (cfg.fit_solis) {
    p.solis_fit = fit_solis(train.ghi, cfg.site);
    solis = p.solis_fit->params;
  }
  p.pipeline = fit_pipeline(train.ghi, cfg.site, solis);
  p.csi = to_csi(p.data.ghi, p.pipeline);
  p.csi_star = to_csi_star(p.data.ghi, p.pipeline);
  return p;
}

std::vector<StationarityRow> stationarity_rows(const Prepared& p) {
  std::vector<StationarityRow> rows;
  const std::pair<const char*, const HourlySeries*> series[] = {
      {"raw", &p.data.ghi}, {"csi", &p.csi}, {"csi_star", &p.csi_star}};
  for (const auto& [name, s] : series) {
    StationarityRow r;
    r.series = name;
    r.vc = variation_coefficient(s->values());
    r.daily = fisher_test(*s, FisherMode::daily);
    r.yearly = fisher_test(*s, FisherMode::yearly);
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json stationarity_report(const Prepared& p) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["solis"] = {{"tau", p.pipeline.solis.tau}, {"b", p.pipeline.solis.b}};
  if (p.solis_fit) j["solis_fit"] = {{"nrmse", p.solis_fit->nrmse}, {"clear_days", p.solis_fit->clear_days}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : stationarity_rows(p)) {
    nlohmann::json o;
    o["series"] = r.series;
    o["vc"] = r.vc.undefined ? nlohmann::json(nullptr) : nlohmann::json(r.vc.vc);
    o["fisher_daily"] = fisher_json(r.daily);
    o["fisher_yearly"] = fisher_json(r.yearly);
    o["stationary"] = !r.daily.seasonal && !r.yearly.seasonal;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

TrainedModels train_models(const Prepared& p, const RunConfig& cfg) {
  TrainedModels m;
  m.pipeline = p.pipeline;
  const std::size_t days = whole_days(p.split);
  const HourlySeries train = p.csi_star.slice_days(0, days);
  const ExogenousPanel panel = p.data.panel.slice_days(0, days);

  const std::size_t order = choose_order(train.values(), cfg.p_max);
  m.ar = fit_yule_walker(train.values(), order);

  const DesignMatrix design = build_design(train, panel, {cfg.min_rows});
  m.selection = fit_ols(design, cfg.selection_threshold);
  m.ann = fit_ann(design, m.selection.mask, ann_options(cfg, 21));

  // Re-forecast the training years with the deployed hybrid to size CI*.
  HybridForecaster h(m.ar, m.ann, m.pipeline);
  const auto steps = h.run(train, panel, h.first_origin() + 1, train.size());
  std::vector<double> residual(train.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& s : steps) residual[s.target] = train[s.target] - s.csi_star;
  m.confidence = build_confidence(train.with_values(std::move(residual)));
  return m;
}

nlohmann::json pipeline_to_json(const StationarityPipeline& p) {
  return {{"schema_version", 1},
          {"site", {{"latitude", p.geo.latitude}, {"longitude", p.geo.longitude}, {"altitude", p.geo.altitude}}},
          {"solis", {{"tau", p.solis.tau}, {"b", p.solis.b}}},
          {"ma_half_width", p.ma_half_width},
          {"years_averaged", p.table.years_averaged},
          {"periodic_table", p.table.coefficients}};
}

StationarityPipeline pipeline_from_json(const nlohmann::json& j) {
  StationarityPipeline p;
  try {
    const auto& site = j.at("site");
    p.geo = {site.at("latitude").get<double>(), site.at("longitude").get<double>(), site.at("altitude").get<double>()};
    p.solis = {j.at("solis").at("tau").get<double>(), j.at("solis").at("b").get<double>()};
    p.ma_half_width = j.at("ma_half_width").get<int>();
    p.table.years_averaged = j.at("years_averaged").get<int>();
    p.table.coefficients = j.at("periodic_table").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema, std::string("pipeline document: ") + e.what());
  }
  p.table.validate();
  return p;
}

std::vector<IntervalForecast> forecast_test(const Prepared& p, const TrainedModels& m) {
  const HourlySeries csi_star = to_csi_star(p.data.ghi, m.pipeline);
  HybridForecaster h(m.ar, m.ann, m.pipeline);
  const auto steps = h.run(csi_star, p.data.panel, p.split, csi_star.size());
  std::vector<IntervalForecast> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(forecast_with_interval(s, csi_star, m.pipeline, m.confidence));
  return out;
}

Evaluation evaluate(const Prepared& p, const RunConfig& cfg) {
  Evaluation e;
  const TrainedModels m = train_models(p, cfg);
  const std::size_t n = p.data.ghi.size();
  for (std::size_t t = p.split; t < n; ++t) {
    e.targets.push_back(t);
    e.measured.push_back(p.data.ghi[t]);
  }

  const std::size_t days = whole_days(p.split);
  const ExogenousPanel panel_train = p.data.panel.slice_days(0, days);
  StationarityPipeline csi_only = p.pipeline;
  csi_only.table = PeriodicTable::ones();

  std::vector<ModelForecast> rows;
  {
    ModelForecast f{"persistence", {}};
    for (std::size_t t : e.targets) f.predicted.push_back(p.data.ghi[t - 1]);
    rows.push_back(std::move(f));
  }
  {
    ModelForecast f{"AR+PC", {}};
    for (std::size_t t : e.targets)
      f.predicted.push_back(predict_one(m.ar, p.csi_star.values().subspan(t - m.ar.p, m.ar.p)) *
                            p.pipeline.scale(p.csi_star, t));
    rows.push_back(std::move(f));
  }

  struct Variant {
    const char* name;
    const HourlySeries* series;
    const StationarityPipeline* inverse;
    bool exogenous;
    std::uint32_t component;
  };
  const Variant variants[] = {{"ANN", &p.csi, &csi_only, false, 22},
                              {"ANN+PC", &p.csi_star, &p.pipeline, false, 23},
                              {"ANN+exo", &p.csi, &csi_only, true, 24}};
  nlohmann::json variant_info = nlohmann::json::object();
  for (const auto& v : variants) {
    const HourlySeries train = v.series->slice_days(0, days);
    const DesignMatrix design = build_design(train, panel_train, {cfg.min_rows});
    const InputMask mask =
        v.exogenous ? fit_ols(design, cfg.selection_threshold).mask : endogenous_selection(design, cfg.selection_threshold);
    const AnnForecaster ann = fit_ann(design, mask, ann_options(cfg, v.component));
    ModelForecast f{v.name, {}};
    for (std::size_t t : e.targets)
      f.predicted.push_back(ann.predict(raw_features(*v.series, p.data.panel, t - 1)) * v.inverse->scale(*v.series, t));
    variant_info[v.name] = {{"architecture", architecture_string(ann.mask)}, {"hidden", ann.hidden}};
    rows.push_back(std::move(f));
  }
  {
    ModelForecast f{"ANN+exo+PC", {}};
    for (std::size_t t : e.targets)
      f.predicted.push_back(m.ann.predict(raw_features(p.csi_star, p.data.panel, t - 1)) * p.pipeline.scale(p.csi_star, t));
    variant_info["ANN+exo+PC"] = {{"architecture", architecture_string(m.ann.mask)}, {"hidden", m.ann.hidden}};
    rows.push_back(std::move(f));
  }

  e.hybrid = forecast_test(p, m);
  std::vector<bool> chose_ar;
  std::size_t covered = 0;
  {
    ModelForecast f{"hybrid", {}};
    for (std::size_t k = 0; k < e.hybrid.size(); ++k) {
      const auto& h = e.hybrid[k];
      f.predicted.push_back(h.step.whm2);
      chose_ar.push_back(h.step.chosen == Predictor::ar);
      if (e.measured[k] >= h.lower && e.measured[k] <= h.upper) ++covered;
    }
    rows.push_back(std::move(f));
  }

  e.report = compare_models(p.data.ghi, e.targets, e.measured, rows);
  e.report.has_usage = true;
  e.report.usage = usage_breakdown(p.data.ghi, e.targets, chose_ar);

  double best_standalone = std::numeric_limits<double>::infinity(), persistence = 0.0, hybrid = 0.0;
  for (const auto& r : e.report.rows) {
    if (r.model == "persistence")
      persistence = r.annual;
    else if (r.model == "hybrid")
      hybrid = r.annual;
    else if (r.model == "AR+PC" || r.model == "ANN+exo+PC")
      best_standalone = std::min(best_standalone, r.annual);
  }

  nlohmann::json s;
  s["test_samples"] = e.targets.size();
  s["ar"] = {{"order", m.ar.p}, {"phi", m.ar.phi}};
  s["selection"] = {{"architecture", architecture_string(m.selection.mask)}, {"threshold", m.selection.threshold}};
  s["ann"] = variant_info;
  s["hybrid_usage"] = {{"ar", e.report.usage.ar_annual}, {"ann", e.report.usage.ann_annual}};
  s["interval_coverage"] = e.targets.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(e.targets.size());
  s["ordering"] = {{"persistence", persistence},
                   {"best_standalone", best_standalone},
                   {"hybrid", hybrid},
                   {"holds", hybrid < best_standalone && best_standalone < persistence}};
  e.summary = s;
  return e;
}

nlohmann::json evaluation_json(const Evaluation& e) {
  nlohmann::json j = to_json(e.report);
  j["summary"] = e.summary;
  return j;
}

}  // namespace solarcast
