// solarcast: batch driver for synth / preprocess / train / forecast / evaluate.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "solarcast/error.hpp"
#include "solarcast/workflow.hpp"

namespace fs = std::filesystem;
using namespace solarcast;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string input;
  std::string models;
};

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? config_from_json({{"schema_version", kRunConfigSchema}}) : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.input.empty()) cfg.input = o.input;
  if (!o.models.empty()) cfg.models = o.models;
  if (cfg.models.empty()) cfg.models = cfg.output;
  return cfg;
}

void require_file(const std::string& path, const char* field) {
  if (path.empty()) throw Error(ErrorKind::schema, std::string(field) + ": required");
  if (!fs::is_regular_file(path)) throw Error(ErrorKind::io, std::string(field) + ": no such file " + path);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) { open_out(path) << j.dump(2) << '\n'; }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::schema, path.string() + ": " + e.what());
  }
}

Dataset load_input(const RunConfig& cfg) {
  require_file(cfg.input, "data.input");
  CsvSchema schema;
  schema.basis = cfg.basis;
  return load_series(cfg.input, schema, cfg.site);
}

fs::path output_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.output);
  return cfg.output;
}

void cmd_synth(const RunConfig& cfg) {
  const fs::path dir = output_dir(cfg);
  const std::uint64_t seed = derive_seed(cfg.seed, 1);
  if (cfg.synth.kind == "radiation") {
    SynthConfig s = cfg.synth.radiation;
    s.seed = seed;
    const RadiationSample sample = gen_radiation(s, cfg.synth.years);
    const DerivedColumn extra[] = {{"attenuation", &sample.attenuation}};
    save_series(dir / "dataset.csv", sample.data, extra);
  } else {
    RegimeConfig r = cfg.synth.regime;
    r.site = cfg.site;
    r.solis = cfg.solis;
    r.seed = seed;
    const RegimeSample sample = gen_regime_switch(r, cfg.synth.years);
    std::vector<double> labels(sample.cloudy.begin(), sample.cloudy.end());
    const HourlySeries label_series = sample.csi.with_values(std::move(labels));
    const DerivedColumn extra[] = {{"csi_true", &sample.csi}, {"cloudy", &label_series}};
    save_series(dir / "dataset.csv", sample.data, extra);
  }
  std::cout << "wrote " << (dir / "dataset.csv").string() << '\n';
}

void cmd_preprocess(const RunConfig& cfg) {
  const Prepared p = prepare(load_input(cfg), cfg);
  const fs::path dir = output_dir(cfg);
  const DerivedColumn extra[] = {{"csi", &p.csi}, {"csi_star", &p.csi_star}};
  save_series(dir / "csi_star.csv", p.data, extra);
  {
    auto out = open_out(dir / "periodic_table.csv");
    write_periodic_table(out, p.pipeline.table);
  }
  write_json(dir / "pipeline.json", pipeline_to_json(p.pipeline));
  const nlohmann::json report = stationarity_report(p);
  write_json(dir / "stationarity_report.json", report);
  auto csv = open_out(dir / "stationarity_report.csv");
  csv << "series,vc,fc_daily,flimit_daily,fc_yearly,flimit_yearly,stationary\n";
  for (const auto& r : stationarity_rows(p)) {
    csv << r.series << ',' << (r.vc.undefined ? "" : format_number(r.vc.vc)) << ',' << format_number(r.daily.f_c)
        << ',' << format_number(r.daily.f_limit) << ',' << format_number(r.yearly.f_c) << ','
        << format_number(r.yearly.f_limit) << ',' << (!r.daily.seasonal && !r.yearly.seasonal ? 1 : 0) << '\n';
  }
  std::cout << report["rows"].dump() << '\n';
}

void cmd_train(const RunConfig& cfg) {
  const Prepared p = prepare(load_input(cfg), cfg);
  const TrainedModels m = train_models(p, cfg);
  const fs::path dir = output_dir(cfg);
  write_json(dir / "pipeline.json", pipeline_to_json(m.pipeline));
  write_json(dir / "ar_model.json", to_json(m.ar));
  write_json(dir / "selection.json", to_json(m.selection));
  write_json(dir / "ann_model.json", to_json(m.ann));
  {
    auto out = open_out(dir / "confidence.csv");
    write_confidence_table(out, m.confidence);
  }
  for (std::size_t k = 0; k < m.ann.traces.size(); ++k) {
    auto out = open_out(dir / ("trace_member" + std::to_string(k) + ".csv"));
    write_trace_csv(out, m.ann.traces[k]);
  }
  std::cout << "AR(" << m.ar.p << "), ANN " << architecture_string(m.ann.mask) << " x" << m.ann.hidden << "x1\n";
}

void cmd_forecast(const RunConfig& cfg) {
  const Prepared p = prepare(load_input(cfg), cfg);
  const fs::path models = cfg.models;
  TrainedModels m;
  m.pipeline = pipeline_from_json(read_json(models / "pipeline.json"));
  m.ar = ar_from_json(read_json(models / "ar_model.json"));
  m.selection = selection_from_json(read_json(models / "selection.json"));
  m.ann = ann_from_json(read_json(models / "ann_model.json"));
  {
    std::ifstream in(models / "confidence.csv");
    if (!in) throw Error(ErrorKind::io, "cannot read " + (models / "confidence.csv").string());
    m.confidence = read_confidence_table(in);
  }
  const auto rows = forecast_test(p, m);
  const fs::path dir = output_dir(cfg);
  auto out = open_out(dir / "forecast.csv");
  write_forecast_csv(out, p.data.ghi, rows);
  std::cout << "wrote " << rows.size() << " forecasts to " << (dir / "forecast.csv").string() << '\n';
}

void cmd_evaluate(const RunConfig& cfg) {
  const Prepared p = prepare(load_input(cfg), cfg);
  const Evaluation e = evaluate(p, cfg);
  const fs::path dir = output_dir(cfg);
  write_json(dir / "report.json", evaluation_json(e));
  {
    auto out = open_out(dir / "report.csv");
    write_report_csv(out, e.report);
  }
  {
    auto out = open_out(dir / "forecast.csv");
    write_forecast_csv(out, p.data.ghi, e.hybrid);
  }
  {
    std::vector<double> predicted;
    for (const auto& h : e.hybrid) predicted.push_back(h.step.whm2);
    auto out = open_out(dir / "scatter.csv");
    write_scatter_csv(out, p.data.ghi, e.targets, e.measured, predicted);
  }
  for (const auto& r : e.report.rows) std::cout << r.model << ": " << format_number(r.annual) << " %\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Next-hour solar radiation forecasting"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { o.seed = s; }, "top-level seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--input", o.input, "dataset CSV (overrides data.input)");
    return sub;
  };
  auto* synth = add_common(app.add_subcommand("synth", "generate a synthetic dataset"));
  auto* preprocess = add_common(app.add_subcommand("preprocess", "stationarize and report VC / Fisher statistics"));
  auto* train = add_common(app.add_subcommand("train", "fit AR, input selection, ANN ensemble and CI* table"));
  auto* forecast = add_common(app.add_subcommand("forecast", "hybrid forecasts with intervals for the test years"));
  forecast->add_option("--models", o.models, "directory holding trained models");
  auto* evaluate_cmd = add_common(app.add_subcommand("evaluate", "compare all models on the test years"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig cfg = resolve(o);
    if (synth->parsed()) cmd_synth(cfg);
    if (preprocess->parsed()) cmd_preprocess(cfg);
    if (train->parsed()) cmd_train(cfg);
    if (forecast->parsed()) cmd_forecast(cfg);
    if (evaluate_cmd->parsed()) cmd_evaluate(cfg);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return e.kind() == ErrorKind::schema ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
