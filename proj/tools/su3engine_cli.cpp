/**
 * @file su3engine_cli.cpp
 * @brief Command-line front end: decompose, steady, sweep, spectrum, validate and weights.
 */
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"

namespace fs = std::filesystem;
using namespace su3engine;
using namespace su3engine::cli;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string model;
  int jobs = 1;
  int n = 4;
  int draws = 5;
  int p = 1;
  int q = 0;
};

/// Writes to DIR/stem.csv, or to stdout (preceded by a "## stem" marker) when no directory is given.
void emit(const Options& o, const std::string& stem, const CsvTable& t, const std::string& hash) {
  const std::string text = t.render(hash);
  if (o.out.empty()) {
    std::cout << "## " << stem << "\n" << text;
    return;
  }
  fs::create_directories(o.out);
  const fs::path path = fs::path(o.out) / (stem + ".csv");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
}

ExperimentConfig config_of(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.model.empty()) {
    try {
      c.engine.model = parse_model(o.model);
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  }
  return c;
}

void warn_drive(const ExperimentConfig& c) {
  for (const auto& p : sweep_points(c))
    if (auto w = weak_drive_warning(p)) {
      std::cerr << "warning: " << *w << "\n";
      return;
    }
}

std::string params_hash(const EngineParams& p) {
  ExperimentConfig c;
  c.engine = p;
  return config_hash(c);
}

int cmd_steady(const Options& o, bool require_sweep) {
  const auto c = config_of(o);
  if (require_sweep && c.sweep.empty()) throw ConfigError("sweep: config has no sweep axes");
  warn_drive(c);
  emit(o, c.name + "_steady", run_steady(c, o.jobs), config_hash(c));
  return 0;
}

int cmd_spectrum(const Options& o) {
  const auto c = config_of(o);
  warn_drive(c);
  const auto run = run_spectrum(c, o.jobs);
  const std::string hash = config_hash(c);
  emit(o, c.name + "_spectrum_summary", run.summary, hash);
  for (const auto& curve : run.curves) emit(o, c.name + "_" + curve.file_stem, curve.table, hash);
  return 0;
}

int cmd_validate(const Options& o) {
  std::optional<EngineParams> fixed;
  std::string hash;
  if (!o.config.empty() || !o.model.empty()) {
    const auto c = config_of(o);
    check_parameters(c);
    fixed = c.engine;
    hash = config_hash(c);
  } else {
    hash = params_hash(EngineParams{});
  }
  if (o.draws < 1) throw ConfigError("validate: --draws must be >= 1");
  const auto report = run_validation(o.n, o.draws, fixed);
  emit(o, "validate_n" + std::to_string(o.n), report.table(), hash);
  std::size_t failed = 0;
  for (const auto& ch : report.checks) failed += !ch.pass;
  std::cerr << "validate n=" << o.n << ": " << report.checks.size() - failed << "/" << report.checks.size()
            << " checks passed\n";
  for (const auto& ch : report.checks)
    if (!ch.pass) std::cerr << "FAIL " << ch.name << ": " << ch.value << " > " << ch.tolerance << "\n";
  return report.passed() ? 0 : 1;
}

int cmd_weights(const Options& o) {
  const auto c = config_of(o);
  emit(o, "weights_p" + std::to_string(o.p) + "_q" + std::to_string(o.q), run_weights({o.p, o.q}, c.engine),
       config_hash(c));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective three-level heat engines in the SU(3) irrep basis"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory (stdout when omitted)");
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--model", o.model, "Model override")->check(CLI::IsMember({"two_bath", "load", "driven"}));

  auto* decompose = app.add_subcommand("decompose", "Irrep dimensions and multiplicities of (C^3)^n");
  decompose->add_option("--n", o.n, "Number of particles (1..40)");
  auto* steady = app.add_subcommand("steady", "Steady-state observables per irrep");
  auto* sweep = app.add_subcommand("sweep", "Steady-state observables over the config's sweep axes");
  auto* spectrum = app.add_subcommand("spectrum", "Emission spectra, g2(0) and spectral summaries");
  auto* validate = app.add_subcommand("validate", "Compare block results with the full-space oracle");
  validate->add_option("--n", o.n, "Number of particles (1..4)");
  validate->add_option("--draws", o.draws, "Random parameter draws per model");
  auto* weights = app.add_subcommand("weights", "Weight diagram of an irrep");
  weights->add_option("--p", o.p, "Irrep label p");
  weights->add_option("--q", o.q, "Irrep label q");
  for (auto* sub : {decompose, steady, sweep, spectrum, validate, weights}) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory (stdout when omitted)");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--model", o.model, "Model override")->check(CLI::IsMember({"two_bath", "load", "driven"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*decompose) {
      emit(o, "decompose_n" + std::to_string(o.n), run_decompose(o.n), params_hash(EngineParams{}));
      return 0;
    }
    if (*steady) return cmd_steady(o, false);
    if (*sweep) return cmd_steady(o, true);
    if (*spectrum) return cmd_spectrum(o);
    if (*validate) return cmd_validate(o);
    if (*weights) return cmd_weights(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationFailure& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
