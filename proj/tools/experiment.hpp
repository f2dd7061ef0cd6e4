/**
 * @file experiment.hpp
 * @brief Experiment configuration, sweep runners and CSV output for the command-line tool.
 */
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "su3engine/su3engine.hpp"

namespace su3engine::cli {

using nlohmann::json;

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// At least one validation check failed (exit code 1).
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration

inline const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names{"omega_c", "omega_h", "beta_c", "beta_h", "g_u",
                                              "g_v",     "g_w",     "alpha",  "beta0"};
  return names;
}

/// Canonical parameter name; g_T is accepted for the load coupling g_w.
inline std::string canonical_parameter(const std::string& name) {
  if (name == "g_T") return "g_w";
  for (const auto& p : sweepable_parameters())
    if (p == name) return p;
  throw ConfigError("unknown engine parameter '" + name + "'");
}

inline double& parameter_ref(EngineParams& p, const std::string& name) {
  const std::string c = canonical_parameter(name);
  if (c == "omega_c") return p.omega_c;
  if (c == "omega_h") return p.omega_h;
  if (c == "beta_c") return p.beta_c;
  if (c == "beta_h") return p.beta_h;
  if (c == "g_u") return p.g_u;
  if (c == "g_v") return p.g_v;
  if (c == "g_w") return p.g_w;
  if (c == "alpha") return p.alpha;
  return p.beta0;
}

struct SweepAxis {
  std::string parameter;
  double min = 0.0;
  double max = 0.0;
  int points = 1;

  bool operator==(const SweepAxis&) const = default;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = points == 1 ? min : min + (max - min) * i / (points - 1);
    return v;
  }
};

enum class PreparationKind { Thermal, Product, Weights };

struct Preparation {
  PreparationKind kind = PreparationKind::Thermal;
  std::array<double, 3> r{1.0, 0.0, 0.0};
  std::vector<IrrepWeight> weights;

  bool operator==(const Preparation& o) const {
    if (kind != o.kind || r != o.r || weights.size() != o.weights.size()) return false;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i].label != o.weights[i].label || weights[i].weight != o.weights[i].weight) return false;
    return true;
  }
};

struct SpectrumOptions {
  RegressionGenerator regression = RegressionGenerator::Full;
  int points = 201;
  /// Half-width of the S(ω_l) integration window in effective linewidths.
  double window_linewidths = 10.0;
  /// Half-range of the written spectrum in detuning; 0 uses the integration window.
  double detuning_max = 0.0;
  bool write_curves = true;
  bool write_correlators = false;

  bool operator==(const SpectrumOptions&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  int n = 4;
  /// Empty means every irrep of n.
  std::vector<IrrepLabel> irreps;
  EngineParams engine;
  Preparation preparation;
  std::vector<SweepAxis> sweep;
  SpectrumOptions spectrum;
  bool independent_baseline = true;

  bool operator==(const ExperimentConfig& o) const {
    const auto& a = engine;
    const auto& b = o.engine;
    const bool same_engine = a.omega_c == b.omega_c && a.omega_h == b.omega_h && a.beta_c == b.beta_c &&
                             a.beta_h == b.beta_h && a.g_u == b.g_u && a.g_v == b.g_v && a.g_w == b.g_w &&
                             a.alpha == b.alpha && a.beta0 == b.beta0 && a.model == b.model;
    return same_engine && name == o.name && n == o.n && irreps == o.irreps && preparation == o.preparation &&
           sweep == o.sweep && spectrum == o.spectrum && independent_baseline == o.independent_baseline;
  }

  /// Irreps to evaluate, in partition order when not given explicitly.
  std::vector<IrrepLabel> labels() const {
    if (!irreps.empty()) return irreps;
    std::vector<IrrepLabel> out;
    for (const auto& lam : partitions(n)) out.push_back(lam.label());
    return out;
  }

  bool complete_decomposition() const { return irreps.empty(); }
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

inline std::string kind_name(PreparationKind k) {
  switch (k) {
    case PreparationKind::Thermal: return "thermal";
    case PreparationKind::Product: return "product";
    case PreparationKind::Weights: return "weights";
  }
  return "thermal";
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["model"] = to_string(c.engine.model);
  j["n"] = c.n;
  j["irreps"] = json::array();
  for (const auto& l : c.irreps) j["irreps"].push_back({l.p, l.q});
  const auto& e = c.engine;
  j["engine"] = {{"omega_c", e.omega_c}, {"omega_h", e.omega_h}, {"beta_c", e.beta_c}, {"beta_h", e.beta_h},
                 {"g_u", e.g_u},         {"g_v", e.g_v},         {"g_w", e.g_w},       {"alpha", e.alpha},
                 {"beta0", e.beta0}};
  json prep{{"kind", detail::kind_name(c.preparation.kind)}};
  if (c.preparation.kind == PreparationKind::Product) prep["r"] = c.preparation.r;
  if (c.preparation.kind == PreparationKind::Weights) {
    prep["weights"] = json::array();
    for (const auto& w : c.preparation.weights)
      prep["weights"].push_back({{"p", w.label.p}, {"q", w.label.q}, {"weight", w.weight}});
  }
  j["preparation"] = prep;
  j["sweep"] = json::array();
  for (const auto& a : c.sweep)
    j["sweep"].push_back({{"parameter", a.parameter}, {"min", a.min}, {"max", a.max}, {"points", a.points}});
  const auto& s = c.spectrum;
  j["spectrum"] = {{"regression_generator", to_string(s.regression)},
                   {"points", s.points},
                   {"window_linewidths", s.window_linewidths},
                   {"detuning_max", s.detuning_max},
                   {"write_curves", s.write_curves},
                   {"write_correlators", s.write_correlators}};
  j["independent_baseline"] = c.independent_baseline;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  detail::check_keys(j, {"name", "model", "n", "irreps", "engine", "preparation", "sweep", "spectrum",
                         "independent_baseline"},
                     "config");
  ExperimentConfig c;
  try {
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    if (j.contains("model")) c.engine.model = parse_model(j.at("model").get<std::string>());
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (c.n < 1) throw ConfigError("n must be >= 1");
    if (j.contains("irreps")) {
      for (const auto& pq : j.at("irreps")) {
        if (!pq.is_array() || pq.size() != 2) throw ConfigError("irreps entries must be [p, q] pairs");
        const IrrepLabel l{pq[0].get<int>(), pq[1].get<int>()};
        if (!l.occurs_for(c.n)) throw ConfigError("irrep " + l.to_string() + " does not occur for n=" + std::to_string(c.n));
        c.irreps.push_back(l);
      }
    }
    if (j.contains("engine")) {
      const auto& e = j.at("engine");
      if (!e.is_object()) throw ConfigError("engine must be a JSON object");
      std::set<std::string> seen;
      for (const auto& [key, value] : e.items()) {
        const std::string canon = canonical_parameter(key);
        if (!seen.insert(canon).second) throw ConfigError("engine parameter '" + canon + "' given twice");
        parameter_ref(c.engine, canon) = value.get<double>();
      }
    }
    if (j.contains("preparation")) {
      const auto& p = j.at("preparation");
      detail::check_keys(p, {"kind", "r", "weights"}, "preparation");
      const std::string kind = p.value("kind", "thermal");
      if (kind == "thermal") {
        c.preparation.kind = PreparationKind::Thermal;
      } else if (kind == "product") {
        c.preparation.kind = PreparationKind::Product;
        c.preparation.r = p.at("r").get<std::array<double, 3>>();
      } else if (kind == "weights") {
        c.preparation.kind = PreparationKind::Weights;
        for (const auto& w : p.at("weights")) {
          detail::check_keys(w, {"p", "q", "weight"}, "preparation weight");
          c.preparation.weights.push_back({{w.at("p").get<int>(), w.at("q").get<int>()}, w.at("weight").get<double>()});
        }
      } else {
        throw ConfigError("unknown preparation kind '" + kind + "'");
      }
    }
    if (j.contains("sweep")) {
      for (const auto& a : j.at("sweep")) {
        detail::check_keys(a, {"parameter", "min", "max", "points"}, "sweep axis");
        SweepAxis axis{canonical_parameter(a.at("parameter").get<std::string>()), a.at("min").get<double>(),
                       a.at("max").get<double>(), a.at("points").get<int>()};
        if (axis.points < 1) throw ConfigError("sweep axis '" + axis.parameter + "' needs at least one point");
        c.sweep.push_back(axis);
      }
    }
    if (j.contains("spectrum")) {
      const auto& s = j.at("spectrum");
      detail::check_keys(s, {"regression_generator", "points", "window_linewidths", "detuning_max", "write_curves",
                             "write_correlators"},
                         "spectrum");
      if (s.contains("regression_generator"))
        c.spectrum.regression = parse_regression_generator(s.at("regression_generator").get<std::string>());
      c.spectrum.points = s.value("points", c.spectrum.points);
      c.spectrum.window_linewidths = s.value("window_linewidths", c.spectrum.window_linewidths);
      c.spectrum.detuning_max = s.value("detuning_max", c.spectrum.detuning_max);
      c.spectrum.write_curves = s.value("write_curves", c.spectrum.write_curves);
      c.spectrum.write_correlators = s.value("write_correlators", c.spectrum.write_correlators);
      if (c.spectrum.points < 2) throw ConfigError("spectrum.points must be >= 2");
      if (!(c.spectrum.window_linewidths > 0.0)) throw ConfigError("spectrum.window_linewidths must be positive");
    }
    if (j.contains("independent_baseline")) c.independent_baseline = j.at("independent_baseline").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::string text;
  char buf[4096];
  for (std::size_t k; (k = std::fread(buf, 1, sizeof buf, f)) > 0;) text.append(buf, k);
  std::fclose(f);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// FNV-1a 64-bit hash of the canonical JSON dump, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

/// Parameters of every sweep point (cartesian product, first axis outermost).
inline std::vector<EngineParams> sweep_points(const ExperimentConfig& c) {
  std::vector<EngineParams> pts{c.engine};
  for (const auto& axis : c.sweep) {
    std::vector<EngineParams> next;
    for (const auto& base : pts)
      for (double v : axis.values()) {
        EngineParams p = base;
        parameter_ref(p, axis.parameter) = v;
        next.push_back(p);
      }
    pts = std::move(next);
  }
  return pts;
}

/// Rejects parameter sets that cannot give a unique steady state or are unphysical.
inline void check_parameters(const ExperimentConfig& c) {
  for (const auto& p : sweep_points(c)) {
    try {
      p.validate();
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
    if (p.active_channels() < 2) {
      throw ConfigError("rate-degenerate configuration: model '" + to_string(p.model) +
                        "' needs at least two nonzero couplings among g_u, g_v" +
                        (p.model == Model::DissipativeLoad ? ", g_w" : p.model == Model::Driven ? ", alpha" : "") +
                        " for a unique steady state");
    }
  }
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::logic_error("CsvTable: row width differs from header");
    for (auto& cell : row)
      for (auto& ch : cell)
        if (ch == ',' || ch == '\n') ch = ';';
    rows.push_back(std::move(row));
  }

  std::string render(const std::string& hash) const {
    std::string out = "# config_hash=" + hash + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
      out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::out_of_range("CsvTable: no column '" + name + "'");
  }
};

/// Parses text produced by CsvTable::render, skipping comment lines.
inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (!have_header) {
      t.header = cells;
      have_header = true;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Parallel execution

/// Runs f(i) for i in [0, count) on `jobs` threads; results are indexed, so order is deterministic.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) f(i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Block weights

inline std::vector<IrrepWeight> preparation_weights(const ExperimentConfig& c, const EngineParams& p) {
  switch (c.preparation.kind) {
    case PreparationKind::Thermal: {
      const auto eps = single_particle_energies(p.omega_c, p.omega_h);
      const double e0 = *std::min_element(eps.begin(), eps.end());
      return product_block_weights(c.n, std::exp(-p.beta0 * (eps[0] - e0)), std::exp(-p.beta0 * (eps[1] - e0)),
                                   std::exp(-p.beta0 * (eps[2] - e0)));
    }
    case PreparationKind::Product:
      return product_block_weights(c.n, c.preparation.r[0], c.preparation.r[1], c.preparation.r[2]);
    case PreparationKind::Weights: {
      std::vector<IrrepWeight> out;
      double total = 0.0;
      for (const auto& lam : partitions(c.n)) {
        double w = 0.0;
        for (const auto& e : c.preparation.weights)
          if (e.label == lam.label()) w += e.weight;
        out.push_back({lam.label(), w});
        total += w;
      }
      for (const auto& e : c.preparation.weights)
        if (!e.label.occurs_for(c.n)) throw ConfigError("weight given for irrep " + e.label.to_string() + " absent at n");
      if (std::abs(total - 1.0) > 1e-9) throw ConfigError("preparation weights must sum to one");
      return out;
    }
  }
  return {};
}

inline double weight_of(const std::vector<IrrepWeight>& ws, IrrepLabel l) {
  for (const auto& w : ws)
    if (w.label == l) return w.weight;
  return 0.0;
}

// ---------------------------------------------------------------------------
// Runners

inline std::vector<std::string> axis_header(const ExperimentConfig& c) {
  std::vector<std::string> h;
  for (const auto& a : c.sweep) h.push_back(a.parameter);
  return h;
}

inline std::vector<std::string> axis_cells(const ExperimentConfig& c, const EngineParams& p) {
  std::vector<std::string> cells;
  for (const auto& a : c.sweep) cells.push_back(format_number(parameter_ref(const_cast<EngineParams&>(p), a.parameter)));
  return cells;
}

struct IrrepSteadyResult {
  ThermoReport report;
  std::string status = "ok";
};

inline IrrepSteadyResult steady_for_irrep(IrrepLabel label, const EngineParams& p) {
  IrrepSteadyResult r;
  try {
    const auto ops = irrep_matrices(label, p.omega_c, p.omega_h);
    const auto L = build_liouvillian(ops, p);
    const auto rho = steady_state(L);
    r.report = thermo_report(rho, ops.gen, ops.H, p, L);
  } catch (const std::exception& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.report = {nan, nan, nan, nan, nan, nan, nan, nan, nan, nan};
    r.status = e.what();
  }
  return r;
}

/**
 * Steady-state observables per irrep, plus a p^λ-weighted "block" row when all
 * irreps of n are evaluated and an "independent" row with n times the (1,0) values.
 */
inline CsvTable run_steady(const ExperimentConfig& c, int jobs) {
  check_parameters(c);
  const auto pts = sweep_points(c);
  auto labels = c.labels();
  const IrrepLabel single{1, 0};
  const bool need_single = c.independent_baseline && std::find(labels.begin(), labels.end(), single) == labels.end();
  auto task_labels = labels;
  if (need_single) task_labels.push_back(single);
  const std::size_t per_point = task_labels.size();
  std::vector<IrrepSteadyResult> results(pts.size() * per_point);
  parallel_for(results.size(), jobs, [&](std::size_t i) {
    results[i] = steady_for_irrep(task_labels[i % per_point], pts[i / per_point]);
  });

  CsvTable t;
  t.header = axis_header(c);
  for (const char* h : {"kind", "p", "q", "weight", "energy", "ergotropy", "lasing_ergotropy", "I_h", "I_c", "P", "eta",
                        "Ng_residual", "status"})
    t.header.emplace_back(h);
  auto emit = [&](const EngineParams& p, const std::string& kind, IrrepLabel l, double w, const ThermoReport& r,
                  const std::string& status) {
    auto row = axis_cells(c, p);
    for (auto&& cell : {kind, std::to_string(l.p), std::to_string(l.q), format_number(w), format_number(r.energy),
                        format_number(r.ergotropy), format_number(r.lasing_ergotropy), format_number(r.heat_hot),
                        format_number(r.heat_cold), format_number(r.power), format_number(r.efficiency),
                        format_number(r.ng_rate), status})
      row.push_back(cell);
    t.add(std::move(row));
  };
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& p = pts[k];
    std::vector<IrrepWeight> weights;
    if (c.preparation.kind != PreparationKind::Weights || c.complete_decomposition()) weights = preparation_weights(c, p);
    std::vector<ThermoReport> reports;
    std::vector<double> ws;
    bool complete = true;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& res = results[k * per_point + i];
      const double w = weight_of(weights, labels[i]);
      emit(p, "irrep", labels[i], w, res.report, res.status);
      reports.push_back(res.report);
      ws.push_back(w);
      complete = complete && res.status == "ok";
    }
    if (c.complete_decomposition()) {
      emit(p, "block", {-1, -1}, 1.0, aggregate(reports, ws), complete ? "ok" : "incomplete");
    }
    if (c.independent_baseline) {
      std::size_t idx = 0;
      while (task_labels[idx] != single) ++idx;
      const auto& res = results[k * per_point + idx];
      emit(p, "independent", single, static_cast<double>(c.n), scaled(res.report, c.n), res.status);
    }
  }
  return t;
}

struct SpectrumCurve {
  std::string file_stem;
  CsvTable table;
};

struct SpectrumRun {
  CsvTable summary;
  std::vector<SpectrumCurve> curves;
};

struct IrrepSpectrumResult {
  double flux = 0.0, g2 = 0.0, peak = 0.0, linewidth = 0.0, window = 0.0, coherent = 0.0;
  Spectrum curve;
  CorrelatorSeries g1;
  std::string status = "ok";
};

inline IrrepSpectrumResult spectrum_for_irrep(IrrepLabel label, const EngineParams& p, const SpectrumOptions& opt) {
  IrrepSpectrumResult r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto ops = irrep_matrices(label, p.omega_c, p.omega_h);
    const auto L = build_liouvillian(ops, p);
    const auto rho = steady_state(L);
    const auto Lreg = regression_liouvillian(L, ops.gen, opt.regression);
    r.flux = expectation(ops.gen.Wp * ops.gen.Wm, rho);
    if (!(r.flux > 1e-14)) {
      r.g2 = r.peak = r.linewidth = r.window = r.coherent = nan;
      r.status = "no emission";
      return r;
    }
    r.g2 = g2_zero(rho, ops.gen.Wp, ops.gen.Wm);
    r.peak = spectrum_peak(Lreg, rho, ops.gen.Wp, ops.gen.Wm);
    r.linewidth = effective_linewidth(r.peak);
    const double half = opt.window_linewidths * r.linewidth;
    const RVector window_grid = RVector::LinSpaced(opt.points, -half, half);
    const Spectrum ws = spectrum_resolvent(Lreg, rho, ops.gen.Wp, ops.gen.Wm, window_grid, p.omega_l());
    r.window = window_fraction(ws, half);
    r.coherent = ws.coherent_fraction;
    if (opt.write_curves) {
      const double range = opt.detuning_max > 0.0 ? opt.detuning_max : half;
      r.curve = opt.detuning_max > 0.0
                    ? spectrum_resolvent(Lreg, rho, ops.gen.Wp, ops.gen.Wm, RVector::LinSpaced(opt.points, -range, range),
                                         p.omega_l())
                    : ws;
    }
    if (opt.write_correlators) r.g1 = g1_correlator(Lreg, rho, ops.gen.Wp, ops.gen.Wm, default_time_grid(Lreg));
  } catch (const std::exception& e) {
    r.g2 = r.peak = r.linewidth = r.window = r.coherent = nan;
    r.status = e.what();
  }
  return r;
}

/// Scalar spectral summary per irrep (and the single-emitter baseline) plus optional curves.
inline SpectrumRun run_spectrum(const ExperimentConfig& c, int jobs) {
  check_parameters(c);
  const auto pts = sweep_points(c);
  auto labels = c.labels();
  const IrrepLabel single{1, 0};
  const bool need_single = c.independent_baseline && std::find(labels.begin(), labels.end(), single) == labels.end();
  if (need_single) labels.push_back(single);
  const std::size_t per_point = labels.size();
  std::vector<IrrepSpectrumResult> results(pts.size() * per_point);
  parallel_for(results.size(), jobs, [&](std::size_t i) {
    results[i] = spectrum_for_irrep(labels[i % per_point], pts[i / per_point], c.spectrum);
  });

  SpectrumRun run;
  auto& t = run.summary;
  t.header = axis_header(c);
  for (const char* h : {"kind", "p", "q", "weight", "g2_0", "S_peak", "P_tot", "linewidth", "window_fraction",
                        "coherent_fraction", "status"})
    t.header.emplace_back(h);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& p = pts[k];
    std::vector<IrrepWeight> weights;
    if (c.preparation.kind != PreparationKind::Weights || c.complete_decomposition()) weights = preparation_weights(c, p);
    for (std::size_t i = 0; i < per_point; ++i) {
      const auto& r = results[k * per_point + i];
      const bool baseline = need_single && i + 1 == per_point;
      auto row = axis_cells(c, p);
      for (auto&& cell : {std::string(baseline ? "independent" : "irrep"), std::to_string(labels[i].p),
                          std::to_string(labels[i].q), format_number(baseline ? c.n : weight_of(weights, labels[i])),
                          format_number(r.g2), format_number(r.peak), format_number(r.flux), format_number(r.linewidth),
                          format_number(r.window), format_number(r.coherent), r.status})
        row.push_back(cell);
      t.add(std::move(row));
      const std::string stem = "p" + std::to_string(labels[i].p) + "_q" + std::to_string(labels[i].q) +
                               (pts.size() > 1 ? "_pt" + std::to_string(k) : "");
      if (c.spectrum.write_curves && r.curve.delta.size() > 0) {
        SpectrumCurve sc{"spectrum_" + stem, {}};
        sc.table.header = {"omega", "S"};
        for (Eigen::Index j = 0; j < r.curve.delta.size(); ++j)
          sc.table.add({format_number(r.curve.omega(j)), format_number(r.curve.values(j))});
        run.curves.push_back(std::move(sc));
      }
      if (c.spectrum.write_correlators && r.g1.values.size() > 0) {
        SpectrumCurve sc{"g1_" + stem, {}};
        sc.table.header = {"tau", "re_G1", "im_G1"};
        for (Eigen::Index j = 0; j < r.g1.values.size(); ++j)
          sc.table.add({format_number(r.g1.tau(j)), format_number(r.g1.values(j).real()),
                        format_number(r.g1.values(j).imag())});
        run.curves.push_back(std::move(sc));
      }
    }
  }
  return run;
}

/// (λ, p, q, d, m, m·d) for every irrep of n with an exact completeness row.
inline CsvTable run_decompose(int n) {
  if (n < 1 || n > 40) throw ConfigError("decompose: n must be between 1 and 40");
  CsvTable t;
  t.header = {"row", "lambda1", "lambda2", "lambda3", "p", "q", "d", "m", "m_times_d", "three_pow_n", "complete"};
  BigInt total = 0, expected = 1;
  for (int i = 0; i < n; ++i) expected *= 3;
  for (const auto& lam : partitions(n)) {
    const auto l = lam.label();
    const BigInt m = multiplicity_exact(l, n);
    const BigInt md = m * l.dimension();
    total += md;
    t.add({"irrep", std::to_string(lam.rows[0]), std::to_string(lam.rows[1]), std::to_string(lam.rows[2]),
           std::to_string(l.p), std::to_string(l.q), std::to_string(l.dimension()), m.str(), md.str(), "", ""});
  }
  t.add({"total", "", "", "", "", "", "", "", total.str(), expected.str(), total == expected ? "1" : "0"});
  return t;
}

/// Weight diagram of (p,q): W, w, y and the energy of every basis state.
inline CsvTable run_weights(IrrepLabel label, const EngineParams& p) {
  if (!label.valid()) throw ConfigError("weights: p and q must be non-negative");
  CsvTable t;
  t.header = {"W", "w", "y", "energy"};
  for (const auto& row : weight_diagram(label, p.omega_c, p.omega_h))
    t.add({format_number(row.state.W.value()), format_number(row.state.w.value()), format_number(row.state.y.value()),
           format_number(row.energy)});
  return t;
}

// ---------------------------------------------------------------------------
// Validation against the brute-force oracle

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  void add(std::string name, double value, double tolerance) {
    checks.push_back({std::move(name), value, tolerance, std::isfinite(value) && value <= tolerance});
  }
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
  }
  double worst(const std::string& prefix) const {
    double w = 0.0;
    for (const auto& c : checks)
      if (c.name.rfind(prefix, 0) == 0) w = std::max(w, std::isfinite(c.value) ? c.value : 1e300);
    return w;
  }

  CsvTable table() const {
    CsvTable t;
    t.header = {"check", "value", "tolerance", "pass"};
    for (const auto& c : checks) t.add({c.name, format_number(c.value), format_number(c.tolerance), c.pass ? "1" : "0"});
    return t;
  }
};

inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a - b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Deterministic random parameter draw for the given model.
inline EngineParams random_params(std::mt19937_64& rng, Model model) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
  EngineParams p;
  p.model = model;
  p.omega_c = in(0.4, 1.0);
  p.omega_h = p.omega_c + in(0.6, 1.4);
  p.beta_c = in(0.8, 2.0);
  p.beta_h = in(0.1, 0.8);
  p.g_u = in(0.05, 0.3);
  p.g_v = in(0.05, 0.3);
  p.g_w = in(0.05, 0.5);
  p.alpha = in(0.01, 0.1) * p.omega_l();
  p.beta0 = in(0.2, 2.0);
  return p;
}

inline constexpr double kOracleObservableTolerance = 1e-8;
inline constexpr double kOracleSpectrumTolerance = 1e-6;
inline constexpr double kOracleBlockTolerance = 1e-6;
/// Stationarity target of the time-integrated oracle used by validation.
inline constexpr double kOracleEvolvedTarget = 1e-12;
/// η is compared only where the heat input is not at round-off level.
inline constexpr double kEfficiencyMinHeat = 1e-6;

/**
 * Compares block-route results with the full-space oracle for one parameter set:
 * the full steady state reached from the thermal product state is decomposed
 * into irrep blocks and compared with the per-irrep steady states, and every
 * observable is re-evaluated with unreduced operators.
 */
inline void validate_point(int n, const EngineParams& p, const SchurDecomposer& dec, const std::string& tag,
                           ValidationReport& report) {
  const auto m = make_full_model(n, p);
  const CMatrix rho0 = thermal_product_state(n, p.beta0, p);
  std::optional<StationaryStructure> structure;
  FullSteadyState fs;
  if (n <= kMaxDenseOracleParticles) {
    structure = stationary_structure(m);
    fs = full_steady_state(m, *structure, rho0);
  } else {
    fs = full_steady_state(m, rho0, kOracleEvolvedTarget);
  }
  report.add(tag + " stationarity", fs.residual, kOracleStationarityTolerance);
  const auto decomposed = decompose_full_state(fs.rho, dec);
  const auto thermal = thermal_block_state(n, p.beta0, p);
  const ThermoReport full = full_observables(fs.rho, m);

  std::vector<ThermoReport> blocks;
  std::vector<double> weights;
  for (std::size_t i = 0; i < decomposed.blocks.entries.size(); ++i) {
    const auto& e = decomposed.blocks.entries[i];
    const std::string lt = tag + " " + e.label.to_string();
    const auto ops = irrep_matrices(e.label, p.omega_c, p.omega_h);
    const auto L = build_liouvillian(ops, p);
    const CMatrix rho = steady_state(L);
    const ThermoReport alg = thermo_report(rho, ops.gen, ops.H, p, L);
    blocks.push_back(alg);
    weights.push_back(thermal.entries[i].weight);
    report.add(lt + " weight", std::abs(e.weight - thermal.entries[i].weight), 1e-9);
    report.add(lt + " block trace distance", trace_distance(e.rho, rho), kOracleBlockTolerance);

    // Per-irrep observables of the oracle block, evaluated on the full space.
    const auto& basis = dec.bases[i];
    const CMatrix emb = embed_block(e.rho, basis);
    const ThermoReport o = full_observables(emb, m);
    const double ergo_oracle = ergotropy(e.rho, project_operator(m.H, basis)).value;
    report.add(lt + " ergotropy", std::abs(ergo_oracle - alg.ergotropy), kOracleObservableTolerance);
    report.add(lt + " lasing ergotropy", std::abs(o.lasing_ergotropy - alg.lasing_ergotropy), kOracleObservableTolerance);
    report.add(lt + " I_h", std::abs(o.heat_hot - alg.heat_hot), kOracleObservableTolerance);
    report.add(lt + " I_c", std::abs(o.heat_cold - alg.heat_cold), kOracleObservableTolerance);
    report.add(lt + " P", std::abs(o.power - alg.power), kOracleObservableTolerance);
    if (std::isfinite(alg.efficiency) && alg.heat_hot > kEfficiencyMinHeat)
      report.add(lt + " eta", std::abs(o.efficiency - alg.efficiency), kOracleObservableTolerance);
    const double flux = expectation(ops.gen.Wp * ops.gen.Wm, rho);
    if (flux > 1e-12) {
      report.add(lt + " g2(0)",
                 std::abs(g2_zero(emb, m.gen.Wp, m.gen.Wm) - g2_zero(rho, ops.gen.Wp, ops.gen.Wm)),
                 kOracleObservableTolerance);
      if (structure) {
        const double peak_full = full_space_spectrum_peak(m, *structure, emb, m.gen.Wp, m.gen.Wm);
        const double peak_alg = spectrum_peak(L, rho, ops.gen.Wp, ops.gen.Wm);
        report.add(lt + " S-peak", std::abs(peak_full - peak_alg), kOracleSpectrumTolerance);
      }
    }
  }
  const ThermoReport agg = aggregate(blocks, weights);
  report.add(tag + " aggregate I_h", std::abs(full.heat_hot - agg.heat_hot), kOracleObservableTolerance);
  report.add(tag + " aggregate I_c", std::abs(full.heat_cold - agg.heat_cold), kOracleObservableTolerance);
  report.add(tag + " aggregate P", std::abs(full.power - agg.power), kOracleObservableTolerance);
  report.add(tag + " aggregate Ng rate", std::abs(full.ng_rate), kOracleObservableTolerance);
}

/// Oracle equivalence suite: `draws` random parameter sets per model, or the given parameters only.
inline ValidationReport run_validation(int n, int draws, const std::optional<EngineParams>& fixed,
                                       std::uint64_t seed = 20240607) {
  if (n < 1 || n > kMaxOracleParticles) throw ConfigError("validate: n must be between 1 and 4");
  ValidationReport report;
  const SchurDecomposer dec(n);
  if (fixed) {
    if (fixed->active_channels() < 2) {
      throw ConfigError("rate-degenerate configuration: the steady state of model '" + to_string(fixed->model) +
                        "' is not unique");
    }
    validate_point(n, *fixed, dec, to_string(fixed->model) + " config", report);
    return report;
  }
  std::mt19937_64 rng(seed);
  for (Model model : {Model::TwoBath, Model::DissipativeLoad, Model::Driven})
    for (int k = 0; k < draws; ++k)
      validate_point(n, random_params(rng, model), dec, to_string(model) + " draw" + std::to_string(k), report);
  return report;
}

}  // namespace su3engine::cli
