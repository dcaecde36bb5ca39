// Copyright 2026 The repsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "repsim/csv.h"
#include "repsim/emission.h"
#include "repsim/error_model.h"
#include "repsim/model.h"
#include "repsim/montecarlo.h"
#include "repsim/rates.h"

#ifndef REPSIM_VERSION
#define REPSIM_VERSION "dev"
#endif

namespace repsim::cli {
namespace {

using nlohmann::ordered_json;

constexpr int kDumpThetaPoints = 91;
constexpr int kDumpPhiPoints = 36;

struct Request {
  std::string subcommand;
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string dump_samples;
  std::string baseline_path;
  unsigned threads = 0;
};

struct Output {
  std::string text;
  std::string samples;  // --dump-samples payload
  int code = kOk;
};

std::string render(const Table& t, const std::string& format) {
  return format == "json" ? t.to_json() : t.to_csv();
}

std::uint64_t max_rounds_from_env() {
  const char* v = std::getenv("REPSIM_MAX_ROUNDS");
  if (v == nullptr || *v == '\0') return mc::kDefaultMaxRounds;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0' || parsed == 0) {
    throw ConfigError("REPSIM_MAX_ROUNDS", "REPSIM_MAX_ROUNDS must be a positive integer");
  }
  return parsed;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

// Baseline overlay: CSV with a `distance_km` column and one time column,
// interpolated log-linearly in time.
struct Baseline {
  std::vector<double> km, seconds;

  double at(double distance_km) const {
    if (km.empty() || distance_km < km.front() || distance_km > km.back()) return std::nan("");
    auto it = std::lower_bound(km.begin(), km.end(), distance_km);
    const std::size_t j = static_cast<std::size_t>(it - km.begin());
    if (km[j] == distance_km) return seconds[j];
    const double w = (distance_km - km[j - 1]) / (km[j] - km[j - 1]);
    return std::exp((1 - w) * std::log(seconds[j - 1]) + w * std::log(seconds[j]));
  }
};

Baseline load_baseline(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("baseline", "baseline CSV is empty");
  if (line.rfind("distance_km,", 0) != 0) {
    throw ConfigError("baseline", "baseline CSV must start with 'distance_km,<time column>'");
  }
  Baseline b;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing column");
      b.km.push_back(std::stod(line.substr(0, comma)));
      b.seconds.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("baseline", "baseline CSV line " + std::to_string(lineno) + " is malformed");
    }
    if (b.km.size() > 1 && b.km.back() <= b.km[b.km.size() - 2]) {
      throw ConfigError("baseline", "baseline distances must increase");
    }
    if (!(b.seconds.back() > 0)) throw ConfigError("baseline", "baseline times must be > 0");
  }
  return b;
}

Output cmd_rates(const ScenarioConfig& cfg, const Request& req) {
  std::vector<double> distances = cfg.sweep_distances;
  Table t;
  t.columns = {"distance_km", "n_levels", "L0_km", "eta_t", "P0", "T_link_s", "T_total_s",
               "T_direct_s"};
  std::optional<Baseline> baseline;
  if (!req.baseline_path.empty()) {
    baseline = load_baseline(req.baseline_path);
    t.columns.push_back("T_baseline_s");
  }
  for (const auto& pt : rates::curve_sweep(distances, cfg.link, cfg.sweep_fixed_n)) {
    const auto direct = rates::direct_transmission_time(pt.distance, cfg.direct_source_rate,
                                                        cfg.fiber_loss_db_per_km);
    const double km = pt.distance / units::kMetersPerKm;
    std::vector<Cell> row = {km,
                             static_cast<std::int64_t>(pt.rate.n_levels),
                             pt.L0 / units::kMetersPerKm,
                             pt.rate.eta_t,
                             pt.rate.P0,
                             pt.rate.T_link,
                             pt.rate.T_total,
                             direct.saturated ? INFINITY : direct.seconds};
    if (baseline) row.push_back(baseline->at(km));
    t.rows.push_back(std::move(row));
  }
  return {render(t, req.format), "", kOk};
}

void append_budget(Table& t, const fidelity::FidelityBudget& b, const std::string& prefix) {
  auto add = [&](const std::string& k, Cell v) { t.rows.push_back({prefix + k, std::move(v)}); };
  add("n_levels", static_cast<std::int64_t>(b.n_levels));
  add("P2_is", b.P2_is);
  add("P2_if", b.P2_if);
  add("P2_en", b.P2_en);
  add("P2_sw", b.P2_sw);
  add("Ploss_is", b.Ploss_is);
  add("Ploss_if", b.Ploss_if);
  add("Ploss_en", b.Ploss_en);
  add("Ploss_sw", b.Ploss_sw);
  add("E_is", b.E_is);
  add("E_if", b.E_if);
  add("E_en", b.E_en);
  add("E_sw", b.E_sw);
  add("E_c", b.E_c);
  add("E_n", b.E_n);
  add("F", b.F);
  add("perturbative_warning", static_cast<std::int64_t>(b.perturbative_warning));
  add("strong_drive_warning", static_cast<std::int64_t>(b.strong_drive_warning));
  add("fidelity_clamped", static_cast<std::int64_t>(b.fidelity_clamped));
}

Output cmd_fidelity(const ScenarioConfig& cfg, const Request& req, std::ostream& err) {
  const auto budget = fidelity::scenario_fidelity(cfg.blockade, cfg.link.n_levels);
  Table t;
  t.columns = {"term", "value"};
  append_budget(t, budget, "");
  t.rows.push_back({"double_ion_coefficient", fidelity::double_ion_coefficient(cfg.blockade.eta_ion)});
  t.rows.push_back({"E_c_expanded", fidelity::creation_error_expanded(cfg.blockade)});
  t.rows.push_back({"E_c_expanded_coefficient_0.1", fidelity::creation_error_expanded(cfg.blockade, 0.1)});
  if (budget.perturbative_warning) err << "warning: some P2 or Ploss exceeds 0.1\n";
  if (budget.strong_drive_warning) err << "warning: Omega/B exceeds 0.5\n";
  return {render(t, req.format), "", kOk};
}

Output cmd_optimize(const ScenarioConfig& cfg, const Request& req, std::ostream& err) {
  const BlockadeParams& bp = cfg.blockade;
  const auto opt = fidelity::optimize_rabi(bp.B, bp.tau, bp.d, bp.eta_ion, cfg.link.n_levels);
  using fidelity::ReferenceOptimum;
  Table t;
  t.columns = {"term", "value"};
  t.rows.push_back({"Omega_s_opt_over_2pi_MHz", opt.Omega_s / units::kRadPerSecPerMHz});
  t.rows.push_back({"Omega_f_opt_over_2pi_MHz", opt.Omega_f / units::kRadPerSecPerMHz});
  t.rows.push_back({"F_opt", opt.F});
  t.rows.push_back({"E_n_opt", opt.E_n});
  t.rows.push_back({"omega_s_unbounded", static_cast<std::int64_t>(opt.omega_s_unbounded)});
  append_budget(t, opt.budget, "opt_");
  t.rows.push_back({"reference_Omega_s_over_2pi_MHz", ReferenceOptimum::kOmegaSOver2piMHz});
  t.rows.push_back({"reference_Omega_f_over_2pi_MHz", ReferenceOptimum::kOmegaFOver2piMHz});
  t.rows.push_back({"reference_F", ReferenceOptimum::kFidelity});

  err << "== optimum vs published operating point ==\n"
      << "  Omega_s/2pi [MHz]  computed " << format_double(opt.Omega_s / units::kRadPerSecPerMHz)
      << "  published " << ReferenceOptimum::kOmegaSOver2piMHz << "\n"
      << "  Omega_f/2pi [MHz]  computed " << format_double(opt.Omega_f / units::kRadPerSecPerMHz)
      << "  published " << ReferenceOptimum::kOmegaFOver2piMHz << "\n"
      << "  F                  computed " << format_double(opt.F) << "  published "
      << ReferenceOptimum::kFidelity << "\n";
  return {render(t, req.format), "", kOk};
}

Output cmd_emission(const ScenarioConfig& cfg, const Request& req, std::ostream& err) {
  const AtomGeometry g = emission::realize_geometry(cfg.geometry, cfg.lambda, cfg.rng_seed);
  emission::QuadratureSettings q;
  q.workers = req.threads;
  const auto report = emission::collection_fraction(g, cfg.collection_half_angle, q);
  Table t;
  t.columns = {"theta_rad", "phi_rad", "P"};
  for (const auto& s : emission::pattern_grid(g, kDumpThetaPoints, kDumpPhiPoints)) {
    t.rows.push_back({s.theta, s.phi, s.value});
  }
  t.summary.push_back({"collected_fraction", report.fraction});
  err << "atoms=" << report.atoms << " half_angle=" << format_double(report.half_angle)
      << " theta_nodes=" << report.theta_nodes << " phi_nodes=" << report.phi_nodes
      << " last_change=" << format_double(report.last_change)
      << " converged=" << (report.converged ? 1 : 0) << "\n";
  Output o{render(t, req.format), "", kOk};
  if (!report.converged) {
    err << "error: collection fraction did not converge\n";
    o.code = kNonConvergence;
  }
  return o;
}

Output cmd_simulate(const ScenarioConfig& cfg, const Request& req, std::ostream& err) {
  mc::SimOptions opts;
  opts.seed = cfg.rng_seed;
  opts.trials = cfg.trials;
  opts.workers = req.threads;
  opts.max_rounds = max_rounds_from_env();
  const mc::SimOutcome sim =
      mc::simulate_repeater(cfg.link, opts, cfg.multiplex_m, cfg.multiplex_schedule);
  const double analytic = rates::total_time(cfg.link).T_total;
  Table t;
  t.columns = {"trials", "mean_s", "stderr_s", "analytic_s", "ratio"};
  t.rows.push_back({sim.trials, sim.mean, sim.stderr_, analytic, sim.mean / analytic});
  Output o{render(t, req.format), "", kOk};
  if (!req.dump_samples.empty()) {
    std::string s;
    for (double v : sim.samples) s += format_double(v) + "\n";
    o.samples = std::move(s);
  }
  if (cfg.multiplex_m > 1 && mc::link_model_for(cfg.link, cfg.multiplex_m).oversubscribed()) {
    err << "warning: multiplex_m * t_p exceeds t_com; extra register slots stay idle\n";
  }
  if (sim.partial) {
    err << "error: round cap " << opts.max_rounds << " reached after " << sim.trials
        << " trials\n";
    o.code = kRuntimeCap;
  }
  return o;
}

Output dispatch(const ScenarioConfig& cfg, const Request& req, std::ostream& err) {
  if (req.subcommand == "rates") return cmd_rates(cfg, req);
  if (req.subcommand == "fidelity") return cmd_fidelity(cfg, req, err);
  if (req.subcommand == "optimize") return cmd_optimize(cfg, req, err);
  if (req.subcommand == "emission") return cmd_emission(cfg, req, err);
  if (req.subcommand == "simulate") return cmd_simulate(cfg, req, err);
  throw std::logic_error("unknown subcommand " + req.subcommand);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const Request& req, const ScenarioConfig& cfg) {
  ordered_json m;
  m["tool"] = "repsim";
  m["version"] = REPSIM_VERSION;
  m["subcommand"] = req.subcommand;
  m["timestamp"] = utc_timestamp();
  m["seed"] = cfg.rng_seed;
  m["trials"] = cfg.trials;
  m["format"] = req.format;
  ordered_json outputs = ordered_json::array();
  outputs.push_back(req.out_path);
  if (!req.dump_samples.empty()) outputs.push_back(req.dump_samples);
  m["outputs"] = outputs;
  m["dump_samples"] = req.dump_samples;
  m["baseline"] = req.baseline_path;
  m["config"] = ordered_json::parse(serialize_config(cfg));
  return m.dump(2) + "\n";
}

int execute(Request req, std::optional<ScenarioConfig> preset, std::ostream& out,
            std::ostream& err) {
  ScenarioConfig cfg = preset ? *preset : load_config_file(req.config_path);
  if (req.seed) cfg.rng_seed = *req.seed;
  if (req.trials) cfg.trials = *req.trials;
  cfg.validate();

  const Output o = dispatch(cfg, req, err);
  if (req.out_path.empty()) {
    out << o.text;
  } else {
    write_file(req.out_path, o.text);
    write_file(req.out_path + ".manifest.json", manifest_json(req, cfg));
  }
  if (!req.dump_samples.empty() && req.subcommand == "simulate") {
    write_file(req.dump_samples, o.samples);
  }
  return o.code;
}

int replay(const std::string& manifest_path, const std::string& out_override,
           std::ostream& out, std::ostream& err) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", std::string("malformed manifest: ") + e.what());
  }
  for (const char* key : {"subcommand", "config", "format"}) {
    if (!m.contains(key)) throw ConfigError(key, std::string("manifest lacks '") + key + "'");
  }
  Request req;
  req.subcommand = m["subcommand"].get<std::string>();
  req.format = m["format"].get<std::string>();
  req.out_path = out_override;
  req.baseline_path = m.value("baseline", std::string());
  ScenarioConfig cfg = parse_config(m["config"].dump());
  return execute(req, cfg, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Performance engine for Rydberg-ensemble quantum repeaters", "repsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", REPSIM_VERSION);

  Request req;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"rates", "analytic distribution-time curve vs distance"},
      {"fidelity", "error budget and final fidelity"},
      {"optimize", "optimal Rabi frequencies"},
      {"emission", "cooperative emission pattern and collected fraction"},
      {"simulate", "Monte Carlo delivery time of the nested protocol"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", req.config_path, "scenario file")->required();
    sub->add_option("--out", req.out_path, "output path (default: stdout)");
    sub->add_option("--format", req.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "override rng_seed");
    sub->add_option("--trials", trials, "override trials")->check(CLI::PositiveNumber);
    sub->add_option("--threads", req.threads, "worker threads (0: all cores)");
    if (name == "simulate") {
      sub->add_option("--dump-samples", req.dump_samples, "write one delivery time per line");
    }
    if (name == "rates") {
      sub->add_option("--baseline", req.baseline_path, "external baseline CSV to overlay");
    }
    subs.push_back(sub);
  }
  std::string manifest_path, replay_out;
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest file")->required();
  replay_cmd->add_option("--out", replay_out, "output path (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int rc = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (replay_cmd->parsed()) return replay(manifest_path, replay_out, out, err);
    for (CLI::App* sub : subs) {
      if (!sub->parsed()) continue;
      req.subcommand = sub->get_name();
      if (sub->count("--seed")) req.seed = seed;
      if (sub->count("--trials")) req.trials = trials;
      return execute(req, std::nullopt, out, err);
    }
  } catch (const ConfigError& e) {
    err << "config error";
    if (!e.field().empty()) err << " [" << e.field() << "]";
    err << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const DegenerateParameterError& e) {
    err << "degenerate parameters: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace repsim::cli
