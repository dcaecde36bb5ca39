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

#include "repsim/model.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace repsim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field, "invalid value for '" + field + "': " + what);
}

void require_probability(const std::string& field, double v) {
  if (!(v >= 0.0 && v <= 1.0)) fail(field, "must lie in [0, 1]");
}

void require_positive(const std::string& field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be finite and > 0");
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "L0_km", "total_distance_km", "n_levels", "max_levels", "L_att_km",
      "c_m_per_s", "t_p_us", "p", "eta_d", "eta_ion", "B_over_2pi_MHz",
      "tau_us", "optical_depth", "Omega_s_over_2pi_MHz",
      "Omega_f_over_2pi_MHz", "geometry", "lambda_nm", "multiplex_m",
      "rng_seed", "trials", "sweep_distances_km", "sweep_n_levels",
      "direct_source_rate_GHz", "fiber_loss_db_per_km",
      "collection_half_angle_rad", "multiplex_schedule"};
  return keys;
}

double get_number(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ConfigError(key, "missing required key '" + key + "'");
  }
  if (!it->is_number()) fail(key, "expected a number");
  return it->get<double>();
}

std::int64_t get_integer(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ConfigError(key, "missing required key '" + key + "'");
  }
  if (it->is_number_unsigned()) {
    auto u = it->get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      fail(key, "integer out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (!it->is_number_integer()) fail(key, "expected an integer");
  return it->get<std::int64_t>();
}

int get_small_int(const json& doc, const std::string& key) {
  std::int64_t v = get_integer(doc, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail(key, "integer out of range");
  }
  return static_cast<int>(v);
}

GeometrySpec parse_geometry(const json& g) {
  if (!g.is_object()) fail("geometry", "expected an object");
  GeometrySpec spec;
  auto kind_it = g.find("kind");
  if (kind_it == g.end() || !kind_it->is_string()) {
    throw ConfigError("geometry.kind", "geometry.kind must be \"lattice\" or \"sphere\"");
  }
  const std::string kind = kind_it->get<std::string>();
  std::set<std::string> allowed;
  if (kind == "lattice") {
    spec.kind = GeometryKind::kLattice;
    allowed = {"kind", "nx", "ny", "nz", "spacing_um"};
  } else if (kind == "sphere") {
    spec.kind = GeometryKind::kSphere;
    allowed = {"kind", "n_atoms", "diameter_um"};
  } else {
    fail("geometry.kind", "must be \"lattice\" or \"sphere\"");
  }
  for (const auto& [key, value] : g.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("geometry." + key, "unknown key 'geometry." + key + "'");
    }
  }
  auto prefixed = [&](auto getter, const std::string& key) {
    try {
      return getter(g, key);
    } catch (const ConfigError& e) {
      throw ConfigError("geometry." + key, e.what());
    }
  };
  if (spec.kind == GeometryKind::kLattice) {
    spec.nx = prefixed(get_small_int, "nx");
    spec.ny = prefixed(get_small_int, "ny");
    spec.nz = prefixed(get_small_int, "nz");
    spec.spacing = prefixed(get_number, "spacing_um") * units::kMetersPerUm;
    if (spec.nx < 1) fail("geometry.nx", "must be >= 1");
    if (spec.ny < 1) fail("geometry.ny", "must be >= 1");
    if (spec.nz < 1) fail("geometry.nz", "must be >= 1");
    require_positive("geometry.spacing_um", spec.spacing);
  } else {
    spec.n_atoms = prefixed(get_small_int, "n_atoms");
    spec.diameter = prefixed(get_number, "diameter_um") * units::kMetersPerUm;
    if (spec.n_atoms < 1) fail("geometry.n_atoms", "must be >= 1");
    require_positive("geometry.diameter_um", spec.diameter);
  }
  return spec;
}

// Smallest-ulp-distance decimal whose ingestion (value * factor) reproduces
// `si` bit-exactly.
double ingest_preimage(double si, double factor) {
  const double guess = si / factor;
  if (guess * factor == si) return guess;
  double down = guess, up = guess;
  for (int i = 0; i < 64; ++i) {
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    if (down * factor == si) return down;
    if (up * factor == si) return up;
  }
  return guess;
}

}  // namespace

void LinkParams::validate() const {
  require_positive("L0_km", L0);
  require_positive("L_att_km", L_att);
  require_positive("c_m_per_s", c);
  require_positive("t_p_us", t_p);
  require_probability("p", p);
  require_probability("eta_d", eta_d);
  require_probability("eta_ion", eta_ion);
  if (max_levels < 0) fail("max_levels", "must be >= 0");
  if (n_levels < 0) fail("n_levels", "must be >= 0");
  if (n_levels > max_levels) {
    fail("n_levels", "exceeds max_levels = " + std::to_string(max_levels));
  }
}

void BlockadeParams::validate() const {
  require_positive("B_over_2pi_MHz", B);
  require_positive("tau_us", tau);
  if (!(d >= 0.0) || !std::isfinite(d)) fail("optical_depth", "must be finite and >= 0");
  require_positive("Omega_s_over_2pi_MHz", Omega_s);
  require_positive("Omega_f_over_2pi_MHz", Omega_f);
  require_probability("eta_ion", eta_ion);
}

bool BlockadeParams::strong_drive_warning() const {
  return Omega_s / B > 0.5 || Omega_f / B > 0.5;
}

void AtomGeometry::validate() const {
  if (positions.empty()) fail("geometry", "at least one atom is required");
  for (const auto& r : positions) {
    for (double x : r) {
      if (!std::isfinite(x)) fail("geometry", "atom positions must be finite");
    }
  }
  require_positive("lambda_nm", lambda);
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (std::abs(norm - 1.0) > 1e-12) fail("axis", "must be a unit vector");
}

void ScenarioConfig::validate() const {
  link.validate();
  blockade.validate();
  require_positive("lambda_nm", lambda);
  require_positive("total_distance_km", total_distance);
  if (multiplex_m < 1) fail("multiplex_m", "must be >= 1");
  if (trials < 1) fail("trials", "must be >= 1");
  for (std::size_t i = 0; i < sweep_distances.size(); ++i) {
    require_positive("sweep_distances_km", sweep_distances[i]);
    if (i > 0 && sweep_distances[i] < sweep_distances[i - 1]) {
      fail("sweep_distances_km", "must be sorted ascending");
    }
  }
  if (sweep_fixed_n > link.max_levels) {
    fail("sweep_n_levels", "exceeds max_levels");
  }
  require_positive("direct_source_rate_GHz", direct_source_rate);
  if (!(fiber_loss_db_per_km >= 0.0)) fail("fiber_loss_db_per_km", "must be >= 0");
  if (!(collection_half_angle > 0.0 && collection_half_angle <= units::kPi)) {
    fail("collection_half_angle_rad", "must lie in (0, pi]");
  }
}

double derive_link_geometry(double total_distance, int n_levels) {
  return std::ldexp(total_distance, -n_levels);
}

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "top-level document must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key '" + key + "'");
  }

  ScenarioConfig cfg;
  LinkParams& link = cfg.link;
  if (doc.contains("max_levels")) link.max_levels = get_small_int(doc, "max_levels");

  const bool has_l0 = doc.contains("L0_km");
  const bool has_total = doc.contains("total_distance_km");
  if (has_l0 && has_total) {
    throw ConfigError("L0_km", "specify either 'L0_km' or 'total_distance_km' + 'n_levels', not both");
  }
  if (has_total) {
    if (!doc.contains("n_levels")) {
      throw ConfigError("n_levels", "'total_distance_km' requires 'n_levels'");
    }
    link.n_levels = get_small_int(doc, "n_levels");
    cfg.total_distance = get_number(doc, "total_distance_km") * units::kMetersPerKm;
    if (link.n_levels < 0) fail("n_levels", "must be >= 0");
    if (link.n_levels > link.max_levels) {
      fail("n_levels", "exceeds max_levels = " + std::to_string(link.max_levels));
    }
    link.L0 = derive_link_geometry(cfg.total_distance, link.n_levels);
  } else if (has_l0) {
    link.n_levels = doc.contains("n_levels") ? get_small_int(doc, "n_levels") : 0;
    link.L0 = get_number(doc, "L0_km") * units::kMetersPerKm;
    if (link.n_levels < 0) fail("n_levels", "must be >= 0");
    if (link.n_levels > link.max_levels) {
      fail("n_levels", "exceeds max_levels = " + std::to_string(link.max_levels));
    }
    cfg.total_distance = std::ldexp(link.L0, link.n_levels);
  } else {
    throw ConfigError("L0_km", "missing 'L0_km' (or 'total_distance_km' + 'n_levels')");
  }

  link.L_att = get_number(doc, "L_att_km") * units::kMetersPerKm;
  link.c = get_number(doc, "c_m_per_s");
  link.t_p = get_number(doc, "t_p_us") * units::kSecondsPerUs;
  link.p = get_number(doc, "p");
  link.eta_d = get_number(doc, "eta_d");
  link.eta_ion = get_number(doc, "eta_ion");

  BlockadeParams& bp = cfg.blockade;
  bp.B = get_number(doc, "B_over_2pi_MHz") * units::kRadPerSecPerMHz;
  bp.tau = get_number(doc, "tau_us") * units::kSecondsPerUs;
  bp.d = get_number(doc, "optical_depth");
  bp.Omega_s = get_number(doc, "Omega_s_over_2pi_MHz") * units::kRadPerSecPerMHz;
  bp.Omega_f = get_number(doc, "Omega_f_over_2pi_MHz") * units::kRadPerSecPerMHz;
  bp.eta_ion = link.eta_ion;

  if (!doc.contains("geometry")) throw ConfigError("geometry", "missing required key 'geometry'");
  cfg.geometry = parse_geometry(doc["geometry"]);
  cfg.lambda = get_number(doc, "lambda_nm") * units::kMetersPerNm;
  cfg.multiplex_m = get_small_int(doc, "multiplex_m");

  {
    const json& seed = doc.contains("rng_seed") ? doc["rng_seed"] : json();
    if (seed.is_null()) throw ConfigError("rng_seed", "missing required key 'rng_seed'");
    if (seed.is_number_unsigned()) {
      cfg.rng_seed = seed.get<std::uint64_t>();
    } else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0) {
      cfg.rng_seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
    } else {
      fail("rng_seed", "expected a non-negative 64-bit integer");
    }
  }
  cfg.trials = get_integer(doc, "trials");

  if (doc.contains("sweep_distances_km")) {
    const json& arr = doc["sweep_distances_km"];
    if (!arr.is_array()) fail("sweep_distances_km", "expected an array of numbers");
    for (const auto& v : arr) {
      if (!v.is_number()) fail("sweep_distances_km", "expected an array of numbers");
      cfg.sweep_distances.push_back(v.get<double>() * units::kMetersPerKm);
    }
  }
  if (doc.contains("sweep_n_levels")) {
    const json& v = doc["sweep_n_levels"];
    if (v.is_string() && v.get<std::string>() == "best") {
      cfg.sweep_fixed_n = -1;
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      cfg.sweep_fixed_n = get_small_int(doc, "sweep_n_levels");
    } else {
      fail("sweep_n_levels", "expected \"best\" or a non-negative integer");
    }
  }
  if (doc.contains("direct_source_rate_GHz")) {
    cfg.direct_source_rate = get_number(doc, "direct_source_rate_GHz") * units::kHzPerGHz;
  }
  if (doc.contains("fiber_loss_db_per_km")) {
    cfg.fiber_loss_db_per_km = get_number(doc, "fiber_loss_db_per_km");
  }
  if (doc.contains("collection_half_angle_rad")) {
    cfg.collection_half_angle = get_number(doc, "collection_half_angle_rad");
  }
  if (doc.contains("multiplex_schedule")) {
    const json& v = doc["multiplex_schedule"];
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "staggered") {
      cfg.multiplex_schedule = MultiplexSchedule::kStaggered;
    } else if (s == "batch") {
      cfg.multiplex_schedule = MultiplexSchedule::kBatch;
    } else {
      fail("multiplex_schedule", "expected \"staggered\" or \"batch\"");
    }
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  using units::kMetersPerKm;
  json doc = json::object();
  doc["total_distance_km"] = ingest_preimage(cfg.total_distance, kMetersPerKm);
  doc["n_levels"] = cfg.link.n_levels;
  doc["max_levels"] = cfg.link.max_levels;
  doc["L_att_km"] = ingest_preimage(cfg.link.L_att, kMetersPerKm);
  doc["c_m_per_s"] = cfg.link.c;
  doc["t_p_us"] = ingest_preimage(cfg.link.t_p, units::kSecondsPerUs);
  doc["p"] = cfg.link.p;
  doc["eta_d"] = cfg.link.eta_d;
  doc["eta_ion"] = cfg.link.eta_ion;
  doc["B_over_2pi_MHz"] = ingest_preimage(cfg.blockade.B, units::kRadPerSecPerMHz);
  doc["tau_us"] = ingest_preimage(cfg.blockade.tau, units::kSecondsPerUs);
  doc["optical_depth"] = cfg.blockade.d;
  doc["Omega_s_over_2pi_MHz"] = ingest_preimage(cfg.blockade.Omega_s, units::kRadPerSecPerMHz);
  doc["Omega_f_over_2pi_MHz"] = ingest_preimage(cfg.blockade.Omega_f, units::kRadPerSecPerMHz);

  json g = json::object();
  if (cfg.geometry.kind == GeometryKind::kLattice) {
    g["kind"] = "lattice";
    g["nx"] = cfg.geometry.nx;
    g["ny"] = cfg.geometry.ny;
    g["nz"] = cfg.geometry.nz;
    g["spacing_um"] = ingest_preimage(cfg.geometry.spacing, units::kMetersPerUm);
  } else {
    g["kind"] = "sphere";
    g["n_atoms"] = cfg.geometry.n_atoms;
    g["diameter_um"] = ingest_preimage(cfg.geometry.diameter, units::kMetersPerUm);
  }
  doc["geometry"] = g;
  doc["lambda_nm"] = ingest_preimage(cfg.lambda, units::kMetersPerNm);
  doc["multiplex_m"] = cfg.multiplex_m;
  doc["rng_seed"] = cfg.rng_seed;
  doc["trials"] = cfg.trials;

  json dist = json::array();
  for (double v : cfg.sweep_distances) dist.push_back(ingest_preimage(v, kMetersPerKm));
  doc["sweep_distances_km"] = dist;
  if (cfg.sweep_fixed_n < 0) {
    doc["sweep_n_levels"] = "best";
  } else {
    doc["sweep_n_levels"] = cfg.sweep_fixed_n;
  }
  doc["direct_source_rate_GHz"] = ingest_preimage(cfg.direct_source_rate, units::kHzPerGHz);
  doc["fiber_loss_db_per_km"] = cfg.fiber_loss_db_per_km;
  doc["collection_half_angle_rad"] = cfg.collection_half_angle;
  doc["multiplex_schedule"] =
      cfg.multiplex_schedule == MultiplexSchedule::kStaggered ? "staggered" : "batch";
  return doc.dump(2) + "\n";
}

}  // namespace repsim
