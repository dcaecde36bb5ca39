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

#ifndef REPSIM_MODEL_H_
#define REPSIM_MODEL_H_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repsim {

// Ingestion-boundary unit factors. Everything past parse_config is SI.
namespace units {
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMetersPerKm = 1e3;
inline constexpr double kSecondsPerUs = 1e-6;
inline constexpr double kMetersPerUm = 1e-6;
inline constexpr double kMetersPerNm = 1e-9;
// Ordinary frequency in MHz to angular frequency in rad/s.
inline constexpr double kRadPerSecPerMHz = 2.0 * kPi * 1e6;
inline constexpr double kHzPerGHz = 1e9;
}  // namespace units

// Raised for malformed documents, unknown keys, and constraint violations.
// `field()` names the offending key (empty for pure syntax errors).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Raised when a formula would need P = 0 in a denominator.
class DegenerateParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr int kDefaultMaxLevels = 4;

struct LinkParams {
  double L0 = 0;           // elementary link length [m]
  double L_att = 0;        // fiber attenuation length [m]
  double c = 0;            // light speed in fiber [m/s]
  double t_p = 0;          // local preparation time [s]
  double p = 0;            // ensemble emission success probability
  double eta_d = 0;        // detector efficiency
  double eta_ion = 0;      // ionization read-out efficiency
  int n_levels = 0;        // nesting level; 2^n elementary links
  int max_levels = kDefaultMaxLevels;

  // Throws ConfigError on any violated invariant.
  void validate() const;
};

struct BlockadeParams {
  double B = 0;        // blockade shift [rad/s]
  double tau = 0;      // Rydberg lifetime [s]
  double d = 0;        // optical depth
  double Omega_s = 0;  // stationary-qubit Rabi frequency [rad/s]
  double Omega_f = 0;  // flying-qubit Rabi frequency [rad/s]
  double eta_ion = 0;

  void validate() const;
  // Omega / B above 0.5 for either qubit: perturbative formulas unreliable.
  bool strong_drive_warning() const;
};

using Vec3 = std::array<double, 3>;

struct AtomGeometry {
  std::vector<Vec3> positions;  // [m]
  double lambda = 0;            // emission wavelength [m]
  Vec3 axis{0, 0, 1};           // phase-matched emission direction

  void validate() const;
  std::size_t size() const { return positions.size(); }
};

enum class GeometryKind { kLattice, kSphere };

// Parametric geometry as written in a config file; realized into an
// AtomGeometry by the emission module.
struct GeometrySpec {
  GeometryKind kind = GeometryKind::kLattice;
  int nx = 1, ny = 1, nz = 1;
  double spacing = 0;  // [m]
  int n_atoms = 1;
  double diameter = 0;  // [m]
};

enum class MultiplexSchedule { kStaggered, kBatch };

struct ScenarioConfig {
  LinkParams link;
  BlockadeParams blockade;
  GeometrySpec geometry;
  double lambda = 0;          // [m]
  double total_distance = 0;  // [m]
  int multiplex_m = 1;
  std::uint64_t rng_seed = 0;
  std::int64_t trials = 1;

  // Optional keys with defaults.
  std::vector<double> sweep_distances;  // [m], sorted ascending
  int sweep_fixed_n = -1;               // -1: pick best n per distance
  double direct_source_rate = 10.0 * units::kHzPerGHz;  // [1/s]
  double fiber_loss_db_per_km = 0.2;
  double collection_half_angle = 0.3;  // [rad]
  MultiplexSchedule multiplex_schedule = MultiplexSchedule::kStaggered;

  void validate() const;
};

// L0 = L / 2^n.
double derive_link_geometry(double total_distance, int n_levels);

// Parses the flat JSON-style scenario document. Throws ConfigError.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config_file(const std::string& path);

// Writes a document that parse_config maps back to identical SI values.
std::string serialize_config(const ScenarioConfig& config);

}  // namespace repsim

#endif  // REPSIM_MODEL_H_
