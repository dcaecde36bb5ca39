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

#ifndef REPSIM_EMISSION_H_
#define REPSIM_EMISSION_H_

#include <cstdint>
#include <vector>

#include "repsim/model.h"

namespace repsim::emission {

// nx * ny * nz sites centered on the origin; nz runs along the emission
// axis (+z).
AtomGeometry build_cubic_lattice(int nx, int ny, int nz, double spacing, double lambda);

// i.i.d. uniform points in a ball of the given diameter, by rejection from
// the bounding cube. Deterministic in `seed`.
AtomGeometry sample_sphere(int n_atoms, double diameter, std::uint64_t seed, double lambda);

AtomGeometry realize_geometry(const GeometrySpec& spec, double lambda, std::uint64_t seed);

// Relative cooperative-emission intensity into direction `khat`:
//   (1/N) |sum_j exp(-i q . r_j)|^2,  q = (2 pi / lambda) (axis - khat).
// Equals N along the axis and averages to ~1 for uncorrelated directions.
double pattern_value(const AtomGeometry& geometry, const Vec3& khat);

// Direction with polar angle theta from the axis and azimuth phi, in a
// right-handed frame whose third vector is the axis.
Vec3 direction(const AtomGeometry& geometry, double theta, double phi);

struct QuadratureSettings {
  int gauss_order = 16;            // nodes per panel in cos(theta)
  double panels_per_radian = 8.0;  // level-0 panel density along theta
  int phi_nodes = 32;              // level-0 azimuthal nodes
  int max_refinements = 6;
  double tolerance = 1e-3;  // stop when the fraction moves less than this
  unsigned workers = 0;     // 0: hardware concurrency
};

// Integral of the pattern over theta in [theta_lo, theta_hi], all phi, with
// `panels` Gauss-Legendre panels in cos(theta) and `phi_nodes` uniform
// azimuthal nodes. Summation order is fixed, independent of `workers`.
double integrate_band(const AtomGeometry& geometry, double theta_lo, double theta_hi,
                      int panels, int gauss_order, int phi_nodes, unsigned workers);

struct CollectionReport {
  double half_angle = 0;
  double fraction = 0;
  double cone_integral = 0;
  double total_integral = 0;
  int refinements = 0;  // doublings performed beyond level 0
  int theta_nodes = 0;  // at the final level, over [0, pi]
  int phi_nodes = 0;
  double last_change = 0;
  bool converged = false;
  std::size_t atoms = 0;
};

// Fraction of the emitted power within `half_angle` of the axis, with
// adaptive doubling of the angular resolution until the fraction changes by
// less than settings.tolerance.
CollectionReport collection_fraction(const AtomGeometry& geometry, double half_angle,
                                     const QuadratureSettings& settings = {});

// Normalized pattern: value(k) / total power over the sphere.
class EmissionPattern {
 public:
  EmissionPattern(AtomGeometry geometry, const QuadratureSettings& settings = {});
  double operator()(const Vec3& khat) const { return pattern_value(geometry_, khat); }
  double normalization() const { return normalization_; }
  const AtomGeometry& geometry() const { return geometry_; }

 private:
  AtomGeometry geometry_;
  double normalization_ = 0;
};

struct PatternSample {
  double theta = 0, phi = 0, value = 0;
};

// Regular dump grid: theta in [0, pi] (n_theta points), phi in [0, 2 pi)
// (n_phi points).
std::vector<PatternSample> pattern_grid(const AtomGeometry& geometry, int n_theta, int n_phi);

}  // namespace repsim::emission

#endif  // REPSIM_EMISSION_H_
