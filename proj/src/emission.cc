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

#include "repsim/emission.h"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "repsim/parallel.h"
#include "repsim/rng.h"

namespace repsim::emission {
namespace {

using units::kPi;

// Stream id reserved for geometry sampling; Monte Carlo trials use the low
// stream ids.
constexpr std::uint64_t kGeometryStream = ~std::uint64_t{0};

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

template <unsigned N>
GaussRule expand_rule() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  GaussRule r;
  // Boost stores the non-negative half; mirror it.
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    r.nodes.push_back(-x[i]);
    r.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(x[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

GaussRule gauss_rule(int order) {
  switch (order) {
    case 8: return expand_rule<8>();
    case 10: return expand_rule<10>();
    case 16: return expand_rule<16>();
    case 20: return expand_rule<20>();
    case 24: return expand_rule<24>();
    case 30: return expand_rule<30>();
    case 32: return expand_rule<32>();
    default:
      throw std::invalid_argument("unsupported Gauss-Legendre order " + std::to_string(order) +
                                  " (use 8, 10, 16, 20, 24, 30 or 32)");
  }
}

struct Frame {
  Vec3 e1, e2, axis;
};

Frame frame_for(const Vec3& a) {
  // World axis least aligned with a, projected onto the plane normal to a.
  int w = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(a[i]) < std::abs(a[w])) w = i;
  }
  Vec3 e1{0, 0, 0};
  e1[w] = 1.0;
  const double dot = a[w];
  for (int i = 0; i < 3; ++i) e1[i] -= dot * a[i];
  const double n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (double& v : e1) v /= n;
  const Vec3 e2{a[1] * e1[2] - a[2] * e1[1], a[2] * e1[0] - a[0] * e1[2],
                a[0] * e1[1] - a[1] * e1[0]};
  return {e1, e2, a};
}

Vec3 compose(const Frame& f, double cos_t, double sin_t, double phi) {
  const double cp = std::cos(phi), sp = std::sin(phi);
  Vec3 k;
  for (int i = 0; i < 3; ++i) {
    k[i] = sin_t * (cp * f.e1[i] + sp * f.e2[i]) + cos_t * f.axis[i];
  }
  return k;
}

}  // namespace

AtomGeometry build_cubic_lattice(int nx, int ny, int nz, double spacing, double lambda) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("lattice dimensions must be >= 1");
  if (!(spacing > 0)) throw std::invalid_argument("lattice spacing must be > 0");
  AtomGeometry g;
  g.lambda = lambda;
  g.axis = {0, 0, 1};
  g.positions.reserve(static_cast<std::size_t>(nx) * ny * nz);
  const double cx = 0.5 * (nx - 1), cy = 0.5 * (ny - 1), cz = 0.5 * (nz - 1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      for (int l = 0; l < nz; ++l) {
        g.positions.push_back({(i - cx) * spacing, (j - cy) * spacing, (l - cz) * spacing});
      }
    }
  }
  return g;
}

AtomGeometry sample_sphere(int n_atoms, double diameter, std::uint64_t seed, double lambda) {
  if (n_atoms < 1) throw std::invalid_argument("sphere needs at least one atom");
  if (!(diameter > 0)) throw std::invalid_argument("sphere diameter must be > 0");
  AtomGeometry g;
  g.lambda = lambda;
  g.axis = {0, 0, 1};
  g.positions.reserve(n_atoms);
  CounterRng rng(seed, kGeometryStream);
  const double radius = 0.5 * diameter;
  while (static_cast<int>(g.positions.size()) < n_atoms) {
    Vec3 r;
    for (double& x : r) x = (2.0 * rng.uniform() - 1.0) * radius;
    if (r[0] * r[0] + r[1] * r[1] + r[2] * r[2] <= radius * radius) g.positions.push_back(r);
  }
  return g;
}

AtomGeometry realize_geometry(const GeometrySpec& spec, double lambda, std::uint64_t seed) {
  if (spec.kind == GeometryKind::kLattice) {
    return build_cubic_lattice(spec.nx, spec.ny, spec.nz, spec.spacing, lambda);
  }
  return sample_sphere(spec.n_atoms, spec.diameter, seed, lambda);
}

double pattern_value(const AtomGeometry& g, const Vec3& khat) {
  const double k = 2.0 * kPi / g.lambda;
  const Vec3 q{k * (g.axis[0] - khat[0]), k * (g.axis[1] - khat[1]), k * (g.axis[2] - khat[2])};
  double re = 0.0, im = 0.0;
  for (const Vec3& r : g.positions) {
    const double phase = q[0] * r[0] + q[1] * r[1] + q[2] * r[2];
    re += std::cos(phase);
    im -= std::sin(phase);
  }
  return (re * re + im * im) / static_cast<double>(g.positions.size());
}

Vec3 direction(const AtomGeometry& g, double theta, double phi) {
  return compose(frame_for(g.axis), std::cos(theta), std::sin(theta), phi);
}

double integrate_band(const AtomGeometry& g, double theta_lo, double theta_hi, int panels,
                      int gauss_order, int phi_nodes, unsigned workers) {
  if (!(theta_hi > theta_lo) || panels < 1 || phi_nodes < 1) return 0.0;
  const GaussRule rule = gauss_rule(gauss_order);
  const Frame frame = frame_for(g.axis);
  const double dtheta = (theta_hi - theta_lo) / panels;
  const double dphi = 2.0 * kPi / phi_nodes;

  std::vector<double> panel_sums(static_cast<std::size_t>(panels));
  parallel_for(panel_sums.size(), workers, [&](std::size_t p) {
    const double t0 = theta_lo + dtheta * static_cast<double>(p);
    const double t1 = p + 1 == panel_sums.size() ? theta_hi : t0 + dtheta;
    // u = cos(theta) runs from cos(t1) up to cos(t0).
    const double u_lo = std::cos(t1), u_hi = std::cos(t0);
    const double half = 0.5 * (u_hi - u_lo), mid = 0.5 * (u_hi + u_lo);
    std::vector<double> node_sums(rule.nodes.size());
    std::vector<double> ring(static_cast<std::size_t>(phi_nodes));
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = mid + half * rule.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (int j = 0; j < phi_nodes; ++j) {
        ring[j] = pattern_value(g, compose(frame, u, s, dphi * j));
      }
      node_sums[i] = rule.weights[i] * half * pairwise_sum(ring) * dphi;
    }
    panel_sums[p] = pairwise_sum(node_sums);
  });
  return pairwise_sum(panel_sums);
}

CollectionReport collection_fraction(const AtomGeometry& g, double half_angle,
                                     const QuadratureSettings& settings) {
  if (!(half_angle > 0.0 && half_angle <= kPi)) {
    throw std::invalid_argument("cone half-angle must lie in (0, pi]");
  }
  g.validate();
  CollectionReport report;
  report.half_angle = half_angle;
  report.atoms = g.size();

  auto panels_for = [&](double span, int level) {
    const double base = std::ceil(span * settings.panels_per_radian);
    return std::max(2, static_cast<int>(base)) << level;
  };

  double previous = 0.0;
  for (int level = 0; level <= settings.max_refinements; ++level) {
    const int cap_panels = panels_for(half_angle, level);
    const int rest_panels = panels_for(kPi - half_angle, level);
    const int phi = settings.phi_nodes << level;
    const double cone = integrate_band(g, 0.0, half_angle, cap_panels, settings.gauss_order, phi,
                                       settings.workers);
    const double rest = half_angle < kPi ? integrate_band(g, half_angle, kPi, rest_panels,
                                                          settings.gauss_order, phi,
                                                          settings.workers)
                                         : 0.0;
    report.cone_integral = cone;
    report.total_integral = cone + rest;
    report.fraction = cone / (cone + rest);
    report.refinements = level;
    report.theta_nodes = (cap_panels + (half_angle < kPi ? rest_panels : 0)) * settings.gauss_order;
    report.phi_nodes = phi;
    if (level > 0) {
      report.last_change = std::abs(report.fraction - previous);
      if (report.last_change < settings.tolerance) {
        report.converged = true;
        break;
      }
    }
    previous = report.fraction;
  }
  return report;
}

EmissionPattern::EmissionPattern(AtomGeometry geometry, const QuadratureSettings& settings)
    : geometry_(std::move(geometry)) {
  normalization_ = collection_fraction(geometry_, kPi, settings).total_integral;
}

std::vector<PatternSample> pattern_grid(const AtomGeometry& g, int n_theta, int n_phi) {
  std::vector<PatternSample> out;
  if (n_theta < 1 || n_phi < 1) return out;
  out.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  const Frame frame = frame_for(g.axis);
  for (int i = 0; i < n_theta; ++i) {
    const double theta = n_theta == 1 ? 0.0 : kPi * i / (n_theta - 1);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * kPi * j / n_phi;
      const double value = i == 0 ? pattern_value(g, g.axis)
                                  : pattern_value(g, compose(frame, std::cos(theta),
                                                             std::sin(theta), phi));
      out.push_back({theta, phi, value});
    }
  }
  return out;
}

}  // namespace repsim::emission
