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

#include "repsim/error_model.h"

#include <cmath>
#include <limits>

namespace repsim::fidelity {
namespace {

using units::kPi;

bool over_limit(const FidelityBudget& b) {
  for (double v : {b.P2_is, b.P2_if, b.P2_en, b.P2_sw, b.Ploss_is, b.Ploss_if, b.Ploss_en,
                   b.Ploss_sw}) {
    if (v > kPerturbativeLimit) return true;
  }
  return false;
}

}  // namespace

double double_ion_coefficient(double eta_ion) { return 2.0 * (1.0 - eta_ion) * eta_ion; }

FidelityBudget table1_terms(const BlockadeParams& bp) {
  const double B2 = bp.B * bp.B;
  const double Os = bp.Omega_s, Of = bp.Omega_f, tau = bp.tau;
  const double suppression = bp.d + 1.0;

  FidelityBudget b;
  b.P2_is = Os * Os / (2.0 * B2);
  b.Ploss_is = kPi / (tau * Os);
  b.E_is = double_ion_coefficient(bp.eta_ion) * b.P2_is + b.Ploss_is / suppression;

  b.P2_if = Of * Of / (2.0 * B2);
  b.Ploss_if = kPi / (tau * Of);
  b.E_if = 2.0 * b.P2_if + b.Ploss_if / suppression;

  b.P2_en = Of * Of / (8.0 * B2);
  b.Ploss_en = 5.0 * kPi / (4.0 * tau * Of) + kPi / (2.0 * tau * Os);
  b.E_en = b.P2_en + b.Ploss_en / suppression;

  b.P2_sw = Os * Os / (8.0 * B2);
  b.Ploss_sw = 7.0 * kPi / (4.0 * tau * Os);
  b.E_sw = b.P2_sw + b.Ploss_sw / suppression;

  b.perturbative_warning = over_limit(b);
  b.strong_drive_warning = bp.strong_drive_warning();
  return b;
}

double creation_error(const BlockadeParams& bp) {
  const FidelityBudget b = table1_terms(bp);
  return b.E_is + b.E_if + b.E_en;
}

double creation_error_expanded(const BlockadeParams& bp, double k) {
  if (k < 0.0) k = double_ion_coefficient(bp.eta_ion);
  const double B2 = bp.B * bp.B;
  const double Os = bp.Omega_s, Of = bp.Omega_f;
  const double loss = bp.tau * (bp.d + 1.0);
  return k * Os * Os / (2.0 * B2) + 3.0 * kPi / (2.0 * Os * loss) + 9.0 * Of * Of / (8.0 * B2) +
         9.0 * kPi / (4.0 * Of * loss);
}

FinalError final_error(double E_c, double E_sw, int n) {
  const double links = std::ldexp(1.0, n);
  FinalError r;
  r.E_n = links * E_c + (links - 1.0) * E_sw;
  if (r.E_n > 1.0) {
    r.F = 0.0;
    r.clamped = true;
  } else {
    r.F = 1.0 - r.E_n;
  }
  return r;
}

FidelityBudget scenario_fidelity(const BlockadeParams& bp, int n) {
  FidelityBudget b = table1_terms(bp);
  b.n_levels = n;
  b.E_c = creation_error(bp);
  const FinalError fe = final_error(b.E_c, b.E_sw, n);
  b.E_n = fe.E_n;
  b.F = fe.F;
  b.fidelity_clamped = fe.clamped;
  return b;
}

double ErrorCoefficients::evaluate(double Omega_s, double Omega_f) const {
  return a_s * Omega_s * Omega_s + b_s / Omega_s + a_f * Omega_f * Omega_f + b_f / Omega_f;
}

ErrorCoefficients error_coefficients(double B, double tau, double d, double eta_ion, int n) {
  const double links = std::ldexp(1.0, n);
  const double swaps = links - 1.0;
  const double B2 = B * B;
  const double loss = tau * (d + 1.0);
  ErrorCoefficients c;
  // Omega_s: E_is and E_en (per link), E_sw (per swap).
  c.a_s = links * double_ion_coefficient(eta_ion) / (2.0 * B2) + swaps / (8.0 * B2);
  c.b_s = (links * 1.5 * kPi + swaps * 1.75 * kPi) / loss;
  // Omega_f: E_if and E_en only.
  c.a_f = links * (9.0 / 8.0) / B2;
  c.b_f = links * (9.0 * kPi / 4.0) / loss;
  return c;
}

RabiOptimum optimize_rabi(double B, double tau, double d, double eta_ion, int n) {
  const ErrorCoefficients c = error_coefficients(B, tau, d, eta_ion, n);
  RabiOptimum opt;
  opt.Omega_f = std::cbrt(c.b_f / (2.0 * c.a_f));
  double Es = 0.0;
  if (c.a_s > 0.0) {
    opt.Omega_s = std::cbrt(c.b_s / (2.0 * c.a_s));
    Es = c.a_s * opt.Omega_s * opt.Omega_s + c.b_s / opt.Omega_s;
  } else {
    opt.Omega_s = std::numeric_limits<double>::infinity();
    opt.omega_s_unbounded = true;
  }
  opt.E_n = Es + c.a_f * opt.Omega_f * opt.Omega_f + c.b_f / opt.Omega_f;
  opt.F = opt.E_n > 1.0 ? 0.0 : 1.0 - opt.E_n;

  BlockadeParams bp;
  bp.B = B;
  bp.tau = tau;
  bp.d = d;
  bp.eta_ion = eta_ion;
  bp.Omega_f = opt.Omega_f;
  // The budget needs a finite drive; at 1e100 rad/s the 1/Omega_s terms are negligible.
  bp.Omega_s = opt.omega_s_unbounded ? 1e100 : opt.Omega_s;
  opt.budget = scenario_fidelity(bp, n);
  return opt;
}

}  // namespace repsim::fidelity
