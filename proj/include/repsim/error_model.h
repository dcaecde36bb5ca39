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

#ifndef REPSIM_ERROR_MODEL_H_
#define REPSIM_ERROR_MODEL_H_

#include "repsim/model.h"

namespace repsim::fidelity {

// Per-procedure error terms for the four blockade-mediated steps:
// initializing qubit s (is), initializing qubit f (if), entangling s with f
// (en) and swapping (sw). P2 is the double-excitation probability, Ploss the
// Rydberg spontaneous-emission probability, E the resulting error.
struct FidelityBudget {
  double P2_is = 0, P2_if = 0, P2_en = 0, P2_sw = 0;
  double Ploss_is = 0, Ploss_if = 0, Ploss_en = 0, Ploss_sw = 0;
  double E_is = 0, E_if = 0, E_en = 0, E_sw = 0;
  double E_c = 0;
  double E_n = 0;
  double F = 1;
  int n_levels = 0;

  bool perturbative_warning = false;  // some P2 or Ploss > 0.1
  bool strong_drive_warning = false;  // Omega / B > 0.5
  bool fidelity_clamped = false;      // E_n > 1, F forced to 0
};

inline constexpr double kPerturbativeLimit = 0.1;

// 2 (1 - eta_ion) eta_ion: probability that exactly one of the two ions from
// a double excitation is detected in the swap read-out.
double double_ion_coefficient(double eta_ion);

// Populates the P2 / Ploss / E rows; E_c, E_n and F are left at defaults.
FidelityBudget table1_terms(const BlockadeParams& bp);

// E_is + E_if + E_en.
double creation_error(const BlockadeParams& bp);

// Closed polynomial form of the creation error,
//   k Os^2/2B^2 + 3pi/(2 tau Os (d+1)) + 9 Of^2/8B^2 + 9pi/(4 tau Of (d+1)),
// with k the double-ion coefficient. `k < 0` selects double_ion_coefficient.
double creation_error_expanded(const BlockadeParams& bp, double k = -1.0);

struct FinalError {
  double E_n = 0;
  double F = 1;
  bool clamped = false;
};

// E_n = 2^n E_c + (2^n - 1) E_sw, F = 1 - E_n (clamped to 0).
FinalError final_error(double E_c, double E_sw, int n);

// table1_terms -> creation_error -> final_error.
FidelityBudget scenario_fidelity(const BlockadeParams& bp, int n);

// E_n(Os, Of) = a_s Os^2 + b_s / Os + a_f Of^2 + b_f / Of.
struct ErrorCoefficients {
  double a_s = 0, b_s = 0, a_f = 0, b_f = 0;
  double evaluate(double Omega_s, double Omega_f) const;
};
ErrorCoefficients error_coefficients(double B, double tau, double d, double eta_ion, int n);

struct RabiOptimum {
  double Omega_s = 0;  // [rad/s]; +inf if E_n has no Omega_s^2 penalty
  double Omega_f = 0;  // [rad/s]
  double F = 0;
  double E_n = 0;
  bool omega_s_unbounded = false;
  FidelityBudget budget;  // at the optimum (Omega_s capped when unbounded)
};

// Stationary point Omega* = (b / 2a)^(1/3) of each separable term.
RabiOptimum optimize_rabi(double B, double tau, double d, double eta_ion, int n);

// Operating point quoted alongside the optimizer output for comparison.
struct ReferenceOptimum {
  static constexpr double kOmegaSOver2piMHz = 0.209;
  static constexpr double kOmegaFOver2piMHz = 0.415;
  static constexpr double kFidelity = 0.977;
};

}  // namespace repsim::fidelity

#endif  // REPSIM_ERROR_MODEL_H_
