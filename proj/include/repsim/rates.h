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

#ifndef REPSIM_RATES_H_
#define REPSIM_RATES_H_

#include <span>
#include <vector>

#include "repsim/model.h"

namespace repsim::rates {

struct RateResult {
  double eta_t = 0;
  double P0 = 0;
  double P_swap = 0;
  double T_link = 0;   // [s]
  double T_total = 0;  // [s]
  int n_levels = 0;
};

// exp(-L0 / (2 L_att)): loss over half the link, source to midpoint station.
double transmission_efficiency(double L0, double L_att);

// Two-photon coincidence probability, p^2 eta_d^2 eta_t^2 / 2.
double link_success_probability(double p, double eta_d, double eta_t);

// One read-out per swapped qubit: eta_ion^2.
double swap_success_probability(double eta_ion);

// Mean elementary-link time (t_p + L0/c) / P0.
// Throws DegenerateParameterError if P0 == 0.
double link_time(const LinkParams& link);

// Nested total time (3 / (2 P_swap))^n * T_link.
RateResult total_time(const LinkParams& link);

struct DirectTransmission {
  double seconds = 0;
  bool saturated = false;  // true if the time exceeds kDirectSaturation
};
inline constexpr double kDirectSaturation = 1e30;

// Single-photon source at `source_rate` through `L` meters of fiber with
// `loss_db_per_km` attenuation: (1/rate) 10^(loss L / 10).
DirectTransmission direct_transmission_time(double L, double source_rate,
                                            double loss_db_per_km);

struct SweepPoint {
  double distance = 0;  // [m]
  double L0 = 0;        // [m]
  RateResult rate;
};

// n_fixed < 0 selects, per distance, the n in [0, link.max_levels] with the
// smallest T_total (ties go to the smaller n). Distances with no finite
// candidate report T_total = +inf at n = 0.
std::vector<SweepPoint> curve_sweep(std::span<const double> distances,
                                    const LinkParams& link_template, int n_fixed);

}  // namespace repsim::rates

#endif  // REPSIM_RATES_H_
