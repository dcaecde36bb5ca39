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

#include "repsim/rates.h"

#include <cmath>
#include <limits>

namespace repsim::rates {

double transmission_efficiency(double L0, double L_att) {
  return std::exp(-L0 / (2.0 * L_att));
}

double link_success_probability(double p, double eta_d, double eta_t) {
  return 0.5 * p * p * eta_d * eta_d * eta_t * eta_t;
}

double swap_success_probability(double eta_ion) { return eta_ion * eta_ion; }

double link_time(const LinkParams& link) {
  const double eta_t = transmission_efficiency(link.L0, link.L_att);
  const double P0 = link_success_probability(link.p, link.eta_d, eta_t);
  if (!(P0 > 0.0)) {
    throw DegenerateParameterError("link success probability is zero; link time is infinite");
  }
  return (link.t_p + link.L0 / link.c) / P0;
}

RateResult total_time(const LinkParams& link) {
  RateResult r;
  r.n_levels = link.n_levels;
  r.eta_t = transmission_efficiency(link.L0, link.L_att);
  r.P0 = link_success_probability(link.p, link.eta_d, r.eta_t);
  r.P_swap = swap_success_probability(link.eta_ion);
  r.T_link = link_time(link);
  if (link.n_levels == 0) {
    r.T_total = r.T_link;
    return r;
  }
  if (!(r.P_swap > 0.0)) {
    throw DegenerateParameterError("swap success probability is zero with n_levels >= 1");
  }
  r.T_total = std::pow(1.5 / r.P_swap, link.n_levels) * r.T_link;
  return r;
}

DirectTransmission direct_transmission_time(double L, double source_rate,
                                            double loss_db_per_km) {
  const double decibels = loss_db_per_km * (L / units::kMetersPerKm);
  const double t = std::pow(10.0, decibels / 10.0) / source_rate;
  if (!(t <= kDirectSaturation)) return {kDirectSaturation, true};
  return {t, false};
}

std::vector<SweepPoint> curve_sweep(std::span<const double> distances,
                                    const LinkParams& link_template, int n_fixed) {
  std::vector<SweepPoint> out;
  out.reserve(distances.size());
  for (double L : distances) {
    const int n_lo = n_fixed >= 0 ? n_fixed : 0;
    const int n_hi = n_fixed >= 0 ? n_fixed : link_template.max_levels;
    SweepPoint best;
    best.distance = L;
    best.rate.T_total = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int n = n_lo; n <= n_hi; ++n) {
      LinkParams link = link_template;
      link.n_levels = n;
      link.L0 = derive_link_geometry(L, n);
      RateResult r;
      try {
        r = total_time(link);
      } catch (const DegenerateParameterError&) {
        continue;
      }
      if (!found || r.T_total < best.rate.T_total) {
        best.L0 = link.L0;
        best.rate = r;
        found = true;
      }
    }
    if (!found) {
      best.L0 = derive_link_geometry(L, n_lo);
      best.rate.n_levels = n_lo;
      best.rate.eta_t = transmission_efficiency(best.L0, link_template.L_att);
      best.rate.P0 = link_success_probability(link_template.p, link_template.eta_d,
                                              best.rate.eta_t);
      best.rate.P_swap = swap_success_probability(link_template.eta_ion);
      best.rate.T_link = std::numeric_limits<double>::infinity();
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace repsim::rates
