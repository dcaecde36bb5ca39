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

#ifndef REPSIM_STATS_H_
#define REPSIM_STATS_H_

#include <span>

namespace repsim::stats {

struct Summary {
  double mean = 0;
  double stddev = 0;  // sample (n - 1) standard deviation
  double stderr_ = 0;
};

// Pairwise-reduced mean and spread; deterministic for a given sample order.
Summary summarize(std::span<const double> samples);

struct KsResult {
  double statistic = 0;  // sup |F_a - F_b|
  double p_value = 1;    // asymptotic Kolmogorov distribution
};

// Two-sample Kolmogorov-Smirnov test. Ties are handled by advancing both
// empirical CDFs past equal values, so discrete samples are fine (the test
// is then conservative).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

}  // namespace repsim::stats

#endif  // REPSIM_STATS_H_
