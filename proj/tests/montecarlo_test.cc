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

#include "repsim/montecarlo.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "repsim/stats.h"

using namespace repsim;
using namespace repsim::mc;

namespace {

constexpr double kTp = 20e-6;
constexpr double kTcom = 312.5e-6;
constexpr double kRound = kTp + kTcom;

SimOptions opts(std::uint64_t seed, std::int64_t trials, unsigned workers = 1) {
  SimOptions o;
  o.seed = seed;
  o.trials = trials;
  o.workers = workers;
  return o;
}

// E[max(A, B)] in rounds for i.i.d. geometric A, B, by summing tail
// probabilities P(max >= k) = 1 - (1 - q^(k-1))^2.
double series_expected_max(double P0) {
  const double q = 1 - P0;
  double sum = 0, qk = 1;  // q^(k-1)
  for (int k = 1; k < 100000 && qk > 1e-300; ++k) {
    sum += 1 - (1 - qk) * (1 - qk);
    qk *= q;
  }
  return sum;
}

// Launch times from the slot-availability recurrence: the preparation
// stage is serial (t_p apart) and each slot relaunches only after its
// previous herald returns.
std::vector<double> staggered_launches(int m, int count) {
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) {
    double t = 0;
    if (i >= 1) t = std::max(t, s[i - 1] + kTp);
    if (i >= m) t = std::max(t, s[i - m] + kTp + kTcom);
    s[i] = t;
  }
  return s;
}

// Mean link time for a multiplexed register, summing the geometric pmf over
// the recurrence launch times.
double expected_multiplexed_time(double P0, int m) {
  const int count = static_cast<int>(60 / P0);
  const auto s = staggered_launches(m, count);
  double mean = 0, pk = P0;
  for (int i = 0; i < count; ++i) {
    mean += pk * (s[i] + kRound);
    pk *= 1 - P0;
  }
  return mean;
}

}  // namespace

TEST(simulate_link, certain_success) {
  const SimOutcome r = simulate_link(1.0, kTp, kTcom, opts(1, 1000));
  EXPECT_EQ(r.trials, 1000);
  for (double t : r.samples) ASSERT_EQ(t, kRound);
  EXPECT_EQ(r.link_attempts, 1000u);
  EXPECT_FALSE(r.partial);
}

TEST(simulate_link, mean_matches_geometric) {
  for (double P0 : {0.3, 0.02}) {
    const SimOutcome r = simulate_link(P0, kTp, kTcom, opts(17, 200000));
    EXPECT_NEAR(r.mean, kRound / P0, 4 * r.stderr_) << P0;
    EXPECT_NEAR(static_cast<double>(r.link_attempts) / r.trials, 1 / P0, 0.02 / P0);
  }
}

TEST(simulate_link, rejects_degenerate_probability) {
  EXPECT_THROW(simulate_link(0.0, kTp, kTcom, opts(1, 10)), DegenerateParameterError);
  EXPECT_THROW(simulate_link(1.5, kTp, kTcom, opts(1, 10)), DegenerateParameterError);
}

TEST(simulate_link, coupled_samples_monotone_in_probability) {
  const SimOutcome lo = simulate_link(0.05, kTp, kTcom, opts(5, 5000));
  const SimOutcome hi = simulate_link(0.2, kTp, kTcom, opts(5, 5000));
  for (std::size_t i = 0; i < lo.samples.size(); ++i) {
    ASSERT_LE(hi.samples[i], lo.samples[i]);
  }
}

TEST(simulate_two_links_waiting, expected_max_of_two_geometrics) {
  for (double P0 : {0.5, 0.1, 0.01}) {
    const double closed = (3 - 2 * P0) / (P0 * (2 - P0));
    EXPECT_NEAR(series_expected_max(P0) / closed, 1.0, 1e-12);
    const SimOutcome r = simulate_two_links_waiting(P0, kTp, kTcom, opts(3, 200000));
    EXPECT_NEAR(r.mean, closed * kRound, 4 * r.stderr_) << P0;
  }
}

// The full engine restricted to one level with perfect swaps is exactly the
// two-link waiting time, draw for draw.
TEST(simulate_nested, reduces_to_two_link_wait) {
  const LinkTimeModel model{0.07, kTp, kTcom, 1, MultiplexSchedule::kStaggered};
  const SimOutcome nested = simulate_nested(model, 1.0, 1, opts(9, 20000));
  const SimOutcome pair = simulate_two_links_waiting(0.07, kTp, kTcom, opts(9, 20000));
  EXPECT_EQ(nested.samples, pair.samples);

  const SimOutcome other = simulate_two_links_waiting(0.07, kTp, kTcom, opts(10, 20000));
  EXPECT_GT(stats::ks_two_sample(nested.samples, other.samples).p_value, 1e-3);
}

TEST(simulate_nested, zero_levels_is_single_link) {
  const LinkTimeModel model{0.07, kTp, kTcom, 1, MultiplexSchedule::kStaggered};
  const SimOutcome nested = simulate_nested(model, 0.5, 0, opts(4, 5000));
  const SimOutcome link = simulate_link(0.07, kTp, kTcom, opts(4, 5000));
  EXPECT_EQ(nested.samples, link.samples);
  EXPECT_EQ(nested.swap_attempts, 0u);
}

TEST(simulate_nested, certain_links_and_swaps) {
  const LinkTimeModel model{1.0, kTp, kTcom, 1, MultiplexSchedule::kStaggered};
  for (int n = 0; n <= 4; ++n) {
    const SimOutcome r = simulate_nested(model, 1.0, n, opts(1, 100));
    for (double t : r.samples) ASSERT_EQ(t, kRound);
    EXPECT_EQ(r.swap_attempts, 100u * ((1u << n) - 1));
  }
}

// A failed top-level swap restarts the whole trial, so one level costs
// E[max] / P_swap rounds.
TEST(simulate_nested, one_level_with_lossy_swap) {
  const double P0 = 0.1, Ps = 0.6;
  const LinkTimeModel model{P0, kTp, kTcom, 1, MultiplexSchedule::kStaggered};
  const SimOutcome r = simulate_nested(model, Ps, 1, opts(21, 200000));
  const double want = series_expected_max(P0) * kRound / Ps;
  EXPECT_NEAR(r.mean, want, 4 * r.stderr_);
  EXPECT_NEAR(static_cast<double>(r.swap_attempts) / r.trials, 1 / Ps, 0.01);
}

TEST(simulate_nested, worker_count_does_not_change_results) {
  const LinkTimeModel model{0.05, kTp, kTcom, 3, MultiplexSchedule::kStaggered};
  const SimOutcome a = simulate_nested(model, 0.9, 3, opts(8, 20000, 1));
  const SimOutcome b = simulate_nested(model, 0.9, 3, opts(8, 20000, 4));
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.link_attempts, b.link_attempts);
  EXPECT_EQ(a.swap_attempts, b.swap_attempts);
}

TEST(simulate_nested, round_budget_truncates_deterministically) {
  const LinkTimeModel model{1e-3, kTp, kTcom, 1, MultiplexSchedule::kStaggered};
  SimOptions o = opts(2, 20000, 1);
  o.max_rounds = 1'000'000;
  const SimOutcome a = simulate_nested(model, 1.0, 1, o);
  EXPECT_TRUE(a.partial);
  EXPECT_GT(a.trials, 0);
  EXPECT_LT(a.trials, 20000);
  EXPECT_LE(a.link_attempts, o.max_rounds);
  o.workers = 3;
  const SimOutcome b = simulate_nested(model, 1.0, 1, o);
  EXPECT_EQ(a.samples, b.samples);
}

TEST(simulate_repeater, uses_link_parameters) {
  LinkParams link;
  link.L0 = 62.5e3;
  link.L_att = 22e3;
  link.c = 2e8;
  link.t_p = 20e-6;
  link.p = 0.9;
  link.eta_d = 0.9;
  link.eta_ion = 0.95;
  link.n_levels = 0;
  const SimOutcome r = simulate_repeater(link, opts(6, 100000));
  const LinkTimeModel model = link_model_for(link);
  EXPECT_DOUBLE_EQ(model.t_com, 62.5e3 / 2e8);
  EXPECT_NEAR(r.mean, (model.t_p + model.t_com) / model.P0, 4 * r.stderr_);
}

TEST(LinkTimeModel, closed_form_matches_recurrence) {
  for (int m : {1, 2, 5, 16, 29}) {
    const LinkTimeModel model{0.5, kTp, kTcom, m, MultiplexSchedule::kStaggered};
    const auto s = staggered_launches(m, 200);
    for (int i = 0; i < 200; ++i) {
      const double closed = (i / m) * model.cycle() + (i % m) * model.stagger();
      ASSERT_NEAR(closed, s[i], 1e-15) << m << " " << i;
    }
  }
  const LinkTimeModel batch{0.5, kTp, kTcom, 4, MultiplexSchedule::kBatch};
  EXPECT_EQ(batch.cycle(), kRound);
  EXPECT_EQ(batch.stagger(), 0.0);
}

TEST(LinkTimeModel, oversubscription) {
  EXPECT_FALSE((LinkTimeModel{0.1, kTp, kTcom, 15, MultiplexSchedule::kStaggered}.oversubscribed()));
  EXPECT_TRUE((LinkTimeModel{0.1, kTp, kTcom, 16, MultiplexSchedule::kStaggered}.oversubscribed()));
}

TEST(simulate_multiplexed_link, certain_success_any_register_size) {
  for (int m : {1, 4, 29}) {
    const SimOutcome r =
        simulate_multiplexed_link(1.0, kTp, kTcom, m, MultiplexSchedule::kStaggered, opts(1, 50));
    for (double t : r.samples) ASSERT_EQ(t, kRound);
  }
}

TEST(simulate_multiplexed_link, mean_matches_recurrence_oracle) {
  for (int m : {2, 8, 29}) {
    const double P0 = 0.02;
    const SimOutcome r = simulate_multiplexed_link(P0, kTp, kTcom, m,
                                                   MultiplexSchedule::kStaggered, opts(12, 200000));
    EXPECT_NEAR(r.mean, expected_multiplexed_time(P0, m), 4 * r.stderr_) << m;
  }
}

TEST(compare_multiplexing, speedup_within_bound) {
  const double P0 = 0.01;
  for (int m : {1, 4, 16, 29}) {
    const MultiplexReport rep = compare_multiplexing(P0, kTp, kTcom, m,
                                                     MultiplexSchedule::kStaggered, opts(31, 100000));
    EXPECT_NEAR(rep.pipeline_limit, kRound / (kTcom * P0 + kTp), 1e-12);
    EXPECT_EQ(rep.bound, std::min<double>(m, rep.pipeline_limit));
    EXPECT_LE(rep.speedup, rep.bound + 3 * rep.speedup_stderr) << m;
    EXPECT_GE(rep.speedup, 0.7 * rep.bound) << m;
    const double want = expected_multiplexed_time(P0, 1) / expected_multiplexed_time(P0, m);
    EXPECT_NEAR(rep.speedup, want, 4 * rep.speedup_stderr + 1e-12) << m;
    if (m == 1) EXPECT_EQ(rep.speedup, 1.0);
  }
}

TEST(ProtocolState, tree_bookkeeping) {
  ProtocolState s(2);
  EXPECT_EQ(s.links(), 4u);
  EXPECT_EQ(s.leaf_node(3), 7u);
  s.schedule(0, 1.0);
  EXPECT_EQ(s.slot(0), ProtocolState::Slot::kPending);
  EXPECT_EQ(s.slot_time(0), 1.0);
  const std::size_t n0 = s.entangle(0, 1.0);
  EXPECT_EQ(n0, 4u);
  EXPECT_FALSE(s.sibling_ready(n0));
  EXPECT_TRUE(s.segment_ready(0, 0));
  const std::size_t n1 = s.entangle(1, 2.0);
  EXPECT_TRUE(s.sibling_ready(n1));
  s.mark_ready(2);
  EXPECT_TRUE(s.segment_ready(1, 0));
  EXPECT_FALSE(s.segment_ready(2, 0));
  EXPECT_EQ(s.clock(), 2.0);
  EXPECT_THROW(s.entangle(2, 1.5), std::logic_error);

  const auto [first, last] = s.reset_subtree(2);
  EXPECT_EQ(first, 0u);
  EXPECT_EQ(last, 2u);
  EXPECT_FALSE(s.segment_ready(1, 0));
  EXPECT_FALSE(s.segment_ready(0, 1));
  EXPECT_EQ(s.slot(0), ProtocolState::Slot::kEmpty);

  const auto all = s.reset_subtree(1);
  EXPECT_EQ(all.first, 0u);
  EXPECT_EQ(all.second, 4u);
}
