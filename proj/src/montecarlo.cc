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

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>

#include "repsim/parallel.h"
#include "repsim/rates.h"
#include "repsim/stats.h"

namespace repsim::mc {
namespace {

struct TrialResult {
  double time = 0;
  std::uint64_t link_attempts = 0;
  std::uint64_t swap_attempts = 0;
  bool aborted = false;
};

using TrialFn = std::function<TrialResult(CounterRng&)>;

// Trials are evaluated in fixed-size blocks so that the budget cut-off is a
// function of trial index alone, not of worker count or timing.
constexpr std::size_t kBlock = 8192;

SimOutcome run_trials(const SimOptions& options, const TrialFn& trial) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  SimOutcome out;
  out.seed = options.seed;
  out.samples.reserve(static_cast<std::size_t>(options.trials));
  const auto total = static_cast<std::size_t>(options.trials);
  std::uint64_t spent = 0;
  std::vector<TrialResult> block;
  for (std::size_t start = 0; start < total && !out.partial; start += kBlock) {
    const std::size_t count = std::min(kBlock, total - start);
    block.assign(count, {});
    parallel_for(count, options.workers, [&](std::size_t i) {
      CounterRng rng(options.seed, start + i);
      block[i] = trial(rng);
    });
    for (const TrialResult& r : block) {
      if (r.aborted || r.link_attempts > options.max_rounds - spent) {
        out.partial = true;
        break;
      }
      spent += r.link_attempts;
      out.samples.push_back(r.time);
      out.link_attempts += r.link_attempts;
      out.swap_attempts += r.swap_attempts;
    }
  }
  out.trials = static_cast<std::int64_t>(out.samples.size());
  const stats::Summary s = stats::summarize(out.samples);
  out.mean = out.trials > 0 ? s.mean : std::nan("");
  out.stderr_ = s.stderr_;
  return out;
}

void check_probability(double P0) {
  if (!(P0 > 0.0 && P0 <= 1.0)) {
    throw DegenerateParameterError("link success probability must lie in (0, 1]");
  }
}

}  // namespace

double LinkTimeModel::cycle() const {
  const double round = t_p + t_com;
  if (schedule == MultiplexSchedule::kBatch) return round;
  return std::max(m * t_p, round);
}

double LinkTimeModel::stagger() const {
  return schedule == MultiplexSchedule::kBatch ? 0.0 : t_p;
}

double LinkTimeModel::sample(CounterRng& rng, std::uint64_t* attempts) const {
  const std::uint64_t k = rng.geometric(P0);
  *attempts += k;
  const std::uint64_t i = k - 1;
  const auto slots = static_cast<std::uint64_t>(m);
  return static_cast<double>(i / slots) * cycle() + static_cast<double>(i % slots) * stagger() +
         (t_p + t_com);
}

LinkTimeModel link_model_for(const LinkParams& link, int m, MultiplexSchedule schedule) {
  LinkTimeModel model;
  model.P0 = rates::link_success_probability(
      link.p, link.eta_d, rates::transmission_efficiency(link.L0, link.L_att));
  model.t_p = link.t_p;
  model.t_com = link.L0 / link.c;
  model.m = m;
  model.schedule = schedule;
  return model;
}

ProtocolState::ProtocolState(int n_levels)
    : n_levels_(n_levels),
      slots_(std::size_t{1} << n_levels, Slot::kEmpty),
      times_(slots_.size(), 0.0),
      ready_(std::size_t{2} << n_levels, 0) {}

bool ProtocolState::segment_ready(int level, std::size_t index) const {
  return ready_[(slots_.size() >> level) + index];
}

void ProtocolState::schedule(std::size_t link, double ready_time) {
  slots_[link] = Slot::kPending;
  times_[link] = ready_time;
}

std::size_t ProtocolState::entangle(std::size_t link, double time) {
  if (time < clock_) throw std::logic_error("protocol clock moved backwards");
  clock_ = time;
  slots_[link] = Slot::kEntangled;
  times_[link] = time;
  const std::size_t node = leaf_node(link);
  ready_[node] = 1;
  return node;
}

std::pair<std::size_t, std::size_t> ProtocolState::reset_subtree(std::size_t node) {
  int level = 0;
  while ((node << level) < slots_.size()) ++level;
  for (int l = 0; l <= level; ++l) {
    const std::size_t lo = node << l, hi = (node + 1) << l;
    std::fill(ready_.begin() + lo, ready_.begin() + hi, 0);
  }
  const std::size_t first = (node << level) - slots_.size();
  const std::size_t last = first + (std::size_t{1} << level);
  std::fill(slots_.begin() + first, slots_.begin() + last, Slot::kEmpty);
  return {first, last};
}

SimOutcome simulate_link(double P0, double t_p, double t_com, const SimOptions& options) {
  return simulate_multiplexed_link(P0, t_p, t_com, 1, MultiplexSchedule::kStaggered, options);
}

SimOutcome simulate_two_links_waiting(double P0, double t_p, double t_com,
                                      const SimOptions& options) {
  check_probability(P0);
  const double round = t_p + t_com;
  return run_trials(options, [&](CounterRng& rng) {
    TrialResult r;
    const std::uint64_t a = rng.geometric(P0);
    const std::uint64_t b = rng.geometric(P0);
    r.link_attempts = a + b;
    r.time = static_cast<double>(std::max(a, b) - 1) * round + 0.0 + round;
    r.aborted = r.link_attempts > options.max_rounds;
    return r;
  });
}

SimOutcome simulate_multiplexed_link(double P0, double t_p, double t_com, int m,
                                     MultiplexSchedule schedule, const SimOptions& options) {
  check_probability(P0);
  if (m < 1) throw std::invalid_argument("multiplexing factor must be >= 1");
  LinkTimeModel model{P0, t_p, t_com, m, schedule};
  return run_trials(options, [&](CounterRng& rng) {
    TrialResult r;
    r.time = model.sample(rng, &r.link_attempts);
    r.aborted = r.link_attempts > options.max_rounds;
    return r;
  });
}

SimOutcome simulate_nested(const LinkTimeModel& model, double P_swap, int n_levels,
                           const SimOptions& options) {
  check_probability(model.P0);
  if (n_levels < 0 || n_levels > 20) throw std::invalid_argument("n_levels out of range");
  if (n_levels > 0 && !(P_swap > 0.0)) {
    throw DegenerateParameterError("swap success probability is zero with n_levels >= 1");
  }
  return run_trials(options, [&](CounterRng& rng) {
    TrialResult r;
    ProtocolState state(n_levels);
    using Event = std::pair<double, std::size_t>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    auto launch = [&](std::size_t link, double now) {
      const double t = now + model.sample(rng, &r.link_attempts);
      state.schedule(link, t);
      events.emplace(t, link);
    };
    for (std::size_t j = 0; j < state.links(); ++j) launch(j, 0.0);

    while (!events.empty()) {
      if (r.link_attempts > options.max_rounds) {
        r.aborted = true;
        return r;
      }
      const auto [time, link] = events.top();
      events.pop();
      std::size_t node = state.entangle(link, time);
      while (node > 1 && state.sibling_ready(node)) {
        const std::size_t parent = node >> 1;
        ++r.swap_attempts;
        if (rng.bernoulli(P_swap)) {
          state.mark_ready(parent);
          node = parent;
        } else {
          const auto [first, last] = state.reset_subtree(parent);
          for (std::size_t j = first; j < last; ++j) launch(j, state.clock());
          break;
        }
      }
      if (node == 1) {
        r.time = state.clock();
        return r;
      }
    }
    throw std::logic_error("event queue drained before delivery");
  });
}

SimOutcome simulate_repeater(const LinkParams& link, const SimOptions& options, int m,
                             MultiplexSchedule schedule) {
  const LinkTimeModel model = link_model_for(link, m, schedule);
  return simulate_nested(model, rates::swap_success_probability(link.eta_ion), link.n_levels,
                         options);
}

double pipeline_limit(double P0, double t_p, double t_com) {
  return (t_p + t_com) / (t_com * P0 + t_p);
}

MultiplexReport compare_multiplexing(double P0, double t_p, double t_com, int m,
                                     MultiplexSchedule schedule, const SimOptions& options) {
  MultiplexReport rep;
  rep.single = simulate_multiplexed_link(P0, t_p, t_com, 1, schedule, options);
  rep.multiplexed = simulate_multiplexed_link(P0, t_p, t_com, m, schedule, options);
  rep.pipeline_limit = pipeline_limit(P0, t_p, t_com);
  rep.bound = std::min(static_cast<double>(m), rep.pipeline_limit);
  rep.oversubscribed = LinkTimeModel{P0, t_p, t_com, m, schedule}.oversubscribed();

  const auto& a = rep.single.samples;
  const auto& b = rep.multiplexed.samples;
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) {
    rep.speedup = rep.single.mean / rep.multiplexed.mean;
    return rep;
  }
  const double ma = rep.single.mean, mb = rep.multiplexed.mean;
  rep.speedup = ma / mb;
  // Delta method on the paired (common random number) ratio.
  std::vector<double> va(n), vb(n), cab(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    va[i] = da * da;
    vb[i] = db * db;
    cab[i] = da * db;
  }
  const double denom = static_cast<double>(n - 1);
  const double var_a = pairwise_sum(va) / denom, var_b = pairwise_sum(vb) / denom;
  const double cov = pairwise_sum(cab) / denom;
  const double rel = var_a / (ma * ma) + var_b / (mb * mb) - 2.0 * cov / (ma * mb);
  rep.speedup_stderr = rep.speedup * std::sqrt(std::max(0.0, rel) / static_cast<double>(n));
  return rep;
}

}  // namespace repsim::mc
