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

#ifndef REPSIM_MONTECARLO_H_
#define REPSIM_MONTECARLO_H_

#include <cstdint>
#include <vector>

#include "repsim/model.h"
#include "repsim/rng.h"

namespace repsim::mc {

inline constexpr std::uint64_t kDefaultMaxRounds = 1'000'000'000;

struct SimOptions {
  std::uint64_t seed = 0;
  std::int64_t trials = 1;
  unsigned workers = 0;  // 0: hardware concurrency; never affects results
  // Total elementary attempts allowed across the run. Trials are admitted
  // in index order until the budget is spent.
  std::uint64_t max_rounds = kDefaultMaxRounds;
};

struct SimOutcome {
  std::int64_t trials = 0;  // completed trials
  std::vector<double> samples;  // delivery times [s], by trial index
  double mean = 0;
  double stderr_ = 0;
  std::uint64_t link_attempts = 0;
  std::uint64_t swap_attempts = 0;
  std::uint64_t seed = 0;
  bool partial = false;  // round budget exhausted before all trials ran
};

// Elementary-link timing. Attempt i (0-based) is launched at
//   floor(i / m) * cycle + (i mod m) * stagger
// and its herald returns t_p + t_com later; the link is up at the first
// successful herald. m = 1 is the plain repeat-every-(t_p + t_com) rule.
struct LinkTimeModel {
  double P0 = 1;
  double t_p = 0;
  double t_com = 0;
  int m = 1;
  MultiplexSchedule schedule = MultiplexSchedule::kStaggered;

  double cycle() const;
  double stagger() const;
  // Duration of one link generation starting from an empty slot; adds the
  // attempt count to *attempts.
  double sample(CounterRng& rng, std::uint64_t* attempts) const;
  // True when the register has more slots than a t_p launch cadence can use.
  bool oversubscribed() const { return m * t_p > t_com; }
};

LinkTimeModel link_model_for(const LinkParams& link, int m = 1,
                             MultiplexSchedule schedule = MultiplexSchedule::kStaggered);

// Repeated heralded attempts until the first success.
SimOutcome simulate_link(double P0, double t_p, double t_com, const SimOptions& options);

// max of two independent link generations, i.e. the wait before the first
// swap can be attempted.
SimOutcome simulate_two_links_waiting(double P0, double t_p, double t_com,
                                      const SimOptions& options);

// Full nested protocol over 2^n links. A swap is attempted as soon as both
// halves of a segment are entangled; on failure every link under that
// segment is regenerated. Swaps and classical signalling are instantaneous.
SimOutcome simulate_repeater(const LinkParams& link, const SimOptions& options, int m = 1,
                             MultiplexSchedule schedule = MultiplexSchedule::kStaggered);

// Same engine with explicit probabilities, for sweeps that pin P0 / P_swap.
SimOutcome simulate_nested(const LinkTimeModel& model, double P_swap, int n_levels,
                           const SimOptions& options);

SimOutcome simulate_multiplexed_link(double P0, double t_p, double t_com, int m,
                                     MultiplexSchedule schedule, const SimOptions& options);

struct MultiplexReport {
  double speedup = 0;  // mean(m = 1) / mean(m), common random numbers
  double speedup_stderr = 0;
  double pipeline_limit = 0;  // (t_p + t_com) / (t_com P0 + t_p)
  double bound = 0;           // min(m, pipeline_limit)
  bool oversubscribed = false;
  SimOutcome single;
  SimOutcome multiplexed;
};

double pipeline_limit(double P0, double t_p, double t_com);

MultiplexReport compare_multiplexing(double P0, double t_p, double t_com, int m,
                                     MultiplexSchedule schedule, const SimOptions& options);

// Discrete-event state of one repeater trial: link slots plus a binary tree
// of segment readiness (heap layout, node 1 = full chain).
class ProtocolState {
 public:
  enum class Slot : std::uint8_t { kEmpty, kPending, kEntangled };

  explicit ProtocolState(int n_levels);

  int n_levels() const { return n_levels_; }
  std::size_t links() const { return slots_.size(); }
  double clock() const { return clock_; }
  Slot slot(std::size_t link) const { return slots_[link]; }
  // Herald due time while pending, creation time once entangled.
  double slot_time(std::size_t link) const { return times_[link]; }
  bool segment_ready(int level, std::size_t index) const;

  // Mark `link` pending with a herald due at `ready_time`.
  void schedule(std::size_t link, double ready_time);
  // Advance the clock to `time` and mark `link` entangled. Returns the heap
  // node of the leaf.
  std::size_t entangle(std::size_t link, double time);
  // Sibling node of `node` is ready too.
  bool sibling_ready(std::size_t node) const { return ready_[node ^ 1]; }
  void mark_ready(std::size_t node) { ready_[node] = 1; }
  // Clears `node` and all descendants; returns the link range [first, last).
  std::pair<std::size_t, std::size_t> reset_subtree(std::size_t node);
  std::size_t leaf_node(std::size_t link) const { return slots_.size() + link; }

 private:
  int n_levels_;
  double clock_ = 0;
  std::vector<Slot> slots_;
  std::vector<double> times_;
  std::vector<std::uint8_t> ready_;
};

}  // namespace repsim::mc

#endif  // REPSIM_MONTECARLO_H_
