// Copyright 2026 The mdpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mdpsynth/error.hpp"

namespace mdpsynth {

/// One outcome of p(s', r | s, a).
struct Transition {
  std::uint32_t next = 0;
  std::uint8_t reward = 0;  // 0 or 1
  double probability = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Finite MDP with sparse estimated dynamics and rewards in {0, 1}.
///
/// A (state, action) pair without outcomes was never observed; it behaves
/// as a probability-1 self-loop with reward 0.
class TabularMDP {
 public:
  TabularMDP(std::size_t n_states, std::vector<std::string> action_labels,
             double gamma)
      : n_states_(n_states),
        labels_(std::move(action_labels)),
        gamma_(gamma),
        table_(n_states * labels_.size()) {
    if (n_states == 0) throw InvalidArgument("TabularMDP: no states");
    if (labels_.empty()) throw InvalidArgument("TabularMDP: no actions");
    if (!(gamma >= 0.0 && gamma < 1.0)) {
      throw InvalidArgument("TabularMDP: discount must lie in [0, 1)");
    }
  }

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return labels_.size(); }
  double gamma() const { return gamma_; }
  const std::vector<std::string>& action_labels() const { return labels_; }

  void set_transitions(std::size_t s, std::size_t a,
                       std::vector<Transition> outcomes) {
    check_pair(s, a);
    double total = 0.0;
    for (const Transition& t : outcomes) {
      if (t.next >= n_states_) {
        throw InvalidArgument("TabularMDP: successor index out of range");
      }
      if (t.reward > 1) throw InvalidArgument("TabularMDP: reward must be 0 or 1");
      if (!(t.probability >= 0.0)) {
        throw InvalidArgument("TabularMDP: negative probability");
      }
      total += t.probability;
    }
    if (!outcomes.empty() && std::abs(total - 1.0) > 1e-9) {
      throw InvalidArgument("TabularMDP: probabilities for (" +
                            std::to_string(s) + ", " + std::to_string(a) +
                            ") sum to " + std::to_string(total));
    }
    table_[s * n_actions() + a] = std::move(outcomes);
  }

  std::span<const Transition> transitions(std::size_t s, std::size_t a) const {
    check_pair(s, a);
    return table_[s * n_actions() + a];
  }

  bool observed(std::size_t s, std::size_t a) const {
    return !transitions(s, a).empty();
  }

 private:
  void check_pair(std::size_t s, std::size_t a) const {
    if (s >= n_states_ || a >= n_actions()) {
      throw InvalidArgument("TabularMDP: (state, action) out of range");
    }
  }

  std::size_t n_states_;
  std::vector<std::string> labels_;
  double gamma_;
  std::vector<std::vector<Transition>> table_;
};

/// Deterministic policy: one action index per state.
struct Policy {
  std::vector<std::uint32_t> action;

  std::size_t size() const { return action.size(); }
  std::uint32_t operator[](std::size_t s) const { return action[s]; }
  friend bool operator==(const Policy&, const Policy&) = default;
};

struct ValueFunction {
  std::vector<double> value;

  std::size_t size() const { return value.size(); }
  double operator[](std::size_t s) const { return value[s]; }
};

/// Expected one-step return sum p (r + gamma V(s')).
inline double action_value(const TabularMDP& mdp, const std::vector<double>& v,
                           std::size_t s, std::size_t a) {
  const auto outcomes = mdp.transitions(s, a);
  if (outcomes.empty()) return mdp.gamma() * v[s];
  double q = 0.0;
  for (const Transition& t : outcomes) {
    q += t.probability * (t.reward + mdp.gamma() * v[t.next]);
  }
  return q;
}

namespace detail {

inline void check_policy(const TabularMDP& mdp, const Policy& policy) {
  if (policy.size() != mdp.n_states()) {
    throw InvalidArgument("policy size does not match state count");
  }
  for (auto a : policy.action) {
    if (a >= mdp.n_actions()) throw InvalidArgument("policy action out of range");
  }
}

}  // namespace detail

inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr std::size_t kDefaultMaxSweeps = 1'000'000;

/// Iterative policy evaluation with in-place sweeps in ascending state
/// order, stopping once the largest per-state change in a sweep drops
/// below `tol`. `initial` warm-starts the iteration.
inline ValueFunction policy_evaluation(const TabularMDP& mdp,
                                       const Policy& policy, double tol,
                                       std::size_t max_sweeps = kDefaultMaxSweeps,
                                       const ValueFunction* initial = nullptr) {
  if (!(tol > 0.0)) throw InvalidArgument("policy_evaluation: tol must be > 0");
  detail::check_policy(mdp, policy);
  std::vector<double> v(mdp.n_states(), 0.0);
  if (initial != nullptr && initial->size() == mdp.n_states()) v = initial->value;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double delta = 0.0;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
      const double updated = action_value(mdp, v, s, policy[s]);
      delta = std::max(delta, std::abs(updated - v[s]));
      v[s] = updated;
    }
    if (delta < tol) return {std::move(v)};
  }
  throw ConvergenceError("policy_evaluation: no convergence after " +
                         std::to_string(max_sweeps) + " sweeps");
}

/// Greedy policy w.r.t. V. Among actions within `tie_tolerance` of the best
/// one-step return the lowest index wins.
inline Policy policy_improvement(const TabularMDP& mdp, const ValueFunction& v,
                                 double tie_tolerance = 0.0) {
  if (v.size() != mdp.n_states()) {
    throw InvalidArgument("policy_improvement: value size mismatch");
  }
  Policy policy{std::vector<std::uint32_t>(mdp.n_states(), 0)};
  std::vector<double> q(mdp.n_actions());
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      q[a] = action_value(mdp, v.value, s, a);
      best = std::max(best, q[a]);
    }
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      if (q[a] >= best - tie_tolerance) {
        policy.action[s] = static_cast<std::uint32_t>(a);
        break;
      }
    }
  }
  return policy;
}

struct SolverOptions {
  double tolerance = kDefaultTolerance;
  /// Defaults to `tolerance` when negative.
  double tie_tolerance = -1.0;
  std::size_t max_sweeps = kDefaultMaxSweeps;
  std::size_t max_iterations = 10'000;
  bool record_trace = false;
};

struct Solution {
  Policy policy;
  ValueFunction values;
  std::size_t iterations = 0;
  /// Value of every intermediate policy, when requested.
  std::vector<ValueFunction> trace;
};

/// Alternates evaluation and greedy improvement, starting from the
/// all-zero-action policy, until the improved policy equals its predecessor.
inline Solution policy_iteration(const TabularMDP& mdp,
                                 const SolverOptions& options = {}) {
  const double tie =
      options.tie_tolerance < 0.0 ? options.tolerance : options.tie_tolerance;
  Solution out;
  out.policy.action.assign(mdp.n_states(), 0);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    out.values = policy_evaluation(mdp, out.policy, options.tolerance,
                                   options.max_sweeps,
                                   it == 0 ? nullptr : &out.values);
    if (options.record_trace) out.trace.push_back(out.values);
    ++out.iterations;
    Policy improved = policy_improvement(mdp, out.values, tie);
    if (improved == out.policy) return out;
    out.policy = std::move(improved);
  }
  throw ConvergenceError("policy_iteration: policy still changing after " +
                         std::to_string(options.max_iterations) + " iterations");
}

}  // namespace mdpsynth
