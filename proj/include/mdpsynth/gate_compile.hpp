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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mdpsynth/error.hpp"
#include "mdpsynth/gate_sequence.hpp"
#include "mdpsynth/mdp.hpp"
#include "mdpsynth/random.hpp"
#include "mdpsynth/su2.hpp"

namespace mdpsynth {

// ---------------------------------------------------------------------------
// Quaternion grid
// ---------------------------------------------------------------------------

struct QuatCell {
  std::array<int, 4> index{};

  friend bool operator==(const QuatCell&, const QuatCell&) = default;
};

/// Uniform hypercube grid of spacing `bin` over [-1, 1]^4. Cell index per
/// axis is floor((x + 1) / bin); values on a boundary fall in the lower cell.
class QuatGrid {
 public:
  explicit QuatGrid(double bin) : bin_(bin) {
    if (!(bin > 0.0 && bin < 1.0)) throw InvalidArgument("QuatGrid: bin must lie in (0, 1)");
    bins_ = static_cast<int>(std::floor(2.0 / bin)) + 1;
  }

  double bin() const { return bin_; }
  int bins_per_axis() const { return bins_; }

  QuatCell quantize(const Quaternion& q) const {
    const auto c = q.components();
    QuatCell cell;
    for (std::size_t i = 0; i < 4; ++i) {
      cell.index[i] = std::clamp(static_cast<int>(std::floor((c[i] + 1.0) / bin_)), 0,
                                 bins_ - 1);
    }
    return cell;
  }

  std::uint32_t encode(const QuatCell& cell) const {
    std::uint32_t key = 0;
    for (int i : cell.index) {
      if (i < 0 || i >= bins_) throw InvalidArgument("QuatGrid: cell index out of range");
      key = key * static_cast<std::uint32_t>(bins_) + static_cast<std::uint32_t>(i);
    }
    return key;
  }

  QuatCell decode(std::uint32_t key) const {
    QuatCell cell;
    for (int i = 3; i >= 0; --i) {
      cell.index[static_cast<std::size_t>(i)] = static_cast<int>(key % static_cast<std::uint32_t>(bins_));
      key /= static_cast<std::uint32_t>(bins_);
    }
    if (key != 0) throw InvalidArgument("QuatGrid: key out of range");
    return cell;
  }

  std::uint32_t key(const Quaternion& q) const { return encode(quantize(q)); }

 private:
  double bin_;
  int bins_;
};

// ---------------------------------------------------------------------------
// Rollout dynamics
// ---------------------------------------------------------------------------

/// Compilation actions, in MDP action-index order.
enum class CompileAction : std::uint8_t { I = 0, H = 1, T = 2 };

inline constexpr std::size_t kCompileActions = 3;

inline const std::vector<std::string>& compile_action_labels() {
  static const std::vector<std::string> labels{"I", "H", "T"};
  return labels;
}

inline Gate compile_gate(std::size_t action) {
  switch (action) {
    case 0: return Gate::i();
    case 1: return Gate::h();
    case 2: return Gate::t();
    default: throw InvalidArgument("compile_gate: action out of range");
  }
}

inline Quaternion apply_compile_action(std::size_t action, const Quaternion& q) {
  switch (action) {
    case 0: return q;
    case 1: return apply_H(q);
    case 2: return apply_T(q);
    default: throw InvalidArgument("apply_compile_action: action out of range");
  }
}

struct CompileOutcome {
  std::uint32_t next = 0;  // state index
  std::uint8_t reward = 0;
  std::uint64_t count = 0;
};

/// Estimated p(s', r | s, a) over the cells visited by the rollouts.
/// States are the visited cells in ascending key order.
struct CompileDynamics {
  QuatGrid grid{0.15};
  Quaternion target;
  double epsilon = 0.0;
  std::vector<std::uint32_t> cells;                 // state -> cell key
  std::vector<std::vector<CompileOutcome>> counts;  // s * 3 + a

  std::size_t n_states() const { return cells.size(); }

  std::optional<std::size_t> state_of(const Quaternion& q) const {
    const std::uint32_t key = grid.key(q);
    const auto it = std::lower_bound(cells.begin(), cells.end(), key);
    if (it == cells.end() || *it != key) return std::nullopt;
    return static_cast<std::size_t>(it - cells.begin());
  }

  const std::vector<CompileOutcome>& outcomes(std::size_t s, std::size_t a) const {
    return counts.at(s * kCompileActions + a);
  }

  std::uint64_t sample_count(std::size_t s, std::size_t a) const {
    std::uint64_t total = 0;
    for (const auto& o : outcomes(s, a)) total += o.count;
    return total;
  }

  /// Number of distinct successor cells observed for (s, a).
  std::size_t successor_cells(std::size_t s, std::size_t a) const {
    std::vector<std::uint32_t> next;
    for (const auto& o : outcomes(s, a)) next.push_back(o.next);
    std::sort(next.begin(), next.end());
    return static_cast<std::size_t>(std::unique(next.begin(), next.end()) - next.begin());
  }
};

struct RolloutOptions {
  std::size_t rollouts = 1000;
  std::size_t rollout_len = 50;
};

/// Rolls out uniformly random {H, T} sequences from the identity, recording
/// (s, a) -> (s', r) with r = [|q' - q*| < eps] for every step, plus
/// (s', I) -> (s', r) for every visited (s', r).
inline CompileDynamics estimate_rollout_dynamics(const QuatGrid& grid,
                                                 const Quaternion& target,
                                                 double epsilon,
                                                 const RolloutOptions& options,
                                                 Rng& rng) {
  if (!(epsilon > 0.0)) throw InvalidArgument("estimate_rollout_dynamics: eps must be > 0");
  if (options.rollouts == 0 || options.rollout_len == 0) {
    throw InvalidArgument("estimate_rollout_dynamics: empty rollout budget");
  }
  // (cell, action, next cell, reward) -> count
  std::map<std::tuple<std::uint32_t, std::uint8_t, std::uint32_t, std::uint8_t>,
           std::uint64_t>
      raw;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < options.rollouts; ++r) {
    Quaternion q = Quaternion::identity();
    std::uint32_t cell = grid.key(q);
    for (std::size_t step = 0; step < options.rollout_len; ++step) {
      const std::uint8_t action = coin(rng) ? 2 : 1;
      q = apply_compile_action(action, q);
      const std::uint32_t next = grid.key(q);
      const auto reward = static_cast<std::uint8_t>(quat_distance(q, target) < epsilon);
      ++raw[{cell, action, next, reward}];
      ++raw[{next, 0, next, reward}];
      cell = next;
    }
  }

  CompileDynamics out;
  out.grid = grid;
  out.target = target;
  out.epsilon = epsilon;
  for (const auto& [key, n] : raw) {
    out.cells.push_back(std::get<0>(key));
    out.cells.push_back(std::get<2>(key));
  }
  std::sort(out.cells.begin(), out.cells.end());
  out.cells.erase(std::unique(out.cells.begin(), out.cells.end()), out.cells.end());
  out.counts.resize(out.cells.size() * kCompileActions);
  auto index_of = [&](std::uint32_t key) {
    return static_cast<std::uint32_t>(
        std::lower_bound(out.cells.begin(), out.cells.end(), key) - out.cells.begin());
  };
  for (const auto& [key, n] : raw) {
    const auto [cell, action, next, reward] = key;
    out.counts[index_of(cell) * kCompileActions + action].push_back(
        {index_of(next), reward, n});
  }
  return out;
}

inline TabularMDP build_compile_mdp(const CompileDynamics& dynamics, double gamma) {
  if (dynamics.n_states() == 0) throw InvalidArgument("build_compile_mdp: empty dynamics");
  TabularMDP mdp(dynamics.n_states(), compile_action_labels(), gamma);
  for (std::size_t s = 0; s < dynamics.n_states(); ++s) {
    for (std::size_t a = 0; a < kCompileActions; ++a) {
      const auto total = static_cast<double>(dynamics.sample_count(s, a));
      if (total == 0) continue;
      std::vector<Transition> outcomes;
      for (const auto& o : dynamics.outcomes(s, a)) {
        outcomes.push_back({o.next, o.reward, static_cast<double>(o.count) / total});
      }
      mdp.set_transitions(s, a, std::move(outcomes));
    }
  }
  return mdp;
}

// ---------------------------------------------------------------------------
// Sequence extraction and brute force
// ---------------------------------------------------------------------------

enum class CompileMethod : std::uint8_t { Mdp, BruteForce };

inline const char* to_string(CompileMethod m) {
  return m == CompileMethod::Mdp ? "mdp" : "brute-force";
}

struct CompileStats {
  std::size_t episodes = 0;
  std::size_t rewarded = 0;  // episodes that ended on a sampled reward
  std::size_t valid = 0;     // episodes passing the exact precision check
  std::size_t evaluated = 0; // brute force: sequences evolved
};

struct CompileResult {
  Quaternion target;
  GateSequence sequence;  // application order, identities removed
  double distance = 0.0;  // exact |q - q*| of the replayed sequence
  CompileMethod method = CompileMethod::Mdp;
  CompileStats stats;
};

struct CompileExtractOptions {
  std::size_t episodes = 500;
  std::size_t max_len = 50;
};

/// Chains policy actions from the identity cell, sampling successors and
/// rewards from the estimated dynamics, and keeps the shortest sequence
/// whose exact replay lies within eps of the target (ties: smaller
/// distance). Identity actions are dropped from reported sequences.
inline CompileResult extract_sequence(const CompileDynamics& dynamics,
                                      const Policy& policy,
                                      const CompileExtractOptions& options,
                                      Rng& rng) {
  if (options.episodes == 0 || options.max_len == 0) {
    throw InvalidArgument("extract_sequence: episodes and max_len must be >= 1");
  }
  if (policy.size() != dynamics.n_states()) {
    throw InvalidArgument("extract_sequence: policy does not match dynamics");
  }
  const auto start = dynamics.state_of(Quaternion::identity());
  if (!start) throw InvalidArgument("extract_sequence: identity cell never visited");

  CompileResult result;
  result.target = dynamics.target;
  result.method = CompileMethod::Mdp;
  std::optional<std::pair<std::size_t, double>> best;  // (length, distance)
  double closest = std::numeric_limits<double>::infinity();
  std::size_t closest_len = 0;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t e = 0; e < options.episodes; ++e) {
    ++result.stats.episodes;
    std::size_t state = *start;
    std::vector<Gate> gates;
    bool rewarded = false;
    while (gates.size() < options.max_len) {
      const std::size_t a = policy[state];
      gates.push_back(compile_gate(a));
      const auto& outcomes = dynamics.outcomes(state, a);
      if (outcomes.empty()) continue;  // unobserved: zero-reward self-loop
      const double total = static_cast<double>(dynamics.sample_count(state, a));
      double u = unit(rng) * total;
      const CompileOutcome* pick = &outcomes.back();
      for (const auto& o : outcomes) {
        if (u < static_cast<double>(o.count)) {
          pick = &o;
          break;
        }
        u -= static_cast<double>(o.count);
      }
      state = pick->next;
      if (pick->reward == 1) {
        rewarded = true;
        break;
      }
    }
    if (gates.empty()) continue;
    if (rewarded) ++result.stats.rewarded;
    GateSequence seq = GateSequence(std::move(gates)).without_identities();
    const double dist = quat_distance(seq.unitary(), dynamics.target);
    if (dist < closest) {
      closest = dist;
      closest_len = seq.size();
    }
    if (!(dist < dynamics.epsilon)) continue;
    ++result.stats.valid;
    if (!best || seq.size() < best->first ||
        (seq.size() == best->first && dist < best->second)) {
      best = {seq.size(), dist};
      result.sequence = std::move(seq);
      result.distance = dist;
    }
  }
  if (!best) {
    const double bound = dynamics.grid.bin() * static_cast<double>(closest_len);
    throw NoValidSequenceError(
        "extract_sequence: no episode met |q - q*| < " + std::to_string(dynamics.epsilon) +
            "; best distance " + std::to_string(closest) + ", soft bound bin*len = " +
            std::to_string(bound),
        closest, bound);
  }
  return result;
}

/// Exhaustive {H, T} search by increasing length n. At the first n whose
/// best distance is below eps, returns the minimum-distance sequence;
/// enumeration is depth-first in application order with H before T, and
/// the earliest sequence wins distance ties.
inline CompileResult brute_force_shortest(const Quaternion& target, double epsilon,
                                          std::size_t max_n) {
  if (!(epsilon > 0.0)) throw InvalidArgument("brute_force_shortest: eps must be > 0");
  CompileResult result;
  result.target = target;
  result.method = CompileMethod::BruteForce;
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::vector<std::uint8_t> path(n), best_path;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Quaternion> stack(n + 1);
    stack[0] = Quaternion::identity();
    // Depth-first walk; path[i] = 0 for H, 1 for T.
    std::size_t depth = 0;
    path.assign(n, 0);
    std::vector<std::uint8_t> next_choice(n, 0);
    while (true) {
      if (depth == n) {
        ++result.stats.evaluated;
        const double d = quat_distance(stack[n], target);
        if (d < best) {
          best = d;
          best_path = path;
        }
        --depth;
        continue;
      }
      if (next_choice[depth] > 1) {
        next_choice[depth] = 0;
        if (depth == 0) break;
        --depth;
        continue;
      }
      const std::uint8_t choice = next_choice[depth]++;
      path[depth] = choice;
      stack[depth + 1] = choice == 0 ? apply_H(stack[depth]) : apply_T(stack[depth]);
      ++depth;
    }
    if (best < epsilon) {
      std::vector<Gate> gates;
      for (auto c : best_path) gates.push_back(c == 0 ? Gate::h() : Gate::t());
      result.sequence = GateSequence(std::move(gates));
      result.distance = best;
      return result;
    }
  }
  throw DepthExceededError("brute_force_shortest: no sequence of length <= " +
                           std::to_string(max_n) + " within eps");
}

}  // namespace mdpsynth
