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
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mdpsynth/bloch_grid.hpp"
#include "mdpsynth/error.hpp"
#include "mdpsynth/gate_sequence.hpp"
#include "mdpsynth/mdp.hpp"
#include "mdpsynth/parallel.hpp"
#include "mdpsynth/random.hpp"
#include "mdpsynth/su2.hpp"

namespace mdpsynth {

// ---------------------------------------------------------------------------
// Gatesets
// ---------------------------------------------------------------------------

/// Action set of the state-preparation MDP. Action 0 is always an identity
/// (I, or RZ(0) for the rotation set).
class PrepGateset {
 public:
  enum class Kind : std::uint8_t { DiscretizedRotations, IHST, IHT };

  /// RZ(j pi/l) for j = 0..2l-1, followed by RY(j pi/l) for j = 0..2l-1.
  static PrepGateset rotations(int l) {
    if (l < 1) throw InvalidArgument("PrepGateset: l must be >= 1");
    std::vector<Gate> gates;
    const double delta = std::numbers::pi / l;
    for (int j = 0; j < 2 * l; ++j) gates.push_back(Gate::rz(j * delta));
    for (int j = 0; j < 2 * l; ++j) gates.push_back(Gate::ry(j * delta));
    return PrepGateset(Kind::DiscretizedRotations, l, std::move(gates));
  }

  static PrepGateset ihst() {
    return PrepGateset(Kind::IHST, 0, {Gate::i(), Gate::h(), Gate::s(), Gate::t()});
  }

  static PrepGateset iht() {
    return PrepGateset(Kind::IHT, 0, {Gate::i(), Gate::h(), Gate::t()});
  }

  /// "rzry", "ihst" or "iht".
  static PrepGateset from_name(std::string_view name, int l = 160) {
    if (name == "rzry") return rotations(l);
    if (name == "ihst") return ihst();
    if (name == "iht") return iht();
    throw InvalidArgument("unknown gateset '" + std::string(name) +
                          "' (expected rzry, ihst or iht)");
  }

  Kind kind() const { return kind_; }
  int l() const { return l_; }
  std::size_t size() const { return gates_.size(); }
  const Gate& gate(std::size_t a) const { return gates_.at(a); }
  const std::vector<Gate>& gates() const { return gates_; }

  std::string name() const {
    switch (kind_) {
      case Kind::DiscretizedRotations: return "rzry";
      case Kind::IHST: return "ihst";
      case Kind::IHT: return "iht";
    }
    return "?";
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const Gate& g : gates_) out.push_back(g.label());
    return out;
  }

  /// The rotation set must resolve the grid: eps/delta = l/k >= 10.
  void check_resolution(const BlochGrid& grid) const {
    if (kind_ == Kind::DiscretizedRotations && l_ < 10 * grid.k()) {
      throw InvalidArgument("rotation resolution too coarse: need l >= 10k (l=" +
                            std::to_string(l_) + ", k=" +
                            std::to_string(grid.k()) + ")");
    }
  }

  /// Exact Bloch action of action a. Z rotations shift phi directly, so
  /// they preserve theta bit-for-bit.
  BlochPoint apply(std::size_t a, const BlochPoint& p) const {
    return apply(a, p, to_vector(p));
  }

  /// As above with the Bloch vector of p precomputed.
  BlochPoint apply(std::size_t a, const BlochPoint& p, const Vec3& v) const {
    const Action& act = actions_[a];
    switch (act.type) {
      case Action::Type::Identity: return p;
      case Action::Type::ZRotation: return BlochPoint::make(p.theta, p.phi + act.phase);
      case Action::Type::General: break;
    }
    return from_vector(rotate(act.rotation, v));
  }

 private:
  struct Action {
    enum class Type : std::uint8_t { Identity, ZRotation, General };
    Type type = Type::General;
    double phase = 0.0;
    Rotation3 rotation{};
  };

  PrepGateset(Kind kind, int l, std::vector<Gate> gates)
      : kind_(kind), l_(l), gates_(std::move(gates)) {
    for (const Gate& g : gates_) {
      Action act;
      act.rotation = rotation_matrix(gate_quaternion(g));
      const bool zero_angle = (g.kind == Gate::Kind::RZ || g.kind == Gate::Kind::RY) &&
                              g.angle == 0.0;
      if (g.kind == Gate::Kind::I || zero_angle) {
        act.type = Action::Type::Identity;
      } else if (g.kind == Gate::Kind::RZ) {
        act.type = Action::Type::ZRotation;
        act.phase = g.angle;
      } else if (g.kind == Gate::Kind::T || g.kind == Gate::Kind::S) {
        act.type = Action::Type::ZRotation;
        act.phase = g.kind == Gate::Kind::T ? std::numbers::pi / 4 : std::numbers::pi / 2;
      }
      actions_.push_back(act);
    }
  }

  Kind kind_;
  int l_;
  std::vector<Gate> gates_;
  std::vector<Action> actions_;
};

// ---------------------------------------------------------------------------
// Dynamics estimation
// ---------------------------------------------------------------------------

/// Monte-Carlo estimate of p(s' | s, a) as sparse successor counts.
struct PrepDynamics {
  int k = 0;
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::size_t n_samples = 0;
  /// Indexed s * n_actions + a; sorted by successor index.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> counts;

  std::uint64_t sample_count(std::size_t s, std::size_t a) const {
    std::uint64_t total = 0;
    for (const auto& [next, n] : counts.at(s * n_actions + a)) total += n;
    return total;
  }

  std::vector<std::pair<std::uint32_t, double>> distribution(std::size_t s,
                                                             std::size_t a) const {
    const auto total = static_cast<double>(sample_count(s, a));
    std::vector<std::pair<std::uint32_t, double>> out;
    for (const auto& [next, n] : counts.at(s * n_actions + a)) {
      out.emplace_back(next, static_cast<double>(n) / total);
    }
    return out;
  }
};

inline constexpr std::size_t kMinPrepSamples = 10'000;

/// Samples area-uniform points, classifies each, applies every action and
/// counts the resulting cell. The sample budget is split into fixed chunks
/// with their own RNG streams, so the estimate depends only on `seed`.
inline PrepDynamics estimate_dynamics(const BlochGrid& grid,
                                      const PrepGateset& gateset,
                                      std::size_t n_samples, std::uint64_t seed,
                                      unsigned threads = 0) {
  if (n_samples < kMinPrepSamples) {
    throw InvalidArgument("estimate_dynamics: need at least 10^4 samples");
  }
  gateset.check_resolution(grid);
  using Table = std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>>;
  const std::size_t n_states = grid.cell_count();
  const std::size_t n_actions = gateset.size();
  constexpr std::size_t kChunks = 64;
  const unsigned workers = worker_count(threads, kChunks);
  std::vector<Table> partial(workers, Table(n_states * n_actions));

  parallel_tasks(kChunks, workers, [&](std::size_t chunk, unsigned worker) {
    Table& table = partial[worker];
    Rng rng = make_stream(seed, "prep-dynamics", chunk);
    const std::size_t begin = n_samples * chunk / kChunks;
    const std::size_t end = n_samples * (chunk + 1) / kChunks;
    for (std::size_t i = begin; i < end; ++i) {
      const BlochPoint p = sample_uniform_sphere(rng);
      const Vec3 v = to_vector(p);
      const std::size_t s = grid.classify_index(p);
      for (std::size_t a = 0; a < n_actions; ++a) {
        const auto next = static_cast<std::uint32_t>(grid.classify_index(gateset.apply(a, p, v)));
        auto& row = table[s * n_actions + a];
        auto it = std::find_if(row.begin(), row.end(),
                               [next](const auto& e) { return e.first == next; });
        if (it == row.end()) {
          row.emplace_back(next, 1);
        } else {
          ++it->second;
        }
      }
    }
  });

  PrepDynamics out{grid.k(), n_states, n_actions, n_samples, std::move(partial[0])};
  for (std::size_t w = 1; w < partial.size(); ++w) {
    for (std::size_t i = 0; i < out.counts.size(); ++i) {
      auto& row = out.counts[i];
      for (const auto& [next, n] : partial[w][i]) {
        auto it = std::find_if(row.begin(), row.end(),
                               [next = next](const auto& e) { return e.first == next; });
        if (it == row.end()) {
          row.emplace_back(next, n);
        } else {
          it->second += n;
        }
      }
    }
  }
  for (auto& row : out.counts) std::sort(row.begin(), row.end());
  return out;
}

/// Reward 1 on every transition whose successor is the target cell.
inline TabularMDP build_prep_mdp(const PrepDynamics& dynamics,
                                 std::vector<std::string> action_labels,
                                 std::size_t target, double gamma) {
  if (target >= dynamics.n_states) {
    throw InvalidArgument("build_prep_mdp: target cell out of range");
  }
  if (action_labels.size() != dynamics.n_actions) {
    throw InvalidArgument("build_prep_mdp: action label count mismatch");
  }
  TabularMDP mdp(dynamics.n_states, std::move(action_labels), gamma);
  for (std::size_t s = 0; s < dynamics.n_states; ++s) {
    for (std::size_t a = 0; a < dynamics.n_actions; ++a) {
      std::vector<Transition> outcomes;
      for (const auto& [next, p] : dynamics.distribution(s, a)) {
        outcomes.push_back({next, static_cast<std::uint8_t>(next == target), p});
      }
      if (!outcomes.empty()) mdp.set_transitions(s, a, std::move(outcomes));
    }
  }
  return mdp;
}

// ---------------------------------------------------------------------------
// Program extraction
// ---------------------------------------------------------------------------

enum class ShuffleMode : std::uint8_t { Off, On };

inline const char* to_string(ShuffleMode mode) {
  return mode == ShuffleMode::Off ? "off" : "on";
}

struct PrepExtractOptions {
  std::size_t episodes = 100;
  std::size_t max_len = 50;
  /// Exact start state. Scores fidelity and seeds the first episode.
  std::optional<BlochPoint> reference_start;
  /// Exact target state; defaults to the target cell's center.
  std::optional<BlochPoint> reference_target;
  /// Restrict extraction to one shuffle mode (no fallback).
  std::optional<ShuffleMode> only_mode;
  /// Defaults to default_fidelity_floor(grid).
  std::optional<double> fidelity_floor;
};

/// cos^2(pi/2k) - 0.01: cap fidelity less a margin for cell-edge starts.
inline double default_fidelity_floor(const BlochGrid& grid) {
  const double c = std::cos(grid.width() / 2);
  return c * c - 0.01;
}

struct PrepProgram {
  CellId start;
  CellId target;
  GateSequence gates;  // application order
  ShuffleMode shuffle = ShuffleMode::Off;
  double fidelity = 0.0;
  BlochPoint start_point;   // start of the episode that produced the program
  BlochPoint scored_from;   // point the fidelity replay starts from
  BlochPoint end_point;     // exact image of scored_from
  BlochPoint target_point;  // exact target state
  std::size_t episodes = 0;
  std::size_t converged = 0;
  /// The replay from scored_from meets the fidelity floor.
  bool meets_floor = false;
};

namespace detail {

struct Episode {
  std::vector<std::size_t> actions;
  BlochPoint start;
};

inline std::optional<Episode> run_prep_episode(const BlochGrid& grid,
                                               const PrepGateset& gateset,
                                               const Policy& policy,
                                               const BlochPoint& start_point,
                                               const CellId& target,
                                               std::size_t max_len,
                                               ShuffleMode mode, Rng& rng) {
  Episode ep{{}, start_point};
  BlochPoint p = start_point;
  CellId cell = grid.classify(p);
  while (ep.actions.size() < max_len) {
    const std::size_t a = policy[grid.index(cell)];
    ep.actions.push_back(a);
    if (mode == ShuffleMode::On) p = grid.sample_in_cell(cell, rng);
    p = gateset.apply(a, p);
    cell = grid.classify(p);
    if (cell == target) return ep;
  }
  return std::nullopt;
}

inline BlochPoint replay(const PrepGateset& gateset,
                         const std::vector<std::size_t>& actions, BlochPoint p) {
  for (std::size_t a : actions) p = gateset.apply(a, p);
  return p;
}

}  // namespace detail

/// Chains policy actions from points in `start` until the target cell is
/// reached, keeping the shortest convergent episode (ties: highest
/// fidelity). Shuffle-free episodes are tried first; within-cell shuffling
/// before each step is used only if none of them converge.
///
/// Programs whose exact replay reaches `fidelity_floor` against the exact
/// target are preferred over shorter ones that do not. Replays start from
/// the reference start when given, else from the episode's own start.
inline PrepProgram extract_program(const BlochGrid& grid,
                                   const PrepGateset& gateset,
                                   const Policy& policy, const CellId& start,
                                   const CellId& target,
                                   const PrepExtractOptions& options, Rng& rng) {
  if (options.episodes == 0 || options.max_len == 0) {
    throw InvalidArgument("extract_program: episodes and max_len must be >= 1");
  }
  if (!grid.valid(start) || !grid.valid(target)) {
    throw InvalidArgument("extract_program: invalid start or target cell");
  }
  if (policy.size() != grid.cell_count()) {
    throw InvalidArgument("extract_program: policy does not match grid");
  }
  if (options.reference_start && !(grid.classify(*options.reference_start) == start)) {
    throw InvalidArgument("extract_program: reference start lies outside the start cell");
  }
  const BlochPoint target_point = options.reference_target.value_or(grid.center(target));
  const double floor = options.fidelity_floor.value_or(default_fidelity_floor(grid));

  std::vector<ShuffleMode> modes{ShuffleMode::Off, ShuffleMode::On};
  if (options.only_mode) modes = {*options.only_mode};

  std::size_t attempted = 0;
  for (ShuffleMode mode : modes) {
    std::optional<PrepProgram> best;
    std::size_t converged = 0;
    for (std::size_t i = 0; i < options.episodes; ++i) {
      ++attempted;
      const BlochPoint from = (i == 0 && options.reference_start)
                                  ? *options.reference_start
                                  : grid.sample_in_cell(start, rng);
      auto ep = detail::run_prep_episode(grid, gateset, policy, from, target,
                                         options.max_len, mode, rng);
      if (!ep) continue;
      ++converged;
      const BlochPoint scored = options.reference_start.value_or(ep->start);
      const BlochPoint end = detail::replay(gateset, ep->actions, scored);
      const double fid = fidelity(end, target_point);
      const bool meets = fid >= floor;
      if (best) {
        const auto rank = [](bool m, std::size_t len, double f) {
          return std::make_tuple(!m, len, -f);
        };
        if (rank(meets, ep->actions.size(), fid) >=
            rank(best->meets_floor, best->gates.size(), best->fidelity)) {
          continue;
        }
      }
      std::vector<Gate> gates;
      for (std::size_t a : ep->actions) gates.push_back(gateset.gate(a));
      best = PrepProgram{start, target, GateSequence(std::move(gates)), mode, fid,
                         ep->start, scored, end, target_point, 0, 0, meets};
    }
    if (best) {
      best->episodes = options.episodes;
      best->converged = converged;
      return *best;
    }
  }
  throw NoPathError("extract_program: no episode from " + start.to_string() +
                    " reached " + target.to_string() + " within " +
                    std::to_string(options.max_len) + " steps (" +
                    std::to_string(attempted) + " episodes)");
}

// ---------------------------------------------------------------------------
// (HT)^n targets
// ---------------------------------------------------------------------------

struct HtTarget {
  CellId cell;
  BlochPoint point;
};

inline Quaternion ht_quaternion() {
  return compose(gate_quaternion(Gate::h()), gate_quaternion(Gate::t()));
}

/// Exact Bloch point of (HT)^n |0> and its cell.
inline HtTarget ht_target_cell(const BlochGrid& grid, std::uint64_t n) {
  const BlochPoint p = apply_to_bloch(power(ht_quaternion(), n), BlochPoint::zero());
  return {grid.classify(p), p};
}

// ---------------------------------------------------------------------------
// Value landscape
// ---------------------------------------------------------------------------

struct LandscapeRow {
  CellId cell;
  BlochPoint center;
  double value = 0.0;
  std::string best_action;
  int program_length = -1;  // -1: no convergent program
};

inline std::vector<LandscapeRow> landscape(const BlochGrid& grid,
                                           const PrepGateset& gateset,
                                           const Solution& solution,
                                           const std::vector<int>& program_lengths) {
  std::vector<LandscapeRow> rows;
  for (std::size_t s = 0; s < grid.cell_count(); ++s) {
    const CellId id = grid.cell(s);
    rows.push_back({id, grid.center(id), solution.values[s],
                    gateset.gate(solution.policy[s]).label(),
                    s < program_lengths.size() ? program_lengths[s] : -1});
  }
  return rows;
}

inline void write_landscape_csv(std::ostream& out, const std::vector<LandscapeRow>& rows) {
  out << "cell_kind,n_band,m_band,theta_center,phi_center,value,best_action,program_length\n";
  const auto old_precision = out.precision(12);
  for (const LandscapeRow& r : rows) {
    const char* kind = r.cell.kind == CellId::Kind::NorthCap   ? "north_cap"
                       : r.cell.kind == CellId::Kind::SouthCap ? "south_cap"
                                                               : "cell";
    out << kind << ',' << r.cell.band << ',' << r.cell.sector << ','
        << r.center.theta << ',' << r.center.phi << ',' << r.value << ",\""
        << r.best_action << "\"," << r.program_length << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mdpsynth
