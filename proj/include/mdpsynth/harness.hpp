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
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdpsynth/bloch_grid.hpp"
#include "mdpsynth/error.hpp"
#include "mdpsynth/fixtures.hpp"
#include "mdpsynth/gate_compile.hpp"
#include "mdpsynth/mdp.hpp"
#include "mdpsynth/random.hpp"
#include "mdpsynth/state_prep.hpp"
#include "mdpsynth/su2.hpp"

namespace mdpsynth {

inline constexpr int kReportSchemaVersion = 1;

/// Exponents of n used for (HT)^n |0> by default: 1e2, 1e3, 1e4, 1e6 ... 1e10.
inline std::vector<std::uint64_t> default_ht_exponents() {
  return {100ULL,        1000ULL,        10000ULL,        1000000ULL,
          10000000ULL,   100000000ULL,   1000000000ULL,   10000000000ULL};
}

enum class ExperimentKind : std::uint8_t { StatePrep, HtStates, Compile, BruteForce, Landscape };

inline std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::StatePrep: return "state-prep";
    case ExperimentKind::HtStates: return "ht-states";
    case ExperimentKind::Compile: return "compile";
    case ExperimentKind::BruteForce: return "brute-force";
    case ExperimentKind::Landscape: return "landscape";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto kind : {ExperimentKind::StatePrep, ExperimentKind::HtStates, ExperimentKind::Compile,
                    ExperimentKind::BruteForce, ExperimentKind::Landscape}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown experiment '" + name + "'");
}

/// Fully resolved experiment settings. Unset optionals take per-experiment
/// defaults (see the resolved_* accessors).
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::StatePrep;

  // State preparation.
  int k = 16;
  int l = 160;
  std::string gateset;            // rzry | ihst | iht
  std::size_t samples = 1'000'000;
  std::string start = "north";    // north | south | zero | one | plus | "n,m"
  std::string target_cell = "south";
  std::vector<std::uint64_t> ns;  // (HT)^n exponents

  // Compilation.
  double dbin = 0.15;
  std::optional<double> eps;      // defaults to 2 * dbin
  std::size_t rollouts = 1000;
  std::size_t rollout_len = 50;
  std::size_t max_n = 16;
  std::string target_file;
  std::optional<Quaternion> target;
  std::size_t haar = 0;

  // Shared.
  std::optional<double> gamma;
  double tol = kDefaultTolerance;
  std::optional<std::size_t> episodes;
  std::size_t max_len = 50;
  std::optional<std::uint64_t> seed;
  std::string output;             // JSON report path; empty -> stdout
  std::string csv;                // landscape CSV path
  unsigned threads = 0;

  std::string resolved_gateset() const {
    if (!gateset.empty()) return gateset;
    return kind == ExperimentKind::HtStates ? "iht" : kind == ExperimentKind::Landscape ? "rzry" : "ihst";
  }

  double resolved_gamma() const {
    if (gamma) return *gamma;
    if (kind == ExperimentKind::Compile || kind == ExperimentKind::BruteForce) return 0.8;
    return resolved_gateset() == "rzry" ? 0.8 : 0.95;
  }

  double resolved_eps() const { return eps.value_or(2.0 * dbin); }

  std::size_t resolved_episodes() const {
    if (episodes) return *episodes;
    return kind == ExperimentKind::Compile ? 500 : 100;
  }

  std::vector<std::uint64_t> resolved_ns() const {
    return ns.empty() ? default_ht_exponents() : ns;
  }

  std::string resolved_csv() const { return csv.empty() ? "landscape.csv" : csv; }

  bool stochastic() const { return kind != ExperimentKind::BruteForce; }

  void validate() const {
    auto fail = [](const std::string& msg) { throw InvalidArgument("config: " + msg); };
    if (k < 3) fail("k must be >= 3");
    if (l < 1) fail("l must be >= 1");
    const std::string gs = resolved_gateset();
    if (gs != "rzry" && gs != "ihst" && gs != "iht") fail("gateset must be rzry, ihst or iht");
    if (samples < kMinPrepSamples) fail("samples must be >= 10000");
    const double g = resolved_gamma();
    if (!(g >= 0.0 && g < 1.0)) fail("gamma must lie in [0, 1)");
    if (!(tol > 0.0)) fail("tol must be > 0");
    if (!(dbin > 0.0 && dbin < 1.0)) fail("dbin must lie in (0, 1)");
    if (!(resolved_eps() > 0.0)) fail("eps must be > 0");
    if (resolved_episodes() == 0 || max_len == 0) fail("episodes and max-len must be >= 1");
    if (rollouts == 0 || rollout_len == 0) fail("rollouts and rollout-len must be >= 1");
    if (max_n == 0 || max_n > 30) fail("max-n must lie in [1, 30]");
    if (stochastic() && !seed) fail("--seed is required for " + to_string(kind));
    const bool needs_targets = kind == ExperimentKind::Compile || kind == ExperimentKind::BruteForce;
    const int sources = !target_file.empty() + target.has_value() + (haar > 0);
    if (needs_targets && sources != 1) {
      fail("give exactly one of --target-file, --target or --haar");
    }
    if (kind == ExperimentKind::BruteForce && haar > 0 && !seed) fail("--haar needs --seed");
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"experiment", to_string(kind)}, {"gamma", resolved_gamma()},
                        {"tol", tol}, {"max_len", max_len}, {"threads", threads}};
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    switch (kind) {
      case ExperimentKind::StatePrep:
      case ExperimentKind::HtStates:
      case ExperimentKind::Landscape:
        j["k"] = k;
        j["gateset"] = resolved_gateset();
        if (resolved_gateset() == "rzry") j["l"] = l;
        j["samples"] = samples;
        j["episodes"] = resolved_episodes();
        if (kind == ExperimentKind::StatePrep) {
          j["start"] = start;
          j["target_cell"] = target_cell;
        }
        if (kind == ExperimentKind::HtStates) j["n"] = resolved_ns();
        if (kind == ExperimentKind::Landscape) j["csv"] = resolved_csv();
        break;
      case ExperimentKind::Compile:
      case ExperimentKind::BruteForce:
        j["dbin"] = dbin;
        j["eps"] = resolved_eps();
        j["max_n"] = max_n;
        if (kind == ExperimentKind::Compile) {
          j["episodes"] = resolved_episodes();
          j["rollouts"] = rollouts;
          j["rollout_len"] = rollout_len;
        }
        if (!target_file.empty()) j["target_file"] = target_file;
        if (target) j["target"] = target->components();
        if (haar > 0) j["haar"] = haar;
        break;
    }
    return j;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  std::string rest;
  if (!(in >> out) || (in >> rest)) {
    throw InvalidArgument("config: bad value '" + value + "' for " + key);
  }
  if constexpr (std::is_unsigned_v<T>) {
    if (value.find('-') != std::string::npos) {
      throw InvalidArgument("config: " + key + " must be non-negative");
    }
  }
  return out;
}

/// Accepts plain integers and powers of ten written "1e10".
inline std::uint64_t parse_count(const std::string& key, const std::string& value) {
  const auto e = value.find_first_of("eE");
  if (e == std::string::npos) return parse_number<std::uint64_t>(key, value);
  const auto mantissa = parse_number<std::uint64_t>(key, value.substr(0, e));
  const auto exponent = parse_number<unsigned>(key, value.substr(e + 1));
  if (exponent > 19) throw InvalidArgument("config: " + key + " exponent too large");
  std::uint64_t out = mantissa;
  for (unsigned i = 0; i < exponent; ++i) out *= 10;
  return out;
}

}  // namespace detail

/// Sets one option by its long flag name (dashes or underscores).
inline void apply_setting(ExperimentConfig& c, std::string key, const std::string& raw) {
  std::replace(key.begin(), key.end(), '_', '-');
  const std::string value = detail::trim(raw);
  using detail::parse_count;
  using detail::parse_number;
  if (key == "experiment") c.kind = parse_experiment_kind(value);
  else if (key == "k") c.k = parse_number<int>(key, value);
  else if (key == "l") c.l = parse_number<int>(key, value);
  else if (key == "gateset") c.gateset = value;
  else if (key == "samples") c.samples = parse_count(key, value);
  else if (key == "start") c.start = value;
  else if (key == "target-cell") c.target_cell = value;
  else if (key == "n") {
    c.ns.clear();
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!detail::trim(item).empty()) c.ns.push_back(parse_count(key, detail::trim(item)));
    }
  } else if (key == "dbin") c.dbin = parse_number<double>(key, value);
  else if (key == "eps") c.eps = parse_number<double>(key, value);
  else if (key == "rollouts") c.rollouts = parse_count(key, value);
  else if (key == "rollout-len") c.rollout_len = parse_count(key, value);
  else if (key == "max-n") c.max_n = parse_count(key, value);
  else if (key == "target-file") c.target_file = value;
  else if (key == "target") c.target = parse_quaternion(value);
  else if (key == "haar") c.haar = parse_count(key, value);
  else if (key == "gamma") c.gamma = parse_number<double>(key, value);
  else if (key == "tol") c.tol = parse_number<double>(key, value);
  else if (key == "episodes") c.episodes = parse_count(key, value);
  else if (key == "max-len") c.max_len = parse_count(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "output") c.output = value;
  else if (key == "csv") c.csv = value;
  else if (key == "threads") c.threads = parse_number<unsigned>(key, value);
  else throw InvalidArgument("config: unknown key '" + key + "'");
}

/// Flat "key = value" text; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline void apply_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  for (const auto& [key, value] : parse_config_text(in)) apply_setting(c, key, value);
}

// ---------------------------------------------------------------------------
// Report helpers
// ---------------------------------------------------------------------------

inline nlohmann::json point_json(const BlochPoint& p) {
  return {{"theta", p.theta}, {"phi", p.phi}};
}

inline nlohmann::json program_json(const PrepProgram& p) {
  std::vector<std::string> order;
  for (const Gate& g : p.gates.gates()) order.push_back(g.label());
  return {{"start", p.start.to_string()},
          {"target", p.target.to_string()},
          {"sequence", p.gates.render()},
          {"application_order", order},
          {"length", p.gates.size()},
          {"fidelity", p.fidelity},
          {"meets_fidelity_floor", p.meets_floor},
          {"shuffle", to_string(p.shuffle)},
          {"episodes", p.episodes},
          {"converged_episodes", p.converged},
          {"target_point", point_json(p.target_point)},
          {"end_point", point_json(p.end_point)}};
}

inline nlohmann::json compile_json(const CompileResult& r) {
  nlohmann::json j = {{"method", to_string(r.method)},
                      {"sequence", r.sequence.render()},
                      {"length", r.sequence.size()},
                      {"distance", r.distance}};
  if (r.method == CompileMethod::Mdp) {
    j["episodes"] = r.stats.episodes;
    j["rewarded_episodes"] = r.stats.rewarded;
    j["valid_episodes"] = r.stats.valid;
  } else {
    j["evaluated"] = r.stats.evaluated;
  }
  return j;
}

inline nlohmann::json error_json(const std::exception& e) {
  nlohmann::json j = {{"type", "error"}, {"message", e.what()}};
  if (dynamic_cast<const InvalidArgument*>(&e)) j["type"] = "invalid-argument";
  else if (dynamic_cast<const NoPathError*>(&e)) j["type"] = "no-path";
  else if (const auto* nv = dynamic_cast<const NoValidSequenceError*>(&e)) {
    j["type"] = "no-valid-sequence";
    j["best_distance"] = nv->best_distance;
    j["soft_bound"] = nv->soft_bound;
  } else if (dynamic_cast<const DepthExceededError*>(&e)) j["type"] = "depth-exceeded";
  else if (dynamic_cast<const ConvergenceError*>(&e)) j["type"] = "convergence";
  return j;
}

/// Named start/target cells: north|zero, south|one, plus, or "n,m".
/// Returns the cell and, for named states, the exact state it stands for.
inline std::pair<CellId, std::optional<BlochPoint>> parse_cell_spec(const BlochGrid& grid,
                                                                    const std::string& spec) {
  if (spec == "north" || spec == "zero") return {CellId::north(), BlochPoint::zero()};
  if (spec == "south" || spec == "one") return {CellId::south(), BlochPoint::one()};
  if (spec == "plus") {
    const BlochPoint plus = BlochPoint::make(std::numbers::pi / 2, 0.0);
    return {grid.classify(plus), plus};
  }
  const auto comma = spec.find(',');
  if (comma != std::string::npos) {
    const CellId id = CellId::cell(detail::parse_number<int>("cell", spec.substr(0, comma)),
                                   detail::parse_number<int>("cell", spec.substr(comma + 1)));
    if (!grid.valid(id)) throw InvalidArgument("cell " + spec + " is outside the grid");
    return {id, std::nullopt};
  }
  throw InvalidArgument("bad cell '" + spec + "' (north, south, zero, one, plus or n,m)");
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// Dynamics, MDP and optimal policy for state preparation towards `target`.
struct PrepModel {
  BlochGrid grid;
  PrepGateset gateset;
  PrepDynamics dynamics;
};

inline PrepModel build_prep_model(const ExperimentConfig& c) {
  BlochGrid grid(c.k);
  PrepGateset gateset = PrepGateset::from_name(c.resolved_gateset(), c.l);
  PrepDynamics dynamics = estimate_dynamics(grid, gateset, c.samples, *c.seed, c.threads);
  return {grid, std::move(gateset), std::move(dynamics)};
}

inline Solution solve_prep(const PrepModel& m, const CellId& target, const ExperimentConfig& c) {
  const TabularMDP mdp = build_prep_mdp(m.dynamics, m.gateset.labels(), m.grid.index(target),
                                        c.resolved_gamma());
  SolverOptions opts;
  opts.tolerance = c.tol;
  return policy_iteration(mdp, opts);
}

inline PrepExtractOptions prep_extract_options(const ExperimentConfig& c) {
  PrepExtractOptions o;
  o.episodes = c.resolved_episodes();
  o.max_len = c.max_len;
  return o;
}

inline nlohmann::json run_state_prep(const ExperimentConfig& c) {
  const PrepModel m = build_prep_model(c);
  const auto [start, start_point] = parse_cell_spec(m.grid, c.start);
  const auto [target, target_point] = parse_cell_spec(m.grid, c.target_cell);
  const Solution sol = solve_prep(m, target, c);
  PrepExtractOptions o = prep_extract_options(c);
  o.reference_start = start_point;
  o.reference_target = target_point;
  Rng rng = make_stream(*c.seed, "prep-extract");
  const PrepProgram program = extract_program(m.grid, m.gateset, sol.policy, start, target, o, rng);
  nlohmann::json j = program_json(program);
  j["value_start"] = sol.values[m.grid.index(start)];
  j["value_target"] = sol.values[m.grid.index(target)];
  j["policy_iterations"] = sol.iterations;
  return nlohmann::json::array({j});
}

inline nlohmann::json run_ht_states(const ExperimentConfig& c) {
  const PrepModel m = build_prep_model(c);
  nlohmann::json results = nlohmann::json::array();
  for (std::uint64_t n : c.resolved_ns()) {
    const HtTarget tgt = ht_target_cell(m.grid, n);
    const Solution sol = solve_prep(m, tgt.cell, c);
    PrepExtractOptions o = prep_extract_options(c);
    o.reference_start = BlochPoint::zero();
    o.reference_target = tgt.point;
    Rng rng = make_stream(*c.seed, "ht-extract", n);
    nlohmann::json entry = {{"n", n}, {"target_cell", tgt.cell.to_string()},
                            {"target_point", point_json(tgt.point)}};
    try {
      entry["program"] = program_json(
          extract_program(m.grid, m.gateset, sol.policy, CellId::north(), tgt.cell, o, rng));
    } catch (const NoPathError& e) {
      entry["error"] = error_json(e);
    }
    results.push_back(std::move(entry));
  }
  return results;
}

inline std::vector<int> program_lengths(const PrepModel& m, const Solution& sol,
                                        const CellId& target, const PrepExtractOptions& o,
                                        std::uint64_t seed,
                                        std::vector<std::optional<PrepProgram>>* programs = nullptr) {
  std::vector<int> lengths(m.grid.cell_count(), -1);
  if (programs) programs->assign(m.grid.cell_count(), std::nullopt);
  for (std::size_t s = 0; s < m.grid.cell_count(); ++s) {
    Rng rng = make_stream(seed, "landscape-extract", s);
    try {
      PrepProgram p = extract_program(m.grid, m.gateset, sol.policy, m.grid.cell(s), target, o, rng);
      lengths[s] = static_cast<int>(p.gates.size());
      if (programs) (*programs)[s] = std::move(p);
    } catch (const NoPathError&) {
    }
  }
  return lengths;
}

inline nlohmann::json run_landscape(const ExperimentConfig& c) {
  const PrepModel m = build_prep_model(c);
  const auto [target, target_point] = parse_cell_spec(m.grid, c.target_cell);
  const Solution sol = solve_prep(m, target, c);
  PrepExtractOptions o = prep_extract_options(c);
  o.reference_target = target_point;
  const std::vector<int> lengths = program_lengths(m, sol, target, o, *c.seed);
  const auto rows = landscape(m.grid, m.gateset, sol, lengths);
  std::ofstream csv(c.resolved_csv());
  if (!csv) throw InvalidArgument("cannot write '" + c.resolved_csv() + "'");
  write_landscape_csv(csv, rows);

  std::map<int, std::size_t> histogram;
  for (int len : lengths) ++histogram[len];
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [len, count] : histogram) hist[std::to_string(len)] = count;
  return nlohmann::json::array({{{"csv", c.resolved_csv()},
                                 {"cells", m.grid.cell_count()},
                                 {"value_target", sol.values[m.grid.index(target)]},
                                 {"length_histogram", hist}}});
}

inline std::vector<Quaternion> resolve_targets(const ExperimentConfig& c) {
  if (!c.target_file.empty()) return read_targets_file(c.target_file);
  if (c.target) return {*c.target};
  Rng rng = make_stream(*c.seed, "haar-targets");
  std::vector<Quaternion> out;
  for (std::size_t i = 0; i < c.haar; ++i) out.push_back(haar_random_su2(rng));
  return out;
}

/// Rollouts, MDP solve and extraction for a single compilation target.
inline CompileResult compile_with_mdp(const Quaternion& target, const ExperimentConfig& c,
                                      std::uint64_t index, CompileDynamics* dynamics_out = nullptr) {
  const QuatGrid grid(c.dbin);
  Rng rollout_rng = make_stream(*c.seed, "rollouts", index);
  CompileDynamics dyn = estimate_rollout_dynamics(grid, target, c.resolved_eps(),
                                                  {c.rollouts, c.rollout_len}, rollout_rng);
  SolverOptions opts;
  opts.tolerance = c.tol;
  const Solution sol = policy_iteration(build_compile_mdp(dyn, c.resolved_gamma()), opts);
  Rng extract_rng = make_stream(*c.seed, "compile-extract", index);
  CompileResult r = extract_sequence(dyn, sol.policy, {c.resolved_episodes(), c.max_len}, extract_rng);
  if (dynamics_out) *dynamics_out = std::move(dyn);
  return r;
}

inline nlohmann::json run_compile(const ExperimentConfig& c) {
  nlohmann::json results = nlohmann::json::array();
  const auto targets = resolve_targets(c);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    nlohmann::json entry = {{"index", i}, {"target", targets[i].components()}};
    if (c.kind == ExperimentKind::Compile) {
      try {
        entry["mdp"] = compile_json(compile_with_mdp(targets[i], c, i));
      } catch (const NoValidSequenceError& e) {
        entry["mdp"] = error_json(e);
      }
    }
    try {
      entry["bf"] = compile_json(brute_force_shortest(targets[i], c.resolved_eps(), c.max_n));
    } catch (const DepthExceededError& e) {
      entry["bf"] = error_json(e);
    }
    results.push_back(std::move(entry));
  }
  return results;
}

/// Runs the configured experiment and returns its JSON report.
inline nlohmann::json run_experiment(const ExperimentConfig& c) {
  c.validate();
  nlohmann::json results;
  switch (c.kind) {
    case ExperimentKind::StatePrep: results = run_state_prep(c); break;
    case ExperimentKind::HtStates: results = run_ht_states(c); break;
    case ExperimentKind::Landscape: results = run_landscape(c); break;
    case ExperimentKind::Compile:
    case ExperimentKind::BruteForce: results = run_compile(c); break;
  }
  return {{"schema_version", kReportSchemaVersion},
          {"experiment", to_string(c.kind)},
          {"config", c.to_json()},
          {"results", std::move(results)}};
}

/// Runs the experiment and writes its report. Returns the process exit
/// status: 0 on success, 1 on failure (with a JSON error report on `err`).
inline int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  try {
    const nlohmann::json report = run_experiment(c);
    if (c.output.empty()) {
      out << report.dump(2) << '\n';
    } else {
      std::ofstream file(c.output);
      if (!file) throw InvalidArgument("cannot write '" + c.output + "'");
      file << report.dump(2) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << nlohmann::json{{"schema_version", kReportSchemaVersion}, {"error", error_json(e)}}.dump(2)
        << '\n';
    return dynamic_cast<const InvalidArgument*>(&e) ? 2 : 1;
  }
}

}  // namespace mdpsynth
