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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdpsynth/bloch_grid.hpp"
#include "mdpsynth/fixtures.hpp"
#include "mdpsynth/gate_compile.hpp"
#include "mdpsynth/harness.hpp"
#include "mdpsynth/mdp.hpp"
#include "mdpsynth/state_prep.hpp"
#include "mdpsynth/su2.hpp"
#include "mdpsynth/testing/oracles.hpp"

namespace mdpsynth {

/// Printed brute-force sequence (right-to-left) and distance per benchmark target.
struct GoldenCompileRow {
  const char* sequence;
  double distance;
};

inline constexpr std::array<GoldenCompileRow, 29> kGoldenBruteForce{{
    {"THTTH", 0.19996},        {"HTHT", 0.2483},         {"HTTTTHTHHH", 0.18812},
    {"THTTHHHTHT", 0.20043},   {"HTTHHTHTTH", 0.26614},  {"TTHHHTHTH", 0.24801},
    {"TTTTHTTTTH", 0.22244},   {"HTHTT", 0.23627},       {"HTTHT", 0.22121},
    {"HTTTHTT", 0.24486},      {"TTHTTTTT", 0.28736},    {"HTTTTHTT", 0.20474},
    {"TTHTTT", 0.25131},       {"TTTTHTTT", 0.27854},    {"TTTTH", 0.19609},
    {"HH", 0.16286},           {"HTHHTHTHTTT", 0.09319}, {"HTTTHTHTHTTT", 0.07442},
    {"TTTTHTHTHTH", 0.19569},  {"HTTHHTHTH", 0.16617},   {"HTHTHTHTTTTH", 0.15013},
    {"THTTTH", 0.29693},       {"HTH", 0.21022},         {"THTHHHTTTH", 0.21036},
    {"TTHTHTTTHH", 0.22761},   {"HTHTHTHHTT", 0.12494},  {"TTHTTTH", 0.0623},
    {"HTTTH", 0.26015},        {"HTTHTHHTTH", 0.27136},
}};

/// Reference (HT)^n |0> program lengths.
struct GoldenHtRow {
  std::uint64_t n;
  std::size_t length;
};

inline constexpr std::array<GoldenHtRow, 8> kGoldenHt{{
    {100ULL, 9},
    {1000ULL, 10},
    {10000ULL, 3},
    {1000000ULL, 8},
    {10000000ULL, 17},
    {100000000ULL, 1},
    {1000000000ULL, 1},
    {10000000000ULL, 11},
}};

struct VerifyOptions {
  std::uint64_t seed = 7;
  std::size_t samples = 1'000'000;
  unsigned threads = 0;
  std::string target_file;   // benchmark targets (29 quaternions)
  std::set<int> criteria;    // empty: all
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double x, int precision = 6) {
  std::ostringstream out;
  out.precision(precision);
  out << x;
  return out.str();
}

/// Determinant of a square matrix by Gaussian elimination.
inline double determinant(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      std::swap(a[col], a[pivot]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

/// Central-difference Jacobian of a map R^4 -> R^4 at q.
inline std::vector<std::vector<double>> jacobian(const std::function<Quaternion(const Quaternion&)>& f,
                                                 const Quaternion& q, double h = 1e-6) {
  std::vector<std::vector<double>> j(4, std::vector<double>(4));
  const auto base = q.components();
  for (std::size_t col = 0; col < 4; ++col) {
    auto plus = base;
    auto minus = base;
    plus[col] += h;
    minus[col] -= h;
    const auto fp = f({plus[0], plus[1], plus[2], plus[3]}).components();
    const auto fm = f({minus[0], minus[1], minus[2], minus[3]}).components();
    for (std::size_t row = 0; row < 4; ++row) j[row][col] = (fp[row] - fm[row]) / (2 * h);
  }
  return j;
}

}  // namespace detail

/// Runs the acceptance criteria and reports one result per criterion.
class Verifier {
 public:
  explicit Verifier(VerifyOptions options) : opt_(std::move(options)) {}

  std::vector<CriterionResult> run(const std::function<void(const CriterionResult&)>& on_result = {}) {
    using Check = CriterionResult (Verifier::*)();
    const std::array<std::pair<int, Check>, 10> checks{{
        {1, &Verifier::target_value},      {2, &Verifier::solver_oracles},
        {3, &Verifier::rzry_lengths},      {4, &Verifier::ihst_programs},
        {5, &Verifier::ht_states},         {6, &Verifier::brute_force_rows},
        {7, &Verifier::mdp_vs_bf},         {8, &Verifier::volume_preservation},
        {9, &Verifier::successor_bound},   {10, &Verifier::non_monotone_distance},
    }};
    std::vector<CriterionResult> out;
    for (const auto& [id, check] : checks) {
      if (!opt_.criteria.empty() && !opt_.criteria.contains(id)) continue;
      const auto t0 = std::chrono::steady_clock::now();
      CriterionResult r;
      try {
        r = (this->*check)();
      } catch (const std::exception& e) {
        r.passed = false;
        r.measured = std::string("error: ") + e.what();
      }
      r.id = id;
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (on_result) on_result(r);
      out.push_back(std::move(r));
    }
    return out;
  }

 private:
  ExperimentConfig prep_config(const std::string& gateset, double gamma) const {
    ExperimentConfig c;
    c.kind = ExperimentKind::StatePrep;
    c.k = 16;
    c.l = 160;
    c.gateset = gateset;
    c.gamma = gamma;
    c.samples = opt_.samples;
    c.seed = opt_.seed;
    c.threads = opt_.threads;
    return c;
  }

  ExperimentConfig compile_config() const {
    ExperimentConfig c;
    c.kind = ExperimentKind::Compile;
    c.dbin = 0.15;
    c.eps = 0.3;
    c.gamma = 0.8;
    c.seed = opt_.seed;
    c.threads = opt_.threads;
    return c;
  }

  const std::vector<Quaternion>& targets() {
    if (targets_.empty()) {
      targets_ = read_targets_file(opt_.target_file);
      if (targets_.size() != kGoldenBruteForce.size()) {
        throw InvalidArgument("expected " + std::to_string(kGoldenBruteForce.size()) +
                              " benchmark targets in " + opt_.target_file);
      }
    }
    return targets_;
  }

  /// RZ/RY model towards the south cap, shared by criteria 1 and 3.
  void ensure_rzry() {
    if (rzry_) return;
    const ExperimentConfig c = prep_config("rzry", 0.8);
    PrepModel model = build_prep_model(c);
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol = solve_prep(model, CellId::south(), c);
    rzry_solve_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rzry_.emplace(std::move(model), std::move(sol));
  }

  CriterionResult target_value() {
    ensure_rzry();
    const auto& [model, sol] = *rzry_;
    const std::size_t target = model.grid.index(CellId::south());
    const double vt = sol.values[target];
    double max_other = -1.0;
    std::vector<std::string> ties;
    for (std::size_t s = 0; s < sol.values.size(); ++s) {
      if (s == target) continue;
      max_other = std::max(max_other, sol.values[s]);
      if (sol.values[s] >= 5.0 - 1e-6) ties.push_back(model.grid.cell(s).to_string());
    }
    std::string tie_list;
    for (const auto& t : ties) tie_list += (tie_list.empty() ? "" : " ") + t;
    const bool ok = std::abs(vt - 5.0) <= 1e-6 && ties.empty() && rzry_solve_seconds_ < 60.0;
    return {0, "target value V*(target) = 5 and unique maximum", ok,
            "V*(target)=" + detail::fmt(vt, 10) + " max other V*=" + detail::fmt(max_other, 10) +
                (ties.empty() ? "" : " at " + tie_list) + " solve=" + detail::fmt(rzry_solve_seconds_, 3) + "s"};
  }

  CriterionResult solver_oracles() {
    Rng rng = make_stream(opt_.seed, "verify-random-mdps");
    double worst_enum = 0.0;
    double worst_vi = 0.0;
    for (int i = 0; i < 50; ++i) {
      const TabularMDP mdp = testing::random_mdp(rng, 8, 3);
      const Solution sol = policy_iteration(mdp);
      const auto exact = testing::enumerate_optimal_values(mdp);
      const auto vi = testing::value_iteration(mdp);
      for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        worst_enum = std::max(worst_enum, std::abs(sol.values[s] - exact[s]));
        worst_vi = std::max(worst_vi, std::abs(sol.values[s] - vi[s]));
      }
    }
    return {0, "policy iteration matches enumeration and value iteration", worst_enum < 1e-6 && worst_vi < 1e-6,
            "50 MDPs: max |PI-enum|=" + detail::fmt(worst_enum, 3) + " max |PI-VI|=" + detail::fmt(worst_vi, 3)};
  }

  CriterionResult rzry_lengths() {
    ensure_rzry();
    const auto& [model, sol] = *rzry_;
    const ExperimentConfig c = prep_config("rzry", 0.8);
    PrepExtractOptions o = prep_extract_options(c);
    o.reference_target = BlochPoint::one();
    const auto lengths = program_lengths(model, sol, CellId::south(), o, opt_.seed);
    std::size_t within = 0;
    std::size_t high = 0;
    std::size_t high_single = 0;
    double min_single = 1e300;
    double max_double = -1e300;
    for (std::size_t s = 0; s < lengths.size(); ++s) {
      if (lengths[s] >= 0 && lengths[s] <= 2) ++within;
      if (lengths[s] == 1) min_single = std::min(min_single, sol.values[s]);
      if (lengths[s] == 2) max_double = std::max(max_double, sol.values[s]);
      if (sol.values[s] >= 4.0) {
        ++high;
        if (lengths[s] == 1) ++high_single;
      }
    }
    const double frac = high == 0 ? 0.0 : static_cast<double>(high_single) / static_cast<double>(high);
    const bool ok = within == lengths.size() && high > 0 && frac >= 0.9;
    return {0, "RZ/RY programs have length <= 2; V* >= 4 gives single gates", ok,
            std::to_string(within) + "/" + std::to_string(lengths.size()) + " cells length<=2; " +
                std::to_string(high_single) + "/" + std::to_string(high) + " cells with V*>=4 length 1; min V* (length 1)=" +
                detail::fmt(min_single, 4) + " max V* (length 2)=" + detail::fmt(max_double, 4)};
  }

  CriterionResult ihst_programs() {
    const ExperimentConfig c = prep_config("ihst", 0.95);
    const PrepModel model = build_prep_model(c);
    const Solution sol = solve_prep(model, CellId::south(), c);
    const double floor = std::pow(std::cos(std::numbers::pi / 32), 2) - 0.01;

    PrepExtractOptions o = prep_extract_options(c);
    o.reference_target = BlochPoint::one();
    o.reference_start = BlochPoint::zero();
    Rng rng0 = make_stream(opt_.seed, "verify-ihst", 0);
    const PrepProgram north =
        extract_program(model.grid, model.gateset, sol.policy, CellId::north(), CellId::south(), o, rng0);
    const double f_north =
        fidelity(apply_to_bloch(north.gates.unitary(), BlochPoint::zero()), BlochPoint::one());

    const auto [plus_cell, plus_point] = parse_cell_spec(model.grid, "plus");
    o.reference_start = plus_point;
    Rng rng1 = make_stream(opt_.seed, "verify-ihst", 1);
    const PrepProgram plus =
        extract_program(model.grid, model.gateset, sol.policy, plus_cell, CellId::south(), o, rng1);
    const double f_plus = fidelity(apply_to_bloch(plus.gates.unitary(), *plus_point), BlochPoint::one());

    const bool ok = north.gates.size() == 4 && f_north >= floor && plus.gates.size() == 3;
    return {0, "IHST programs from |0> (length 4) and |+> (length 3)", ok,
            "|0>: " + north.gates.render() + " len=" + std::to_string(north.gates.size()) +
                " F=" + detail::fmt(f_north) + " (floor " + detail::fmt(floor) + "); |+>: " +
                plus.gates.render() + " len=" + std::to_string(plus.gates.size()) + " F=" + detail::fmt(f_plus)};
  }

  CriterionResult ht_states() {
    const ExperimentConfig c = prep_config("iht", 0.95);
    const PrepModel model = build_prep_model(c);
    bool ok = true;
    std::string summary;
    for (const auto& row : kGoldenHt) {
      const HtTarget tgt = ht_target_cell(model.grid, row.n);
      const Solution sol = solve_prep(model, tgt.cell, c);
      PrepExtractOptions o = prep_extract_options(c);
      o.reference_start = BlochPoint::zero();
      o.reference_target = tgt.point;
      Rng rng = make_stream(opt_.seed, "ht-extract", row.n);
      std::string entry = "n=" + std::to_string(row.n) + ":";
      try {
        const PrepProgram p =
            extract_program(model.grid, model.gateset, sol.policy, CellId::north(), tgt.cell, o, rng);
        const double f = fidelity(apply_to_bloch(p.gates.unitary(), BlochPoint::zero()), tgt.point);
        const bool row_ok = f >= 0.98 && p.gates.size() <= row.length + 2;
        ok = ok && row_ok;
        entry += p.gates.render() + " len=" + std::to_string(p.gates.size()) + "/" +
                 std::to_string(row.length + 2) + " F=" + detail::fmt(f, 4) + (row_ok ? "" : " FAIL");
      } catch (const NoPathError&) {
        ok = false;
        entry += "no path";
      }
      summary += (summary.empty() ? "" : "; ") + entry;
    }
    return {0, "(HT)^n |0> programs: fidelity >= 0.98, length <= reference + 2", ok, summary};
  }

  CriterionResult brute_force_rows() {
    const auto& ts = targets();
    std::size_t matched = 0;
    double worst = 0.0;
    std::string misses;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const CompileResult r = brute_force_shortest(ts[i], 0.3, 16);
      const auto& g = kGoldenBruteForce[i];
      const double err = std::abs(r.distance - g.distance);
      worst = std::max(worst, err);
      const bool row_ok = r.sequence.size() == std::string(g.sequence).size() && err <= 1e-4;
      if (row_ok) ++matched;
      else misses += " row" + std::to_string(i + 1);
    }
    return {0, "brute force reproduces reference lengths and distances", matched == ts.size(),
            std::to_string(matched) + "/" + std::to_string(ts.size()) + " rows; max |d - d_pub|=" +
                detail::fmt(worst, 3) + misses};
  }

  void ensure_compile() {
    if (compile_) return;
    const auto& ts = targets();
    const ExperimentConfig c = compile_config();
    compile_.emplace();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CompileDynamics dyn;
      std::optional<CompileResult> result;
      try {
        result = compile_with_mdp(ts[i], c, i, &dyn);
      } catch (const NoValidSequenceError&) {
        const QuatGrid grid(c.dbin);
        Rng rng = make_stream(*c.seed, "rollouts", i);
        dyn = estimate_rollout_dynamics(grid, ts[i], c.resolved_eps(), {c.rollouts, c.rollout_len}, rng);
      }
      compile_->emplace_back(std::move(dyn), std::move(result));
    }
  }

  CriterionResult mdp_vs_bf() {
    ensure_compile();
    const auto& ts = targets();
    std::size_t valid = 0;
    std::size_t agree = 0;
    std::string diffs;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto& result = (*compile_)[i].second;
      if (!result) {
        diffs += " row" + std::to_string(i + 1) + ":none";
        continue;
      }
      const double replay = quat_distance(result->sequence.unitary(), ts[i]);
      if (replay < 0.3) ++valid;
      const std::size_t bf_len = std::string(kGoldenBruteForce[i].sequence).size();
      if (result->sequence.size() == bf_len) ++agree;
      else diffs += " row" + std::to_string(i + 1) + ":" + std::to_string(result->sequence.size()) + "vs" + std::to_string(bf_len);
    }
    const double frac = static_cast<double>(agree) / static_cast<double>(ts.size());
    return {0, "MDP sequences within eps; lengths agree with brute force", valid == ts.size() && frac >= 0.8,
            std::to_string(valid) + "/" + std::to_string(ts.size()) + " within eps; " + std::to_string(agree) +
                "/" + std::to_string(ts.size()) + " length agreement" + diffs};
  }

  CriterionResult volume_preservation() {
    Rng rng = make_stream(opt_.seed, "verify-jacobian");
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Quaternion q = haar_random_su2(rng);
      worst = std::max(worst, std::abs(detail::determinant(detail::jacobian(apply_H, q)) - 1.0));
      worst = std::max(worst, std::abs(detail::determinant(detail::jacobian(apply_T, q)) - 1.0));
    }
    return {0, "apply_H and apply_T Jacobians have unit determinant", worst < 1e-6,
            "100 points: max |det J - 1|=" + detail::fmt(worst, 3)};
  }

  CriterionResult successor_bound() {
    ensure_compile();
    std::size_t worst = 0;
    std::size_t pairs = 0;
    for (const auto& [dyn, result] : *compile_) {
      for (std::size_t s = 0; s < dyn.n_states(); ++s) {
        for (std::size_t a : {std::size_t{1}, std::size_t{2}}) {
          if (dyn.outcomes(s, a).empty()) continue;
          ++pairs;
          worst = std::max(worst, dyn.successor_cells(s, a));
        }
      }
    }
    return {0, "at most 16 successor cells per (state, H/T)", worst <= 16,
            std::to_string(pairs) + " (s,a) pairs; max successors=" + std::to_string(worst)};
  }

  CriterionResult non_monotone_distance() {
    const auto& ts = targets();
    const Quaternion& target = ts[2];
    const GateSequence seq = parse_rendered(kGoldenBruteForce[2].sequence);
    std::vector<double> dist_after_h;
    std::vector<double> hs_after_h;
    Quaternion q = Quaternion::identity();
    for (const Gate& g : seq.gates()) {
      q = compose(gate_quaternion(g), q);
      if (g.kind == Gate::Kind::H) {
        dist_after_h.push_back(quat_distance(q, target));
        hs_after_h.push_back(hilbert_schmidt(q, target));
      }
    }
    const double final_hs = hilbert_schmidt(q, target);
    const std::array<double, 3> want_d{1.34, 0.97, 1.49};
    const std::array<double, 4> want_hs{0.21, 1.05, -0.21, 1.96};
    const std::array<double, 4> got_hs{hs_after_h.at(0), hs_after_h.at(1), hs_after_h.at(2), final_hs};
    bool ok = dist_after_h.size() >= 3;
    std::string d_text;
    std::string hs_text;
    for (std::size_t i = 0; i < 3; ++i) {
      ok = ok && std::abs(dist_after_h[i] - want_d[i]) <= 0.02;
      d_text += (i ? "," : "") + detail::fmt(dist_after_h[i], 4);
    }
    for (std::size_t i = 0; i < 4; ++i) {
      ok = ok && std::abs(got_hs[i] - want_hs[i]) <= 0.05;
      hs_text += (i ? "," : "") + detail::fmt(got_hs[i], 4);
    }
    return {0, "non-monotone distance along a shortest sequence", ok,
            "|q-q*| after H: " + d_text + "; Re tr(U^+V): " + hs_text};
  }

  VerifyOptions opt_;
  std::vector<Quaternion> targets_;
  std::optional<std::pair<PrepModel, Solution>> rzry_;
  double rzry_solve_seconds_ = 0.0;
  std::optional<std::vector<std::pair<CompileDynamics, std::optional<CompileResult>>>> compile_;
};

inline void print_result(std::ostream& out, const CriterionResult& r) {
  out << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << " | " << r.measured
      << " [" << detail::fmt(r.seconds, 3) << "s]" << std::endl;
}

/// Runs the selected criteria, printing one line each. Returns 0 when all pass.
inline int verify_tables(const VerifyOptions& options, std::ostream& out) {
  Verifier verifier(options);
  const auto results = verifier.run([&](const CriterionResult& r) { print_result(out, r); });
  const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  out << passed << "/" << results.size() << " criteria passed" << std::endl;
  return passed == static_cast<long>(results.size()) ? 0 : 1;
}

}  // namespace mdpsynth
