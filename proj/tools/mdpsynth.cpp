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

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdpsynth/harness.hpp"
#include "mdpsynth/verify.hpp"

#ifndef MDPSYNTH_DATA_DIR
#define MDPSYNTH_DATA_DIR "data"
#endif

namespace {

struct OptionSpec {
  const char* key;
  const char* help;
};

constexpr OptionSpec kOptions[] = {
    {"k", "Bloch grid resolution (cell width pi/k)"},
    {"l", "rotation resolution of the RZ/RY gateset (angles j*pi/l)"},
    {"gateset", "state-preparation gateset: rzry, ihst or iht"},
    {"samples", "Monte Carlo samples for state-preparation dynamics"},
    {"start", "start cell: north, south, zero, one, plus or n,m"},
    {"target-cell", "target cell: north, south, zero, one, plus or n,m"},
    {"n", "comma-separated (HT)^n exponents, e.g. 100,1e10"},
    {"dbin", "quaternion grid spacing"},
    {"eps", "reward radius around the target quaternion"},
    {"rollouts", "number of random {H,T} rollouts"},
    {"rollout-len", "actions per rollout"},
    {"max-n", "brute-force depth limit"},
    {"target-file", "file of target quaternions, one per line"},
    {"target", "single target quaternion 'a b c d'"},
    {"haar", "number of Haar-random targets"},
    {"gamma", "discount factor"},
    {"tol", "policy evaluation tolerance"},
    {"episodes", "extraction episodes"},
    {"max-len", "maximum extracted program length"},
    {"seed", "64-bit seed for all random streams"},
    {"output", "JSON report path (default: stdout)"},
    {"csv", "landscape CSV path"},
};

void emit_usage_error(const std::string& message) {
  std::cerr << nlohmann::json{{"schema_version", mdpsynth::kReportSchemaVersion},
                              {"error", {{"type", "usage"}, {"message", message}}}}
                   .dump(2)
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gate synthesis and state preparation as Markov decision processes"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0: hardware concurrency)");

  struct Experiment {
    mdpsynth::ExperimentKind kind;
    CLI::App* cmd;
    std::string config_file;
    std::map<std::string, std::string> values;
  };
  std::vector<Experiment> experiments;
  const std::vector<std::pair<mdpsynth::ExperimentKind, const char*>> kinds{
      {mdpsynth::ExperimentKind::StatePrep, "prepare a target cell from a start cell"},
      {mdpsynth::ExperimentKind::HtStates, "prepare (HT)^n |0> states"},
      {mdpsynth::ExperimentKind::Compile, "compile targets with the MDP and brute force"},
      {mdpsynth::ExperimentKind::BruteForce, "compile targets by brute force only"},
      {mdpsynth::ExperimentKind::Landscape, "write the per-cell value landscape as CSV"},
  };
  experiments.reserve(kinds.size());
  for (const auto& [kind, help] : kinds) {
    experiments.push_back({kind, app.add_subcommand(mdpsynth::to_string(kind), help), {}, {}});
    Experiment& e = experiments.back();
    e.cmd->add_option("--config", e.config_file, "flat key = value config file");
    for (const auto& opt : kOptions) e.cmd->add_option(std::string("--") + opt.key, e.values[opt.key], opt.help);
  }

  mdpsynth::VerifyOptions verify;
  verify.target_file = std::string(MDPSYNTH_DATA_DIR) + "/table2.txt";
  std::vector<int> criteria;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
  verify_cmd->add_option("--seed", verify.seed, "seed")->capture_default_str();
  verify_cmd->add_option("--samples", verify.samples, "state-preparation samples")->capture_default_str();
  verify_cmd->add_option("--target-file", verify.target_file, "benchmark targets")->capture_default_str();
  verify_cmd->add_option("--criteria", criteria, "criteria to run (default: all)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_usage_error(e.what());
    return 2;
  }

  if (verify_cmd->parsed()) {
    verify.threads = threads;
    verify.criteria.insert(criteria.begin(), criteria.end());
    try {
      return mdpsynth::verify_tables(verify, std::cout);
    } catch (const std::exception& e) {
      std::cerr << nlohmann::json{{"error", mdpsynth::error_json(e)}}.dump(2) << '\n';
      return 1;
    }
  }

  for (Experiment& e : experiments) {
    if (!e.cmd->parsed()) continue;
    mdpsynth::ExperimentConfig config;
    try {
      if (!e.config_file.empty()) mdpsynth::apply_config_file(config, e.config_file);
      config.kind = e.kind;
      config.threads = threads;
      for (const auto& opt : kOptions) {
        if (e.cmd->count(std::string("--") + opt.key) > 0) {
          mdpsynth::apply_setting(config, opt.key, e.values[opt.key]);
        }
      }
    } catch (const std::exception& ex) {
      emit_usage_error(ex.what());
      return 2;
    }
    return mdpsynth::run(config, std::cout, std::cerr);
  }
  return 2;
}
