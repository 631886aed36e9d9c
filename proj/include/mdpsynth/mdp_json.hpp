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

// JSON schema (schema_version 1):
//
//   TabularMDP    {"schema_version": 1, "n_states": N, "gamma": g,
//                  "actions": ["I", "H", ...],
//                  "state_labels": [...]            (optional),
//                  "transitions": [[s, a, s', r, p], ...]}
//   Policy        {"schema_version": 1, "actions": [a0, a1, ...]}
//   ValueFunction {"schema_version": 1, "values": [v0, v1, ...]}
//
// Unobserved (s, a) pairs are simply absent from "transitions".

#include <string>
#include <vector>

#include "json.hpp"
#include "mdpsynth/error.hpp"
#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

inline constexpr int kMdpSchemaVersion = 1;

inline nlohmann::json to_json(const TabularMDP& mdp,
                              const std::vector<std::string>& state_labels = {}) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      for (const Transition& t : mdp.transitions(s, a)) {
        rows.push_back({s, a, t.next, t.reward, t.probability});
      }
    }
  }
  nlohmann::json out = {{"schema_version", kMdpSchemaVersion},
                        {"n_states", mdp.n_states()},
                        {"gamma", mdp.gamma()},
                        {"actions", mdp.action_labels()},
                        {"transitions", std::move(rows)}};
  if (!state_labels.empty()) out["state_labels"] = state_labels;
  return out;
}

inline nlohmann::json to_json(const Policy& policy) {
  return {{"schema_version", kMdpSchemaVersion}, {"actions", policy.action}};
}

inline nlohmann::json to_json(const ValueFunction& values) {
  return {{"schema_version", kMdpSchemaVersion}, {"values", values.value}};
}

namespace detail {

inline void check_schema(const nlohmann::json& j, const char* what) {
  if (!j.is_object() || j.value("schema_version", 0) != kMdpSchemaVersion) {
    throw InvalidArgument(std::string(what) + ": unsupported schema_version");
  }
}

}  // namespace detail

inline TabularMDP mdp_from_json(const nlohmann::json& j) {
  detail::check_schema(j, "mdp_from_json");
  try {
    TabularMDP mdp(j.at("n_states").get<std::size_t>(),
                   j.at("actions").get<std::vector<std::string>>(),
                   j.at("gamma").get<double>());
    std::vector<std::vector<Transition>> grouped(mdp.n_states() * mdp.n_actions());
    for (const auto& row : j.at("transitions")) {
      const auto s = row.at(0).get<std::size_t>();
      const auto a = row.at(1).get<std::size_t>();
      if (s >= mdp.n_states() || a >= mdp.n_actions()) {
        throw InvalidArgument("mdp_from_json: (state, action) out of range");
      }
      grouped[s * mdp.n_actions() + a].push_back(
          {row.at(2).get<std::uint32_t>(), row.at(3).get<std::uint8_t>(),
           row.at(4).get<double>()});
    }
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        auto& outcomes = grouped[s * mdp.n_actions() + a];
        if (!outcomes.empty()) mdp.set_transitions(s, a, std::move(outcomes));
      }
    }
    return mdp;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("mdp_from_json: ") + e.what());
  }
}

inline Policy policy_from_json(const nlohmann::json& j) {
  detail::check_schema(j, "policy_from_json");
  return {j.at("actions").get<std::vector<std::uint32_t>>()};
}

inline ValueFunction values_from_json(const nlohmann::json& j) {
  detail::check_schema(j, "values_from_json");
  return {j.at("values").get<std::vector<double>>()};
}

}  // namespace mdpsynth
