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
#include <string>
#include <vector>

#include "mdpsynth/su2.hpp"

namespace mdpsynth {

/// Ordered gate list stored in application order (front() acts first).
/// Human-facing strings are rendered right-to-left, i.e. the rightmost
/// symbol acts first, so {H, T} renders as "TH".
class GateSequence {
 public:
  GateSequence() = default;
  explicit GateSequence(std::vector<Gate> gates) : gates_(std::move(gates)) {}

  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  void push_back(const Gate& g) { gates_.push_back(g); }

  /// Product of all gates, last-applied on the left.
  Quaternion unitary() const {
    Quaternion q = Quaternion::identity();
    for (const Gate& g : gates_) q = compose(gate_quaternion(g), q);
    return q;
  }

  /// Same sequence with identity gates removed; all-identity collapses to
  /// a single I.
  GateSequence without_identities() const {
    std::vector<Gate> kept;
    std::copy_if(gates_.begin(), gates_.end(), std::back_inserter(kept),
                 [](const Gate& g) { return !g.is_identity(); });
    if (kept.empty() && !gates_.empty()) kept.push_back(Gate::i());
    return GateSequence(std::move(kept));
  }

  std::string render() const { return join(gates_.rbegin(), gates_.rend()); }

  std::string render_application_order() const {
    return join(gates_.begin(), gates_.end());
  }

  friend bool operator==(const GateSequence&, const GateSequence&) = default;

 private:
  template <class It>
  static std::string join(It first, It last) {
    const bool compact = std::all_of(first, last, [](const Gate& g) {
      return g.kind != Gate::Kind::RZ && g.kind != Gate::Kind::RY;
    });
    std::string out;
    for (It it = first; it != last; ++it) {
      if (!compact && !out.empty()) out += ' ';
      out += it->label();
    }
    return out;
  }

  std::vector<Gate> gates_;
};

/// Parses a right-to-left string of I/H/S/T symbols.
inline GateSequence parse_rendered(const std::string& text) {
  std::vector<Gate> gates;
  for (auto it = text.rbegin(); it != text.rend(); ++it) {
    switch (*it) {
      case 'I': gates.push_back(Gate::i()); break;
      case 'H': gates.push_back(Gate::h()); break;
      case 'S': gates.push_back(Gate::s()); break;
      case 'T': gates.push_back(Gate::t()); break;
      case ' ': break;
      default:
        throw InvalidArgument(std::string("parse_rendered: unexpected symbol '") +
                              *it + "'");
    }
  }
  return GateSequence(std::move(gates));
}

}  // namespace mdpsynth
