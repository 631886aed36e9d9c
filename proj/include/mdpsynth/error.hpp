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

#include <stdexcept>
#include <string>

namespace mdpsynth {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

/// Rotation axis requested for +/- identity.
struct DegenerateAxis : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

/// Iterative policy evaluation hit its sweep cap.
struct ConvergenceError : Error {
  using Error::Error;
};

/// No extraction episode reached the target cell in any shuffle mode.
struct NoPathError : Error {
  using Error::Error;
};

/// No compilation episode passed the exact precision check.
struct NoValidSequenceError : Error {
  NoValidSequenceError(const std::string& what, double best_distance,
                       double soft_bound)
      : Error(what), best_distance(best_distance), soft_bound(soft_bound) {}

  double best_distance;
  double soft_bound;
};

/// Brute-force enumeration exceeded its depth limit.
struct DepthExceededError : Error {
  using Error::Error;
};

}  // namespace mdpsynth
