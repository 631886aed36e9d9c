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

// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   acceptance [criterion ...]

#include <cstdlib>
#include <iostream>
#include <string>

#include "mdpsynth/verify.hpp"

int main(int argc, char** argv) {
  mdpsynth::VerifyOptions options;
  options.target_file = std::string(MDPSYNTH_DATA_DIR) + "/table2.txt";
  for (int i = 1; i < argc; ++i) options.criteria.insert(std::atoi(argv[i]));
  return mdpsynth::verify_tables(options, std::cout);
}
