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

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "mdpsynth/error.hpp"
#include "mdpsynth/su2.hpp"

namespace mdpsynth {

/// Target fixture format: one quaternion per line as four numbers
/// "a b c d". Brackets and commas are ignored, as are blank lines and lines
/// starting with '#'. Values are kept as written (not renormalized).
inline std::vector<Quaternion> read_targets(std::istream& in) {
  std::vector<Quaternion> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line) {
      if (ch == '[' || ch == ']' || ch == ',') ch = ' ';
    }
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first[0] == '#') continue;
    fields.seekg(0);
    Quaternion q;
    if (!(fields >> q.a >> q.b >> q.c >> q.d)) {
      throw InvalidArgument("targets line " + std::to_string(line_no) +
                            ": expected four numbers");
    }
    std::string extra;
    if (fields >> extra) {
      throw InvalidArgument("targets line " + std::to_string(line_no) +
                            ": trailing text '" + extra + "'");
    }
    out.push_back(q);
  }
  return out;
}

inline std::vector<Quaternion> read_targets_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open targets file '" + path + "'");
  return read_targets(in);
}

/// Parses "a,b,c,d" (or whitespace separated).
inline Quaternion parse_quaternion(const std::string& text) {
  std::istringstream in(text);
  auto targets = read_targets(in);
  if (targets.size() != 1) throw InvalidArgument("expected one quaternion: '" + text + "'");
  return targets.front();
}

}  // namespace mdpsynth
