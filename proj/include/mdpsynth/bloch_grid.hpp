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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>

#include "mdpsynth/error.hpp"
#include "mdpsynth/random.hpp"
#include "mdpsynth/su2.hpp"

namespace mdpsynth {

/// Discrete region of the Bloch sphere: a polar cap or an interior
/// (theta-band, phi-sector) cell.
struct CellId {
  enum class Kind : std::uint8_t { NorthCap, SouthCap, Interior };

  Kind kind = Kind::NorthCap;
  int band = 0;    // theta band n, 1 <= n <= k-2 (interior only)
  int sector = 0;  // phi sector m, 0 <= m <= 2k-1 (interior only)

  static constexpr CellId north() { return {Kind::NorthCap, 0, 0}; }
  static constexpr CellId south() { return {Kind::SouthCap, 0, 0}; }
  static constexpr CellId cell(int n, int m) { return {Kind::Interior, n, m}; }

  std::string to_string() const {
    switch (kind) {
      case Kind::NorthCap: return "north";
      case Kind::SouthCap: return "south";
      case Kind::Interior:
        return "cell(" + std::to_string(band) + "," + std::to_string(sector) +
               ")";
    }
    return "?";
  }

  friend constexpr bool operator==(const CellId&, const CellId&) = default;
};

/// Bloch sphere partition with resolution eps = pi/k: two caps of angular
/// radius eps plus (k-2) theta bands of 2k phi sectors each. Intervals are
/// half-open (floor binning); theta = pi - eps belongs to the last band.
class BlochGrid {
 public:
  explicit BlochGrid(int k) : k_(k), width_(std::numbers::pi / k) {
    if (k < 2) throw InvalidArgument("BlochGrid: k must be >= 2");
  }

  int k() const { return k_; }
  double width() const { return width_; }
  int sectors() const { return 2 * k_; }

  std::size_t cell_count() const {
    return 2 + static_cast<std::size_t>(k_ - 2) * sectors();
  }

  bool valid(const CellId& id) const {
    if (id.kind != CellId::Kind::Interior) return true;
    return id.band >= 1 && id.band <= k_ - 2 && id.sector >= 0 &&
           id.sector < sectors();
  }

  /// Dense index: north = 0, south = 1, interior cells row-major by band.
  std::size_t index(const CellId& id) const {
    switch (id.kind) {
      case CellId::Kind::NorthCap: return 0;
      case CellId::Kind::SouthCap: return 1;
      case CellId::Kind::Interior: break;
    }
    if (!valid(id)) throw InvalidArgument("BlochGrid: invalid cell " + id.to_string());
    return 2 + static_cast<std::size_t>(id.band - 1) * sectors() +
           static_cast<std::size_t>(id.sector);
  }

  CellId cell(std::size_t index) const {
    if (index >= cell_count()) throw InvalidArgument("BlochGrid: cell index out of range");
    if (index == 0) return CellId::north();
    if (index == 1) return CellId::south();
    const auto rest = index - 2;
    return CellId::cell(static_cast<int>(rest / sectors()) + 1,
                        static_cast<int>(rest % sectors()));
  }

  CellId classify(const BlochPoint& p) const {
    if (p.theta < width_) return CellId::north();
    if (p.theta > std::numbers::pi - width_) return CellId::south();
    const int n = std::clamp(static_cast<int>(std::floor(p.theta / width_)), 1,
                             k_ - 2);
    const int m = std::clamp(static_cast<int>(std::floor(p.phi / width_)), 0,
                             sectors() - 1);
    return CellId::cell(n, m);
  }

  std::size_t classify_index(const BlochPoint& p) const {
    return index(classify(p));
  }

  /// Representative point: the pole for caps, the (theta, phi) midpoint
  /// otherwise.
  BlochPoint center(const CellId& id) const {
    switch (id.kind) {
      case CellId::Kind::NorthCap: return BlochPoint::zero();
      case CellId::Kind::SouthCap: return BlochPoint::one();
      case CellId::Kind::Interior: break;
    }
    return BlochPoint::make((id.band + 0.5) * width_, (id.sector + 0.5) * width_);
  }

  /// Area-uniform draw restricted to the cell. Draws that round onto a
  /// neighbouring cell are rejected.
  BlochPoint sample_in_cell(const CellId& id, Rng& rng) const {
    if (!valid(id)) {
      throw InvalidArgument("sample_in_cell: invalid cell " + id.to_string());
    }
    double cos_lo = 0, cos_hi = 0, phi_lo = 0, phi_hi = 2 * std::numbers::pi;
    switch (id.kind) {
      case CellId::Kind::NorthCap:
        cos_lo = std::cos(width_);
        cos_hi = 1.0;
        break;
      case CellId::Kind::SouthCap:
        cos_lo = -1.0;
        cos_hi = -std::cos(width_);
        break;
      case CellId::Kind::Interior:
        cos_lo = std::cos((id.band + 1) * width_);
        cos_hi = std::cos(id.band * width_);
        phi_lo = id.sector * width_;
        phi_hi = (id.sector + 1) * width_;
        break;
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double z = uniform(rng, cos_lo, cos_hi);
      const double phi = uniform(rng, phi_lo, phi_hi);
      const BlochPoint p = BlochPoint::make(std::acos(std::clamp(z, -1.0, 1.0)), phi);
      if (classify(p) == id) return p;
    }
    throw Error("sample_in_cell: rejection sampling failed for " + id.to_string());
  }

 private:
  int k_;
  double width_;
};

/// Area-uniform point: cos(theta) uniform on [-1, 1], phi uniform on
/// [0, 2 pi).
inline BlochPoint sample_uniform_sphere(Rng& rng) {
  const double z = uniform(rng, -1.0, 1.0);
  const double phi = uniform(rng, 0.0, 2 * std::numbers::pi);
  return BlochPoint::make(std::acos(z), phi);
}

}  // namespace mdpsynth
