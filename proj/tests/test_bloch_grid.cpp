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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "mdpsynth/bloch_grid.hpp"
#include "mdpsynth/random.hpp"

namespace mdpsynth {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(BlochGrid, CellCount) {
  for (int k : {3, 4, 8, 16, 32}) {
    const BlochGrid g(k);
    EXPECT_EQ(g.cell_count(), static_cast<std::size_t>(2 + (k - 2) * 2 * k));
    for (std::size_t i = 0; i < g.cell_count(); ++i) EXPECT_EQ(g.index(g.cell(i)), i);
  }
}

TEST(BlochGrid, RejectsTinyResolution) {
  EXPECT_THROW(BlochGrid(1), InvalidArgument);
  EXPECT_EQ(BlochGrid(2).cell_count(), 2u);
}

TEST(Classify, Examples) {
  const BlochGrid g(16);
  EXPECT_EQ(g.classify(BlochPoint::make(0.05, 3.0)), CellId::north());
  EXPECT_EQ(g.classify(BlochPoint::make(kPi / 2, kPi / 2)), CellId::cell(8, 8));
  EXPECT_EQ(g.classify(BlochPoint::make(kPi - 0.01, 0.0)), CellId::south());
}

TEST(Classify, Boundaries) {
  const BlochGrid g(16);
  const double eps = kPi / 16;
  EXPECT_EQ(g.classify(BlochPoint::make(eps, 0.0)).kind, CellId::Kind::Interior);
  EXPECT_EQ(g.classify(BlochPoint::make(eps, 0.0)).band, 1);
  const CellId last = g.classify(BlochPoint::make(kPi - eps, 0.0));
  EXPECT_EQ(last.kind, CellId::Kind::Interior);
  EXPECT_EQ(last.band, 14);
  EXPECT_EQ(g.classify(BlochPoint::make(kPi / 2, 2 * kPi - 1e-12)).sector, 31);
}

TEST(Classify, PartitionAndReachability) {
  const BlochGrid g(16);
  Rng rng = make_stream(11, "test-partition");
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000000; ++i) {
    const BlochPoint p = sample_uniform_sphere(rng);
    const CellId id = g.classify(p);
    ASSERT_TRUE(g.valid(id));
    seen.insert(g.index(id));
  }
  EXPECT_EQ(seen.size(), g.cell_count());
}

TEST(SampleInCell, ClosureForAllCells) {
  const BlochGrid g(16);
  Rng rng = make_stream(12, "test-closure");
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const CellId id = g.cell(i);
    for (int d = 0; d < 100; ++d) ASSERT_EQ(g.classify(g.sample_in_cell(id, rng)), id);
  }
}

TEST(SampleInCell, NorthCapStaysBelowWidth) {
  const BlochGrid g(16);
  Rng rng = make_stream(13, "test-cap");
  for (int d = 0; d < 10000; ++d) EXPECT_LT(g.sample_in_cell(CellId::north(), rng).theta, g.width());
}

TEST(SampleInCell, UniformWithinCell) {
  const BlochGrid g(16);
  Rng rng = make_stream(14, "test-uniform-cell");
  const CellId id = CellId::cell(8, 8);
  double mean_phi = 0.0;
  double mean_cos = 0.0;
  constexpr int kN = 10000;
  for (int d = 0; d < kN; ++d) {
    const BlochPoint p = g.sample_in_cell(id, rng);
    mean_phi += p.phi / kN;
    mean_cos += std::cos(p.theta) / kN;
  }
  const double eps = g.width();
  EXPECT_NEAR(mean_phi, 8.5 * eps, eps / 10);
  EXPECT_NEAR(mean_cos, (std::cos(8 * eps) + std::cos(9 * eps)) / 2, 1e-3);
}

TEST(SampleInCell, InvalidCellThrows) {
  const BlochGrid g(16);
  Rng rng = make_stream(15, "test-invalid");
  EXPECT_THROW(g.sample_in_cell(CellId::cell(0, 0), rng), InvalidArgument);
  EXPECT_THROW(g.sample_in_cell(CellId::cell(15, 0), rng), InvalidArgument);
  EXPECT_THROW(g.sample_in_cell(CellId::cell(3, 32), rng), InvalidArgument);
}

TEST(UniformSphere, CapFractionAndSymmetry) {
  const BlochGrid g(16);
  Rng rng = make_stream(16, "test-sphere");
  constexpr int kN = 1000000;
  int north = 0;
  double mean_cos = 0.0;
  for (int i = 0; i < kN; ++i) {
    const BlochPoint p = sample_uniform_sphere(rng);
    ASSERT_GE(p.theta, 0.0);
    ASSERT_LE(p.theta, kPi);
    ASSERT_GE(p.phi, 0.0);
    ASSERT_LT(p.phi, 2 * kPi);
    north += g.classify(p) == CellId::north();
    mean_cos += std::cos(p.theta) / kN;
  }
  const double expected = (1 - std::cos(g.width())) / 2;
  const double sigma = std::sqrt(expected * (1 - expected) / kN);
  EXPECT_NEAR(static_cast<double>(north) / kN, expected, 3 * sigma);
  EXPECT_NEAR(mean_cos, 0.0, 0.005);
}

TEST(Properties, CapFidelity) {
  for (int k : {8, 16}) {
    const BlochGrid g(k);
    Rng rng = make_stream(17, "test-cap-fidelity", static_cast<std::uint64_t>(k));
    const double floor = std::pow(std::cos(kPi / (2 * k)), 2);
    for (int d = 0; d < 10000; ++d) {
      EXPECT_GE(fidelity(g.sample_in_cell(CellId::north(), rng), BlochPoint::zero()), floor - 1e-15);
    }
  }
}

TEST(Properties, RzPreservesBand) {
  const BlochGrid g(16);
  Rng rng = make_stream(18, "test-rz-band");
  for (int i = 0; i < 10000; ++i) {
    const BlochPoint p = sample_uniform_sphere(rng);
    const BlochPoint q = apply_to_bloch(gate_quaternion(Gate::rz(uniform(rng, -10, 10))), p);
    const CellId a = g.classify(p), b = g.classify(q);
    // theta is recomputed from the rotated vector; skip points within round-off of a band edge
    const double r = std::fmod(p.theta / g.width(), 1.0);
    if (r < 1e-9 || r > 1 - 1e-9) continue;
    EXPECT_EQ(a.kind, b.kind);
    EXPECT_EQ(a.band, b.band);
  }
}

TEST(Center, LiesInItsCell) {
  const BlochGrid g(16);
  for (std::size_t i = 0; i < g.cell_count(); ++i) EXPECT_EQ(g.classify(g.center(g.cell(i))), g.cell(i));
}

}  // namespace
}  // namespace mdpsynth
