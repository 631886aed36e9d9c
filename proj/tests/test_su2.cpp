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
#include <complex>
#include <numbers>

#include "mdpsynth/gate_sequence.hpp"
#include "mdpsynth/random.hpp"
#include "mdpsynth/su2.hpp"

namespace mdpsynth {
namespace {

using cd = std::complex<double>;
using Mat2 = std::array<cd, 4>;  // row-major

constexpr double kPi = std::numbers::pi;

Mat2 matrix_of(const Quaternion& q) {
  return {cd(q.a, q.b), cd(q.c, q.d), cd(-q.c, q.d), cd(q.a, -q.b)};
}

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

Quaternion from_matrix(const Mat2& m) {
  return {m[0].real(), m[0].imag(), m[1].real(), m[1].imag()};
}

Mat2 rz_matrix(double beta) {
  return {std::polar(1.0, -beta / 2), 0.0, 0.0, std::polar(1.0, beta / 2)};
}

Mat2 ry_matrix(double gamma) {
  const double c = std::cos(gamma / 2), s = std::sin(gamma / 2);
  return {c, -s, s, c};
}

void expect_quat_near(const Quaternion& x, const Quaternion& y, double tol) {
  EXPECT_NEAR(x.a, y.a, tol);
  EXPECT_NEAR(x.b, y.b, tol);
  EXPECT_NEAR(x.c, y.c, tol);
  EXPECT_NEAR(x.d, y.d, tol);
}

double sign_free_distance(const Quaternion& x, const Quaternion& y) {
  return std::min(quat_distance(x, y), quat_distance(x, -y));
}

const Quaternion kH = gate_quaternion(Gate::h());
const Quaternion kT = gate_quaternion(Gate::t());

TEST(GateQuaternion, Identity) { expect_quat_near(gate_quaternion(Gate::i()), {1, 0, 0, 0}, 0); }

TEST(GateQuaternion, T) {
  expect_quat_near(kT, {std::cos(kPi / 8), -std::sin(kPi / 8), 0, 0}, 1e-15);
}

TEST(GateQuaternion, H) {
  expect_quat_near(kH, {0, -1 / std::sqrt(2.0), 0, -1 / std::sqrt(2.0)}, 1e-15);
}

TEST(GateQuaternion, HIsRyHalfPiTimesRzPi) {
  const Quaternion oracle = from_matrix(mul(ry_matrix(kPi / 2), rz_matrix(kPi)));
  expect_quat_near(kH, oracle, 1e-15);
}

TEST(GateQuaternion, SIsTSquared) {
  expect_quat_near(gate_quaternion(Gate::s()), compose(kT, kT), 1e-15);
}

TEST(GateQuaternion, RotationsMatchMatrices) {
  for (double angle : {-2.0, 0.0, 0.3, 1.7, 4.0}) {
    expect_quat_near(gate_quaternion(Gate::rz(angle)), from_matrix(rz_matrix(angle)), 1e-15);
    expect_quat_near(gate_quaternion(Gate::ry(angle)), from_matrix(ry_matrix(angle)), 1e-15);
  }
}

TEST(GateQuaternion, NonFiniteAngleThrows) {
  EXPECT_THROW(gate_quaternion(Gate::rz(std::nan(""))), InvalidArgument);
  EXPECT_THROW(gate_quaternion(Gate::ry(INFINITY)), InvalidArgument);
}

TEST(Compose, HSquaredIsMinusOne) { expect_quat_near(compose(kH, kH), {-1, 0, 0, 0}, 1e-15); }

TEST(Compose, IdentityIsNeutral) {
  const Quaternion q{0.5, -0.5, 0.5, 0.5};
  expect_quat_near(compose(Quaternion::identity(), q), q, 0);
}

TEST(Compose, TOnIdentity) {
  expect_quat_near(compose(kT, Quaternion::identity()), {std::cos(kPi / 8), -std::sin(kPi / 8), 0, 0}, 1e-15);
}

TEST(Compose, MatchesMatrixProduct) {
  Rng rng = make_stream(1, "test-compose");
  for (int i = 0; i < 200; ++i) {
    const Quaternion g = haar_random_su2(rng);
    const Quaternion u = haar_random_su2(rng);
    expect_quat_near(compose(g, u), from_matrix(mul(matrix_of(g), matrix_of(u))), 1e-12);
  }
}

TEST(ClosedForms, ApplyHOnIdentity) {
  expect_quat_near(apply_H(Quaternion::identity()), {0, -1 / std::sqrt(2.0), 0, -1 / std::sqrt(2.0)}, 1e-15);
}

TEST(ClosedForms, ApplyTOnIdentity) {
  expect_quat_near(apply_T(Quaternion::identity()), {std::cos(kPi / 8), -std::sin(kPi / 8), 0, 0}, 1e-15);
}

TEST(ClosedForms, AgreeWithComposeOnRandomQuaternions) {
  Rng rng = make_stream(2, "test-closed-forms");
  for (int i = 0; i < 1000; ++i) {
    const Quaternion q = haar_random_su2(rng);
    expect_quat_near(apply_H(q), compose(kH, q), 1e-12);
    expect_quat_near(apply_T(q), compose(kT, q), 1e-12);
    expect_quat_near(apply_H(apply_H(q)), -q, 1e-12);
  }
}

double det4(std::array<std::array<double, 4>, 4> m) {
  double det = 1.0;
  for (int c = 0; c < 4; ++c) {
    int p = c;
    for (int r = c + 1; r < 4; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    }
    if (p != c) std::swap(m[p], m[c]), det = -det;
    det *= m[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

TEST(ClosedForms, JacobianDeterminantIsOne) {
  Rng rng = make_stream(19, "test-jacobian");
  constexpr double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Quaternion q = haar_random_su2(rng);
    for (auto f : {&apply_H, &apply_T}) {
      std::array<std::array<double, 4>, 4> j{};
      for (int c = 0; c < 4; ++c) {
        auto up = q.components(), down = q.components();
        up[c] += h;
        down[c] -= h;
        const auto fu = f({up[0], up[1], up[2], up[3]}).components();
        const auto fd = f({down[0], down[1], down[2], down[3]}).components();
        for (int r = 0; r < 4; ++r) j[r][c] = (fu[r] - fd[r]) / (2 * h);
      }
      EXPECT_NEAR(det4(j), 1.0, 1e-6);
    }
  }
}

TEST(ClosedForms, EightTsIsMinusOne) {
  Quaternion q = Quaternion::identity();
  for (int i = 0; i < 8; ++i) q = apply_T(q);
  expect_quat_near(q, {-1, 0, 0, 0}, 1e-14);
}

TEST(Norm, PreservedAlongLongRandomWalks) {
  Rng rng = make_stream(3, "test-norm");
  Quaternion q = haar_random_su2(rng);
  for (int i = 0; i < 100000; ++i) {
    q = uniform(rng, 0, 1) < 0.5 ? apply_H(q) : apply_T(q);
    if (i % 7 == 0) q = compose(kT, q);
    ASSERT_LT(std::abs(q.norm() - 1.0), 1e-10);
  }
  EXPECT_LT(std::abs(power(q, 123456789ULL).norm() - 1.0), 1e-10);
}

TEST(Power, Basics) {
  const Quaternion q{0.6, 0.0, 0.8, 0.0};
  expect_quat_near(power(q, 0), Quaternion::identity(), 0);
  expect_quat_near(power(q, 1), q, 1e-15);
  expect_quat_near(power(kT, 8), {-1, 0, 0, 0}, 1e-14);
}

TEST(Power, MatchesIteratedProduct) {
  const Quaternion ht = compose(kH, kT);
  Quaternion iterated = Quaternion::identity();
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    iterated = apply_H(apply_T(iterated));
    if (n % 9973 == 0 || n == 100000) expect_quat_near(power(ht, n), iterated, 1e-9);
  }
}

TEST(Power, HtToTheHundredMillionStaysNearZeroState) {
  const Quaternion q = power(compose(kH, kT), 100000000ULL);
  EXPECT_GE(fidelity(apply_to_bloch(q, BlochPoint::zero()), BlochPoint::zero()), 0.98);
}

TEST(Zyz, TGate) {
  const ZyzAngles z = zyz_decompose(kT);
  EXPECT_NEAR(z.alpha, kPi / 8, 1e-12);
  EXPECT_NEAR(z.beta, 0.0, 1e-12);
  EXPECT_NEAR(z.gamma, kPi / 8, 1e-12);
}

TEST(Zyz, Identity) {
  const ZyzAngles z = zyz_decompose(Quaternion::identity());
  EXPECT_EQ(z.alpha, 0.0);
  EXPECT_EQ(z.beta, 0.0);
  EXPECT_EQ(z.gamma, 0.0);
}

TEST(Zyz, HRoundTrip) { EXPECT_LT(sign_free_distance(zyz_compose(zyz_decompose(kH)), kH), 1e-9); }

TEST(Zyz, BetaPiDegeneracy) {
  const Quaternion q = compose(gate_quaternion(Gate::ry(kPi)), gate_quaternion(Gate::rz(0.7)));
  const ZyzAngles z = zyz_decompose(q);
  EXPECT_NEAR(z.beta, kPi, 1e-12);
  EXPECT_EQ(z.gamma, 0.0);
  EXPECT_LT(sign_free_distance(zyz_compose(z), q), 1e-9);
}

TEST(Zyz, RoundTripOnRandomQuaternions) {
  Rng rng = make_stream(4, "test-zyz");
  for (int i = 0; i < 1000; ++i) {
    const Quaternion q = haar_random_su2(rng);
    const ZyzAngles z = zyz_decompose(q);
    EXPECT_GE(z.beta, 0.0);
    EXPECT_LE(z.beta, kPi);
    EXPECT_LT(sign_free_distance(zyz_compose(z), q), 1e-9);
  }
}

TEST(AxisAngle, TIsZRotationByQuarterPi) {
  const AxisAngle aa = axis_angle(kT);
  EXPECT_NEAR(aa.nx, 0, 1e-15);
  EXPECT_NEAR(aa.ny, 0, 1e-15);
  EXPECT_NEAR(aa.nz, 1, 1e-15);
  EXPECT_NEAR(aa.angle, kPi / 4, 1e-12);
}

TEST(AxisAngle, HHasAnglePi) { EXPECT_NEAR(axis_angle(kH).angle, kPi, 1e-12); }

TEST(AxisAngle, IdentityIsDegenerate) {
  EXPECT_THROW(axis_angle(Quaternion::identity()), DegenerateAxis);
  EXPECT_THROW(axis_angle(-Quaternion::identity()), DegenerateAxis);
}

// Rodrigues rotation about the reported axis reproduces the Bloch action.
TEST(AxisAngle, RodriguesMatchesBlochAction) {
  Rng rng = make_stream(5, "test-axis");
  for (int i = 0; i < 200; ++i) {
    const Quaternion q = haar_random_su2(rng);
    const AxisAngle aa = axis_angle(q);
    const Vec3 n{aa.nx, aa.ny, aa.nz};
    const Vec3 v = to_vector(BlochPoint::make(uniform(rng, 0, kPi), uniform(rng, 0, 2 * kPi)));
    const double c = std::cos(aa.angle), s = std::sin(aa.angle);
    const double dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
    const Vec3 cross{n[1] * v[2] - n[2] * v[1], n[2] * v[0] - n[0] * v[2], n[0] * v[1] - n[1] * v[0]};
    Vec3 expected;
    for (int j = 0; j < 3; ++j) expected[j] = v[j] * c + cross[j] * s + n[j] * dot * (1 - c);
    const Vec3 got = rotate(rotation_matrix(q), v);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(got[j], expected[j], 1e-12);
  }
}

TEST(AxisAngle, HtOrbitIsARingAboutTheAxis) {
  const Quaternion ht = compose(kH, kT);
  const AxisAngle aa = axis_angle(ht);
  const Vec3 n{aa.nx, aa.ny, aa.nz};
  const Vec3 v0 = to_vector(BlochPoint::zero());
  const double d0 = n[0] * v0[0] + n[1] * v0[1] + n[2] * v0[2];
  for (std::uint64_t k = 1; k <= 100; ++k) {
    const Vec3 v = to_vector(apply_to_bloch(power(ht, k), BlochPoint::zero()));
    EXPECT_NEAR(n[0] * v[0] + n[1] * v[1] + n[2] * v[2], d0, 1e-9);
  }
}

TEST(Distance, Examples) {
  const Quaternion q{0.1, 0.7, -0.1, 0.7};
  EXPECT_EQ(quat_distance(q, q), 0.0);
  EXPECT_NEAR(quat_distance(Quaternion::identity(), kH), std::sqrt(2.0), 1e-15);
  const Quaternion thtth = parse_rendered("THTTH").unitary();
  EXPECT_NEAR(quat_distance(thtth, {-0.54981, 0.35852, 0.41549, 0.62972}), 0.19996, 1e-4);
}

TEST(HilbertSchmidt, IsRealTraceOfProduct) {
  Rng rng = make_stream(6, "test-hs");
  for (int i = 0; i < 100; ++i) {
    const Quaternion u = haar_random_su2(rng);
    const Quaternion v = haar_random_su2(rng);
    const Mat2 mu = matrix_of(u), mv = matrix_of(v);
    const Mat2 udag{std::conj(mu[0]), std::conj(mu[2]), std::conj(mu[1]), std::conj(mu[3])};
    const Mat2 p = mul(udag, mv);
    EXPECT_NEAR(hilbert_schmidt(u, v), (p[0] + p[3]).real(), 1e-12);
  }
}

// State vector oracle: U applied to cos(t/2)|0> + e^{ip} sin(t/2)|1>.
BlochPoint bloch_by_state_vector(const Quaternion& q, const BlochPoint& p) {
  const Mat2 m = matrix_of(q);
  const cd s0 = std::cos(p.theta / 2), s1 = std::polar(std::sin(p.theta / 2), p.phi);
  const cd r0 = m[0] * s0 + m[1] * s1, r1 = m[2] * s0 + m[3] * s1;
  const cd rel = r1 * std::conj(r0);
  return {2 * std::atan2(std::abs(r1), std::abs(r0)), std::abs(rel) < 1e-300 ? 0.0 : std::arg(rel)};
}

TEST(Bloch, MatchesStateVectorOracle) {
  Rng rng = make_stream(7, "test-bloch");
  for (int i = 0; i < 500; ++i) {
    const Quaternion q = haar_random_su2(rng);
    const BlochPoint p = BlochPoint::make(uniform(rng, 0.01, kPi - 0.01), uniform(rng, 0, 2 * kPi));
    const BlochPoint oracle = bloch_by_state_vector(q, p);
    const BlochPoint got = apply_to_bloch(q, p);
    EXPECT_NEAR(fidelity(got, BlochPoint::make(oracle.theta, oracle.phi)), 1.0, 1e-12);
  }
}

TEST(Bloch, Examples) {
  const BlochPoint p = BlochPoint::make(1.1, 2.3);
  const BlochPoint same = apply_to_bloch(Quaternion::identity(), p);
  EXPECT_NEAR(same.theta, p.theta, 1e-15);
  EXPECT_NEAR(same.phi, p.phi, 1e-15);
  EXPECT_NEAR(apply_to_bloch(gate_quaternion(Gate::ry(kPi)), BlochPoint::zero()).theta, kPi, 1e-12);
  const BlochPoint rotated = apply_to_bloch(gate_quaternion(Gate::rz(5.0)), p);
  EXPECT_NEAR(rotated.theta, p.theta, 1e-12);
  EXPECT_NEAR(rotated.phi, std::fmod(p.phi + 5.0, 2 * kPi), 1e-12);
}

TEST(Bloch, CompositionConsistency) {
  Rng rng = make_stream(8, "test-bloch-compose");
  for (int i = 0; i < 500; ++i) {
    const Quaternion g1 = haar_random_su2(rng), g2 = haar_random_su2(rng);
    const BlochPoint p = BlochPoint::make(uniform(rng, 0, kPi), uniform(rng, 0, 2 * kPi));
    const Vec3 a = to_vector(apply_to_bloch(compose(g2, g1), p));
    const Vec3 b = to_vector(apply_to_bloch(g2, apply_to_bloch(g1, p)));
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a[j], b[j], 1e-9);
  }
}

TEST(Bloch, PhiIsReducedModTwoPi) {
  const BlochPoint p = BlochPoint::make(1.0, -0.5);
  EXPECT_NEAR(p.phi, 2 * kPi - 0.5, 1e-15);
  EXPECT_LT(BlochPoint::make(1.0, 2 * kPi).phi, 2 * kPi);
}

TEST(Fidelity, Examples) {
  const BlochPoint p = BlochPoint::make(0.7, 4.0);
  EXPECT_NEAR(fidelity(p, p), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(BlochPoint::zero(), BlochPoint::one()), 0.0, 1e-15);
  EXPECT_NEAR(fidelity(BlochPoint::zero(), BlochPoint::make(kPi / 16, 1.0)), 0.99037, 1e-4);
  EXPECT_NEAR(fidelity(BlochPoint::zero(), BlochPoint::make(kPi / 16, 1.0)),
              std::pow(std::cos(kPi / 32), 2), 1e-15);
}

TEST(Haar, DeterministicAndUnitNorm) {
  Rng a = make_stream(9, "haar");
  Rng b = make_stream(9, "haar");
  const Quaternion qa = haar_random_su2(a);
  EXPECT_EQ(qa, haar_random_su2(b));
  EXPECT_LT(std::abs(qa.norm() - 1.0), 1e-12);
}

TEST(Haar, Moments) {
  Rng rng = make_stream(10, "haar-moments");
  constexpr int kN = 100000;
  std::array<double, 4> mean{};
  double mean_a2 = 0.0;
  for (int i = 0; i < kN; ++i) {
    const auto c = haar_random_su2(rng).components();
    for (int j = 0; j < 4; ++j) mean[j] += c[j] / kN;
    mean_a2 += c[0] * c[0] / kN;
  }
  for (double m : mean) EXPECT_LT(std::abs(m), 0.02);
  EXPECT_NEAR(mean_a2, 0.25, 0.01);
}

TEST(Renormalize, CorrectsOnlySmallDrift) {
  const Quaternion drifted{1.0 + 1e-10, 0, 0, 0};
  EXPECT_NEAR(renormalize(drifted).a, 1.0, 1e-15);
  const Quaternion far{2.0, 0, 0, 0};
  EXPECT_EQ(renormalize(far).a, 2.0);
}

}  // namespace
}  // namespace mdpsynth
