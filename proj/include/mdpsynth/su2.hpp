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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "mdpsynth/error.hpp"
#include "mdpsynth/random.hpp"

namespace mdpsynth {

/// Unit quaternion (a, b, c, d) identified with the SU(2) matrix
///
///     [ a + ib    c + id ]
///     [ -c + id   a - ib ]
///
/// Equivalently U = a*1 + i(b*Z + c*Y + d*X) with Pauli matrices X, Y, Z.
/// The sign is significant: q and -q are different elements (H*H = -1).
struct Quaternion {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  static constexpr Quaternion identity() { return {}; }

  double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

  std::array<double, 4> components() const { return {a, b, c, d}; }

  constexpr Quaternion operator-() const { return {-a, -b, -c, -d}; }

  friend constexpr bool operator==(const Quaternion&,
                                   const Quaternion&) = default;
};

inline constexpr double kNormDriftTolerance = 1e-12;
inline constexpr double kMaxCorrectedDrift = 1e-8;

/// Corrects round-off drift away from unit norm once it exceeds
/// kNormDriftTolerance. Inputs that are visibly off the sphere (drift above
/// kMaxCorrectedDrift) pass through untouched.
inline Quaternion renormalize(Quaternion q) {
  const double n = q.norm();
  const double drift = std::abs(n - 1.0);
  if (drift <= kNormDriftTolerance || drift > kMaxCorrectedDrift) return q;
  return {q.a / n, q.b / n, q.c / n, q.d / n};
}

inline std::string to_string(const Quaternion& q) {
  std::ostringstream out;
  out.precision(10);
  out << "(" << q.a << ", " << q.b << ", " << q.c << ", " << q.d << ")";
  return out.str();
}

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

/// Single-qubit gate label. All gates are the unit-determinant
/// representatives: T = RZ(pi/4), S = T^2, H = RY(pi/2) RZ(pi).
struct Gate {
  enum class Kind : std::uint8_t { I, H, S, T, RZ, RY };

  Kind kind = Kind::I;
  double angle = 0.0;  // radians; only meaningful for RZ / RY

  static constexpr Gate i() { return {Kind::I, 0.0}; }
  static constexpr Gate h() { return {Kind::H, 0.0}; }
  static constexpr Gate s() { return {Kind::S, 0.0}; }
  static constexpr Gate t() { return {Kind::T, 0.0}; }
  static constexpr Gate rz(double beta) { return {Kind::RZ, beta}; }
  static constexpr Gate ry(double gamma) { return {Kind::RY, gamma}; }

  bool is_identity() const { return kind == Kind::I; }

  /// Single-character symbol for I/H/S/T, "RZ(x)"/"RY(x)" otherwise.
  std::string label() const {
    switch (kind) {
      case Kind::I: return "I";
      case Kind::H: return "H";
      case Kind::S: return "S";
      case Kind::T: return "T";
      case Kind::RZ:
      case Kind::RY: {
        std::ostringstream out;
        out.precision(6);
        out << (kind == Kind::RZ ? "RZ(" : "RY(") << angle << ")";
        return out.str();
      }
    }
    return "?";
  }

  friend constexpr bool operator==(const Gate&, const Gate&) = default;
};

inline Quaternion rz_quaternion(double beta) {
  return {std::cos(beta / 2), -std::sin(beta / 2), 0.0, 0.0};
}

inline Quaternion ry_quaternion(double gamma) {
  return {std::cos(gamma / 2), 0.0, -std::sin(gamma / 2), 0.0};
}

inline Quaternion gate_quaternion(const Gate& g) {
  using std::numbers::pi;
  using std::numbers::sqrt2;
  switch (g.kind) {
    case Gate::Kind::I: return Quaternion::identity();
    case Gate::Kind::H: return {0.0, -1.0 / sqrt2, 0.0, -1.0 / sqrt2};
    case Gate::Kind::S: return rz_quaternion(pi / 2);
    case Gate::Kind::T: return rz_quaternion(pi / 4);
    case Gate::Kind::RZ:
    case Gate::Kind::RY:
      if (!std::isfinite(g.angle)) {
        throw InvalidArgument("gate_quaternion: non-finite rotation angle");
      }
      return g.kind == Gate::Kind::RZ ? rz_quaternion(g.angle)
                                      : ry_quaternion(g.angle);
  }
  throw InvalidArgument("gate_quaternion: unknown gate kind");
}

/// Quaternion of the matrix product G*U (U is applied first).
inline Quaternion compose(const Quaternion& g, const Quaternion& u) {
  return renormalize({
      g.a * u.a - g.b * u.b - g.c * u.c - g.d * u.d,
      g.a * u.b + g.b * u.a - g.d * u.c + g.c * u.d,
      g.a * u.c - g.b * u.d + g.c * u.a + g.d * u.b,
      g.a * u.d + g.b * u.c + g.d * u.a - g.c * u.b,
  });
}

/// Closed-form left action of T: an orthogonal linear map of R^4,
/// applied without renormalization.
inline Quaternion apply_T(const Quaternion& q) {
  static const double cs = std::cos(std::numbers::pi / 8);
  static const double sn = std::sin(std::numbers::pi / 8);
  return {q.a * cs + q.b * sn, q.b * cs - q.a * sn, q.c * cs + q.d * sn,
          q.d * cs - q.c * sn};
}

/// Closed-form left action of H: an orthogonal linear map of R^4,
/// applied without renormalization.
inline Quaternion apply_H(const Quaternion& q) {
  constexpr double r = 1.0 / std::numbers::sqrt2;
  return {(q.b + q.d) * r, (q.c - q.a) * r, (q.d - q.b) * r, -(q.a + q.c) * r};
}

/// q^n by repeated squaring, renormalizing after every multiply.
inline Quaternion power(Quaternion q, std::uint64_t n) {
  Quaternion result = Quaternion::identity();
  while (n != 0) {
    if (n & 1U) result = compose(result, q);
    n >>= 1U;
    if (n != 0) q = compose(q, q);
  }
  return result;
}

inline double quat_distance(const Quaternion& p, const Quaternion& q) {
  const double da = p.a - q.a, db = p.b - q.b, dc = p.c - q.c,
               dd = p.d - q.d;
  return std::sqrt(da * da + db * db + dc * dc + dd * dd);
}

/// Re tr(U^dagger V).
inline double hilbert_schmidt(const Quaternion& u, const Quaternion& v) {
  return 2.0 * (u.a * v.a + u.b * v.b + u.c * v.c + u.d * v.d);
}

// ---------------------------------------------------------------------------
// Decompositions
// ---------------------------------------------------------------------------

struct ZyzAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// U = RZ(alpha) RY(beta) RZ(gamma), beta in [0, pi].
///
/// The half-sum (alpha + gamma)/2 is atan2(-b, a) and the half-difference
/// (alpha - gamma)/2 is atan2(d, -c). For beta = 0 the split is fixed as
/// alpha = gamma = delta/2 where q = RZ(delta); for beta = pi, gamma = 0.
inline ZyzAngles zyz_decompose(const Quaternion& q) {
  constexpr double kDegenerate = 1e-12;
  const double diag = std::hypot(q.a, q.b);
  const double off = std::hypot(q.c, q.d);
  ZyzAngles out;
  out.beta = 2.0 * std::atan2(off, diag);
  if (off < kDegenerate) {
    const double delta = 2.0 * std::atan2(-q.b, q.a);
    out.alpha = out.gamma = delta / 2;
    out.beta = 0.0;
  } else if (diag < kDegenerate) {
    out.alpha = 2.0 * std::atan2(q.d, -q.c);
    out.gamma = 0.0;
    out.beta = std::numbers::pi;
  } else {
    const double sum = std::atan2(-q.b, q.a);
    const double diff = std::atan2(q.d, -q.c);
    out.alpha = sum + diff;
    out.gamma = sum - diff;
  }
  return out;
}

inline Quaternion zyz_compose(const ZyzAngles& z) {
  return compose(rz_quaternion(z.alpha),
                 compose(ry_quaternion(z.beta), rz_quaternion(z.gamma)));
}

/// Bloch-sphere rotation described by q: rotation by `angle` about the unit
/// axis (nx, ny, nz). With U = a + i(b Z + c Y + d X) = cos(angle/2) -
/// i sin(angle/2) n.sigma, the axis is -(d, c, b) / |(b, c, d)|.
struct AxisAngle {
  double nx = 0.0;
  double ny = 0.0;
  double nz = 1.0;
  double angle = 0.0;
};

inline AxisAngle axis_angle(const Quaternion& q) {
  const double v = std::sqrt(q.b * q.b + q.c * q.c + q.d * q.d);
  if (v < 1e-12) {
    throw DegenerateAxis("axis_angle: rotation axis undefined for +/-identity");
  }
  return {-q.d / v, -q.c / v, -q.b / v,
          2.0 * std::acos(std::clamp(q.a, -1.0, 1.0))};
}

// ---------------------------------------------------------------------------
// Bloch sphere
// ---------------------------------------------------------------------------

/// Pure state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
struct BlochPoint {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)

  static BlochPoint make(double theta, double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (phi < 0.0 || phi >= two_pi) phi = std::fmod(phi, two_pi);
    if (phi < 0.0) phi += two_pi;
    if (phi >= two_pi) phi = 0.0;
    return {std::clamp(theta, 0.0, std::numbers::pi), phi};
  }

  static BlochPoint zero() { return {0.0, 0.0}; }
  static BlochPoint one() { return {std::numbers::pi, 0.0}; }
};

using Vec3 = std::array<double, 3>;

inline Vec3 to_vector(const BlochPoint& p) {
  const double s = std::sin(p.theta);
  return {s * std::cos(p.phi), s * std::sin(p.phi), std::cos(p.theta)};
}

/// At the poles the azimuth is undefined and reported as 0.
inline BlochPoint from_vector(const Vec3& v) {
  const double rho = std::sqrt(v[0] * v[0] + v[1] * v[1]);
  const double theta = std::atan2(rho, v[2]);
  const double phi = rho == 0.0 ? 0.0 : std::atan2(v[1], v[0]);
  return BlochPoint::make(theta, phi);
}

/// SO(3) image of q acting on Bloch vectors, row-major.
using Rotation3 = std::array<double, 9>;

inline Rotation3 rotation_matrix(const Quaternion& q) {
  // Standard (w, x, y, z) rotation quaternion for U = w - i(x X + y Y + z Z).
  const double w = q.a, x = -q.d, y = -q.c, z = -q.b;
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
          2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

inline Vec3 rotate(const Rotation3& r, const Vec3& v) {
  return {r[0] * v[0] + r[1] * v[1] + r[2] * v[2],
          r[3] * v[0] + r[4] * v[1] + r[5] * v[2],
          r[6] * v[0] + r[7] * v[1] + r[8] * v[2]};
}

/// Bloch angles of U|psi(theta, phi)>, global phase discarded.
inline BlochPoint apply_to_bloch(const Quaternion& q, const BlochPoint& p) {
  return from_vector(rotate(rotation_matrix(q), to_vector(p)));
}

/// |<psi1|psi2>|^2 = cos^2(angle/2) = (1 + v1.v2) / 2.
inline double fidelity(const BlochPoint& p1, const BlochPoint& p2) {
  const Vec3 u = to_vector(p1), v = to_vector(p2);
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return std::clamp(0.5 * (1.0 + dot), 0.0, 1.0);
}

/// Haar-uniform SU(2) element: a uniform point on the unit 3-sphere.
inline Quaternion haar_random_su2(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Quaternion q{normal(rng), normal(rng), normal(rng), normal(rng)};
    const double n = q.norm();
    if (n < 1e-9) continue;
    return {q.a / n, q.b / n, q.c / n, q.d / n};
  }
}

}  // namespace mdpsynth
