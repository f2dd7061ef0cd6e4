/**
 * @file su3_algebra.hpp
 * @brief Weight basis and generator matrices of SU(3) irreps (p,q).
 *
 * States |(p,q), W, w, y> are labelled by the isospin length W, the W_z
 * eigenvalue w and the hypercharge y. The raising/lowering operators W±, V±
 * carry non-negative matrix elements; U± follow from the action formula
 * obtained from U+ = [W-, V+].
 *
 * Computational single-particle order is (|0>,|1>,|2>) = (|e>,|g>,|f>).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "su3engine/types.hpp"

namespace su3engine {

/// Rational quantum number stored exactly as an integer number of sixths.
class QuantumNumber {
 public:
  constexpr QuantumNumber() = default;

  static constexpr QuantumNumber from_sixths(int sixths) {
    QuantumNumber q;
    q.sixths_ = sixths;
    return q;
  }

  /// num/den with den dividing 6.
  static QuantumNumber ratio(int num, int den) {
    if (den <= 0 || 6 % den != 0) throw InvalidInput("QuantumNumber: denominator must divide 6");
    return from_sixths(num * (6 / den));
  }

  constexpr int sixths() const { return sixths_; }
  constexpr double value() const { return sixths_ / 6.0; }

  constexpr QuantumNumber operator+(QuantumNumber o) const { return from_sixths(sixths_ + o.sixths_); }
  constexpr QuantumNumber operator-(QuantumNumber o) const { return from_sixths(sixths_ - o.sixths_); }
  constexpr QuantumNumber operator-() const { return from_sixths(-sixths_); }

  constexpr auto operator<=>(const QuantumNumber&) const = default;

  std::string to_string() const {
    const int g = std::gcd(sixths_ == 0 ? 6 : std::abs(sixths_), 6);
    const int num = sixths_ / g;
    const int den = 6 / g;
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  int sixths_ = 0;
};

inline constexpr QuantumNumber kHalf = QuantumNumber::from_sixths(3);
inline constexpr QuantumNumber kOne = QuantumNumber::from_sixths(6);

/// Basis label (W, w, y) inside one irrep.
struct WeightState {
  QuantumNumber W;
  QuantumNumber w;
  QuantumNumber y;

  constexpr auto operator<=>(const WeightState&) const = default;

  /// Same (w, y) weight, irrespective of W.
  constexpr bool same_weight(const WeightState& o) const { return w == o.w && y == o.y; }

  std::string to_string() const {
    return "(W=" + W.to_string() + ", w=" + w.to_string() + ", y=" + y.to_string() + ")";
  }
};

/// SU(3) irrep label (p, q): p columns of length one, q columns of length two.
struct IrrepLabel {
  int p = 0;
  int q = 0;

  constexpr auto operator<=>(const IrrepLabel&) const = default;

  constexpr bool valid() const { return p >= 0 && q >= 0; }

  /// Whether (p,q) occurs in the n-fold tensor power of the defining representation.
  constexpr bool occurs_for(int n) const {
    return valid() && n >= p + 2 * q && (n - p - 2 * q) % 3 == 0;
  }

  constexpr std::uint64_t dimension() const {
    return static_cast<std::uint64_t>(p + 1) * static_cast<std::uint64_t>(q + 1) *
           static_cast<std::uint64_t>(p + q + 2) / 2;
  }

  std::string to_string() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }
};

/// The eight collective generators, expressed in some common basis.
struct Generators {
  CMatrix Wz, Y;
  CMatrix Wp, Wm;
  CMatrix Up, Um;
  CMatrix Vp, Vm;

  Eigen::Index dim() const { return Wz.rows(); }
};

/// H = w_l W_z - (w_c + w_h)/2 Y, with w_l = w_h - w_c.
inline CMatrix free_hamiltonian(const Generators& g, double omega_c, double omega_h) {
  return (omega_h - omega_c) * g.Wz - 0.5 * (omega_c + omega_h) * g.Y;
}

/// W^2 = (W+W- + W-W+)/2 + Wz^2.
inline CMatrix isospin_squared(const Generators& g) {
  return 0.5 * (g.Wp * g.Wm + g.Wm * g.Wp) + g.Wz * g.Wz;
}

/// Quadratic Casimir, sum of the squares of the eight Hermitian generators.
inline CMatrix quadratic_casimir(const Generators& g) {
  return isospin_squared(g) + 0.5 * (g.Up * g.Um + g.Um * g.Up) + 0.5 * (g.Vp * g.Vm + g.Vm * g.Vp) +
         0.75 * g.Y * g.Y;
}

/// Casimir eigenvalue (p^2 + q^2 + pq + 3p + 3q)/3 of the irrep.
inline double casimir_eigenvalue(IrrepLabel label) {
  const double p = label.p, q = label.q;
  return (p * p + q * q + p * q + 3.0 * p + 3.0 * q) / 3.0;
}

struct SingleParticleGenerators {
  Generators gen;
  /// h = w_l |e><e| + w_h |f><f|, i.e. diag(w_l, 0, w_h) in computational order.
  CMatrix h;
};

/// Defining-representation generators on C^3 in the order (|0>,|1>,|2>) = (|e>,|g>,|f>).
inline SingleParticleGenerators single_particle_generators(double omega_c, double omega_h) {
  SingleParticleGenerators s;
  auto& g = s.gen;
  g.Wz = CMatrix::Zero(3, 3);
  g.Wz(0, 0) = 0.5;
  g.Wz(1, 1) = -0.5;
  g.Y = CMatrix::Zero(3, 3);
  g.Y(0, 0) = 1.0 / 3.0;
  g.Y(1, 1) = 1.0 / 3.0;
  g.Y(2, 2) = -2.0 / 3.0;
  g.Wp = CMatrix::Zero(3, 3);
  g.Wp(0, 1) = 1.0;
  g.Up = CMatrix::Zero(3, 3);
  g.Up(1, 2) = 1.0;
  g.Vp = CMatrix::Zero(3, 3);
  g.Vp(0, 2) = 1.0;
  g.Wm = g.Wp.adjoint();
  g.Um = g.Up.adjoint();
  g.Vm = g.Vp.adjoint();
  s.h = CMatrix::Zero(3, 3);
  s.h(0, 0) = omega_h - omega_c;
  s.h(2, 2) = omega_h;
  return s;
}

/// Highest weight ((p+q)/2, (p-q)/3) as (w, y).
inline std::pair<QuantumNumber, QuantumNumber> highest_weight(IrrepLabel label) {
  if (!label.valid()) throw InvalidInput("highest_weight: invalid label " + label.to_string());
  return {QuantumNumber::ratio(label.p + label.q, 2), QuantumNumber::ratio(label.p - label.q, 3)};
}

/// Basis order: y descending, then w ascending, then W descending.
inline bool basis_order(const WeightState& a, const WeightState& b) {
  if (a.y != b.y) return a.y > b.y;
  if (a.w != b.w) return a.w < b.w;
  return a.W > b.W;
}

/**
 * Weight basis of (p,q) from its isospin multiplets: for a = 0..q and
 * b = 0..p there is one multiplet with W = (a+b)/2 and y = b - a + 2(q-p)/3.
 */
inline std::vector<WeightState> enumerate_basis(IrrepLabel label) {
  if (!label.valid()) throw InvalidInput("enumerate_basis: invalid label " + label.to_string());
  std::vector<WeightState> states;
  states.reserve(label.dimension());
  for (int a = 0; a <= label.q; ++a) {
    for (int b = 0; b <= label.p; ++b) {
      const QuantumNumber W = QuantumNumber::ratio(a + b, 2);
      const QuantumNumber y = QuantumNumber::ratio(3 * (b - a) + 2 * (label.q - label.p), 3);
      for (QuantumNumber w = -W; w <= W; w = w + kOne) states.push_back({W, w, y});
    }
  }
  std::sort(states.begin(), states.end(), basis_order);
  if (states.size() != label.dimension()) {
    throw ConsistencyError("enumerate_basis: multiplet count does not match dimension for " +
                           label.to_string());
  }
  return states;
}

struct LadderCoefficients {
  double A = 0.0;
  double B = 0.0;
};

namespace detail {

inline constexpr double kSqrtClip = 1e-12;
inline constexpr double kSqrtHardError = 1e-9;

inline double checked_sqrt(double arg, const char* which, IrrepLabel label, const WeightState& s) {
  if (arg < -kSqrtHardError) {
    throw ConsistencyError(std::string("ladder coefficient ") + which + " has negative argument " +
                           std::to_string(arg) + " at " + s.to_string() + " in " + label.to_string());
  }
  return arg < kSqrtClip ? 0.0 : std::sqrt(arg);
}

inline double ladder_a_squared(IrrepLabel l, double W, double w, double y) {
  const double p = l.p, q = l.q;
  return (W + w + 1.0) * (W + (p - q) / 3.0 + y / 2.0 + 1.0) * ((p + 2.0 * q) / 3.0 + W + y / 2.0 + 2.0) *
         ((2.0 * p + q) / 3.0 - W - y / 2.0) / (2.0 * (W + 1.0) * (2.0 * W + 1.0));
}

inline double ladder_b_squared(IrrepLabel l, double W, double w, double y) {
  if (W == 0.0) return 0.0;  // the (W - w) factor vanishes
  const double p = l.p, q = l.q;
  return (W - w) * ((q - p) / 3.0 + W - y / 2.0) * ((p + 2.0 * q) / 3.0 - W + y / 2.0 + 1.0) *
         ((2.0 * p + q) / 3.0 + W - y / 2.0 + 1.0) / (2.0 * W * (2.0 * W + 1.0));
}

}  // namespace detail

/// Coefficients of V+|W,w,y> = A|W+1/2,w+1/2,y+1> + B|W-1/2,w+1/2,y+1>.
inline LadderCoefficients ladder_coefficients(IrrepLabel label, const WeightState& s) {
  if (!label.valid()) throw InvalidInput("ladder_coefficients: invalid label " + label.to_string());
  if (s.W.sixths() < 0 || std::abs(s.w.sixths()) > s.W.sixths() || (s.W - s.w).sixths() % 6 != 0) {
    throw InvalidInput("ladder_coefficients: inconsistent state " + s.to_string());
  }
  const double W = s.W.value(), w = s.w.value(), y = s.y.value();
  return {detail::checked_sqrt(detail::ladder_a_squared(label, W, w, y), "A", label, s),
          detail::checked_sqrt(detail::ladder_b_squared(label, W, w, y), "B", label, s)};
}

/// Generator matrices and free Hamiltonian of one irrep.
struct IrrepOperators {
  IrrepLabel label;
  std::vector<WeightState> basis;
  Generators gen;
  CMatrix H;
  double omega_c = 0.0;
  double omega_h = 0.0;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis.size()); }

  /// Index of a basis state, or -1 when absent.
  Eigen::Index index_of(const WeightState& s) const {
    auto it = std::lower_bound(basis.begin(), basis.end(), s, basis_order);
    if (it == basis.end() || *it != s) return -1;
    return static_cast<Eigen::Index>(it - basis.begin());
  }
};

/**
 * Builds Wz, Y, W±, U±, V± and H for irrep (p,q).
 *
 * W± act within isospin multiplets, V+ uses the A/B coefficients and U+ the
 * combination
 *   U+|W,w,y> = (A_{W,w,y} sqrt((W+w+1)(W-w+1)) - A_{W,w-1,y} sqrt((W+w)(W-w+1))) |W+1/2,w-1/2,y+1>
 *             + (B_{W,w,y} sqrt((W+w)(W-w))     - B_{W,w-1,y} sqrt((W+w)(W-w+1))) |W-1/2,w-1/2,y+1>.
 * Lowering operators are the adjoints of the raising ones.
 */
inline IrrepOperators irrep_matrices(IrrepLabel label, double omega_c, double omega_h) {
  IrrepOperators ops;
  ops.label = label;
  ops.basis = enumerate_basis(label);
  ops.omega_c = omega_c;
  ops.omega_h = omega_h;
  const Eigen::Index d = ops.dim();
  auto& g = ops.gen;
  g.Wz = CMatrix::Zero(d, d);
  g.Y = CMatrix::Zero(d, d);
  g.Wp = CMatrix::Zero(d, d);
  g.Vp = CMatrix::Zero(d, d);
  g.Up = CMatrix::Zero(d, d);

  // Places `value` at <target|X|source>; a non-zero amplitude must land inside the irrep.
  auto put = [&](CMatrix& m, const WeightState& target, Eigen::Index source, double value, const char* name) {
    const Eigen::Index row = ops.index_of(target);
    if (row < 0) {
      if (std::abs(value) > detail::kSqrtHardError) {
        throw ConsistencyError(std::string(name) + " leaves irrep " + label.to_string() + " from " +
                               ops.basis[source].to_string());
      }
      return;
    }
    m(row, source) += value;
  };

  for (Eigen::Index i = 0; i < d; ++i) {
    const WeightState& s = ops.basis[i];
    const double W = s.W.value(), w = s.w.value();
    g.Wz(i, i) = w;
    g.Y(i, i) = s.y.value();

    const WeightState up_w{s.W, s.w + kOne, s.y};
    put(g.Wp, up_w, i, std::sqrt(std::max(0.0, (W - w) * (W + w + 1.0))), "W+");

    const auto c = ladder_coefficients(label, s);
    put(g.Vp, {s.W + kHalf, s.w + kHalf, s.y + kOne}, i, c.A, "V+");
    if (s.W.sixths() > 0) put(g.Vp, {s.W - kHalf, s.w + kHalf, s.y + kOne}, i, c.B, "V+");

    // U+ through the action formula; the w-1 terms vanish when w = -W.
    double u_plus = c.A * std::sqrt((W + w + 1.0) * (W - w + 1.0));
    double u_minus = c.B * std::sqrt(std::max(0.0, (W + w) * (W - w)));
    if (s.w > -s.W) {
      const auto c_lower = ladder_coefficients(label, {s.W, s.w - kOne, s.y});
      const double f = std::sqrt((W + w) * (W - w + 1.0));
      u_plus -= c_lower.A * f;
      u_minus -= c_lower.B * f;
    }
    put(g.Up, {s.W + kHalf, s.w - kHalf, s.y + kOne}, i, u_plus, "U+");
    if (s.W.sixths() > 0) put(g.Up, {s.W - kHalf, s.w - kHalf, s.y + kOne}, i, u_minus, "U+");
  }
  g.Wm = g.Wp.adjoint();
  g.Vm = g.Vp.adjoint();
  g.Um = g.Up.adjoint();
  ops.H = free_hamiltonian(g, omega_c, omega_h);
  return ops;
}

/// One row of a weight-diagram dump.
struct WeightDiagramRow {
  WeightState state;
  double energy = 0.0;
};

/// States of (p,q) with their energies w_l w - (w_c + w_h) y / 2.
inline std::vector<WeightDiagramRow> weight_diagram(IrrepLabel label, double omega_c, double omega_h) {
  std::vector<WeightDiagramRow> rows;
  for (const auto& s : enumerate_basis(label)) {
    rows.push_back({s, (omega_h - omega_c) * s.w.value() - 0.5 * (omega_c + omega_h) * s.y.value()});
  }
  return rows;
}

}  // namespace su3engine
