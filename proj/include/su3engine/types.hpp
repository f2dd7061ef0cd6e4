/**
 * @file types.hpp
 * @brief Shared numeric types and error classes.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace su3engine {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using SparseCMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// Invalid argument to a library routine (bad label, shape mismatch, size guard).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Internal consistency failure (a representation-theory invariant was violated).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The steady state of a generator is not unique.
class DegenerateDynamicsError : public std::runtime_error {
 public:
  DegenerateDynamicsError(const std::string& what, std::size_t nullity)
      : std::runtime_error(what), nullity_(nullity) {}

  /// Dimension of the stationary subspace, or 0 when it was not computed.
  std::size_t nullity() const noexcept { return nullity_; }

 private:
  std::size_t nullity_;
};

/// Numerical procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column-stacking vectorization, vec(A)[i + j*d] = A(i, j).
inline CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

inline CMatrix unvec(const CVector& v, Eigen::Index dim) {
  if (v.size() != dim * dim) throw InvalidInput("unvec: size mismatch");
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

inline CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace su3engine
