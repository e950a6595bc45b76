// Copyright 2026 The qdpath Authors
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

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdpath/errors.hpp"
#include "qdpath/units.hpp"

/// @file liouville.hpp
/// Dense Liouville-space algebra: Lindblad generators, per-step propagators,
/// and the vectorization conventions every other module relies on.
///
/// Vectorization convention (fixed, column-major):
///   vec(X)[nu + N*mu] = X(nu, mu)
/// i.e. the ket index nu runs fastest.  Under this stacking,
///   vec(A X B) = (B^T kron A) vec(X),
/// which is how all superoperators below are assembled.  Any consistent
/// choice works; writing this one down is what prevents index bugs.

namespace qdpath {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Reduced state of the N-level system: N x N complex, Hermitian,
/// unit trace, positive semidefinite (the latter two within tolerances
/// that the propagation monitors rather than enforces).
using DensityMatrix = Matrix;

/// Time-dependent system Hamiltonian.  matrix_fn(t) returns an N x N
/// Hermitian matrix in meV; t is in ps.  The engine divides by hbar.
struct HamiltonianSpec {
  int dim = 0;
  std::function<Matrix(double)> matrix_fn;

  /// Convenience wrapper for a time-independent Hamiltonian.
  static HamiltonianSpec constant(const Matrix& h) {
    HamiltonianSpec spec;
    spec.dim = static_cast<int>(h.rows());
    spec.matrix_fn = [h](double) { return h; };
    return spec;
  }
};

/// One relaxation channel (A, gamma(t)) of the canonical trace-preserving
/// completely positive form.  The operator is dimensionless; the rate is in
/// ps^-1 and must be nonnegative whenever sampled.
struct LindbladChannel {
  Matrix op;
  std::function<double(double)> rate_fn;

  /// Convenience wrapper for a constant-rate channel.
  static LindbladChannel constant(const Matrix& a, double gamma) {
    LindbladChannel ch;
    ch.op = a;
    ch.rate_fn = [gamma](double) { return gamma; };
    return ch;
  }
};

/// Dense N^2 x N^2 linear map on vectorized density matrices.  Generators
/// carry units of ps^-1; propagators are dimensionless.
struct Superoperator {
  int dim = 0;
  Matrix m;

  static Superoperator identity(int n) {
    Superoperator s;
    s.dim = n;
    s.m = Matrix::Identity(n * n, n * n);
    return s;
  }

  static Superoperator zero(int n) {
    Superoperator s;
    s.dim = n;
    s.m = Matrix::Zero(n * n, n * n);
    return s;
  }
};

/// Column-major stacking: vec(X)[nu + N*mu] = X(nu, mu).
inline Vector vectorize(const Matrix& x) {
  const auto n2 = x.rows() * x.cols();
  return Eigen::Map<const Vector>(x.data(), n2);
}

/// Inverse of vectorize().
inline Matrix unvectorize(const Vector& v, int dim) {
  detail::require_config(v.size() == static_cast<Eigen::Index>(dim) * dim,
                         "unvectorize: vector length does not match dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

/// Max absolute deviation from Hermiticity, |X - X^dagger|_max.
inline double hermiticity_defect(const Matrix& x) {
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

/// Tr(rho) - 1 as a complex number; callers usually look at |.|.
inline Complex trace_deviation(const DensityMatrix& rho) {
  return rho.trace() - Complex(1.0, 0.0);
}

/// Smallest eigenvalue of the Hermitian part of rho.
inline double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

/// Throws ConfigError unless rho is Hermitian/unit-trace/PSD within tol.
inline void validate_density_matrix(const DensityMatrix& rho,
                                    double tol = 1e-9) {
  detail::require_config(rho.rows() == rho.cols(),
                         "density matrix must be square");
  detail::require_config(hermiticity_defect(rho) <= tol,
                         "density matrix is not Hermitian within tolerance");
  detail::require_config(std::abs(trace_deviation(rho)) <= tol,
                         "density matrix trace deviates from 1");
  detail::require_config(min_eigenvalue(rho) >= -tol,
                         "density matrix has a significant negative eigenvalue");
}

/// Generator of the local-in-time master equation at time t:
///   L(t)[X] = -(i/hbar)[H(t), X]
///             + sum_i gamma_i(t) (A_i X A_i^dag - 1/2 {A_i^dag A_i, X})
/// returned as a dense N^2 x N^2 matrix in ps^-1 acting on column-major
/// vectorized X.
inline Superoperator build_liouvillian(const HamiltonianSpec& h,
                                       const std::vector<LindbladChannel>& channels,
                                       double t) {
  const int n = h.dim;
  detail::require_config(n >= 1 && static_cast<bool>(h.matrix_fn),
                         "build_liouvillian: empty Hamiltonian spec");
  const Matrix ham = h.matrix_fn(t);
  detail::require_config(ham.rows() == n && ham.cols() == n,
                         "build_liouvillian: Hamiltonian dimension mismatch");
  detail::require_config(hermiticity_defect(ham) <= 1e-10 * (1.0 + ham.cwiseAbs().maxCoeff()),
                         "build_liouvillian: Hamiltonian not Hermitian at t");

  const Matrix id = Matrix::Identity(n, n);
  const Complex minus_i_over_hbar(0.0, -1.0 / hbar_meV_ps);

  // vec(H X) = (I kron H) vec(X), vec(X H) = (H^T kron I) vec(X).
  Matrix l = minus_i_over_hbar *
             (Eigen::kroneckerProduct(id, ham) -
              Eigen::kroneckerProduct(ham.transpose(), id));

  for (const auto& ch : channels) {
    detail::require_config(ch.op.rows() == n && ch.op.cols() == n,
                           "build_liouvillian: channel operator dimension mismatch");
    detail::require_config(static_cast<bool>(ch.rate_fn),
                           "build_liouvillian: channel has no rate function");
    const double gamma = ch.rate_fn(t);
    detail::require_config(gamma >= 0.0,
                           "build_liouvillian: negative relaxation rate at t=" +
                               std::to_string(t));
    if (gamma == 0.0) continue;
    const Matrix adag_a = ch.op.adjoint() * ch.op;
    // vec(A X A^dag) = (conj(A) kron A) vec(X).
    l += gamma * (Eigen::kroneckerProduct(ch.op.conjugate(), ch.op) -
                  0.5 * Eigen::kroneckerProduct(id, adag_a) -
                  0.5 * Eigen::kroneckerProduct(adag_a.transpose(), id));
  }

  Superoperator out;
  out.dim = n;
  out.m = std::move(l);
  return out;
}

/// Propagator over one step [t, t + dt]: the exact matrix exponential of the
/// generator sampled at the midpoint t + dt/2.  Midpoint sampling has O(dt^3)
/// local error, matching the O(dt^2) global splitting accuracy of the scheme;
/// the exponential itself (scaling-and-squaring Pade) is never a truncated
/// series, so trace preservation and complete positivity of the Lindblad
/// generator carry over to the discrete step at machine precision.
inline Superoperator build_step_propagator(const HamiltonianSpec& h,
                                           const std::vector<LindbladChannel>& channels,
                                           double t, double dt) {
  detail::require_config(dt > 0.0, "build_step_propagator: dt must be > 0");
  Superoperator l = build_liouvillian(h, channels, t + dt / 2.0);
  Superoperator out;
  out.dim = l.dim;
  out.m = (dt * l.m).exp();
  return out;
}

/// Applies a superoperator to a state and re-Hermitizes the result as
/// (X + X^dag)/2.  The size of the discarded anti-Hermitian part is reported
/// through *hermiticity_correction when non-null; it should stay at rounding
/// level (<= 1e-12) for physical propagators.
inline DensityMatrix apply(const Superoperator& s, const DensityMatrix& rho,
                           double* hermiticity_correction = nullptr) {
  detail::require_config(rho.rows() == s.dim && rho.cols() == s.dim,
                         "apply: state dimension does not match superoperator");
  const Matrix raw = unvectorize(s.m * vectorize(rho), s.dim);
  if (hermiticity_correction != nullptr) {
    *hermiticity_correction = hermiticity_defect(raw) / 2.0;
  }
  return (raw + raw.adjoint()) / 2.0;
}

/// Element M^{nu_in mu_in}_{nu_out mu_out} = <nu_out| M[|nu_in><mu_in|] |mu_out>:
/// a pure index lookup under the documented vectorization.
inline Complex propagator_element(const Superoperator& s, int nu_out, int mu_out,
                                  int nu_in, int mu_in) {
  const int n = s.dim;
  detail::require_config(nu_out >= 0 && nu_out < n && mu_out >= 0 && mu_out < n &&
                             nu_in >= 0 && nu_in < n && mu_in >= 0 && mu_in < n,
                         "propagator_element: index out of range");
  return s.m(nu_out + n * mu_out, nu_in + n * mu_in);
}

}  // namespace qdpath
