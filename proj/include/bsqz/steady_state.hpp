#pragma once

// Steady-state and transient covariance of the linearized Gaussian system,
// dV/dt = M V + V M^T + A.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bsqz/dynamics.hpp"
#include "bsqz/effective_model.hpp"
#include "bsqz/errors.hpp"
#include "bsqz/types.hpp"

namespace bsqz {

/// Required bound on ||M V + V M^T + A||_inf / ||A||_inf for a steady-state solve.
inline constexpr double kLyapunovResidualTolerance = 1e-10;

/// Symmetrized second moments V_kl = <D_k D_l + D_l D_k>/2 of the quadratures.
struct CovarianceMatrix {
  Mat6 matrix = Mat6::Zero();

  double operator()(Quadrature row, Quadrature col) const {
    return matrix(index(row), index(col));
  }
};

/// Standard symplectic form for three modes, blockdiag([[0, 1], [-1, 0]]).
inline Mat6 symplectic_form() {
  Mat6 omega = Mat6::Zero();
  for (int m = 0; m < 3; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

/// Smallest eigenvalue of the Hermitian matrix V + (i/2) Omega. A physical
/// covariance matrix has this non-negative (Heisenberg uncertainty).
inline double uncertainty_margin(const Mat6& V) {
  using CMat6 = Eigen::Matrix<std::complex<double>, kDim, kDim>;
  const CMat6 h = V.cast<std::complex<double>>() +
                  std::complex<double>(0.0, 0.5) * symplectic_form().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMat6> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eigenvalue iteration for the uncertainty check did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

/// Symmetric, positive definite and compatible with the uncertainty bound,
/// all up to `tol`.
inline bool is_physical(const CovarianceMatrix& cov, double tol = 1e-9) {
  const Mat6& V = cov.matrix;
  if (!V.allFinite()) return false;
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, V.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Mat6> solver(V, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success || solver.eigenvalues().minCoeff() <= 0.0) return false;
  return uncertainty_margin(V) >= -tol;
}

/// ||M V + V M^T + A||_inf / ||A||_inf, with the induced (max row sum) norm.
/// Falls back to the absolute residual when A vanishes.
inline double lyapunov_residual(const Mat6& M, const Mat6& A, const Mat6& V) {
  const Mat6 res = M * V + V * M.transpose() + A;
  const double num = res.cwiseAbs().rowwise().sum().maxCoeff();
  const double den = A.cwiseAbs().rowwise().sum().maxCoeff();
  return den > 0.0 ? num / den : num;
}

namespace detail {

inline void require_stable(const Mat6& M) {
  const StabilityReport s = check_stability(M);
  if (!s.stable) {
    throw StabilityError("drift matrix is not stable (spectral abscissa " +
                             std::to_string(s.spectral_abscissa) + "); no steady state exists",
                         s.spectral_abscissa);
  }
}

inline Mat6 symmetrized(const Mat6& V) { return 0.5 * (V + V.transpose()); }

}  // namespace detail

/// Steady-state covariance from M V + V M^T = -A.
///
/// The equation is vectorized into the 36x36 Kronecker-sum system
/// (I (x) M + M (x) I) vec(V) = -vec(A) and solved with a partially pivoted
/// LU factorization, followed by up to two rounds of iterative refinement.
/// Throws StabilityError for unstable M and NumericalFailure when the system
/// is singular or the residual bound cannot be met.
inline CovarianceMatrix solve_lyapunov(const Mat6& M, const Mat6& A) {
  if (!A.allFinite()) throw InvalidParameter("diffusion matrix must be finite");
  detail::require_stable(M);

  constexpr int n = kDim;
  using KronMat = Eigen::Matrix<double, n * n, n * n>;
  using KronVec = Eigen::Matrix<double, n * n, 1>;

  KronMat K = KronMat::Zero();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int row = i + n * j;
      for (int k = 0; k < n; ++k) {
        K(row, k + n * j) += M(i, k);  // (M V)_ij
        K(row, i + n * k) += M(j, k);  // (V M^T)_ij
      }
    }
  }

  Eigen::PartialPivLU<KronMat> lu(K);
  if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
    throw NumericalFailure("Lyapunov system is numerically singular");
  }

  const KronVec rhs = -Eigen::Map<const KronVec>(A.data());
  KronVec x = lu.solve(rhs);
  for (int round = 0; round < 2; ++round) {
    const KronVec correction = lu.solve(rhs - K * x);
    x += correction;
  }

  CovarianceMatrix cov;
  cov.matrix = detail::symmetrized(Eigen::Map<const Mat6>(x.data()));
  if (!cov.matrix.allFinite()) throw NumericalFailure("Lyapunov solve produced non-finite values");
  const double residual = lyapunov_residual(M, A, cov.matrix);
  if (!(residual < kLyapunovResidualTolerance)) {
    throw NumericalFailure("Lyapunov residual " + std::to_string(residual) +
                           " exceeds tolerance");
  }
  return cov;
}

/// Same equation by Schur reduction (Bartels-Stewart with a complex Schur
/// form): M = U T U^*, then T Y + Y T^* = -U^* A U is solved by back
/// substitution and V = Re(U Y U^*).
inline CovarianceMatrix solve_lyapunov_schur(const Mat6& M, const Mat6& A) {
  if (!A.allFinite()) throw InvalidParameter("diffusion matrix must be finite");
  detail::require_stable(M);

  using CMat6 = Eigen::Matrix<std::complex<double>, kDim, kDim>;
  Eigen::ComplexSchur<Mat6> schur(M, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw NumericalFailure("Schur decomposition of the drift matrix did not converge");
  }
  const CMat6& T = schur.matrixT();
  const CMat6& U = schur.matrixU();
  const CMat6 F = U.adjoint() * A.cast<std::complex<double>>() * U;

  CMat6 Y = CMat6::Zero();
  for (int i = kDim - 1; i >= 0; --i) {
    for (int j = kDim - 1; j >= 0; --j) {
      std::complex<double> acc = -F(i, j);
      for (int k = i + 1; k < kDim; ++k) acc -= T(i, k) * Y(k, j);
      for (int k = j + 1; k < kDim; ++k) acc -= Y(i, k) * std::conj(T(j, k));
      const std::complex<double> denom = T(i, i) + std::conj(T(j, j));
      if (std::abs(denom) == 0.0) throw NumericalFailure("Schur Lyapunov solve is singular");
      Y(i, j) = acc / denom;
    }
  }

  CovarianceMatrix cov;
  cov.matrix = detail::symmetrized((U * Y * U.adjoint()).real());
  return cov;
}

/// Uncoupled initial state: optical and acoustic vacuum, mechanical mode at the
/// effective bath occupation.
inline CovarianceMatrix default_initial_covariance(const EffectiveParams& e) {
  Vec6 diag;
  diag << 0.5, 0.5, 0.5, 0.5, e.N_eff + 0.5, e.N_eff + 0.5;
  CovarianceMatrix cov;
  cov.matrix = diag.asDiagonal();
  return cov;
}

struct IntegrationOptions {
  /// Local error allowed per unit of simulated time, relative to
  /// max(1, |V_kl|).
  double tolerance = 1e-10;
  /// Smallest admissible step relative to max(1, |t|).
  double min_relative_step = 1e-13;
};

/// V(t_final) from dV/dt = M V + V M^T + A with adaptive Dormand-Prince 5(4)
/// steps. Only the 21 upper-triangular entries are propagated, so every
/// accepted state is exactly symmetric.
inline CovarianceMatrix integrate_covariance(const Mat6& M, const Mat6& A,
                                             const CovarianceMatrix& V0, double t_final,
                                             const IntegrationOptions& opts = {}) {
  constexpr int kPacked = kDim * (kDim + 1) / 2;
  using Packed = Eigen::Matrix<double, kPacked, 1>;

  if (!std::isfinite(t_final) || t_final < 0) throw InvalidParameter("t_final must be >= 0");
  if (!M.allFinite() || !A.allFinite() || !V0.matrix.allFinite()) {
    throw InvalidParameter("integration inputs must be finite");
  }
  const double asym = (V0.matrix - V0.matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, V0.matrix.cwiseAbs().maxCoeff())) {
    throw InvalidParameter("initial covariance must be symmetric");
  }
  if (t_final == 0.0) return V0;

  auto pack = [](const Mat6& V) {
    Packed y;
    int idx = 0;
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) y(idx++) = V(i, j);
    return y;
  };
  auto unpack = [](const Packed& y) {
    Mat6 V;
    int idx = 0;
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        V(i, j) = y(idx);
        V(j, i) = y(idx);
        ++idx;
      }
    return V;
  };
  const Mat6 Mt = M.transpose();
  auto rhs = [&](const Packed& y) {
    const Mat6 V = unpack(y);
    return pack(M * V + V * Mt + A);
  };

  // Dormand-Prince tableau; the system is autonomous so the nodes c_i are unused.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Packed y = pack(V0.matrix);
  Packed k1 = rhs(y);
  double t = 0.0;
  const double mnorm = std::max(1.0, M.cwiseAbs().rowwise().sum().maxCoeff());
  double h = std::min(t_final, 0.01 / mnorm);

  while (t < t_final) {
    if (t + h > t_final) h = t_final - t;
    if (h < opts.min_relative_step * std::max(1.0, std::abs(t))) {
      throw StiffnessError("covariance integration step size underflow at t = " +
                               std::to_string(t),
                           t);
    }
    const Packed k2 = rhs(y + h * (a21 * k1));
    const Packed k3 = rhs(y + h * (a31 * k1 + a32 * k2));
    const Packed k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Packed k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Packed k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Packed y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Packed k7 = rhs(y_new);
    const Packed err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (int i = 0; i < kPacked; ++i) {
      const double scale =
          opts.tolerance * h * std::max({1.0, std::abs(y(i)), std::abs(y_new(i))});
      err_norm = std::max(err_norm, std::abs(err(i)) / scale);
    }
    if (!std::isfinite(err_norm)) err_norm = 1e10;

    if (err_norm <= 1.0) {
      t = (t_final - t <= h) ? t_final : t + h;
      y = y_new;
      k1 = k7;  // first-same-as-last
    }
    const double factor =
        err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.25), 0.2, 5.0);
    h *= factor;
  }

  CovarianceMatrix out;
  out.matrix = unpack(y);
  return out;
}

}  // namespace bsqz
