#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library code paths they are used to check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bsqz/types.hpp"

namespace bsqz::oracle {

/// Real root of a3 x^3 + a1 x + a0 = 0 with a3, a1 > 0 (single real root) by
/// the hyperbolic form of Cardano's formula,
/// x = -2 sqrt(p/3) sinh(asinh(3q/(2p) sqrt(3/p)) / 3), p = a1/a3, q = a0/a3.
inline double cardano_depressed_root(double a3, double a1, double a0) {
  const long double p = static_cast<long double>(a1) / a3;
  const long double q = static_cast<long double>(a0) / a3;
  const long double s = std::sqrt(p / 3);
  return static_cast<double>(-2 * s * std::sinh(std::asinh(3 * q / (2 * p) / s) / 3));
}

/// Coefficients c[0..n] of det(sI - M) = s^n + c[1] s^{n-1} + ... + c[n] by
/// the Faddeev-LeVerrier recursion.
inline std::vector<long double> characteristic_polynomial(const Mat6& M) {
  using LMat = Eigen::Matrix<long double, kDim, kDim>;
  const LMat A = M.cast<long double>();
  std::vector<long double> c(kDim + 1, 0.0L);
  c[0] = 1.0L;
  LMat Mk = LMat::Zero();
  for (int k = 1; k <= kDim; ++k) {
    Mk = A * Mk + c[k - 1] * LMat::Identity();
    c[k] = -(A * Mk).trace() / k;
  }
  return c;
}

/// Routh-Hurwitz: all roots of the monic polynomial have negative real part
/// iff every leading principal minor of the Hurwitz matrix is positive.
inline bool hurwitz_stable(const std::vector<long double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> H(n, n);
  H.setZero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int k = 2 * (j + 1) - (i + 1);
      if (k >= 0 && k <= n) H(i, j) = c[k];
    }
  }
  for (int m = 1; m <= n; ++m) {
    if (!(H.topLeftCorner(m, m).determinant() > 0)) return false;
  }
  return true;
}

struct LangevinCoefficients {
  double kappa_1, gamma_b, gamma_m, Delta_1, Delta_b, omega_m_eff, G_b, G_c_eff;
};

/// Drift matrix re-derived from the mode-operator Langevin equations
///   da1/dt = -(k/2 + i D1) a1 + i Gb b + i Gc' (c + c^dag)
///   db/dt  = -(gb/2 + i Db) b + i Gb a1
///   dc/dt  = -(gm/2 + i w') c + i Gc' (a1 + a1^dag)
/// (plus their adjoints) by the change of basis to X = (o + o^dag)/sqrt2,
/// P = i (o^dag - o)/sqrt2.
inline Mat6 drift_from_langevin(const LangevinCoefficients& q) {
  using C = std::complex<double>;
  using CMat = Eigen::Matrix<C, kDim, kDim>;
  const C I(0.0, 1.0);
  // operator order: a, a^dag, b, b^dag, c, c^dag
  CMat L = CMat::Zero();
  L(0, 0) = -(q.kappa_1 / 2 + I * q.Delta_1);
  L(0, 2) = I * q.G_b;
  L(0, 4) = I * q.G_c_eff;
  L(0, 5) = I * q.G_c_eff;
  L(2, 2) = -(q.gamma_b / 2 + I * q.Delta_b);
  L(2, 0) = I * q.G_b;
  L(4, 4) = -(q.gamma_m / 2 + I * q.omega_m_eff);
  L(4, 0) = I * q.G_c_eff;
  L(4, 1) = I * q.G_c_eff;
  for (int m = 0; m < 3; ++m) {  // adjoint rows
    for (int j = 0; j < kDim; ++j) {
      const int jj = (j % 2 == 0) ? j + 1 : j - 1;
      L(2 * m + 1, jj) = std::conj(L(2 * m, j));
    }
  }
  CMat T = CMat::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < 3; ++m) {
    T(2 * m, 2 * m) = s;
    T(2 * m, 2 * m + 1) = s;
    T(2 * m + 1, 2 * m) = -I * s;
    T(2 * m + 1, 2 * m + 1) = I * s;
  }
  const CMat Mq = T * L * T.inverse();
  return Mq.real();
}

/// Random real matrix shifted so that its spectral abscissa equals -margin.
inline Mat6 random_stable_matrix(std::mt19937_64& rng, double margin) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat6 M;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) M(i, j) = normal(rng);
  Eigen::EigenSolver<Mat6> es(M, false);
  const double abscissa = es.eigenvalues().real().maxCoeff();
  return M - (abscissa + margin) * Mat6::Identity();
}

inline Mat6 random_positive_diagonal(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec6 d;
  for (int i = 0; i < kDim; ++i) d(i) = u(rng);
  return d.asDiagonal();
}

}  // namespace bsqz::oracle
