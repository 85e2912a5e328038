#pragma once

// Linearized quadrature dynamics dD/dt = M D + noise in the basis
// (X_a1, P_a1, X_b, P_b, X_cs, P_cs), with X = (o + o^dag)/sqrt2 and
// P = i(o^dag - o)/sqrt2.

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "bsqz/effective_model.hpp"
#include "bsqz/errors.hpp"
#include "bsqz/types.hpp"

namespace bsqz {

/// Spectral abscissa at or above -kStabilityTolerance counts as unstable.
inline constexpr double kStabilityTolerance = 1e-12;

struct StabilityReport {
  bool stable = false;
  double spectral_abscissa = 0.0;
};

struct DriftModel {
  Mat6 drift;      ///< M
  Mat6 diffusion;  ///< A, diagonal
};

namespace detail {

inline void require_finite_inputs(const EffectiveParams& e, const SystemParams& p) {
  const double values[] = {e.r,       e.omega_m_eff, e.G_c_eff,   p.kappa_1,
                           p.gamma_b, p.gamma_m,     p.n_m,       p.G_b,
                           p.Delta_1, p.Delta_b};
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidParameter("drift model inputs must be finite");
  }
}

}  // namespace detail

/// Drift matrix of the three coupled modes. Both mechanical quadratures decay
/// at gamma_m/2; the Brillouin mode couples to the optical mode only through
/// +-G_b and the squeezed mechanical mode only through 2 G'_c at (P_a1, X_cs)
/// and (P_cs, X_a1).
inline Mat6 build_drift_matrix(const EffectiveParams& e, const SystemParams& p) {
  detail::require_finite_inputs(e, p);
  const double k = p.kappa_1 / 2.0;
  const double gb = p.gamma_b / 2.0;
  const double gm = p.gamma_m / 2.0;
  const double Gb = p.G_b;
  const double Gc2 = 2.0 * e.G_c_eff;
  const double D1 = p.Delta_1;
  const double Db = p.Delta_b;
  const double w = e.omega_m_eff;

  Mat6 M;
  // clang-format off
  M <<  -k,   D1,    0,  -Gb,    0,   0,
       -D1,   -k,   Gb,    0,  Gc2,   0,
         0,  -Gb,  -gb,   Db,    0,   0,
        Gb,    0,  -Db,  -gb,    0,   0,
         0,    0,    0,    0,  -gm,   w,
       Gc2,    0,    0,    0,   -w, -gm;
  // clang-format on
  return M;
}

/// Diagonal diffusion matrix. The squeezed-frame mechanical bath has
/// N_eff + 1/2 +- M_eff = e^{+-2r}(n_m + 1/2) on the X/P quadratures.
inline Mat6 build_noise_matrix(const EffectiveParams& e, const SystemParams& p) {
  detail::require_finite_inputs(e, p);
  if (p.n_m < 0) throw InvalidParameter("n_m must be >= 0");
  const double thermal = p.gamma_m * (2.0 * p.n_m + 1.0) / 2.0;
  Vec6 diag;
  diag << p.kappa_1 / 2.0, p.kappa_1 / 2.0, p.gamma_b / 2.0, p.gamma_b / 2.0,
      std::exp(2.0 * e.r) * thermal, std::exp(-2.0 * e.r) * thermal;
  return diag.asDiagonal();
}

inline DriftModel build_drift_model(const EffectiveParams& e, const SystemParams& p) {
  return {build_drift_matrix(e, p), build_noise_matrix(e, p)};
}

/// Eigenvalues of M (no symmetry assumed).
inline Eigen::Matrix<std::complex<double>, kDim, 1> drift_eigenvalues(const Mat6& M) {
  if (!M.allFinite()) throw InvalidParameter("drift matrix must be finite");
  Eigen::EigenSolver<Mat6> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eigenvalue iteration for the drift matrix did not converge");
  }
  return solver.eigenvalues();
}

inline StabilityReport check_stability(const Mat6& M) {
  const auto ev = drift_eigenvalues(M);
  StabilityReport report;
  report.spectral_abscissa = ev.real().maxCoeff();
  report.stable = report.spectral_abscissa < -kStabilityTolerance;
  return report;
}

}  // namespace bsqz
