#pragma once

// Original-frame squeezing metrics from the squeezed-frame covariance, and the
// end-to-end single-point pipeline.

#include <cmath>
#include <limits>
#include <optional>

#include "bsqz/dynamics.hpp"
#include "bsqz/effective_model.hpp"
#include "bsqz/errors.hpp"
#include "bsqz/steady_state.hpp"

namespace bsqz {

/// Position variance of the mechanical ground state.
inline constexpr double kVacuumVariance = 0.5;

/// Metrics at one parameter point. When `stable` is false no steady state
/// exists and the three metric fields are NaN.
struct SqueezingReport {
  double variance = std::numeric_limits<double>::quiet_NaN();
  double variance_db = std::numeric_limits<double>::quiet_NaN();
  double n_eff = std::numeric_limits<double>::quiet_NaN();
  bool stable = false;
  double spectral_abscissa = 0.0;
};

/// <dX_c^2> = e^{-2r} V_55 in the original (unsqueezed) frame.
inline double position_variance(const CovarianceMatrix& V, double r) {
  return std::exp(-2.0 * r) * V(Quadrature::XCS, Quadrature::XCS);
}

/// Squeezing degree -10 log10(variance / 0.5). Positive means below vacuum.
inline double variance_db(double variance) {
  if (!(variance > 0.0)) throw DomainError("variance must be > 0 to express it in dB");
  return -10.0 * std::log10(variance / kVacuumVariance);
}

/// (e^{-2r} V_55 + e^{2r} V_66 - 1) / 2.
inline double effective_phonon_number(const CovarianceMatrix& V, double r) {
  return (std::exp(-2.0 * r) * V(Quadrature::XCS, Quadrature::XCS) +
          std::exp(2.0 * r) * V(Quadrature::PCS, Quadrature::PCS) - 1.0) /
         2.0;
}

/// Everything computed along the way for one parameter point.
struct PointEvaluation {
  SystemParams params;
  EffectiveParams effective;
  DriftModel model;
  StabilityReport stability;
  std::optional<CovarianceMatrix> covariance;  ///< present iff stable
  SqueezingReport report;
};

inline PointEvaluation evaluate_point_detailed(const SystemParams& p) {
  PointEvaluation out;
  out.params = p;
  out.effective = derive_effective_params(p);
  out.model = build_drift_model(out.effective, p);
  out.stability = check_stability(out.model.drift);
  out.report.stable = out.stability.stable;
  out.report.spectral_abscissa = out.stability.spectral_abscissa;
  if (!out.stability.stable) return out;

  out.covariance = solve_lyapunov(out.model.drift, out.model.diffusion);
  const double r = out.effective.r;
  out.report.variance = position_variance(*out.covariance, r);
  if (!(out.report.variance > 0.0)) {
    throw NumericalFailure("steady-state position variance is not positive");
  }
  out.report.variance_db = variance_db(out.report.variance);
  out.report.n_eff = effective_phonon_number(*out.covariance, r);
  if (out.report.n_eff < -1e-9) {
    throw NumericalFailure("effective phonon number is negative beyond solver tolerance");
  }
  return out;
}

/// Full pipeline: effective parameters, drift/diffusion, stability, Lyapunov
/// solve and metrics.
inline SqueezingReport evaluate_point(const SystemParams& p) {
  return evaluate_point_detailed(p).report;
}

}  // namespace bsqz
