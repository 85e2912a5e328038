#pragma once

// Weak-coupling rate-equation model: radiation-pressure force spectrum of the
// optical mode dressed by the Brillouin mode, the resulting cooling rate, and
// the analytic phonon number and position variance. Used as an independent
// cross-check of the full covariance pipeline.

#include <cmath>
#include <complex>
#include <utility>

#include "bsqz/effective_model.hpp"
#include "bsqz/errors.hpp"

namespace bsqz {

/// S_FF(omega) of F = a1 + a1^dag with the optical mode hybridized with the
/// acoustic mode through G_b.
inline double force_spectrum(double omega, double Delta_1, double Delta_b, double G_b,
                             double kappa_1, double gamma_b) {
  if (!(kappa_1 > 0.0) || !(gamma_b > 0.0)) {
    throw InvalidParameter("force_spectrum requires kappa_1 > 0 and gamma_b > 0");
  }
  using C = std::complex<double>;
  const double g2 = G_b * G_b;
  const C acoustic(gamma_b / 2.0, -(omega - Delta_b));
  const double numerator = g2 * gamma_b / std::norm(acoustic) + kappa_1;
  const C optical = C(kappa_1 / 2.0, -(omega - Delta_1)) + g2 / acoustic;
  return numerator / std::norm(optical);
}

/// kappa_1 + 4 G_b^2 / gamma_b.
inline double effective_linewidth(double G_b, double kappa_1, double gamma_b) {
  return kappa_1 + 4.0 * G_b * G_b / gamma_b;
}

struct CoolingRates {
  double gamma_c = 0.0;         ///< G'_c^2 [S_FF(+w'_m) - S_FF(-w'_m)]
  double gamma_c_approx = 0.0;  ///< 4 G'_c^2 / kappa_eff
  double kappa_eff = 0.0;
  double n_c = 0.0;             ///< back-action limited occupation
  double s_plus = 0.0;          ///< S_FF(+w'_m)
  double s_minus = 0.0;         ///< S_FF(-w'_m)
};

inline CoolingRates analytic_cooling_rates(double G_c_eff, double G_b, double kappa_1,
                                           double gamma_b, double omega_m_eff, double Delta_1,
                                           double Delta_b) {
  CoolingRates out;
  out.s_plus = force_spectrum(omega_m_eff, Delta_1, Delta_b, G_b, kappa_1, gamma_b);
  out.s_minus = force_spectrum(-omega_m_eff, Delta_1, Delta_b, G_b, kappa_1, gamma_b);
  if (!(out.s_plus > out.s_minus)) {
    throw HeatingRegimeError(
        "S_FF(+w'_m) <= S_FF(-w'_m): the optical mode heats the mechanical mode and the "
        "rate model does not apply");
  }
  const double diff = out.s_plus - out.s_minus;
  out.kappa_eff = effective_linewidth(G_b, kappa_1, gamma_b);
  out.gamma_c = G_c_eff * G_c_eff * diff;
  out.gamma_c_approx = 4.0 * G_c_eff * G_c_eff / out.kappa_eff;
  out.n_c = out.s_minus / diff;
  return out;
}

/// Convenience overload pulling the inputs from the model parameters.
inline CoolingRates analytic_cooling_rates(const SystemParams& p, const EffectiveParams& e) {
  return analytic_cooling_rates(e.G_c_eff, p.G_b, p.kappa_1, p.gamma_b, e.omega_m_eff,
                                p.Delta_1, p.Delta_b);
}

struct AnalyticPrediction {
  double n_eff_s = 0.0;       ///< squeezed-frame occupation, gamma_c n_c term dropped
  double n_eff = 0.0;         ///< original-frame occupation
  double variance = 0.0;      ///< original-frame position variance
  double dropped_term = 0.0;  ///< gamma_c n_c / (gamma_m + gamma_c)
  double n_eff_s_full = 0.0;  ///< (gamma_m N_eff + gamma_c n_c) / (gamma_m + gamma_c)
};

inline AnalyticPrediction analytic_phonon_and_variance(const CoolingRates& rates,
                                                       double gamma_m, double N_eff, double r) {
  const double total = gamma_m + rates.gamma_c;
  if (!(total > 0.0)) throw InvalidParameter("gamma_m + gamma_c must be > 0");
  AnalyticPrediction out;
  out.n_eff_s = gamma_m * N_eff / total;
  out.dropped_term = rates.gamma_c * rates.n_c / total;
  out.n_eff_s_full = out.n_eff_s + out.dropped_term;
  const double sinh_r = std::sinh(r);
  out.n_eff = std::cosh(2.0 * r) * out.n_eff_s + sinh_r * sinh_r;
  out.variance = (out.n_eff_s + 0.5) * std::exp(-2.0 * r);
  return out;
}

inline AnalyticPrediction analytic_prediction(const SystemParams& p) {
  const EffectiveParams e = derive_effective_params(p);
  return analytic_phonon_and_variance(analytic_cooling_rates(p, e), p.gamma_m, e.N_eff, e.r);
}

/// Frequencies (Delta_1 - |G_b|, Delta_1 + |G_b|) of the hybrid optical-acoustic
/// supermodes a+ and a-.
inline std::pair<double, double> supermode_frequencies(double Delta_1, double G_b) {
  return {Delta_1 - std::abs(G_b), Delta_1 + std::abs(G_b)};
}

}  // namespace bsqz
