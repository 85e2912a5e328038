#pragma once

// Physical inputs of the three-mode optomechanical model and the derived
// parameters of its linearized, squeezing-frame description.
//
// All rates and frequencies are in units of the bare mechanical frequency
// omega_m; omega_m is carried so that SI reporting stays possible.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bsqz/errors.hpp"

namespace bsqz {

struct SystemParams {
  double omega_m = 1.0;   ///< mechanical frequency, the reference unit
  double g_c1 = 1e-4;     ///< single-photon optomechanical coupling
  double kappa_1 = 0.02;  ///< total optical decay
  double gamma_b = 0.4;   ///< Brillouin acoustic decay
  double gamma_m = 1e-4;  ///< mechanical decay
  double eta = 1e-4;      ///< Duffing amplitude
  double n_m = 100.0;     ///< thermal phonon occupation
  double G_c = 0.15;      ///< effective optomechanical coupling |g_c1 alpha_1|
  double G_b = 0.0;       ///< effective Brillouin coupling |g_b alpha_2|
  double Delta_1 = 0.0;   ///< optical detuning
  double Delta_b = 0.0;   ///< acoustic detuning

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct EffectiveParams {
  double beta = 0.0;         ///< mechanical steady-state amplitude
  double Lambda = 0.0;       ///< 3 eta (4 beta^2 + 1)
  double r = 0.0;            ///< squeezing parameter
  double omega_m_eff = 1.0;  ///< shifted mechanical frequency omega'_m
  double G_c_eff = 0.0;      ///< coupling in the squeezed frame G'_c
  double N_eff = 0.0;        ///< effective bath occupation
  double M_eff = 0.0;        ///< effective bath correlation
};

namespace detail {

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw InvalidParameter(std::string(name) + " must be finite");
  }
}

}  // namespace detail

/// Checks the hard invariants of `p` and throws InvalidParameter on the first
/// violation. Soft model assumptions that do not hold are returned as
/// human-readable warnings.
inline std::vector<std::string> validate(const SystemParams& p) {
  const std::pair<double, const char*> fields[] = {
      {p.omega_m, "omega_m"}, {p.g_c1, "g_c1"},       {p.kappa_1, "kappa_1"},
      {p.gamma_b, "gamma_b"}, {p.gamma_m, "gamma_m"}, {p.eta, "eta"},
      {p.n_m, "n_m"},         {p.G_c, "G_c"},         {p.G_b, "G_b"},
      {p.Delta_1, "Delta_1"}, {p.Delta_b, "Delta_b"}};
  for (const auto& [value, name] : fields) detail::require_finite(value, name);

  if (p.omega_m <= 0) throw InvalidParameter("omega_m must be > 0");
  if (p.kappa_1 <= 0) throw InvalidParameter("kappa_1 must be > 0");
  if (p.gamma_b <= 0) throw InvalidParameter("gamma_b must be > 0");
  if (p.gamma_m <= 0) throw InvalidParameter("gamma_m must be > 0");
  if (p.eta < 0) throw InvalidParameter("eta must be >= 0");
  if (p.n_m < 0) throw InvalidParameter("n_m must be >= 0");
  if (p.G_c < 0) throw InvalidParameter("G_c must be >= 0");
  if (p.G_b < 0) throw InvalidParameter("G_b must be >= 0");
  if (p.g_c1 < 0) throw InvalidParameter("g_c1 must be >= 0");

  std::vector<std::string> warnings;
  if (p.gamma_m >= p.kappa_1) {
    warnings.emplace_back("gamma_m >= kappa_1: the model assumes gamma_m << kappa_1");
  }
  return warnings;
}

/// Real root of 16 eta b^3 + (12 eta + omega_m) b - g_c1 |alpha_1|^2 = 0.
///
/// The cubic is strictly increasing for eta >= 0 and omega_m > 0, so the root
/// is unique and lies between 0 and the linear-case value
/// g_c1 |alpha_1|^2 / omega_m. It is located by bisection on that bracket and
/// converged until the midpoint no longer moves (full double precision).
inline double solve_mechanical_steady_state(double g_c1, double alpha1_sq,
                                            double eta, double omega_m) {
  detail::require_finite(g_c1, "g_c1");
  detail::require_finite(alpha1_sq, "alpha1_sq");
  detail::require_finite(eta, "eta");
  detail::require_finite(omega_m, "omega_m");
  if (eta < 0) throw InvalidParameter("eta must be >= 0");
  if (omega_m <= 0) throw InvalidParameter("omega_m must be > 0");
  if (alpha1_sq < 0) throw InvalidParameter("alpha1_sq must be >= 0");

  const double drive = g_c1 * alpha1_sq;
  if (drive == 0.0) return 0.0;
  if (eta == 0.0) return drive / omega_m;

  auto cubic = [&](double b) {
    return (16.0 * eta * b * b + 12.0 * eta + omega_m) * b - drive;
  };

  double lo = std::min(0.0, drive / omega_m);
  double hi = std::max(0.0, drive / omega_m);
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cubic(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::abs(cubic(lo)) <= std::abs(cubic(hi)) ? lo : hi;
}

/// Classical steady-state amplitude of the strongly pumped optical mode,
/// sqrt(kappa_ex2) eps_d2 / (kappa_2/2 + i Delta_2). Calibration helper that
/// links a physical pump to G_b = g_b |alpha_2|.
inline std::complex<double> compute_pump_amplitude(double kappa_ex2, double eps_d2,
                                                   double kappa_2, double Delta_2) {
  detail::require_finite(kappa_ex2, "kappa_ex2");
  detail::require_finite(eps_d2, "eps_d2");
  detail::require_finite(kappa_2, "kappa_2");
  detail::require_finite(Delta_2, "Delta_2");
  if (kappa_2 <= 0) throw InvalidParameter("kappa_2 must be > 0");
  if (kappa_ex2 < 0 || kappa_ex2 > kappa_2) {
    throw InvalidParameter("kappa_ex2 must lie in [0, kappa_2]");
  }
  return std::sqrt(kappa_ex2) * eps_d2 / std::complex<double>(kappa_2 / 2.0, Delta_2);
}

/// Effective linearized parameters for `p`. The intracavity photon number of
/// mode a1 follows from the canonical coupling input, |alpha_1|^2 = (G_c/g_c1)^2.
inline EffectiveParams derive_effective_params(const SystemParams& p) {
  validate(p);
  if (p.g_c1 == 0.0 && p.G_c > 0.0) {
    throw InconsistentCoupling("G_c > 0 requires a nonzero single-photon coupling g_c1");
  }
  const double alpha1_sq = p.g_c1 == 0.0 ? 0.0 : (p.G_c / p.g_c1) * (p.G_c / p.g_c1);

  EffectiveParams e;
  e.beta = solve_mechanical_steady_state(p.g_c1, alpha1_sq, p.eta, p.omega_m);
  e.Lambda = 3.0 * p.eta * (4.0 * e.beta * e.beta + 1.0);
  const double stretch = 1.0 + 4.0 * e.Lambda / p.omega_m;
  e.r = 0.25 * std::log(stretch);
  e.omega_m_eff = p.omega_m * std::sqrt(stretch);
  e.G_c_eff = p.G_c * std::pow(stretch, -0.25);
  const double sinh_r = std::sinh(e.r);
  e.N_eff = std::cosh(2.0 * e.r) * p.n_m + sinh_r * sinh_r;
  e.M_eff = std::sinh(2.0 * e.r) * (p.n_m + 0.5);
  return e;
}

/// Size of the terms dropped by the linearization relative to the retained
/// ones: max(g_c1, eta beta) / min(Lambda, G_c). Values well below 1 mean the
/// bilinear model is self-consistent. Infinite when Lambda or G_c vanishes.
inline double linearization_ratio(const SystemParams& p, const EffectiveParams& e) {
  const double dropped = std::max(p.g_c1, p.eta * e.beta);
  const double kept = std::min(e.Lambda, p.G_c);
  if (kept <= 0.0) return std::numeric_limits<double>::infinity();
  return dropped / kept;
}

/// Copy of `p` with both detunings set to omega'_m (triple resonance).
inline SystemParams lock_to_resonance(SystemParams p) {
  const double w = derive_effective_params(p).omega_m_eff;
  p.Delta_1 = w;
  p.Delta_b = w;
  return p;
}

}  // namespace bsqz
