#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bsqz/observables.hpp"
#include "bsqz/steady_state.hpp"
#include "bsqz/sweep.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace bsqz;

namespace {

double rel_frobenius(const Mat6& a, const Mat6& b) { return (a - b).norm() / b.norm(); }

SystemParams decoupled(double n_m) {
  SystemParams p = figure_base();
  p.G_c = 0.0;
  p.G_b = 0.0;
  p.eta = 0.0;
  p.n_m = n_m;
  return p;
}

}  // namespace

TEST_CASE("decoupled thermal oscillator and optical vacuum", "[steady-state]") {
  const SystemParams p = decoupled(100);
  const EffectiveParams e = derive_effective_params(p);
  const DriftModel model = build_drift_model(e, p);
  const CovarianceMatrix V = solve_lyapunov(model.drift, model.diffusion);
  CHECK(V(Quadrature::XCS, Quadrature::XCS) == Approx(100.5).epsilon(1e-12));
  CHECK(V(Quadrature::PCS, Quadrature::PCS) == Approx(100.5).epsilon(1e-12));
  CHECK(std::abs(V(Quadrature::XCS, Quadrature::PCS)) < 1e-9);
  CHECK(V(Quadrature::XA1, Quadrature::XA1) == Approx(0.5).epsilon(1e-12));
  CHECK(V(Quadrature::PA1, Quadrature::PA1) == Approx(0.5).epsilon(1e-12));

  for (double d1 : {-3.0, 0.0, 0.4, 5.0}) {
    SystemParams q = decoupled(10);
    q.Delta_1 = d1;
    const DriftModel m = build_drift_model(derive_effective_params(q), q);
    const CovarianceMatrix W = solve_lyapunov(m.drift, m.diffusion);
    CHECK(W(Quadrature::XA1, Quadrature::XA1) == Approx(0.5).epsilon(1e-12));
    CHECK(W(Quadrature::PA1, Quadrature::PA1) == Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("Kronecker and Schur solvers agree", "[steady-state]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> margin(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat6 M = oracle::random_stable_matrix(rng, margin(rng));
    const Mat6 A = oracle::random_positive_diagonal(rng, 0.01, 1.0);
    const Mat6 V1 = solve_lyapunov(M, A).matrix;
    const Mat6 V2 = solve_lyapunov_schur(M, A).matrix;
    REQUIRE((V1 - V2).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, V1.cwiseAbs().maxCoeff()));
  }

  const SystemParams p = figure_base();
  const DriftModel m = build_drift_model(derive_effective_params(p), p);
  const Mat6 V1 = solve_lyapunov(m.drift, m.diffusion).matrix;
  const Mat6 V2 = solve_lyapunov_schur(m.drift, m.diffusion).matrix;
  CHECK((V1 - V2).cwiseAbs().maxCoeff() < 1e-10 * V1.cwiseAbs().maxCoeff());
}

TEST_CASE("steady state is physical for model parameters", "[steady-state]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    SystemParams p = figure_base();
    p.G_c = 0.3 * u(rng);
    p.G_b = 0.3 * u(rng);
    p.n_m = 500 * u(rng);
    p.eta = 2e-4 * u(rng);
    p = lock_to_resonance(p);
    const DriftModel m = build_drift_model(derive_effective_params(p), p);
    if (!check_stability(m.drift).stable) continue;
    const CovarianceMatrix V = solve_lyapunov(m.drift, m.diffusion);
    REQUIRE(lyapunov_residual(m.drift, m.diffusion, V.matrix) < kLyapunovResidualTolerance);
    REQUIRE(is_physical(V));
    ++solved;
  }
  CHECK(solved > 100);
}

TEST_CASE("superposition in the diffusion matrix", "[steady-state]") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat6 M = oracle::random_stable_matrix(rng, 0.2);
    const Mat6 A1 = oracle::random_positive_diagonal(rng, 0.0, 1.0);
    const Mat6 A2 = oracle::random_positive_diagonal(rng, 0.0, 1.0);
    const Mat6 sum = solve_lyapunov(M, A1).matrix + solve_lyapunov(M, A2).matrix;
    const Mat6 joint = solve_lyapunov(M, A1 + A2).matrix;
    REQUIRE((sum - joint).cwiseAbs().maxCoeff() < 1e-10 * joint.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("unstable drift matrices are rejected before solving", "[steady-state]") {
  Mat6 M = -Mat6::Identity();
  M(3, 3) = 0.2;
  CHECK_THROWS_AS(solve_lyapunov(M, Mat6::Identity()), StabilityError);
  CHECK_THROWS_AS(solve_lyapunov_schur(M, Mat6::Identity()), StabilityError);
  try {
    solve_lyapunov(M, Mat6::Identity());
  } catch (const StabilityError& e) {
    CHECK(e.spectral_abscissa() == Approx(0.2));
  }
  CHECK_THROWS_AS(solve_lyapunov(Mat6::Zero(), Mat6::Identity()), StabilityError);
}

TEST_CASE("uncertainty check", "[steady-state]") {
  CovarianceMatrix vacuum;
  vacuum.matrix = 0.5 * Mat6::Identity();
  CHECK(is_physical(vacuum));
  CHECK(uncertainty_margin(vacuum.matrix) == Approx(0.0).margin(1e-15));

  CovarianceMatrix over_squeezed = vacuum;
  over_squeezed.matrix(0, 0) = 0.2;
  over_squeezed.matrix(1, 1) = 0.5;  // 0.2 * 0.5 < 1/4
  CHECK(over_squeezed.matrix.determinant() > 0);
  CHECK_FALSE(is_physical(over_squeezed));

  CovarianceMatrix squeezed = vacuum;
  squeezed.matrix(0, 0) = 0.1;
  squeezed.matrix(1, 1) = 2.5;
  CHECK(is_physical(squeezed));
}

TEST_CASE("covariance integration: trivial cases", "[steady-state]") {
  std::mt19937_64 rng(13);
  const Mat6 M = oracle::random_stable_matrix(rng, 0.3);
  const Mat6 A = oracle::random_positive_diagonal(rng, 0.1, 1.0);
  CovarianceMatrix V0;
  V0.matrix = 0.5 * Mat6::Identity();
  V0.matrix(4, 5) = V0.matrix(5, 4) = 0.1;

  CHECK(integrate_covariance(M, A, V0, 0.0).matrix == V0.matrix);

  const CovarianceMatrix linear = integrate_covariance(Mat6::Zero(), A, V0, 3.7);
  CHECK((linear.matrix - (V0.matrix + 3.7 * A)).cwiseAbs().maxCoeff() < 1e-12);

  CovarianceMatrix asym = V0;
  asym.matrix(0, 1) = 0.3;
  CHECK_THROWS_AS(integrate_covariance(M, A, asym, 1.0), InvalidParameter);
  CHECK_THROWS_AS(integrate_covariance(M, A, V0, -1.0), InvalidParameter);
}

TEST_CASE("covariance integration converges to the Lyapunov solution", "[steady-state]") {
  SystemParams p = figure_base();
  p.gamma_m = 0.05;  // keeps the slowest decay time short
  p.kappa_1 = 0.2;
  p = lock_to_resonance(p);
  const EffectiveParams e = derive_effective_params(p);
  const DriftModel m = build_drift_model(e, p);
  const StabilityReport s = check_stability(m.drift);
  REQUIRE(s.stable);
  const Mat6 target = solve_lyapunov(m.drift, m.diffusion).matrix;
  const CovarianceMatrix V0 = default_initial_covariance(e);

  const double tau = 1.0 / std::abs(s.spectral_abscissa);
  double previous = rel_frobenius(V0.matrix, target);
  for (double t : {5 * tau, 15 * tau, 30 * tau}) {
    const double d = rel_frobenius(integrate_covariance(m.drift, m.diffusion, V0, t).matrix, target);
    CHECK((d < previous || d < 1e-9));
    previous = d;
  }
  const Mat6 end = integrate_covariance(m.drift, m.diffusion, V0, 50 * tau).matrix;
  CHECK(rel_frobenius(end, target) < 1e-6);
}

TEST_CASE("stiff systems report the failing time", "[steady-state]") {
  Mat6 M = -Mat6::Identity();
  M(0, 0) = -1e14;
  CovarianceMatrix V0;
  V0.matrix = Mat6::Identity();
  IntegrationOptions opts;
  opts.min_relative_step = 1e-6;
  try {
    integrate_covariance(M, Mat6::Identity(), V0, 10.0, opts);
    FAIL("expected a stiffness error");
  } catch (const StiffnessError& e) {
    CHECK(e.time() >= 0.0);
    CHECK(e.time() < 10.0);
  }
}
