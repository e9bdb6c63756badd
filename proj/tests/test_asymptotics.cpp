#include <gtest/gtest.h>

#include <cmath>

#include "rdsym/asymptotics.hpp"
#include "rdsym/dynamics.hpp"
#include "rdsym/initial_data.hpp"
#include "rdsym/operators.hpp"
#include "rdsym/radial.hpp"

using namespace rdsym;

namespace {

// Independent oracle: J0 by power series, first zero by bisection.
double bessel_j0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 60; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

double bessel_j0_first_zero() {
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j0(lo) * bessel_j0(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

CoefficientSet plain_coeffs(DomainSpec dom) {
  CoefficientSet c;
  c.domain = dom;
  c.competitive = false;
  c.alpha[0] = SpaceTimeCoefficient::constant(0.0);
  c.alpha[1] = SpaceTimeCoefficient::constant(0.0);
  return c;
}

}  // namespace

TEST(PrincipalEigenpair, MatchesBesselOracleOnUnitDisk) {
  const double j01 = bessel_j0_first_zero();
  EXPECT_NEAR(j01, 2.404825557695773, 1e-12);  // oracle self-check
  const double lambda_exact = j01 * j01;

  const double lambda = lambda1_extrapolated(DomainSpec(0.0, 1.0), 256);
  EXPECT_NEAR(lambda / lambda_exact, 1.0, 1e-4);

  const Eigenpair plain = principal_eigenpair(DomainSpec(0.0, 1.0), 256);
  EXPECT_NEAR(plain.lambda / lambda_exact, 1.0, 1e-2);
}

TEST(PrincipalEigenpair, EigenfunctionPositiveAndNormalized) {
  const Eigenpair eig = principal_eigenpair(DomainSpec(0.0, 1.0), 64);
  double sup = 0.0;
  for (int j = 0; j < eig.phi.n_r; ++j) {
    EXPECT_GT(eig.phi.values[j], 0.0) << "interior radius index " << j;
    sup = std::max(sup, eig.phi.values[j]);
  }
  EXPECT_DOUBLE_EQ(eig.phi.values[eig.phi.n_r], 0.0);
  EXPECT_DOUBLE_EQ(sup, 1.0);
}

TEST(PrincipalEigenpair, DirichletScalingLaw) {
  const double base = principal_eigenpair(DomainSpec(0.0, 1.0), 128).lambda;
  const double doubled = principal_eigenpair(DomainSpec(0.0, 2.0), 128).lambda;
  EXPECT_NEAR(doubled, base / 4.0, 1e-3 * base);
}

TEST(PrincipalEigenpair, DomainMonotonicity) {
  double prev = 1e300;
  for (double a2 : {1.0, 1.2, 1.5, 2.0}) {
    const double lambda = principal_eigenpair(DomainSpec(0.0, a2), 96).lambda;
    EXPECT_LT(lambda, prev);
    prev = lambda;
  }
  // Annulus case as well.
  const double ann1 = principal_eigenpair(DomainSpec(0.5, 1.0), 96).lambda;
  const double ann2 = principal_eigenpair(DomainSpec(0.5, 1.3), 96).lambda;
  EXPECT_LT(ann2, ann1);
}

TEST(RadialSteadyState, SubcriticalReturnsZeroProfile) {
  const DomainSpec dom(0.0, 1.0);
  const double lambda = principal_eigenpair(dom, 64).lambda;
  const SteadyProfile s = radial_steady_state(0.9 * lambda, 1.0, dom, 64);
  EXPECT_TRUE(s.subcritical);
  EXPECT_DOUBLE_EQ(s.profile.sup(), 0.0);
}

TEST(RadialSteadyState, SupercriticalBarrierAndResidual) {
  const DomainSpec dom(0.0, 1.0);
  const double lambda = principal_eigenpair(dom, 96).lambda;
  const double a = 2.0 * lambda, b = 1.0;
  const SteadyProfile s = radial_steady_state(a, b, dom, 96);
  EXPECT_FALSE(s.subcritical);
  EXPECT_TRUE(s.positive);
  EXPECT_LE(s.residual_sup, 1.5e-11 * a * a);  // the solver's own scale-aware stop
  for (double v : s.profile.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, a / b + 1e-12);
  }
  EXPECT_THROW(radial_steady_state(a, 0.0, dom, 64), std::invalid_argument);
}

TEST(RadialSteadyState, LiftedProfileSolvesTwoDSystem) {
  const DomainSpec dom(0.0, 1.0);
  const int n_r = 48;
  auto grid = make_grid(dom, n_r, 32);
  const double lambda = principal_eigenpair(dom, n_r).lambda;
  const double a = 2.0 * lambda, b = 1.0;
  const SteadyProfile s = radial_steady_state(a, b, dom, n_r);
  const ScalarField z = lift_radial(grid, s.profile);
  const ScalarField lap = laplacian(z);
  double res = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!grid->is_interior(i)) continue;
    res = std::max(res, std::abs(lap.v[i] + a * z.v[i] - b * z.v[i] * z.v[i]));
  }
  // The 2-D stencil restricted to radial fields is the 1-D operator, so the
  // lifted profile inherits the Newton residual, far below O(h^2).
  EXPECT_LE(res, 1e-8);
}

TEST(ExtractLimitProfiles, ConstantTailYieldsOneRepresentative) {
  auto grid = make_grid(DomainSpec(0.0, 1.0), 8, 16);
  Trajectory traj;
  traj.grid = grid;
  const ScalarField u = radial_bump(grid, 1.0, 0.3, 0.2);
  for (int i = 0; i <= 20; ++i) traj.push({0.1 * i, u, u});
  const LimitProfileSet set = extract_limit_profiles(traj, 0.5, 1e-8);
  ASSERT_EQ(set.representatives.size(), 1u);
  EXPECT_NEAR(set.convergence_indicator, 0.0, 1e-15);
  EXPECT_EQ(set.representatives[0].snapshot.t, 2.0);  // latest member
}

TEST(ExtractLimitProfiles, HeatFlowDecaysToTrivialProfile) {
  const DomainSpec dom(0.0, 1.0);
  auto grid = make_grid(dom, 24, 32);
  CoefficientSet c = plain_coeffs(dom);
  std::array<NonlinearitySpec, 2> nl = {
      NonlinearitySpec::make_logistic(TimeCoefficient::constant(0.0), TimeCoefficient::constant(0.0)),
      NonlinearitySpec::make_logistic(TimeCoefficient::constant(0.0), TimeCoefficient::constant(0.0))};
  SystemState s0 = make_state(grid, radial_bump(grid, 1.0, 0.2, 0.3),
                              radial_bump(grid, 1.0, 0.2, 0.3), 0.0);
  const auto res = simulate(s0, c, nl, 3.0, 5e-3, snapshots_every(10));
  const LimitProfileSet set = extract_limit_profiles(res.trajectory, 0.2, 1e-4);
  ASSERT_EQ(set.representatives.size(), 1u);
  EXPECT_LT(set.representatives[0].snapshot.u1.max_abs(), 1e-4);
  EXPECT_EQ(set.representatives[0].classification, ProfileClass::Trivial);
}

TEST(ExtractLimitProfiles, LogisticTailMatchesSteadyState) {
  const DomainSpec dom(0.0, 1.0);
  const int n_r = 32;
  auto grid = make_grid(dom, n_r, 16);
  const double lambda = principal_eigenpair(dom, n_r).lambda;
  const double a = 2.0 * lambda;
  CoefficientSet c = plain_coeffs(dom);
  std::array<NonlinearitySpec, 2> nl = {
      NonlinearitySpec::make_logistic(TimeCoefficient::constant(a), TimeCoefficient::constant(1.0)),
      NonlinearitySpec::make_logistic(TimeCoefficient::constant(0.0), TimeCoefficient::constant(0.0))};
  SystemState s0 = make_state(grid, radial_bump(grid, 1.5, 0.0, 0.5), ScalarField(grid, 0.0), 0.0);
  const auto res = simulate(s0, c, nl, 5.0, 4e-3, snapshots_every(25));
  const LimitProfileSet set = extract_limit_profiles(res.trajectory, 0.2, 1e-3);
  ASSERT_EQ(set.representatives.size(), 1u);
  const ScalarField target = lift_radial(grid, radial_steady_state(a, 1.0, dom, n_r).profile);
  double err = 0.0;
  const ScalarField& got = set.representatives[0].snapshot.u1;
  for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got.v[i] - target.v[i]));
  EXPECT_LT(err / target.max_abs(), 1e-2);
  EXPECT_EQ(set.representatives[0].classification, ProfileClass::Semitrivial1);
}

TEST(ExtractLimitProfiles, RequiresEnoughTailSnapshots) {
  auto grid = make_grid(DomainSpec(0.0, 1.0), 8, 16);
  Trajectory traj;
  traj.grid = grid;
  for (int i = 0; i < 5; ++i)
    traj.push({0.1 * i, ScalarField(grid, 0.0, 0.1 * i), ScalarField(grid, 0.0, 0.1 * i)});
  EXPECT_THROW(extract_limit_profiles(traj, 1.0, 1e-3), std::invalid_argument);
}

TEST(ExtractLimitProfiles, DeterministicAcrossCalls) {
  auto grid = make_grid(DomainSpec(0.0, 1.0), 8, 16);
  Trajectory traj;
  traj.grid = grid;
  for (int i = 0; i <= 30; ++i) {
    ScalarField u = radial_bump(grid, 1.0 + 0.3 * std::sin(0.7 * i), 0.3, 0.2);
    u.time = 0.1 * i;
    traj.push({0.1 * i, u, u});
  }
  const LimitProfileSet a = extract_limit_profiles(traj, 0.6, 0.05);
  const LimitProfileSet b = extract_limit_profiles(traj, 0.6, 0.05);
  ASSERT_EQ(a.representatives.size(), b.representatives.size());
  for (std::size_t i = 0; i < a.representatives.size(); ++i)
    EXPECT_EQ(a.representatives[i].snapshot.t, b.representatives[i].snapshot.t);
}

TEST(ClassifyProfile, SpecExamples) {
  auto grid = make_grid(DomainSpec(0.0, 1.0), 8, 16);
  ScalarField zero(grid, 0.0), one(grid, 1.0);
  EXPECT_EQ(classify_profile(zero, one), ProfileClass::Semitrivial2);
  EXPECT_EQ(classify_profile(one, zero), ProfileClass::Semitrivial1);
  EXPECT_EQ(classify_profile(one, one), ProfileClass::Coexistence);
  ScalarField tiny(grid, 1e-9);
  EXPECT_EQ(classify_profile(tiny, tiny), ProfileClass::Trivial);
}

TEST(ClassifyProfile, ScaleConsistentAwayFromAbsoluteFloor) {
  auto grid = make_grid(DomainSpec(0.0, 1.0), 8, 16);
  ScalarField big(grid, 3.0), small(grid, 1e-6);
  for (double c : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    ScalarField b = big, s = small;
    for (double& v : b.v) v *= c;
    for (double& v : s.v) v *= c;
    EXPECT_EQ(classify_profile(b, s), ProfileClass::Semitrivial1) << c;
    EXPECT_EQ(classify_profile(b, b), ProfileClass::Coexistence) << c;
  }
}
