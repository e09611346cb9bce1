#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mjls/errors.hpp"
#include "mjls/jump.hpp"
#include "mjls/linalg.hpp"
#include "mjls/mc.hpp"
#include "test_util.hpp"

#include <cmath>
#include <vector>

using namespace mjls;

namespace {

JumpLinearSystem running_example(double alpha = 0.1) {
  Matrix P(2, 2);
  P << 0.9, 0.1, 0.1, 0.9;
  Vector p0(2);
  p0 << 1.0, 0.0;
  return JumpLinearSystem(
      MarkovChain(P, p0),
      {Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, -2.0)},
      {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)}, alpha);
}

JumpLinearSystem scalar_single_mode(double alpha) {
  Matrix P(1, 1);
  P << 1.0;
  return JumpLinearSystem(MarkovChain(P), {Matrix::Constant(1, 1, -1.0)},
                          {Vector::Constant(1, 1.0)}, alpha);
}

// |value - truth| within z standard errors; exact when the spread is zero.
void check_within(double value, double truth, double se, double z) {
  if (se == 0.0) {
    CHECK(std::abs(value - truth) <= 1e-12);
  } else {
    CHECK(std::abs(value - truth) <= z * se);
  }
}

}  // namespace

TEST_CASE("simulate_moments validation") {
  const JumpLinearSystem sys = running_example();
  MCConfig cfg;
  cfg.trajectories = 10;
  cfg.horizon = 5;
  cfg.record_steps = {0, 5};
  SUBCASE("well-formed input is accepted") {
    CHECK_NOTHROW(simulate_moments(sys, Vector::Zero(1), cfg));
  }
  SUBCASE("state length must match") {
    CHECK_THROWS_AS(simulate_moments(sys, Vector::Zero(2), cfg),
                    InvalidInputError);
  }
  SUBCASE("at least one trajectory") {
    cfg.trajectories = 0;
    CHECK_THROWS_AS(simulate_moments(sys, Vector::Zero(1), cfg),
                    InvalidInputError);
  }
  SUBCASE("horizon must be nonnegative") {
    cfg.horizon = -1;
    cfg.record_steps = {};
    CHECK_THROWS_AS(simulate_moments(sys, Vector::Zero(1), cfg),
                    InvalidInputError);
  }
  SUBCASE("recorded steps must lie within the horizon") {
    cfg.record_steps = {0, 6};
    CHECK_THROWS_AS(simulate_moments(sys, Vector::Zero(1), cfg),
                    InvalidInputError);
    cfg.record_steps = {-1};
    CHECK_THROWS_AS(simulate_moments(sys, Vector::Zero(1), cfg),
                    InvalidInputError);
  }
  SUBCASE("recorded steps must be strictly increasing") {
    cfg.record_steps = {3, 3};
    CHECK_THROWS_AS(simulate_moments(sys, Vector::Zero(1), cfg),
                    InvalidInputError);
    cfg.record_steps = {5, 2};
    CHECK_THROWS_AS(simulate_moments(sys, Vector::Zero(1), cfg),
                    InvalidInputError);
  }
}

TEST_CASE("simulate_moments on a frozen origin") {
  // No offsets and a zero start: every trajectory sits at the origin.
  Matrix P(2, 2);
  P << 0.9, 0.1, 0.1, 0.9;
  JumpLinearSystem sys(
      MarkovChain(P),
      {Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, -2.0)},
      {Vector::Zero(1), Vector::Zero(1)}, 0.1);
  MCConfig cfg;
  cfg.trajectories = 4;
  cfg.horizon = 10;
  cfg.record_steps = {0, 10};
  const MCEstimate est = simulate_moments(sys, Vector::Zero(1), cfg);
  REQUIRE(est.steps.size() == 2);
  CHECK(est.has_se);
  for (const MCStepEstimate& step : est.steps) {
    CHECK(step.mean_square == 0.0);
    CHECK(step.mean_square_se == 0.0);
    CHECK(step.mean.norm() == 0.0);
    CHECK(step.second_moment.norm() == 0.0);
    for (Index i = 0; i < 2; ++i) {
      CHECK(step.q[i].norm() == 0.0);
      CHECK(step.Q[i].norm() == 0.0);
    }
    CHECK(step.mode_freq.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single trajectory reports no standard errors") {
  const JumpLinearSystem sys = running_example();
  MCConfig cfg;
  cfg.trajectories = 1;
  cfg.horizon = 3;
  cfg.record_steps = {3};
  const MCEstimate est = simulate_moments(sys, Vector::Constant(1, 1.0), cfg);
  CHECK_FALSE(est.has_se);
  REQUIRE(est.steps.size() == 1);
  CHECK(std::isnan(est.steps[0].mean_square_se));
  CHECK(est.steps[0].q_se.empty());
  CHECK(est.steps[0].Q_se.empty());
  CHECK(est.steps[0].mean_se.size() == 0);
}

TEST_CASE("fixed seeds reproduce bit-identical estimates") {
  const JumpLinearSystem sys = running_example();
  MCConfig cfg;
  cfg.trajectories = 500;
  cfg.horizon = 20;
  cfg.base_seed = 99;
  cfg.record_steps = {0, 7, 20};
  const Vector xi0 = Vector::Constant(1, 1.0);
  const MCEstimate a = simulate_moments(sys, xi0, cfg);
  const MCEstimate b = simulate_moments(sys, xi0, cfg);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t r = 0; r < a.steps.size(); ++r) {
    CHECK(a.steps[r].mean_square == b.steps[r].mean_square);
    CHECK((a.steps[r].mean - b.steps[r].mean).norm() == 0.0);
    CHECK((a.steps[r].mode_freq - b.steps[r].mode_freq).norm() == 0.0);
    for (Index i = 0; i < 2; ++i) {
      CHECK((a.steps[r].q[i] - b.steps[r].q[i]).norm() == 0.0);
      CHECK((a.steps[r].Q[i] - b.steps[r].Q[i]).norm() == 0.0);
    }
  }

  MCConfig other = cfg;
  other.base_seed = 100;
  const MCEstimate c = simulate_moments(sys, xi0, other);
  CHECK(c.steps[2].mean_square != a.steps[2].mean_square);
}

TEST_CASE("estimates agree with the exact moment recursion") {
  const JumpLinearSystem sys = running_example();
  MCConfig cfg;
  cfg.trajectories = 20000;
  cfg.horizon = 20;
  cfg.base_seed = 2024;
  cfg.record_steps = {0, 1, 5, 20};
  const Vector xi0 = Vector::Constant(1, 1.0);
  const MCEstimate est = simulate_moments(sys, xi0, cfg);

  MomentState m = initial_moments(sys, xi0);
  std::size_t r = 0;
  for (int k = 0; k <= 20; ++k) {
    if (r < cfg.record_steps.size() && cfg.record_steps[r] == k) {
      const MCStepEstimate& step = est.steps[r];
      CHECK(step.k == k);
      check_within(step.mean_square, mean_square_norm(m), step.mean_square_se,
                   3.0);
      for (Index i = 0; i < 2; ++i) {
        check_within(step.q[i][0], m.q[i][0], step.q_se[i][0], 3.0);
        check_within(step.Q[i](0, 0), m.Q[i](0, 0), step.Q_se[i](0, 0), 3.0);
        check_within(step.mode_freq[i], m.p[i], step.mode_freq_se[i], 3.0);
      }
      const double mean_exact = m.q[0][0] + m.q[1][0];
      check_within(step.mean[0], mean_exact, step.mean_se[0], 3.0);
      ++r;
    }
    m = moment_recursion_step(sys, m);
  }
  CHECK(r == cfg.record_steps.size());
}

TEST_CASE("divergence_probe") {
  MCConfig cfg;
  cfg.trajectories = 50;
  cfg.horizon = 60;
  cfg.base_seed = 7;
  cfg.record_steps = {30, 35, 40, 45, 50, 55, 60};
  const Vector xi0 = Vector::Zero(1);
  SUBCASE("small step sizes settle") {
    // Record past the deterministic transient, which still climbs toward the
    // fixed point around step 30-60 at this step size.
    cfg.horizon = 120;
    cfg.record_steps = {90, 95, 100, 105, 110, 115, 120};
    const DivergenceReport rep =
        divergence_probe(scalar_single_mode(0.1), xi0, cfg);
    CHECK(rep.verdict == GrowthVerdict::kSettling);
    CHECK_FALSE(rep.overflow);
    CHECK(std::abs(rep.slope) < 0.001);
  }
  SUBCASE("step sizes beyond the boundary grow") {
    const DivergenceReport rep =
        divergence_probe(scalar_single_mode(2.5), xi0, cfg);
    CHECK(rep.verdict == GrowthVerdict::kGrowing);
    CHECK(rep.slope > 0.01);
  }
  SUBCASE("the marginal case does not crash") {
    CHECK_NOTHROW(divergence_probe(scalar_single_mode(2.0), xi0, cfg));
  }
  SUBCASE("overflow is reported as growth with the step index") {
    const DivergenceReport rep =
        divergence_probe(scalar_single_mode(50.0), xi0, cfg);
    CHECK(rep.verdict == GrowthVerdict::kGrowing);
    CHECK(rep.overflow);
    CHECK(rep.overflow_step > 0);
    CHECK(rep.overflow_step <= 60);
    CHECK(std::isinf(rep.slope));
  }
  SUBCASE("needs at least two recorded steps") {
    cfg.record_steps = {60};
    CHECK_THROWS_AS(divergence_probe(scalar_single_mode(0.1), xi0, cfg),
                    InvalidInputError);
  }
}
