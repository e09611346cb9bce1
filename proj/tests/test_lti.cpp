#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mjls/errors.hpp"
#include "mjls/linalg.hpp"
#include "mjls/lti.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace mjls;

namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

Vector vec1(double x) { return Vector::Constant(1, x); }

}  // namespace

TEST_CASE("LTISystem construction and validation") {
  SUBCASE("valid system") {
    LTISystem sys(Matrix::Identity(2, 2), Matrix::Ones(2, 1));
    CHECK(sys.state_dim() == 2);
    CHECK(sys.input_dim() == 1);
  }
  SUBCASE("non-square state map rejected") {
    CHECK_THROWS_AS(LTISystem(Matrix::Ones(2, 3), Matrix::Ones(2, 1)),
                    InvalidInputError);
  }
  SUBCASE("input-map row mismatch rejected") {
    CHECK_THROWS_AS(LTISystem(Matrix::Identity(2, 2), Matrix::Ones(3, 1)),
                    InvalidInputError);
  }
  SUBCASE("autonomous system has input dimension zero") {
    LTISystem sys(Matrix::Identity(3, 3), Matrix());
    CHECK(sys.input_dim() == 0);
  }
}

TEST_CASE("lti_trajectory") {
  SUBCASE("zero state map forgets history") {
    LTISystem sys(Matrix::Zero(2, 2), Matrix::Identity(2, 2));
    Vector u(2);
    u << 3.0, -4.0;
    const auto traj = lti_trajectory(sys, Vector::Ones(2), u, 5);
    REQUIRE(traj.size() == 6);
    for (int k = 1; k <= 5; ++k) CHECK((traj[k] - u).norm() == 0.0);
  }
  SUBCASE("identity map freezes the state") {
    LTISystem sys(Matrix::Identity(2, 2), Matrix::Zero(2, 1));
    Vector x0(2);
    x0 << 1.0, 2.0;
    const auto traj = lti_trajectory(sys, x0, vec1(7.0), 4);
    for (const Vector& x : traj) CHECK((x - x0).norm() == 0.0);
  }
  SUBCASE("scalar hand unroll") {
    LTISystem sys(scalar(0.5), scalar(1.0));
    const auto traj = lti_trajectory(sys, vec1(0.0), vec1(1.0), 3);
    CHECK(traj[1][0] == doctest::Approx(1.0));
    CHECK(traj[2][0] == doctest::Approx(1.5));
    CHECK(traj[3][0] == doctest::Approx(1.75));
  }
  SUBCASE("too few inputs rejected") {
    LTISystem sys(scalar(0.5), scalar(1.0));
    CHECK_THROWS_AS(
        lti_trajectory(sys, vec1(0.0), std::vector<Vector>{vec1(1.0)}, 2),
        InvalidInputError);
  }
}

TEST_CASE("lti_steady_state") {
  SUBCASE("zero input gives zero limit") {
    LTISystem sys(0.5 * Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    CHECK(lti_steady_state(sys, Vector::Zero(2)).norm() == 0.0);
  }
  SUBCASE("scalar geometric series") {
    LTISystem sys(scalar(0.5), scalar(1.0));
    CHECK(lti_steady_state(sys, vec1(1.0))[0] == doctest::Approx(2.0));
  }
  SUBCASE("per-coordinate geometric series") {
    LTISystem sys(0.5 * Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    Vector u(2);
    u << 1.0, -1.0;
    const Vector x = lti_steady_state(sys, u);
    CHECK(x[0] == doctest::Approx(2.0));
    CHECK(x[1] == doctest::Approx(-2.0));
  }
  SUBCASE("fixed-point residual") {
    LTISystem sys(Matrix(Matrix::Constant(2, 2, 0.2)), Matrix::Ones(2, 1));
    const Vector x = lti_steady_state(sys, vec1(0.7));
    CHECK((x - (sys.H * x + sys.G * vec1(0.7))).norm() < 1e-12);
  }
  SUBCASE("unstable system rejected") {
    LTISystem sys(scalar(1.1), scalar(1.0));
    CHECK_THROWS_AS(lti_steady_state(sys, vec1(1.0)), AnalysisError);
  }
}

TEST_CASE("lti_constant_input_closed_form") {
  SUBCASE("start at the fixed point") {
    LTISystem sys(scalar(0.5), scalar(1.0));
    for (int k : {0, 1, 7}) {
      CHECK(lti_constant_input_closed_form(sys, vec1(2.0), vec1(1.0), k)[0] ==
            doctest::Approx(2.0));
    }
  }
  SUBCASE("scalar value at step three") {
    LTISystem sys(scalar(0.5), scalar(1.0));
    CHECK(lti_constant_input_closed_form(sys, vec1(0.0), vec1(1.0), 3)[0] ==
          doctest::Approx(1.75));
  }
  SUBCASE("autonomous decay is a matrix power") {
    LTISystem sys(0.9 * Matrix::Identity(3, 3), Matrix::Zero(3, 0));
    const Vector xk =
        lti_constant_input_closed_form(sys, Vector::Unit(3, 0), Vector(), 10);
    CHECK(xk[0] == doctest::Approx(std::pow(0.9, 10)));
    CHECK(xk[1] == 0.0);
  }
  SUBCASE("matches forward recursion at every step") {
    std::mt19937_64 gen(11);
    Matrix H = testutil::random_matrix(gen, 3, 3, -0.3, 0.3);
    LTISystem sys(H, testutil::random_matrix(gen, 3, 2, -1.0, 1.0));
    const Vector x0 = testutil::random_vector(gen, 3, -1.0, 1.0);
    const Vector u = testutil::random_vector(gen, 2, -1.0, 1.0);
    const auto traj = lti_trajectory(sys, x0, u, 40);
    for (int k = 0; k <= 40; ++k) {
      const Vector xk = lti_constant_input_closed_form(sys, x0, u, k);
      CHECK(rel_diff(Matrix(xk), Matrix(traj[k])) < 1e-10);
    }
  }
}

TEST_CASE("spectral_radius") {
  SUBCASE("identity") {
    const RateReport rr = spectral_radius(Matrix::Identity(3, 3));
    CHECK(rr.spectral_radius == doctest::Approx(1.0));
    CHECK(rr.dominant_semisimple);
    CHECK(rr.reported_rate == doctest::Approx(1.0));
    CHECK(rr.epsilon == 0.0);
  }
  SUBCASE("nilpotent") {
    Matrix M(2, 2);
    M << 0.0, 1.0, 0.0, 0.0;
    const RateReport rr = spectral_radius(M);
    CHECK(rr.spectral_radius == doctest::Approx(0.0));
    CHECK(rr.reported_rate <= kRateEpsilon + 1e-12);
  }
  SUBCASE("symmetric two-by-two") {
    Matrix M(2, 2);
    M << 0.9, 0.1, 0.1, 0.9;
    const RateReport rr = spectral_radius(M);
    CHECK(rr.spectral_radius == doctest::Approx(1.0));
    CHECK(rr.dominant_semisimple);
  }
  SUBCASE("dominant Jordan block adds slack") {
    Matrix M(2, 2);
    M << 0.9, 1.0, 0.0, 0.9;
    const RateReport rr = spectral_radius(M);
    CHECK(rr.spectral_radius == doctest::Approx(0.9));
    CHECK_FALSE(rr.dominant_semisimple);
    CHECK(rr.epsilon == kRateEpsilon);
    CHECK(rr.reported_rate == doctest::Approx(0.9 + kRateEpsilon));
  }
  SUBCASE("complex dominant pair is semisimple") {
    const double c = 0.8 * std::cos(0.7);
    const double s = 0.8 * std::sin(0.7);
    Matrix M(2, 2);
    M << c, s, -s, c;
    const RateReport rr = spectral_radius(M);
    CHECK(rr.spectral_radius == doctest::Approx(0.8));
    CHECK(rr.dominant_semisimple);
  }
  SUBCASE("power sub-multiplicativity sanity") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix M = testutil::random_matrix(gen, 4, 4, -0.5, 0.5);
      const RateReport rr = spectral_radius(M);
      for (long k : {5L, 20L, 50L}) {
        const double s_k =
            spectral_radius(matrix_power(M, k)).spectral_radius;
        CHECK(std::pow(s_k, 1.0 / static_cast<double>(k)) <=
              rr.reported_rate + 1e-9);
      }
    }
  }
  SUBCASE("non-square rejected") {
    CHECK_THROWS_AS(spectral_radius(Matrix::Ones(2, 3)), InvalidInputError);
  }
}

TEST_CASE("lyapunov_certificate") {
  SUBCASE("zero map gives the identity certificate") {
    LTISystem sys(Matrix::Zero(2, 2), Matrix::Identity(2, 2));
    const LyapunovCertificate cert = lyapunov_certificate(sys, 0.5);
    CHECK(rel_diff(cert.V, Matrix::Identity(2, 2)) < 1e-12);
    CHECK(cert.kappa > 0.0);
  }
  SUBCASE("scalar solve") {
    LTISystem sys(scalar(0.5), scalar(1.0));
    const LyapunovCertificate cert = lyapunov_certificate(sys, 0.9);
    const double expected = 1.0 / (1.0 - (0.5 / 0.9) * (0.5 / 0.9));
    CHECK(cert.V(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("one-step quadratic inequality holds on random samples") {
    std::mt19937_64 gen(17);
    Matrix H = testutil::random_matrix(gen, 3, 3, -0.35, 0.35);
    LTISystem sys(H, testutil::random_matrix(gen, 3, 2, -1.0, 1.0));
    const double rho = 0.95;
    REQUIRE(spectral_radius(sys.H).spectral_radius < rho);
    const LyapunovCertificate cert = lyapunov_certificate(sys, rho);

    // V positive definite and the decay inequality strict.
    Eigen::SelfAdjointEigenSolver<Matrix> es(cert.V);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    const Matrix decay =
        sys.H.transpose() * cert.V * sys.H - rho * rho * cert.V;
    Eigen::SelfAdjointEigenSolver<Matrix> es2(sym(decay));
    CHECK(es2.eigenvalues().maxCoeff() < 0.0);

    for (int trial = 0; trial < 10000; ++trial) {
      const Vector x = testutil::random_vector(gen, 3, -5.0, 5.0);
      const Vector u = testutil::random_vector(gen, 2, -5.0, 5.0);
      const Vector xn = sys.H * x + sys.G * u;
      const double lhs = xn.dot(cert.V * xn);
      const double rhs = rho * rho * x.dot(cert.V * x) +
                         cert.kappa * u.squaredNorm();
      CHECK(lhs <= rhs + 1e-9 * (1.0 + rhs));
    }
  }
  SUBCASE("rate at or above rho rejected") {
    LTISystem sys(scalar(0.95), scalar(1.0));
    CHECK_THROWS_AS(lyapunov_certificate(sys, 0.9), AnalysisError);
  }
  SUBCASE("rho outside the unit interval rejected") {
    LTISystem sys(scalar(0.5), scalar(1.0));
    CHECK_THROWS_AS(lyapunov_certificate(sys, 1.5), InvalidInputError);
  }
}

TEST_CASE("decaying-input trajectory stays inside a geometric envelope") {
  // Input u^k = u_inf + w·rho_u^k; the state error should decay at
  // max{reported rate of H, rho_u} with a fitted constant that does not grow
  // with the horizon.
  std::mt19937_64 gen(23);
  Matrix H = testutil::random_matrix(gen, 3, 3, -0.35, 0.35);
  LTISystem sys(H, testutil::random_matrix(gen, 3, 2, -1.0, 1.0));
  const Vector u_inf = testutil::random_vector(gen, 2, -1.0, 1.0);
  const Vector w = testutil::random_vector(gen, 2, -1.0, 1.0);
  const double rho_u = 0.8;
  const double rate =
      std::max(spectral_radius(sys.H).reported_rate, rho_u);
  REQUIRE(rate < 1.0);

  const Vector x_inf = lti_steady_state(sys, u_inf);
  std::vector<Vector> inputs;
  for (int k = 0; k < 200; ++k) {
    inputs.push_back(u_inf + std::pow(rho_u, k) * w);
  }
  const auto traj =
      lti_trajectory(sys, testutil::random_vector(gen, 3, -1.0, 1.0), inputs,
                     200);

  // Below the rounding floor the error stops tracking rate^k, so the fit
  // skips those steps (same convention as the envelope fit).
  const double floor = 1e-9 * (1.0 + x_inf.norm());
  auto fit_C0 = [&](int horizon) {
    double c = 0.0;
    double pow_rate = 1.0;
    for (int k = 0; k <= horizon; ++k) {
      const double err = (traj[k] - x_inf).norm();
      if (err > floor) c = std::max(c, err / pow_rate);
      pow_rate *= rate;
    }
    return c;
  };
  const double c100 = fit_C0(100);
  const double c200 = fit_C0(200);
  CHECK(std::isfinite(c200));
  CHECK(c200 <= c100 * (1.0 + 1e-9));
}
