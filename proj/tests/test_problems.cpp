#include <doctest.h>

#include <cmath>

#include "egaa/problems.hpp"
#include "egaa/rng.hpp"
#include "test_util.hpp"

using namespace egaa;
using egaa::test::fd_gradient;
using egaa::test::fd_hvp;

namespace {

void check_first_order_consistency(const ProblemOracle& p, std::uint64_t seed,
                                   double scale = 1.0) {
  Rng rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = scale * rng.normal_vector(p.dimension());
    const Eigen::VectorXd g = p.gradient(x);
    const Eigen::VectorXd g_fd = fd_gradient(p, x);
    const double denom = std::max(1.0, g.norm());
    CHECK((g - g_fd).norm() / denom <= 1e-5);
  }
  // hvp against a finite difference of the gradient itself
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd x = scale * rng.normal_vector(p.dimension());
    const Eigen::VectorXd v = rng.normal_vector(p.dimension());
    const Eigen::VectorXd hv = p.hvp(x, v);
    const Eigen::VectorXd hv_fd = fd_hvp(p, x, v);
    CHECK((hv - hv_fd).norm() / std::max(1.0, hv.norm()) <= 1e-4);
  }
}

}  // namespace

TEST_CASE("quadratic oracle") {
  SUBCASE("metadata of the benchmark instance") {
    const auto p = make_quadratic(100, 50.0);
    CHECK(p.metadata().lipschitz_L.value() == 50.0);
    CHECK(p.metadata().strong_convexity_mu.value() == 1.0);
    CHECK(p.metadata().minimizer_value_fstar.value() == 0.0);
  }
  SUBCASE("kappa = 1 is the identity spectrum") {
    const auto p = make_quadratic(2, 1.0);
    Eigen::Vector2d x(0.7, -0.3);
    CHECK(p.gradient(x) == x);
  }
  SUBCASE("n = 3, kappa = 3 has eigenvalues 1,2,3") {
    const auto p = make_quadratic(3, 3.0);
    Eigen::Vector3d ones(1.0, 1.0, 1.0);
    CHECK(p.value(ones) == doctest::Approx(3.0).epsilon(1e-15));  // 1/2 (1+2+3)
  }
  SUBCASE("value and gradient exactly consistent") {
    const auto p = make_quadratic(7, 12.0);
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
      const Eigen::VectorXd x = rng.normal_vector(7);
      const Eigen::VectorXd g = p.gradient(x);
      CHECK(p.value(x) == doctest::Approx(0.5 * x.dot(g)).epsilon(1e-15));
    }
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(make_quadratic(3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_quadratic(0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(make_quadratic(3, 2.0, "log"), std::invalid_argument);
  }
  check_first_order_consistency(make_quadratic(20, 30.0), 11);
}

TEST_CASE("rosenbrock oracle") {
  SUBCASE("global minimum") {
    const auto p = make_rosenbrock(100.0);
    Eigen::Vector2d xstar(1.0, 1.0);
    CHECK(p.value(xstar) == 0.0);
    CHECK(p.gradient(xstar).norm() == 0.0);
  }
  SUBCASE("a = 1 at the origin") {
    const auto p = make_rosenbrock(1.0);
    CHECK(p.value(Eigen::Vector2d(0.0, 0.0)) == 1.0);
  }
  SUBCASE("a = 20 at the benchmark start point, direct formula") {
    const double a = 20.0;
    const Eigen::Vector2d x(-1.5, 1.5);
    const double want = std::pow(1.0 - x[0], 2) + a * std::pow(x[1] - x[0] * x[0], 2);
    const auto p = make_rosenbrock(a);
    CHECK(p.value(x) == doctest::Approx(want).epsilon(1e-15));
    CHECK(want == doctest::Approx(17.5));
  }
  SUBCASE("pre") { CHECK_THROWS_AS(make_rosenbrock(0.0), std::invalid_argument); }
  check_first_order_consistency(make_rosenbrock(5.0), 17);
}

TEST_CASE("logistic oracle") {
  const auto p = make_logistic(40, 8, 1e-3, 7);

  SUBCASE("value at zero is log 2") {
    CHECK(p.value(Eigen::VectorXd::Zero(8)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("single-sample closed form") {
    // With one sample and mu = 0 the gradient is -z / (1 + exp(z t)) where
    // z = y * a; recover z from the slope at 0 and check the whole curve.
    const auto q = make_logistic(1, 1, 0.0, 21);
    Eigen::VectorXd t(1);
    t[0] = 0.0;
    const double z = -2.0 * q.gradient(t)[0];
    for (double ti : {-1.0, 0.5, 2.0}) {
      t[0] = ti;
      const double want = -z / (1.0 + std::exp(z * ti));
      CHECK(q.gradient(t)[0] == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("reproducible data") {
    const auto p2 = make_logistic(40, 8, 1e-3, 7);
    const auto p3 = make_logistic(40, 8, 1e-3, 8);
    Rng rng(1);
    const Eigen::VectorXd x = rng.normal_vector(8);
    CHECK(p.value(x) == p2.value(x));
    CHECK(p.gradient(x) == p2.gradient(x));
    CHECK(p.value(x) != p3.value(x));
  }
  check_first_order_consistency(p, 23);
}

TEST_CASE("nnls oracle") {
  NnlsSpec spec;
  spec.samples_M = 80;
  spec.features_n = 30;
  spec.regularization_mu = 1e-4;
  spec.sparsity_p = 0.1;
  spec.noise_sigma = 0.3;
  spec.seed = 5;

  SUBCASE("condition number of the design matrix") {
    const auto p = make_nnls(spec);
    CHECK(p.metadata().condition_kappa.value() == doctest::Approx(1e4));
  }
  SUBCASE("projector clamps negatives") {
    const auto p = make_nnls(spec);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(30);
    x[0] = -1.0;
    x[1] = 2.0;
    const Eigen::VectorXd px = p.projector(x);
    CHECK(px[0] == 0.0);
    CHECK(px[1] == 2.0);
    CHECK(p.projector(px) == px);  // idempotent
  }
  SUBCASE("metadata L from the constructed spectrum") {
    const auto p = make_nnls(spec);
    CHECK(p.metadata().lipschitz_L.value() ==
          doctest::Approx(1.0 + 2.0 * spec.regularization_mu));
  }
  SUBCASE("reproducibility is bitwise") {
    const auto a = make_nnls(spec);
    const auto b = make_nnls(spec);
    Rng rng(2);
    const Eigen::VectorXd x = rng.normal_vector(30).cwiseAbs();
    CHECK(a.value(x) == b.value(x));
    CHECK(a.gradient(x) == b.gradient(x));
  }
  SUBCASE("parameter validation") {
    NnlsSpec bad = spec;
    bad.sparsity_p = 1.5;
    CHECK_THROWS_AS(make_nnls(bad), std::invalid_argument);
    bad = spec;
    bad.singular_low = 0.0;
    CHECK_THROWS_AS(make_nnls(bad), std::invalid_argument);
  }
  check_first_order_consistency(make_nnls(spec), 29);
}

TEST_CASE("nnls exact-fit identity") {
  // With sigma = 0 and mu = 0, b = A x_true bitwise, so the planted solution
  // is a zero-value, zero-residual point of the constrained problem.
  NnlsSpec clean;
  clean.samples_M = 60;
  clean.features_n = 20;
  clean.regularization_mu = 0.0;
  clean.sparsity_p = 0.15;
  clean.noise_sigma = 0.0;
  clean.seed = 9;
  const auto [p, x_true] = make_nnls_with_truth(clean);
  CHECK((x_true.array() >= 0.0).all());
  CHECK(p.value(x_true) == 0.0);
  CHECK(residual(p, x_true, 0.7).norm() == 0.0);
}

TEST_CASE("fixed point map and residual") {
  SUBCASE("stationary at a critical point") {
    const auto p = make_rosenbrock(3.0);
    const Eigen::Vector2d xstar(1.0, 1.0);
    CHECK(fixed_point_map(p, xstar, 0.2) == xstar);
    CHECK(residual(p, xstar, 0.2).norm() == 0.0);
  }
  SUBCASE("identity quadratic, beta = 1 maps to the origin") {
    const auto p = make_quadratic(2, 1.0);
    CHECK(fixed_point_map(p, Eigen::Vector2d(2.0, 0.0), 1.0) ==
          Eigen::Vector2d(0.0, 0.0));
  }
  SUBCASE("diag(1,2) residual") {
    const auto p = make_quadratic(2, 2.0);  // eigenvalues 1, 2
    const Eigen::VectorXd r = residual(p, Eigen::Vector2d(1.0, 1.0), 0.1);
    CHECK(r[0] == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(-0.2).epsilon(1e-15));
  }
  SUBCASE("projected residual component is zero on an active constraint") {
    NnlsSpec spec;
    spec.samples_M = 40;
    spec.features_n = 10;
    spec.seed = 3;
    spec.sparsity_p = 0.2;
    const auto p = make_nnls(spec);
    // At the origin every coordinate with positive gradient stays clamped.
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(10);
    const Eigen::VectorXd g = p.gradient(x);
    const Eigen::VectorXd r = residual(p, x, 0.5);
    for (int i = 0; i < 10; ++i)
      if (g[i] > 0.0) CHECK(r[i] == 0.0);
  }
  SUBCASE("pre") {
    const auto p = make_quadratic(2, 1.0);
    CHECK_THROWS_AS(fixed_point_map(p, Eigen::Vector2d(1.0, 1.0), 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("problem spec json round trip") {
  const ProblemSpec specs[] = {
      QuadraticSpec{100, 5000.0, "uniform"},
      RosenbrockSpec{20.0},
      LogisticSpec{500, 100, 1e-3, 7},
      NnlsSpec{},
  };
  for (const auto& s : specs) {
    const auto j = problem_spec_to_json(s);
    CHECK(problem_spec_from_json(j) == s);
  }
  CHECK_THROWS_AS(problem_spec_from_json(nlohmann::json{{"kind", "bogus"}}),
                  std::invalid_argument);
}

TEST_CASE("with_seed rewrites only seeded specs") {
  const ProblemSpec logistic = LogisticSpec{500, 100, 1e-3, 7};
  CHECK(std::get<LogisticSpec>(with_seed(logistic, 42)).seed == 42);
  const ProblemSpec nnls = NnlsSpec{};
  CHECK(std::get<NnlsSpec>(with_seed(nnls, 42)).seed == 42);
  const ProblemSpec quad = QuadraticSpec{10, 5.0, "uniform"};
  CHECK(with_seed(quad, 42) == quad);  // nothing to reseed
}
