#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "valuecast/linear.hpp"
#include "valuecast/random.hpp"

using namespace valuecast;
using namespace valuecast::linear;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, Rng& rng) {
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal() * (1 + j);
  }
  return X;
}

}  // namespace

TEST_SUITE("linear") {
  TEST_CASE("least squares recovers an exact linear target") {
    Rng rng(1);
    const Eigen::MatrixXd X = random_matrix(50, 4, rng);
    const Eigen::Vector4d w(1.5, -2, 0.25, 3);
    const Eigen::VectorXd y = (X * w).array() + 7.0;
    const auto m = fit_ols(X, y);
    CHECK((m.raw_weights() - w).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(m.raw_intercept() == doctest::Approx(7.0).epsilon(1e-9));
    CHECK((m.predict(X) - y).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("duplicated column is a singular design") {
    Rng rng(2);
    Eigen::MatrixXd X = random_matrix(30, 3, rng);
    X.col(2) = 2 * X.col(0);
    const Eigen::VectorXd y = X.col(1);
    CHECK(support::error_code([&] { fit_ols(X, y); }) ==
          support::code(ErrorCode::kSingularDesign));
    CHECK_NOTHROW(fit_ridge(X, y, 1e-8));
  }

  TEST_CASE("constant columns get zero weight") {
    Rng rng(3);
    Eigen::MatrixXd X = random_matrix(40, 3, rng);
    X.col(1).setConstant(4.0);
    const Eigen::VectorXd y = X.col(0) + X.col(2);
    const auto m = fit_lasso(X, y, 1e-3);
    CHECK(m.weights(1) == 0.0);
  }

  TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3, 1) == 2);
    CHECK(soft_threshold(-3, 1) == -2);
    CHECK(soft_threshold(0.5, 1) == 0);
  }

  TEST_CASE("lasso matches closed form on orthonormal designs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const Eigen::MatrixXd Z = oracle::orthonormal_design(64, 8, rng);
      Eigen::VectorXd y(64);
      for (Eigen::Index i = 0; i < 64; ++i) y(i) = Z.row(i).sum() * 0.3 + rng.normal();
      const double alpha = rng.uniform(0.01, 0.4);
      const auto m = fit_lasso(Z, y, alpha, 1e-12);
      CHECK((m.weights - oracle::orthonormal_lasso(Z, y, alpha)).cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("property: lasso objective never increases across sweeps") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(100 + seed);
      Eigen::MatrixXd X = random_matrix(60, 10, rng);
      X.col(3) = X.col(2) + 0.1 * X.col(4);  // correlated, so several sweeps are needed
      Eigen::VectorXd y(60);
      for (Eigen::Index i = 0; i < 60; ++i) y(i) = X(i, 0) - 2 * X(i, 2) + rng.normal();
      CoordinateDescentOptions opt;
      opt.alpha = rng.uniform(0.001, 0.2);
      opt.l1_ratio = seed % 2 ? 1.0 : 0.5;
      opt.tol = 1e-10;
      opt.record_objective = true;
      const auto m = fit_elastic_net(X, y, opt);
      REQUIRE(m.objective_trace.size() >= 2);
      for (std::size_t k = 1; k < m.objective_trace.size(); ++k) {
        CHECK(m.objective_trace[k] <= m.objective_trace[k - 1] * (1 + 1e-12) + 1e-15);
      }
    }
  }

  TEST_CASE("property: a larger alpha never grows the l1 norm") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(200 + seed);
      const Eigen::MatrixXd X = random_matrix(80, 6, rng);
      Eigen::VectorXd y(80);
      for (Eigen::Index i = 0; i < 80; ++i) y(i) = X.row(i).sum() + 3 * rng.normal();
      double previous = std::numeric_limits<double>::infinity();
      for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.3, 1.0}) {
        const double l1 = fit_lasso(X, y, alpha, 1e-12).weights.lpNorm<1>();
        CHECK(l1 <= previous + 1e-9);
        previous = l1;
      }
    }
  }

  TEST_CASE("elastic net with l1_ratio 1 is the lasso") {
    Rng rng(5);
    const Eigen::MatrixXd X = random_matrix(50, 5, rng);
    const Eigen::VectorXd y = X.col(0) - X.col(3);
    CoordinateDescentOptions opt;
    opt.alpha = 0.05;
    opt.l1_ratio = 1.0;
    const auto a = fit_elastic_net(X, y, opt);
    const auto b = fit_lasso(X, y, 0.05);
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("iteration cap leaves converged false") {
    Rng rng(6);
    Eigen::MatrixXd X = random_matrix(40, 6, rng);
    X.col(1) = X.col(0) + 1e-3 * X.col(2);
    const Eigen::VectorXd y = X.col(0);
    const auto m = fit_lasso(X, y, 1e-6, 1e-14, 2);
    CHECK_FALSE(m.converged);
    CHECK(m.sweeps == 2);
  }

  TEST_CASE("kernel ridge dual solves the regularized system") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(300 + seed);
      const Eigen::MatrixXd X = random_matrix(100, 5, rng);
      Eigen::VectorXd y(100);
      for (Eigen::Index i = 0; i < 100; ++i) y(i) = X(i, 0) * X(i, 1) + rng.normal();
      Kernel k;
      k.type = seed % 2 ? Kernel::Type::kRbf : Kernel::Type::kPolynomial;
      k.gamma = 0.2;
      const double alpha = rng.uniform(0.1, 2);
      const auto m = fit_krr(X, y, alpha, k);
      const Eigen::MatrixXd K = gram(k, m.training_points, m.training_points);
      const Eigen::VectorXd centered = y.array() - y.mean();
      const Eigen::VectorXd r =
          (K + alpha * Eigen::MatrixXd::Identity(100, 100)) * m.dual - centered;
      CHECK(r.cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("kernel values") {
    Kernel poly;
    poly.gamma = 0.5;
    poly.coef0 = 1;
    poly.degree = 2;
    const Eigen::Vector2d a(1, 2), b(3, -1);
    CHECK(poly(a, b) == doctest::Approx(std::pow(0.5 * 1 + 1, 2)));
    Kernel rbf;
    rbf.type = Kernel::Type::kRbf;
    rbf.gamma = 0.1;
    CHECK(rbf(a, b) == doctest::Approx(std::exp(-0.1 * 13)));
  }

  TEST_CASE("model text round-trip") {
    Rng rng(8);
    const Eigen::MatrixXd X = random_matrix(30, 3, rng);
    const Eigen::VectorXd y = X.col(0) + 0.5 * X.col(2);
    const auto lin = fit_lasso(X, y, 0.01);
    std::stringstream s1;
    write_model(s1, lin);
    CHECK(read_linear_model(s1).predict(X) == lin.predict(X));
    const auto krr = fit_krr(X, y, 0.5, Kernel{});
    std::stringstream s2;
    write_model(s2, krr);
    CHECK(read_kernel_model(s2).predict(X) == krr.predict(X));
  }
}
