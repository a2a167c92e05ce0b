#include <doctest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "valuecast/boosting.hpp"
#include "valuecast/explain.hpp"
#include "valuecast/random.hpp"

using namespace valuecast;
using namespace valuecast::explain;

namespace {

boosting::TreeEnsemble random_ensemble(std::size_t p, int trees, Rng& rng) {
  boosting::TreeEnsemble m;
  m.num_features = p;
  m.learning_rate = rng.uniform(0.05, 1);
  m.base_score = rng.normal();
  for (int t = 0; t < trees; ++t) m.trees.push_back(oracle::random_tree(p, 3, rng));
  return m;
}

std::vector<double> random_row(std::size_t p, Rng& rng) {
  std::vector<double> x(p);
  for (double& v : x) v = std::round(rng.uniform(-1.2, 1.2) * 8) / 8;
  return x;
}

boosting::TreeEnsemble fitted(Eigen::MatrixXd& X, Rng& rng) {
  X.resize(300, 6);
  Eigen::VectorXd y(300);
  for (Eigen::Index i = 0; i < 300; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) X(i, j) = rng.normal();
    X(i, 5) = static_cast<double>(rng.below(4));
    y(i) = X(i, 0) * X(i, 1) + std::abs(X(i, 2)) + X(i, 5);
  }
  boosting::BoostParams bp;
  bp.n_estimators = 40;
  bp.min_child_samples = 5;
  return boosting::fit_leafwise(X, y, bp, {5});
}

}  // namespace

TEST_SUITE("explain") {
  TEST_CASE("single split by hand") {
    boosting::Tree t;
    t.nodes.resize(3);
    t.nodes[0].kind = boosting::SplitKind::kNumeric;
    t.nodes[0].feature = 0;
    t.nodes[0].threshold = 0;
    t.nodes[0].left = 1;
    t.nodes[0].right = 2;
    t.nodes[0].cover = 4;
    t.nodes[1].value = 2;
    t.nodes[1].cover = 1;
    t.nodes[2].value = 6;
    t.nodes[2].cover = 3;
    CHECK(tree_expectation(t) == doctest::Approx(5.0));
    const std::vector<double> x{-1, 0};
    const auto phi = tree_shap(t, x, 2);
    CHECK(phi[0] == doctest::Approx(-3.0));
    CHECK(phi[1] == 0.0);
  }

  TEST_CASE("property: matches brute-force Shapley values on random small trees") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const std::size_t p = 1 + rng.below(5);
      const auto m = random_ensemble(p, 1 + static_cast<int>(rng.below(3)), rng);
      const auto x = random_row(p, rng);
      Eigen::MatrixXd X(1, static_cast<Eigen::Index>(p));
      for (std::size_t j = 0; j < p; ++j) X(0, static_cast<Eigen::Index>(j)) = x[j];
      const auto fast = tree_shap(m, X);
      const auto slow = brute_shapley(m, x);
      for (std::size_t j = 0; j < p; ++j) {
        CHECK(std::abs(fast.values(0, static_cast<Eigen::Index>(j)) - slow[j]) < 1e-8);
      }
    }
  }

  TEST_CASE("property: local accuracy, dummy and additivity on a fitted model") {
    Rng rng(1);
    Eigen::MatrixXd X;
    const auto m = fitted(X, rng);
    const auto e = tree_shap(m, X);
    CHECK(e.max_local_error < 1e-6);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      CHECK(std::abs(e.base_value + e.values.row(i).sum() - m.predict(X).coeff(i)) < 1e-6);
    }

    std::set<int> used;
    for (const auto& t : m.trees) {
      for (const auto& n : t.nodes) {
        if (!n.is_leaf()) used.insert(n.feature);
      }
    }
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (used.count(static_cast<int>(j))) continue;
      CHECK(e.values.col(j).cwiseAbs().maxCoeff() == 0.0);
    }

    for (Eigen::Index i = 0; i < 20; ++i) {
      const Eigen::VectorXd row = X.row(i);
      std::vector<double> sum(static_cast<std::size_t>(X.cols()), 0.0);
      for (const auto& t : m.trees) {
        const auto phi = tree_shap(t, std::span<const double>(row.data(), row.size()),
                                   static_cast<std::size_t>(X.cols()));
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += m.learning_rate * phi[j];
      }
      for (std::size_t j = 0; j < sum.size(); ++j) {
        CHECK(std::abs(sum[j] - e.values(i, static_cast<Eigen::Index>(j))) < 1e-9);
      }
    }
  }

  TEST_CASE("a feature never used gets exactly zero") {
    Rng rng(2);
    Eigen::MatrixXd X(200, 3);
    Eigen::VectorXd y(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
      X(i, 0) = rng.normal();
      X(i, 1) = rng.normal();
      X(i, 2) = 1.0;  // constant, never split on
      y(i) = X(i, 0) + 2 * X(i, 1);
    }
    boosting::BoostParams bp;
    bp.n_estimators = 10;
    const auto e = tree_shap(boosting::fit_leafwise(X, y, bp, {}), X);
    CHECK(e.values.col(2).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("errors") {
    Rng rng(3);
    auto m = random_ensemble(3, 1, rng);
    CHECK(support::error_code([&] { tree_shap(m, Eigen::MatrixXd::Zero(1, 2)); }) ==
          support::code(ErrorCode::kSchemaMismatch));
    m.trees[0].nodes[0].cover = 0;
    CHECK(support::error_code([&] { tree_shap(m, Eigen::MatrixXd::Zero(1, 3)); }) ==
          support::code(ErrorCode::kMissingCover));
    auto wide = random_ensemble(kBruteForceLimit + 1, 1, rng);
    const std::vector<double> x(kBruteForceLimit + 1, 0.0);
    CHECK(support::error_code([&] { brute_shapley(wide, x); }) ==
          support::code(ErrorCode::kTooManyFeatures));
  }

  TEST_CASE("summary ranking and csv output") {
    Rng rng(4);
    Eigen::MatrixXd X;
    const auto m = fitted(X, rng);
    std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
    const auto e = tree_shap(m, X, names);
    const auto top = shap_summary(e, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].mean_abs >= top[1].mean_abs);
    CHECK(top[1].mean_abs >= top[2].mean_abs);
    CHECK(top[0].mean_abs == doctest::Approx(e.values.col(static_cast<Eigen::Index>(top[0].column)).cwiseAbs().mean()));
    CHECK(support::error_code([&] { shap_summary(e, 7); }) ==
          support::code(ErrorCode::kInvalidArgument));
    std::ostringstream a, b;
    write_shap_csv(a, e);
    write_summary_csv(b, top);
    CHECK(a.str().rfind("row,prediction,base_value,a,b,c,d,e,f\n", 0) == 0);
    CHECK(b.str().rfind("rank,feature,column,mean_abs_shap\n", 0) == 0);
  }
}
