#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "support.hpp"
#include "valuecast/binning.hpp"
#include "valuecast/boosting.hpp"
#include "valuecast/random.hpp"
#include "valuecast/tree.hpp"

using namespace valuecast;
using namespace valuecast::boosting;

namespace {

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Problem random_problem(Eigen::Index n, Eigen::Index p, Rng& rng, bool rounded = false) {
  Problem pr{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = rng.normal();
      pr.X(i, j) = rounded ? std::round(v * 4) / 4 : v;
    }
    pr.y(i) = std::sin(2 * pr.X(i, 0)) + (p > 1 ? pr.X(i, 1) * pr.X(i, 1) : 0) + 0.3 * rng.normal();
  }
  return pr;
}

std::vector<HistBin> random_hist(std::size_t k, Rng& rng) {
  std::vector<HistBin> h(k);
  for (auto& b : h) {
    if (rng.uniform() < 0.15) continue;  // category absent from the node
    b.count = 1 + static_cast<std::uint32_t>(rng.below(10));
    b.sum_hessian = b.count;
    b.sum_gradient = rng.normal() * b.count;
  }
  return h;
}

}  // namespace

TEST_SUITE("boosting") {
  TEST_CASE("numeric bins") {
    const std::vector<double> col{3, 1, 2, 2, 5};
    const auto m = fit_numeric_bins(col, 255);
    CHECK(m.num_bins() == 4);
    CHECK(m.threshold(0) == 1.5);
    CHECK(m.bin(1) == 0);
    CHECK(m.bin(2) == 1);
    CHECK(m.bin(2.5) == 1);  // on the threshold goes left
    CHECK(m.bin(2.6) == 2);
    CHECK(m.bin(5) == 3);
    CHECK(m.bin(100) == 3);
    CHECK(support::error_code([&] { fit_numeric_bins(col, 1); }) ==
          support::code(ErrorCode::kInvalidArgument));
    std::vector<double> many(1000);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<double>(i);
    const auto coarse = fit_numeric_bins(many, 10);
    CHECK(coarse.num_bins() <= 10);
    CHECK(coarse.bin(0) == 0);
    CHECK(coarse.bin(999) == coarse.num_bins() - 1);
  }

  TEST_CASE("categorical bins") {
    const std::vector<double> col{4, 1, 4, 2};
    const auto m = fit_categorical_bins(col);
    CHECK(m.categorical);
    CHECK(m.num_bins() == 3);
    CHECK(m.bin(1) == 0);
    CHECK(m.bin(4) == 2);
    CHECK(m.bin(7) == 3);  // unseen
  }

  TEST_CASE("property: histogram subtraction equals direct construction") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Rng rng(seed);
      const std::size_t n = 50 + rng.below(300);
      std::vector<double> col(n), g(n), h(n);
      for (std::size_t i = 0; i < n; ++i) {
        col[i] = std::round(rng.normal() * 10);
        g[i] = rng.normal();
        h[i] = rng.uniform(0.5, 2);
      }
      const auto mapper = fit_numeric_bins(col, 16);
      std::vector<BinIndex> codes(n);
      for (std::size_t i = 0; i < n; ++i) codes[i] = mapper.bin(col[i]);
      std::vector<std::uint32_t> all(n), left, right;
      for (std::size_t i = 0; i < n; ++i) {
        all[i] = static_cast<std::uint32_t>(i);
        (rng.uniform() < 0.4 ? left : right).push_back(static_cast<std::uint32_t>(i));
      }
      const auto k = static_cast<std::size_t>(mapper.num_bins());
      std::vector<HistBin> parent(k), child(k), direct(k), derived(k);
      build_histogram(codes, g, h, all, parent);
      build_histogram(codes, g, h, left, child);
      build_histogram(codes, g, h, right, direct);
      subtract_histogram(parent, child, derived);
      for (std::size_t b = 0; b < k; ++b) {
        CHECK(derived[b].count == direct[b].count);
        const double sg = std::max(1.0, std::abs(parent[b].sum_gradient));
        const double sh = std::max(1.0, std::abs(parent[b].sum_hessian));
        CHECK(std::abs(derived[b].sum_gradient - direct[b].sum_gradient) <= 1e-9 * sg);
        CHECK(std::abs(derived[b].sum_hessian - direct[b].sum_hessian) <= 1e-9 * sh);
      }
    }
  }

  TEST_CASE("split gain and leaf output") {
    CHECK(split_gain(-4, 2, 4, 2, 0) == doctest::Approx(16.0));
    CHECK(leaf_output(-4, 2, 0) == doctest::Approx(2.0));
    CHECK(leaf_output(-4, 2, 2) == doctest::Approx(1.0));
    SplitParams p;
    p.min_split_gain = 1;
    CHECK(admissible(2, p));
    CHECK_FALSE(admissible(0.5, p));
    CHECK_FALSE(admissible(0, SplitParams{}));
  }

  TEST_CASE("numeric split keeps the lowest bin on ties") {
    std::vector<HistBin> h(4);
    h[0] = {-1, 1, 1};
    h[1] = {0, 1, 1};
    h[2] = {0, 1, 1};
    h[3] = {1, 1, 1};
    const auto s = best_numeric_split(h, SplitParams{});
    REQUIRE(s);
    CHECK(s->bin == 0);
  }

  TEST_CASE("categorical prefix scan attains the subset optimum at lambda 0") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(seed);
      const auto h = random_hist(2 + rng.below(7), rng);
      SplitParams p;
      p.min_child_samples = 1;
      const double best = oracle::brute_categorical(h, 0, 1);
      const auto s = best_categorical_split(h, p);
      if (!(best > 0)) {
        CHECK_FALSE(s);
        continue;
      }
      REQUIRE(s);
      CHECK(s->gain == doctest::Approx(best).epsilon(1e-9));
    }
  }

  TEST_CASE("categorical split uses only present categories") {
    std::vector<HistBin> h(4);
    h[0] = {-3, 1, 1};
    h[2] = {3, 1, 1};
    h[3] = {2.5, 1, 1};
    const auto s = best_categorical_split(h, SplitParams{});
    REQUIRE(s);
    CHECK(s->left_bins == std::vector<int>{0});
    CHECK(s->right_bins == std::vector<int>{2, 3});
  }

  TEST_CASE("property: training rmse never increases with squared loss") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      const auto pr = random_problem(150, 4, rng);
      for (bool leafwise : {false, true}) {
        BoostParams bp = leafwise ? BoostParams::leafwise_defaults() : BoostParams::gbdt_defaults();
        bp.n_estimators = 60;
        bp.learning_rate = 0.3;
        bp.min_child_samples = 5;
        std::vector<double> trace;
        FitHooks hooks;
        hooks.train_rmse = &trace;
        if (leafwise) {
          fit_leafwise(pr.X, pr.y, bp, {}, hooks);
        } else {
          fit_gbdt(pr.X, pr.y, bp, hooks);
        }
        REQUIRE(trace.size() == 61);
        for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1] + 1e-12);
      }
    }
  }

  TEST_CASE("property: leaf-wise split is the exhaustive argmax") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const auto n = static_cast<Eigen::Index>(20 + rng.below(180));
      const auto p = static_cast<Eigen::Index>(1 + rng.below(10));
      const auto pr = random_problem(n, p, rng, true);
      BoostParams bp;
      bp.n_estimators = 3;
      bp.num_leaves = 2 + static_cast<int>(rng.below(12));
      bp.min_child_samples = 1 + static_cast<int>(rng.below(8));
      bp.lambda_l2 = seed % 2 ? 0.0 : 1.0;
      std::size_t events = 0;
      FitHooks hooks;
      hooks.on_split = [&](const SplitEvent& ev) {
        ++events;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < ev.leaf_rows->size(); ++l) {
          if (!(*ev.splittable)[l]) continue;
          const auto r = oracle::exhaustive_numeric(pr.X, (*ev.leaf_rows)[l], ev.gradients,
                                                    ev.hessians, bp.lambda_l2,
                                                    bp.min_child_samples, bp.min_split_gain);
          best = std::max(best, r.gain);
        }
        CHECK(ev.split->gain == doctest::Approx(best).epsilon(1e-9));
      };
      fit_leafwise(pr.X, pr.y, bp, {}, hooks);
      CHECK(events > 0);
    }
  }

  TEST_CASE("property: a fixed seed fixes the model") {
    Rng rng(4);
    const auto pr = random_problem(300, 6, rng);
    for (auto type : {BoostingType::kGbdt, BoostingType::kGoss}) {
      BoostParams bp;
      bp.n_estimators = 20;
      bp.feature_fraction = 0.5;
      bp.bagging_fraction = 0.7;
      bp.boosting_type = type;
      bp.seed = 99;
      const auto a = fit_leafwise(pr.X, pr.y, bp, {});
      const auto b = fit_leafwise(pr.X, pr.y, bp, {});
      CHECK(ensemble_to_string(a) == ensemble_to_string(b));
      bp.seed = 100;
      const auto c = fit_leafwise(pr.X, pr.y, bp, {});
      CHECK(ensemble_to_string(a) != ensemble_to_string(c));
    }
  }

  TEST_CASE("gbdt respects max depth and predicts through the ensemble") {
    Rng rng(5);
    const auto pr = random_problem(200, 3, rng);
    BoostParams bp = BoostParams::gbdt_defaults();
    bp.max_depth = 2;
    bp.n_estimators = 10;
    const auto m = fit_gbdt(pr.X, pr.y, bp);
    CHECK(m.trees.size() == 10);
    for (const auto& t : m.trees) CHECK(t.depth() <= 2);
    const Eigen::VectorXd a = m.predict(pr.X);
    const Eigen::VectorXd b = predict_ensemble(m, pr.X);
    CHECK(a == b);
    Eigen::VectorXd manual = Eigen::VectorXd::Constant(pr.y.size(), m.base_score);
    for (const auto& t : m.trees) {
      for (Eigen::Index i = 0; i < pr.X.rows(); ++i) {
        const Eigen::VectorXd row = pr.X.row(i);
        manual(i) += m.learning_rate * t.predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
      }
    }
    CHECK((manual - a).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("leaf-wise respects num_leaves and cover sums") {
    Rng rng(6);
    const auto pr = random_problem(300, 5, rng);
    BoostParams bp;
    bp.num_leaves = 7;
    bp.n_estimators = 5;
    const auto m = fit_leafwise(pr.X, pr.y, bp, {});
    for (const auto& t : m.trees) {
      CHECK(t.num_leaves() <= 7);
      CHECK(t.nodes[0].cover == doctest::Approx(300.0));
      for (const auto& n : t.nodes) {
        if (n.is_leaf()) continue;
        CHECK(n.cover == t.nodes[n.left].cover + t.nodes[n.right].cover);
      }
    }
  }

  TEST_CASE("native categorical splits and unseen categories") {
    Rng rng(7);
    Eigen::MatrixXd X(400, 2);
    Eigen::VectorXd y(400);
    const double effect[5] = {3, -2, 5, 0, -4};
    for (Eigen::Index i = 0; i < 400; ++i) {
      X(i, 0) = static_cast<double>(rng.below(5));
      X(i, 1) = rng.normal();
      y(i) = effect[static_cast<int>(X(i, 0))] + 0.1 * rng.normal();
    }
    BoostParams bp;
    bp.n_estimators = 50;
    bp.min_child_samples = 5;
    const auto m = fit_leafwise(X, y, bp, {0});
    bool has_cat = false;
    for (const auto& t : m.trees) {
      for (const auto& n : t.nodes) has_cat |= n.kind == SplitKind::kCategorical;
    }
    CHECK(has_cat);
    const Eigen::VectorXd pred = m.predict(X);
    CHECK((pred - y).norm() / std::sqrt(400.0) < 0.3);
    const std::vector<double> unseen{17, 0}, missing{std::nan(""), 0};
    CHECK(std::isfinite(m.predict(unseen)));
    CHECK(std::isfinite(m.predict(missing)));
  }

  TEST_CASE("robust losses") {
    Rng rng(8);
    auto pr = random_problem(200, 3, rng);
    for (Eigen::Index i = 0; i < 10; ++i) pr.y(i) += 50;  // outliers
    for (Loss loss : {Loss::kAbsolute, Loss::kHuber, Loss::kQuantile}) {
      BoostParams bp = BoostParams::gbdt_defaults();
      bp.loss = loss;
      bp.alpha = 0.5;
      bp.n_estimators = 30;
      const auto m = fit_gbdt(pr.X, pr.y, bp);
      CHECK(m.loss == loss);
      CHECK(m.predict(pr.X).allFinite());
    }
    BoostParams bp = BoostParams::gbdt_defaults();
    bp.loss = Loss::kAbsolute;
    bp.n_estimators = 0;
    std::vector<double> v(pr.y.data(), pr.y.data() + pr.y.size());
    CHECK(fit_gbdt(pr.X, pr.y, bp).base_score == doctest::Approx(quantile(v, 0.5)));
  }

  TEST_CASE("quantile is type 7") {
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({1, 2, 3, 4}, 0.9) == doctest::Approx(3.7));
    CHECK(quantile({5}, 0.3) == 5);
  }

  TEST_CASE("degenerate inputs") {
    Rng rng(9);
    const auto pr = random_problem(50, 2, rng);
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(50, 3.0);
    const auto m = fit_leafwise(pr.X, flat, BoostParams{}, {});
    CHECK(m.trees.empty());
    CHECK(m.base_score == 3.0);
    BoostParams bp;
    bp.min_child_samples = 30;
    CHECK(support::error_code([&] { fit_leafwise(pr.X, pr.y, bp, {}); }) ==
          support::code(ErrorCode::kTooSmall));
    BoostParams bad = BoostParams::gbdt_defaults();
    bad.max_depth = 0;
    CHECK(support::error_code([&] { fit_gbdt(pr.X, pr.y, bad); }) ==
          support::code(ErrorCode::kInvalidArgument));
    BoostParams lr;
    lr.learning_rate = 0;
    CHECK(support::error_code([&] { lr.validate(); }) ==
          support::code(ErrorCode::kInvalidArgument));
  }

  TEST_CASE("ensemble text round-trip and schema check") {
    Rng rng(10);
    Eigen::MatrixXd X(200, 3);
    Eigen::VectorXd y(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
      X(i, 0) = static_cast<double>(rng.below(4));
      X(i, 1) = rng.normal();
      X(i, 2) = rng.normal();
      y(i) = X(i, 0) * X(i, 1) + X(i, 2);
    }
    BoostParams bp;
    bp.n_estimators = 15;
    bp.min_child_samples = 5;
    const auto m = fit_leafwise(X, y, bp, {0});
    const std::string text = ensemble_to_string(m);
    const auto back = ensemble_from_string(text);
    CHECK(ensemble_to_string(back) == text);
    CHECK(back.predict(X) == m.predict(X));
    CHECK(support::error_code([&] { m.predict(Eigen::MatrixXd(3, 2)); }) ==
          support::code(ErrorCode::kSchemaMismatch));
    CHECK(support::error_code([&] { ensemble_from_string("valuecast-ensemble 1\nloss nope\n"); }) ==
          support::code(ErrorCode::kParse));
  }
}
