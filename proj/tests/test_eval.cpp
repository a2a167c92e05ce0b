#include <doctest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "support.hpp"
#include "valuecast/benchmark.hpp"
#include "valuecast/eval.hpp"
#include "valuecast/models.hpp"
#include "valuecast/random.hpp"

using namespace valuecast;
using namespace valuecast::eval;
using models::ModelKind;

namespace {

const features::FeatureMatrix& small_matrix() {
  static const auto m = support::synthetic_matrix(120, 21);
  return m;
}

std::string csv_of(const EvalReport& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("metric examples") {
    const Eigen::Vector2d y(1, 2);
    CHECK(rmse(y, y) == 0);
    CHECK(mae(y, y) == 0);
    const Eigen::Vector2d p(4, 6);
    CHECK(rmse(y, p) == doctest::Approx(std::sqrt(12.5)));
    CHECK(mae(y, p) == doctest::Approx(3.5));
    const Eigen::Vector2d off = y.array() + 2.5;
    CHECK(rmse(y, off) == doctest::Approx(2.5));
    CHECK(mae(y, off) == doctest::Approx(2.5));
    CHECK(support::error_code([&] { rmse(y, Eigen::Vector3d::Zero()); }) ==
          support::code(ErrorCode::kLengthMismatch));
    CHECK(support::error_code([] { mae(Eigen::VectorXd(), Eigen::VectorXd()); }) ==
          support::code(ErrorCode::kEmptyDataset));
  }

  TEST_CASE("property: rmse is never below mae") {
    Rng rng(1);
    for (int t = 0; t < 500; ++t) {
      const auto n = static_cast<Eigen::Index>(1 + rng.below(50));
      Eigen::VectorXd y(n), p(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = rng.normal();
        p(i) = rng.uniform() < 0.1 ? 100 * rng.normal() : rng.normal();
      }
      CHECK(rmse(y, p) >= mae(y, p) * (1 - 1e-12));
    }
  }

  TEST_CASE("train/test split") {
    const auto s = train_test_split(10, 0.2, 1);
    CHECK(s.test.size() == 2);
    CHECK(s.train.size() == 8);
    CHECK(std::is_sorted(s.test.begin(), s.test.end()));
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 10);
    CHECK(train_test_split(2720, 0.2, 1).test.size() == 544);
    CHECK(support::error_code([] { train_test_split(10, 1.0, 1); }) != -1);
  }

  TEST_CASE("property: k-fold partition is exact and seed-deterministic") {
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
      const std::size_t k = 2 + rng.below(9);
      const std::size_t n = k + rng.below(200);
      const std::uint64_t seed = rng.next();
      const auto folds = kfold_indices(n, k, seed);
      REQUIRE(folds.size() == k);
      std::vector<int> seen(n, 0);
      for (std::size_t f = 0; f < k; ++f) {
        const std::size_t want = n / k + (f < n % k ? 1 : 0);
        CHECK(folds[f].size() == want);
        for (auto i : folds[f]) ++seen[i];
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      CHECK(kfold_indices(n, k, seed) == folds);
    }
    CHECK(support::error_code([] { kfold_indices(3, 4, 0); }) ==
          support::code(ErrorCode::kTooSmall));
    CHECK(support::error_code([] { kfold_indices(10, 1, 0); }) ==
          support::code(ErrorCode::kTooSmall));
  }

  TEST_CASE("cross-validation stops when asked") {
    const auto& m = small_matrix();
    const FitPredict mean_model = [](const features::FeatureMatrix& tr, const features::FeatureMatrix& va) {
      return Eigen::VectorXd::Constant(va.rows(), tr.y.mean()).eval();
    };
    CHECK(kfold_cv(m, 5, mean_model, 1).size() == 5);
    const auto two = kfold_cv(m, 5, mean_model, 1, [](std::size_t f, double) { return f == 1; });
    CHECK(two.size() == 2);
  }

  TEST_CASE("model names and spaces") {
    CHECK(models::parse_model("enet") == ModelKind::kElasticNet);
    CHECK(models::parse_model("E-NET") == ModelKind::kElasticNet);
    CHECK(models::parse_model("leafwise+pruning") == ModelKind::kLeafwisePruning);
    CHECK(support::error_code([] { models::parse_model("svm"); }) ==
          support::code(ErrorCode::kInvalidArgument));
    for (auto kind : models::kAllModels) {
      CHECK(models::parse_model(models::to_string(kind)) == kind);
      const auto space = models::search_space(kind, 10);
      CHECK_NOTHROW(space.validate());
      CHECK(space.contains(space.defaults()));
    }
    CHECK(models::search_space(ModelKind::kLm, 10).size() == 0);
    const auto gbdt = models::search_space(ModelKind::kGbdt, 10);
    CHECK(gbdt.domains[gbdt.index("n_estimators")].lo == 50);
    CHECK(gbdt.domains[gbdt.index("n_estimators")].hi == 3000);
  }

  TEST_CASE("every model fits, predicts and round-trips through text") {
    const auto& m = small_matrix();
    const auto [train, test] = train_test_split(m, 0.25, 3);
    for (auto kind : models::kAllModels) {
      const auto space = models::search_space(kind, static_cast<std::size_t>(m.cols()));
      auto params = space.defaults();
      if (models::is_tree_model(kind)) params[space.index("n_estimators")] = 50;
      const auto model = models::fit_model(kind, params, train, 7);
      const Eigen::VectorXd pred = model->predict(test);
      CHECK(pred.allFinite());
      CHECK(static_cast<bool>(model->ensemble()) == models::is_tree_model(kind));
      std::stringstream s;
      models::save_model(s, *model);
      const auto back = models::load_model(s);
      CHECK(back->kind() == kind);
      CHECK((back->predict(test) - pred).cwiseAbs().maxCoeff() <= 1e-9 * (1 + pred.cwiseAbs().maxCoeff()));
    }
  }

  TEST_CASE("cell rules") {
    CHECK(cell_runs(ModelKind::kLm, Condition::kDefault));
    CHECK_FALSE(cell_runs(ModelKind::kLm, Condition::kIndependentTpe));
    CHECK_FALSE(cell_runs(ModelKind::kLeafwisePruning, Condition::kDefault));
    CHECK(cell_runs(ModelKind::kLeafwisePruning, Condition::kMultivariateTpe));
    CHECK(cell_runs(ModelKind::kGbdt, Condition::kIndependentTpe));
    CHECK(parse_condition("itpe") == Condition::kIndependentTpe);
    CHECK(parse_condition("M-TPE") == Condition::kMultivariateTpe);
  }

  TEST_CASE("LM under default alone gives a one-cell report") {
    BenchmarkConfig cfg;
    cfg.models = {ModelKind::kLm};
    cfg.conditions = {Condition::kDefault};
    cfg.seed = 1;
    const auto r = run_benchmark(small_matrix(), cfg);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].ok());
    CHECK(r.cells[0].test_rmse >= r.cells[0].test_mae);
    CHECK(r.cells[0].fold_evaluations == 5);
  }

  TEST_CASE("property: dropping a model leaves the other cells bit-identical") {
    BenchmarkConfig cfg;
    cfg.models = {ModelKind::kLasso, ModelKind::kLeafwise, ModelKind::kLeafwisePruning};
    cfg.conditions = {Condition::kDefault, Condition::kIndependentTpe};
    cfg.n_trials = 6;
    cfg.folds = 3;
    cfg.repeat = 1;
    cfg.seed = 4;
    const auto both = run_benchmark(small_matrix(), cfg);
    cfg.models = {ModelKind::kLeafwisePruning, ModelKind::kLasso};
    const auto fewer = run_benchmark(small_matrix(), cfg);
    for (const auto& c : fewer.cells) {
      const CellResult* twin = both.find(c.model, c.condition);
      REQUIRE(twin);
      CHECK(twin->test_rmse == c.test_rmse);
      CHECK(twin->test_mae == c.test_mae);
      CHECK(twin->params == c.params);
      CHECK(twin->fold_evaluations == c.fold_evaluations);
    }
    CHECK(csv_of(run_benchmark(small_matrix(), cfg)) == csv_of(fewer));
  }

  TEST_CASE("failing cells do not stop the benchmark") {
    auto m = small_matrix();
    m.X.col(0).setConstant(1.0);
    m.X.col(1) = m.X.col(0);
    BenchmarkConfig cfg;
    cfg.models = {ModelKind::kLm, ModelKind::kLasso};
    cfg.conditions = {Condition::kDefault};
    cfg.seed = 2;
    cfg.test_fraction = 0.99;  // 1 training row
    const auto r = run_benchmark(m, cfg);
    CHECK(r.cells.size() == 2);
    for (const auto& c : r.cells) CHECK_FALSE(c.ok());
    std::ostringstream text;
    write_report_text(text, r);
    CHECK(text.str().find("failed") != std::string::npos);
  }
}
