#include "valuecast/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "valuecast/csv.hpp"
#include "valuecast/error.hpp"
#include "valuecast/eval.hpp"
#include "valuecast/random.hpp"
#include "valuecast/text.hpp"

namespace valuecast::eval {

using models::ModelKind;

std::string to_string(Condition c) {
  switch (c) {
    case Condition::kDefault: return "default";
    case Condition::kIndependentTpe: return "I-TPE";
    case Condition::kMultivariateTpe: return "M-TPE";
  }
  return "default";
}

Condition parse_condition(const std::string& name) {
  const std::string s = text::to_lower(text::trim(name));
  if (s == "default") return Condition::kDefault;
  if (s == "i-tpe" || s == "itpe") return Condition::kIndependentTpe;
  if (s == "m-tpe" || s == "mtpe") return Condition::kMultivariateTpe;
  throw Error(ErrorCode::kInvalidArgument, "unknown condition '" + name + "'");
}

bool cell_runs(ModelKind model, Condition condition) {
  if (model == ModelKind::kLm) return condition == Condition::kDefault;
  if (model == ModelKind::kLeafwisePruning) return condition != Condition::kDefault;
  return true;
}

std::string CellResult::slug() const {
  std::string s = models::to_string(model) + "_" + to_string(condition);
  for (char& c : s) {
    if (c == '+') c = 'p';
  }
  return text::to_lower(s);
}

const CellResult* EvalReport::find(ModelKind model, Condition condition) const {
  for (const auto& c : cells) {
    if (c.model == model && c.condition == condition) return &c;
  }
  return nullptr;
}

double cv_objective(ModelKind model, const hpo::Params& params,
                    const features::FeatureMatrix& train, std::size_t folds,
                    std::uint64_t fold_seed, std::uint64_t model_seed,
                    const std::function<bool(std::size_t, double)>& after_fold,
                    std::vector<double>* fold_scores) {
  const auto fit = [&](const features::FeatureMatrix& tr, const features::FeatureMatrix& va) {
    return models::fit_model(model, params, tr, model_seed)->predict(va);
  };
  const auto scores = kfold_cv(train, folds, fit, fold_seed, after_fold);
  if (fold_scores) *fold_scores = scores;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

namespace {

std::uint64_t seed_for(std::uint64_t seed, std::uint64_t stream) {
  return Rng::derive(seed, stream).next();
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::size_t model_index(ModelKind m) {
  return static_cast<std::size_t>(std::find(models::kAllModels.begin(), models::kAllModels.end(), m) -
                                  models::kAllModels.begin());
}

void run_cell(CellResult& cell, const features::FeatureMatrix& train,
              const features::FeatureMatrix& test, const BenchmarkConfig& config) {
  const std::uint64_t fold_seed = seed_for(config.seed, 2);
  const std::uint64_t cell_seed =
      seed_for(config.seed, 100 + 10 * model_index(cell.model) + static_cast<std::size_t>(cell.condition));
  const hpo::SearchSpace space = models::search_space(cell.model, static_cast<std::size_t>(train.cols()));

  hpo::Params chosen;
  std::vector<double> folds;
  if (cell.condition == Condition::kDefault) {
    chosen = space.defaults();
    cv_objective(cell.model, chosen, train, config.folds, fold_seed, cell_seed, {}, &folds);
    cell.fold_evaluations = folds.size();
  } else {
    hpo::StudyConfig sc;
    sc.sampler = cell.condition == Condition::kIndependentTpe ? hpo::SamplerKind::kIndependentTpe
                                                              : hpo::SamplerKind::kMultivariateTpe;
    sc.pruner = cell.model == ModelKind::kLeafwisePruning ? hpo::PrunerKind::kMedian
                                                          : hpo::PrunerKind::kNone;
    sc.n_trials = config.n_trials;
    sc.seed = cell_seed;
    const hpo::Objective objective = [&](const hpo::Params& p, hpo::TrialContext& ctx) {
      return cv_objective(cell.model, p, train, config.folds, fold_seed, cell_seed,
                          [&](std::size_t, double score) { return ctx.report(score); });
    };
    cell.study = hpo::run_study(objective, space, sc);
    const hpo::Trial* best = cell.study->best_trial();
    if (!best) throw Error(ErrorCode::kObjectiveFailure, "no trial completed");
    chosen = best->params;
    folds = best->intermediate;
    cell.trials = cell.study->trials.size();
    cell.pruned_trials = cell.study->count(hpo::TrialState::kPruned);
    cell.fold_evaluations = cell.study->step_evaluations();
  }
  cell.params = models::describe_params(space, chosen);
  cell.cv_rmse_mean = std::accumulate(folds.begin(), folds.end(), 0.0) / static_cast<double>(folds.size());
  cell.cv_rmse_std = sample_std(folds);

  const std::size_t repeats = std::max<std::size_t>(config.repeat, 1);
  double sum_rmse = 0, sum_mae = 0;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto model = models::fit_model(cell.model, chosen, train, seed_for(cell_seed, 1000 + r));
    const Eigen::VectorXd pred = model->predict(test);
    const double e2 = rmse(test.y, pred);
    const double e1 = mae(test.y, pred);
    if (!(e2 >= e1 - 1e-9 * std::max(1.0, e2) && e1 >= 0)) {
      throw Error(ErrorCode::kInvalidArgument, "RMSE below MAE");
    }
    sum_rmse += e2;
    sum_mae += e1;
  }
  cell.test_rmse = sum_rmse / static_cast<double>(repeats);
  cell.test_mae = sum_mae / static_cast<double>(repeats);
}

}  // namespace

EvalReport run_benchmark(const features::FeatureMatrix& m, const BenchmarkConfig& config,
                         const std::function<void(const CellResult&)>& progress) {
  const auto [train, test] = train_test_split(m, config.test_fraction, seed_for(config.seed, 1));
  EvalReport report;
  for (ModelKind model : config.models) {
    for (Condition condition : config.conditions) {
      if (!cell_runs(model, condition)) continue;
      CellResult cell;
      cell.model = model;
      cell.condition = condition;
      const auto start = std::chrono::steady_clock::now();
      try {
        run_cell(cell, train, test, config);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cell.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (progress) progress(cell);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  csv::write_row(out, {"model", "condition", "test_rmse", "test_mae", "cv_rmse_mean", "cv_rmse_std",
                       "trials", "pruned_trials", "fold_evaluations", "params", "error"});
  for (const auto& c : report.cells) {
    const auto num = [&](double x) { return c.ok() ? text::format_double(x) : std::string(); };
    csv::write_row(out, {models::to_string(c.model), to_string(c.condition), num(c.test_rmse),
                         num(c.test_mae), num(c.cv_rmse_mean), num(c.cv_rmse_std),
                         std::to_string(c.trials), std::to_string(c.pruned_trials),
                         std::to_string(c.fold_evaluations), c.params, c.error});
  }
}

void write_report_text(std::ostream& out, const EvalReport& report) {
  out << std::left << std::setw(18) << "model" << std::setw(10) << "condition" << std::right
      << std::setw(12) << "test RMSE" << std::setw(12) << "test MAE" << std::setw(12) << "CV RMSE"
      << std::setw(10) << "CV sd" << std::setw(8) << "trials" << std::setw(8) << "pruned"
      << std::setw(8) << "folds" << '\n';
  for (const auto& c : report.cells) {
    out << std::left << std::setw(18) << models::to_string(c.model) << std::setw(10)
        << to_string(c.condition) << std::right;
    if (!c.ok()) {
      out << "  failed: " << c.error << '\n';
      continue;
    }
    out << std::setw(12) << text::format_fixed(c.test_rmse, 2) << std::setw(12)
        << text::format_fixed(c.test_mae, 2) << std::setw(12) << text::format_fixed(c.cv_rmse_mean, 2)
        << std::setw(10) << text::format_fixed(c.cv_rmse_std, 2) << std::setw(8) << c.trials
        << std::setw(8) << c.pruned_trials << std::setw(8) << c.fold_evaluations << '\n';
  }
}

void write_report_timing(std::ostream& out, const EvalReport& report) {
  out << "model,condition,wall_seconds\n";
  for (const auto& c : report.cells) {
    out << models::to_string(c.model) << ',' << to_string(c.condition) << ','
        << text::format_fixed(c.wall_seconds, 3) << '\n';
  }
}

}  // namespace valuecast::eval
