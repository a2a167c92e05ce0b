#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "valuecast/features.hpp"
#include "valuecast/models.hpp"
#include "valuecast/study.hpp"

namespace valuecast::eval {

enum class Condition { kDefault, kIndependentTpe, kMultivariateTpe };
inline constexpr std::array<Condition, 3> kAllConditions = {
    Condition::kDefault, Condition::kIndependentTpe, Condition::kMultivariateTpe};
std::string to_string(Condition c);            // default, I-TPE, M-TPE
Condition parse_condition(const std::string& name);  // also itpe, mtpe

// LM runs only untuned; the pruning variant only under a TPE sampler.
bool cell_runs(models::ModelKind model, Condition condition);

struct BenchmarkConfig {
  std::vector<models::ModelKind> models;
  std::vector<Condition> conditions;
  double test_fraction = 0.2;
  std::size_t folds = 5;
  std::size_t n_trials = 50;
  std::size_t repeat = 3;  // refits with different seeds for the test score
  std::uint64_t seed = 0;
};

struct CellResult {
  models::ModelKind model = models::ModelKind::kLm;
  Condition condition = Condition::kDefault;
  std::string error;  // empty on success
  double test_rmse = 0;  // mean over refits
  double test_mae = 0;
  double cv_rmse_mean = 0;  // folds of the chosen parameters
  double cv_rmse_std = 0;
  std::size_t trials = 0;
  std::size_t pruned_trials = 0;
  std::size_t fold_evaluations = 0;
  std::string params;
  std::optional<hpo::Study> study;
  double wall_seconds = 0;

  bool ok() const { return error.empty(); }
  std::string slug() const;  // file-name friendly "<model>_<condition>"
};

struct EvalReport {
  std::vector<CellResult> cells;
  const CellResult* find(models::ModelKind model, Condition condition) const;
};

// Seeds derive from (seed, model, condition), never from the position in the
// config, so dropping a model leaves the other cells unchanged. A failing
// cell records its error and the run continues.
EvalReport run_benchmark(const features::FeatureMatrix& m, const BenchmarkConfig& config,
                         const std::function<void(const CellResult&)>& progress = {});

// Cross-validated RMSE per fold for fixed parameters; used by the benchmark
// and the tune command. `after_fold` as in kfold_cv.
double cv_objective(models::ModelKind model, const hpo::Params& params,
                    const features::FeatureMatrix& train, std::size_t folds,
                    std::uint64_t fold_seed, std::uint64_t model_seed,
                    const std::function<bool(std::size_t, double)>& after_fold,
                    std::vector<double>* fold_scores = nullptr);

// Report files carry no timings so identical runs are byte-identical.
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_report_text(std::ostream& out, const EvalReport& report);
void write_report_timing(std::ostream& out, const EvalReport& report);

}  // namespace valuecast::eval
