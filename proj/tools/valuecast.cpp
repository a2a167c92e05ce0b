// valuecast: command-line front end for the market-value toolkit.
//
//   valuecast synth      --n 500 --seed 7 --out data/
//   valuecast ingest     --sofifa data/sofifa.csv --whoscored data/whoscored.csv --out run/
//   valuecast features   --players run/players.csv --out run/
//   valuecast correlate  --matrix run/features.csv --threshold 0.4 --out run/
//   valuecast train      --matrix run/features.csv --model leafwise --seed 7 --out run/
//   valuecast tune       --matrix run/features.csv --model leafwise --sampler itpe --trials 50 --seed 7 --out run/
//   valuecast explain    --matrix run/features.csv --model-file run/model.txt --out run/
//   valuecast benchmark  --matrix run/features.csv --seed 7 --out bench/
//
// Every option can also come from a key=value file given with --config; the
// key is the long option name without dashes and flags on the command line
// win. Usage errors exit with 2, data errors with 1.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "valuecast/benchmark.hpp"
#include "valuecast/config.hpp"
#include "valuecast/error.hpp"
#include "valuecast/eval.hpp"
#include "valuecast/explain.hpp"
#include "valuecast/features.hpp"
#include "valuecast/ingest.hpp"
#include "valuecast/models.hpp"
#include "valuecast/random.hpp"
#include "valuecast/study.hpp"
#include "valuecast/svg.hpp"
#include "valuecast/synth.hpp"
#include "valuecast/text.hpp"

namespace fs = std::filesystem;
using namespace valuecast;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = ".";
  // inputs
  std::string sofifa, whoscored, players, matrix, model_file, params, params_file;
  std::vector<std::string> clubs;
  // synth
  std::size_t n = 500;
  // correlate
  double threshold = 0.4;
  // modelling
  std::string model = "leafwise";
  double test_fraction = 0.2;
  std::size_t folds = 5;
  std::size_t trials = 50;
  std::string sampler = "itpe";
  std::string pruner = "none";
  bool resume = false;
  std::size_t top = 20;
  std::size_t synthetic = 0;
  std::vector<std::string> models;
  std::vector<std::string> conditions;
  std::size_t repeat = 3;
};

class Manifest {
 public:
  explicit Manifest(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = path(name);
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
    out << content;
    note(p);
  }

  void note(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

 private:
  fs::path dir_;
};

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw UsageError("a seed is required: pass --seed or set VALUECAST_SEED");
  return *o.seed;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("--") + what + " is required");
  if (!fs::exists(path)) throw UsageError(std::string(what) + " file not found: " + path);
}

template <typename F>
std::string render(F&& f) {
  std::ostringstream out;
  f(out);
  return out.str();
}

features::FeatureMatrix load_matrix(const Options& o) {
  if (!o.matrix.empty()) {
    require_file(o.matrix, "matrix");
    return features::read_matrix_csv(o.matrix);
  }
  if (!o.players.empty()) {
    require_file(o.players, "players");
    return features::build_matrix(ingest::read_players_csv(o.players));
  }
  throw UsageError("--matrix or --players is required");
}

// --params "a=1;b=2" or --params-file with key=value lines, on top of the
// model defaults.
hpo::Params resolve_params(const hpo::SearchSpace& space, const Options& o) {
  config::KeyValues kv;
  if (!o.params_file.empty()) {
    require_file(o.params_file, "params-file");
    kv = config::read_file(o.params_file);
  }
  if (!o.params.empty()) {
    std::string lines = o.params;
    for (char& c : lines) {
      if (c == ';') c = '\n';
    }
    for (auto& [k, v] : config::parse(lines)) kv[k] = v;
  }
  hpo::Params p = space.defaults();
  for (const auto& [key, value] : kv) {
    const std::size_t i = space.index(key);
    const hpo::Domain& d = space.domains[i];
    double x = 0;
    if (d.kind == hpo::Domain::Kind::kCategorical) {
      const auto it = std::find(d.choices.begin(), d.choices.end(), value);
      if (it == d.choices.end()) throw Error(ErrorCode::kInvalidArgument, "bad choice for " + key);
      x = static_cast<double>(it - d.choices.begin());
    } else {
      const auto v = text::parse_double(value);
      if (!v) throw Error(ErrorCode::kInvalidArgument, "bad number for " + key);
      x = *v;
    }
    if (!d.contains(x)) throw Error(ErrorCode::kInvalidArgument, key + " outside its domain");
    p[i] = x;
  }
  return p;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return Rng::derive(seed, stream).next();
}

// ---------------------------------------------------------------- commands

int cmd_synth(const Options& o) {
  const auto data = synth::generate(o.n, require_seed(o));
  Manifest m(o.out);
  m.write("sofifa.csv", render([&](std::ostream& s) { ingest::write_sofifa_csv(s, data.sofifa); }));
  m.write("whoscored.csv",
          render([&](std::ostream& s) { ingest::write_whoscored_csv(s, data.whoscored); }));
  return 0;
}

int cmd_ingest(const Options& o) {
  require_file(o.sofifa, "sofifa");
  require_file(o.whoscored, "whoscored");
  const auto sofifa = ingest::parse_sofifa_csv(o.sofifa);
  const auto whoscored = ingest::parse_whoscored_csv(o.whoscored);
  ingest::JoinSpec spec;
  spec.clubs = o.clubs;
  const auto merged = ingest::merge_sources(sofifa.rows, whoscored.rows, spec);
  const auto kept = ingest::drop_missing(merged.records);

  std::ostringstream issues;
  for (const auto& i : sofifa.issues) issues << ingest::format_issue(i, o.sofifa) << '\n';
  for (const auto& i : whoscored.issues) issues << ingest::format_issue(i, o.whoscored) << '\n';
  for (const auto& i : merged.rejected) issues << ingest::format_issue(i, o.sofifa) << '\n';
  for (const auto& k : merged.unmatched_sofifa) issues << "unmatched sofifa row: " << k << '\n';
  for (const auto& k : merged.unmatched_whoscored) issues << "unmatched whoscored row: " << k << '\n';

  Manifest m(o.out);
  m.write("players.csv", render([&](std::ostream& s) { ingest::write_players_csv(s, kept.records); }));
  m.write("ingest_issues.txt", issues.str());
  std::cout << "players " << kept.records.size() << ", dropped with missing fields "
            << kept.dropped << ", rejected rows "
            << sofifa.issues.size() + whoscored.issues.size() + merged.rejected.size()
            << ", unmatched " << merged.unmatched_sofifa.size() << " + "
            << merged.unmatched_whoscored.size() << '\n';
  return 0;
}

int cmd_features(const Options& o) {
  require_file(o.players, "players");
  const auto matrix = features::build_matrix(ingest::read_players_csv(o.players));
  Manifest m(o.out);
  m.write("features.csv", render([&](std::ostream& s) { features::write_matrix_csv(s, matrix); }));
  std::cout << matrix.rows() << " rows x " << matrix.cols() << " features\n";
  return 0;
}

int cmd_correlate(const Options& o) {
  const auto matrix = load_matrix(o);
  const auto report = features::correlation_report(matrix, o.threshold);
  Manifest m(o.out);
  m.write("correlation.csv",
          render([&](std::ostream& s) { features::write_correlation_csv(s, report); }));
  std::vector<svg::Bar> bars;
  for (const auto& c : report) bars.push_back({c.feature, c.r});
  m.write("correlation.svg",
          svg::bar_chart("Pearson r with market value (|r| >= " + text::format_double(o.threshold) + ")",
                         bars, "r"));
  std::cout << report.size() << " features with |r| >= " << text::format_double(o.threshold) << '\n';
  return 0;
}

int cmd_train(const Options& o) {
  const std::uint64_t seed = require_seed(o);
  const auto kind = models::parse_model(o.model);
  const auto matrix = load_matrix(o);
  const auto [train, test] = eval::train_test_split(matrix, o.test_fraction, stream_seed(seed, 1));
  const auto space = models::search_space(kind, static_cast<std::size_t>(matrix.cols()));
  const auto params = resolve_params(space, o);
  const auto model = models::fit_model(kind, params, train, stream_seed(seed, 3));
  const Eigen::VectorXd pred = model->predict(test);

  Manifest m(o.out);
  m.write("model.txt", render([&](std::ostream& s) { models::save_model(s, *model); }));
  const double e2 = eval::rmse(test.y, pred);
  const double e1 = eval::mae(test.y, pred);
  m.write("metrics.csv", render([&](std::ostream& s) {
            s << "model,params,train_rows,test_rows,test_rmse,test_mae\n";
            s << models::to_string(kind) << ",\"" << models::describe_params(space, params) << "\","
              << train.rows() << ',' << test.rows() << ',' << text::format_double(e2) << ','
              << text::format_double(e1) << '\n';
          }));
  std::cout << models::to_string(kind) << " test RMSE " << text::format_fixed(e2, 2) << ", MAE "
            << text::format_fixed(e1, 2) << '\n';
  return 0;
}

int cmd_tune(const Options& o) {
  const std::uint64_t seed = require_seed(o);
  const auto kind = models::parse_model(o.model);
  const auto matrix = load_matrix(o);
  const auto train = eval::train_test_split(matrix, o.test_fraction, stream_seed(seed, 1)).first;
  const auto space = models::search_space(kind, static_cast<std::size_t>(matrix.cols()));
  if (space.size() == 0) throw UsageError(models::to_string(kind) + " has no tunable parameters");

  hpo::StudyConfig sc;
  sc.sampler = hpo::parse_sampler(o.sampler);
  sc.pruner = hpo::parse_pruner(o.pruner);
  sc.n_trials = o.trials;
  sc.seed = seed;

  Manifest m(o.out);
  const fs::path log_path = m.path("study.jsonl");
  std::vector<hpo::Trial> prior;
  if (o.resume && fs::exists(log_path)) {
    std::ifstream in(log_path);
    prior = hpo::read_study_log(in, space);
    std::cout << "resuming after " << prior.size() << " trials\n";
  }
  {
    std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
    hpo::write_study_log(log, space, prior);
  }
  std::ofstream log(log_path, std::ios::binary | std::ios::app);
  const std::uint64_t fold_seed = stream_seed(seed, 2);
  const std::uint64_t model_seed = stream_seed(seed, 3);
  const hpo::Objective objective = [&](const hpo::Params& p, hpo::TrialContext& ctx) {
    return eval::cv_objective(kind, p, train, o.folds, fold_seed, model_seed,
                              [&](std::size_t, double s) { return ctx.report(s); });
  };
  const auto study = hpo::run_study(objective, space, sc, prior, [&](const hpo::Trial& t) {
    log << hpo::trial_to_json(space, t) << '\n';
    log.flush();
  });
  log.close();
  m.note(log_path);
  m.write("study_timing.csv", render([&](std::ostream& s) { hpo::write_timing(s, study.trials); }));

  const hpo::Trial* best = study.best_trial();
  if (!best) throw Error(ErrorCode::kObjectiveFailure, "no trial completed");
  m.write("best_params.txt", render([&](std::ostream& s) {
            for (std::size_t i = 0; i < space.size(); ++i) {
              s << space.domains[i].name << '=' << space.domains[i].format(best->params[i]) << '\n';
            }
          }));
  if (study.count(hpo::TrialState::kComplete) >= hpo::kMinImportanceTrials) {
    const auto imp = hpo::hyperparam_importance(study);
    m.write("importance.csv", render([&](std::ostream& s) {
              s << "parameter,importance\n";
              for (const auto& [name, v] : imp) s << name << ',' << text::format_double(v) << '\n';
            }));
    std::vector<svg::Bar> bars;
    for (const auto& [name, v] : imp) bars.push_back({name, v});
    m.write("importance.svg", svg::bar_chart("Hyperparameter importance", bars, "share of split gain"));
  }
  std::cout << "best trial " << best->id << ": CV RMSE " << text::format_fixed(*best->value, 2)
            << " (" << study.count(hpo::TrialState::kComplete) << " complete, "
            << study.count(hpo::TrialState::kPruned) << " pruned, "
            << study.step_evaluations() << " fold evaluations)\n";
  return 0;
}

int cmd_explain(const Options& o) {
  require_file(o.model_file, "model-file");
  std::ifstream in(o.model_file);
  const auto model = models::load_model(in);
  if (!model->ensemble()) {
    throw UsageError(models::to_string(model->kind()) + " is not a tree model; SHAP needs trees");
  }
  const auto input = model->model_input(load_matrix(o));
  const auto expl = explain::tree_shap(*model->ensemble(), input.X, input.column_names);
  const std::size_t k = std::min<std::size_t>(o.top, static_cast<std::size_t>(input.cols()));
  const auto ranking = explain::shap_summary(expl, k);

  Manifest m(o.out);
  m.write("shap.csv", render([&](std::ostream& s) { explain::write_shap_csv(s, expl); }));
  m.write("shap_summary.csv", render([&](std::ostream& s) { explain::write_summary_csv(s, ranking); }));
  std::vector<svg::Bar> bars;
  std::vector<svg::Strip> strips;
  for (const auto& r : ranking) {
    bars.push_back({r.name, r.mean_abs});
    svg::Strip st;
    st.label = r.name;
    const auto j = static_cast<Eigen::Index>(r.column);
    for (Eigen::Index i = 0; i < expl.values.rows(); ++i) {
      st.shap.push_back(expl.values(i, j));
      st.feature_value.push_back(input.X(i, j));
    }
    strips.push_back(std::move(st));
  }
  m.write("shap_importance.svg",
          svg::bar_chart("Mean |SHAP| (top " + std::to_string(k) + ")", bars, "mean |SHAP| (kEUR)"));
  m.write("shap_effects.svg", svg::dot_strip("SHAP values by feature", strips));
  std::cout << "explained " << expl.values.rows() << " rows; max local accuracy error "
            << text::format_double(expl.max_local_error) << '\n';
  return 0;
}

int cmd_benchmark(const Options& o) {
  const std::uint64_t seed = require_seed(o);
  features::FeatureMatrix matrix;
  if (o.synthetic > 0) {
    const auto data = synth::generate(o.synthetic, seed);
    const auto merged = ingest::merge_sources(data.sofifa, data.whoscored);
    matrix = features::build_matrix(ingest::drop_missing(merged.records).records);
  } else {
    matrix = load_matrix(o);
  }
  eval::BenchmarkConfig bc;
  bc.seed = seed;
  bc.folds = o.folds;
  bc.n_trials = o.trials;
  bc.repeat = o.repeat;
  bc.test_fraction = o.test_fraction;
  if (o.models.empty()) {
    bc.models.assign(models::kAllModels.begin(), models::kAllModels.end());
  } else {
    for (const auto& name : o.models) bc.models.push_back(models::parse_model(name));
  }
  if (o.conditions.empty()) {
    bc.conditions.assign(eval::kAllConditions.begin(), eval::kAllConditions.end());
  } else {
    for (const auto& name : o.conditions) bc.conditions.push_back(eval::parse_condition(name));
  }

  Manifest m(o.out);
  const auto report = eval::run_benchmark(matrix, bc, [](const eval::CellResult& c) {
    std::cerr << models::to_string(c.model) << " / " << eval::to_string(c.condition) << ": "
              << (c.ok() ? "test RMSE " + text::format_fixed(c.test_rmse, 2) : "failed: " + c.error)
              << '\n';
  });
  m.write("report.csv", render([&](std::ostream& s) { eval::write_report_csv(s, report); }));
  m.write("report.txt", render([&](std::ostream& s) { eval::write_report_text(s, report); }));
  m.write("report_timing.csv", render([&](std::ostream& s) { eval::write_report_timing(s, report); }));
  for (const auto& c : report.cells) {
    if (!c.study) continue;
    m.write("studies/" + c.slug() + ".jsonl",
            render([&](std::ostream& s) { hpo::write_study_log(s, c.study->space, c.study->trials); }));
  }
  std::cout << render([&](std::ostream& s) { eval::write_report_text(s, report); });
  return 0;
}

// Inserts config-file entries ahead of the user's own arguments so that the
// latter win (options keep their last value).
std::vector<std::string> with_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  std::vector<std::string> out{args[0], args[1]};
  for (const auto& [key, value] : config::read_file(path)) {
    out.push_back("--" + key);
    out.push_back(value);
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Football player market-value toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  const auto common = [&](CLI::App* sub) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--config", o.config, "key=value file with option defaults");
    sub->add_option("--out", o.out, "output directory");
  };
  const auto seeded = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "random seed")->envname("VALUECAST_SEED");
  };
  const auto matrix_in = [&](CLI::App* sub) {
    sub->add_option("--matrix", o.matrix, "feature matrix CSV");
    sub->add_option("--players", o.players, "cleaned players CSV (instead of --matrix)");
  };
  const auto modelling = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "LM, lasso, E-Net, KRR, GBDT, leafwise, leafwise+pruning");
    sub->add_option("--test-fraction", o.test_fraction, "held-out share")->check(CLI::Range(0.0, 1.0));
  };

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic source files");
  common(synth_cmd);
  seeded(synth_cmd);
  synth_cmd->add_option("--n", o.n, "number of players")->check(CLI::PositiveNumber);

  auto* ingest_cmd = app.add_subcommand("ingest", "merge and clean the two source files");
  common(ingest_cmd);
  ingest_cmd->add_option("--sofifa", o.sofifa, "profile CSV");
  ingest_cmd->add_option("--whoscored", o.whoscored, "match-record CSV");
  ingest_cmd->add_option("--clubs", o.clubs, "keep only these clubs")->delimiter(',');

  auto* features_cmd = app.add_subcommand("features", "build the feature matrix");
  common(features_cmd);
  features_cmd->add_option("--players", o.players, "cleaned players CSV");

  auto* correlate_cmd = app.add_subcommand("correlate", "rank features by correlation with value");
  common(correlate_cmd);
  matrix_in(correlate_cmd);
  correlate_cmd->add_option("--threshold", o.threshold, "minimum |r|")->check(CLI::Range(0.0, 1.0));

  auto* train_cmd = app.add_subcommand("train", "fit one model and score it on a held-out split");
  common(train_cmd);
  seeded(train_cmd);
  matrix_in(train_cmd);
  modelling(train_cmd);
  train_cmd->add_option("--params", o.params, "parameter overrides, e.g. \"alpha=0.1;tol=1e-4\"");
  train_cmd->add_option("--params-file", o.params_file, "key=value parameter file");

  auto* tune_cmd = app.add_subcommand("tune", "hyperparameter search with cross-validation");
  common(tune_cmd);
  seeded(tune_cmd);
  matrix_in(tune_cmd);
  modelling(tune_cmd);
  tune_cmd->add_option("--sampler", o.sampler, "random, itpe or mtpe");
  tune_cmd->add_option("--pruner", o.pruner, "none or median");
  tune_cmd->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
  tune_cmd->add_option("--folds", o.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  tune_cmd->add_option("--resume", o.resume, "continue the study log in --out (true/false)");

  auto* explain_cmd = app.add_subcommand("explain", "SHAP attributions for a tree model");
  common(explain_cmd);
  matrix_in(explain_cmd);
  explain_cmd->add_option("--model-file", o.model_file, "model written by train");
  explain_cmd->add_option("--top", o.top, "features in the summary")->check(CLI::PositiveNumber);

  auto* bench_cmd = app.add_subcommand("benchmark", "models x tuning conditions comparison");
  common(bench_cmd);
  seeded(bench_cmd);
  matrix_in(bench_cmd);
  bench_cmd->add_option("--synthetic", o.synthetic, "generate this many synthetic players instead");
  bench_cmd->add_option("--models", o.models, "comma-separated model list")->delimiter(',');
  bench_cmd->add_option("--conditions", o.conditions, "default, itpe, mtpe")->delimiter(',');
  bench_cmd->add_option("--trials", o.trials, "trials per tuned cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--folds", o.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  bench_cmd->add_option("--repeat", o.repeat, "refits per test score")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--test-fraction", o.test_fraction, "held-out share")->check(CLI::Range(0.0, 1.0));

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = with_config(args);
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*synth_cmd) return cmd_synth(o);
    if (*ingest_cmd) return cmd_ingest(o);
    if (*features_cmd) return cmd_features(o);
    if (*correlate_cmd) return cmd_correlate(o);
    if (*train_cmd) return cmd_train(o);
    if (*tune_cmd) return cmd_tune(o);
    if (*explain_cmd) return cmd_explain(o);
    if (*bench_cmd) return cmd_benchmark(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
