#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "valuecast/random.hpp"
#include "valuecast/search_space.hpp"

namespace valuecast::hpo {

enum class TrialState { kRunning, kComplete, kPruned, kFailed };
std::string to_string(TrialState state);

struct Trial {
  std::size_t id = 0;
  Params params;
  std::vector<double> intermediate;  // one objective value per step (fold)
  TrialState state = TrialState::kRunning;
  std::optional<double> value;       // complete trials only
  double wall_seconds = 0;
  std::string error;                 // failed trials
};

enum class SamplerKind { kRandom, kIndependentTpe, kMultivariateTpe };
enum class PrunerKind { kNone, kMedian };
std::string to_string(SamplerKind kind);
std::string to_string(PrunerKind kind);
SamplerKind parse_sampler(const std::string& name);  // random | itpe | mtpe
PrunerKind parse_pruner(const std::string& name);    // none | median

struct TpeOptions {
  double gamma = 0.25;
  std::size_t max_good = 25;
  std::size_t n_candidates = 24;
  std::size_t n_startup = 10;
};

struct MedianPrunerOptions {
  std::size_t n_startup_trials = 5;
  std::size_t n_warmup_steps = 0;
};

struct StudyConfig {
  SamplerKind sampler = SamplerKind::kIndependentTpe;
  PrunerKind pruner = PrunerKind::kNone;
  std::size_t n_trials = 50;
  std::uint64_t seed = 0;
  TpeOptions tpe;
  MedianPrunerOptions median;
};

// Samplers. With fewer than tpe.n_startup finished (complete or pruned)
// trials, or none complete, the TPE samplers draw uniformly instead.
// Completed trials are ranked by value; the best ceil(gamma * finished),
// at most max_good, form the good set and everything else, pruned trials
// included, the bad set.
Params suggest_random(const SearchSpace& space, Rng& rng);
Params suggest_itpe(const SearchSpace& space, const std::vector<Trial>& history, Rng& rng,
                    const TpeOptions& options = {});
Params suggest_mtpe(const SearchSpace& space, const std::vector<Trial>& history, Rng& rng,
                    const TpeOptions& options = {});

enum class PruneDecision { kContinue, kPrune };

// Median rule on running means: prune iff the mean of `scores[0..step]` is
// strictly worse (larger) than the median of the completed trials' running
// means at the same step. Reads scores only; consumes no randomness.
PruneDecision prune_decision(const std::vector<Trial>& history,
                             const std::vector<double>& scores, std::size_t step,
                             const MedianPrunerOptions& options = {});

// Handed to the objective; report() returns true when the trial should stop.
class TrialContext {
 public:
  TrialContext(const std::vector<Trial>& history, PrunerKind pruner,
               const MedianPrunerOptions& options)
      : history_(history), pruner_(pruner), options_(options) {}

  bool report(double value);
  bool pruned() const { return pruned_; }
  const std::vector<double>& intermediate() const { return scores_; }

 private:
  const std::vector<Trial>& history_;
  PrunerKind pruner_;
  MedianPrunerOptions options_;
  std::vector<double> scores_;
  bool pruned_ = false;
};

// Returns the final score (minimized). Exceptions mark the trial failed.
using Objective = std::function<double(const Params&, TrialContext&)>;

struct Study {
  SearchSpace space;
  StudyConfig config;
  std::vector<Trial> trials;

  const Trial* best_trial() const;  // nullptr if nothing completed
  std::size_t count(TrialState state) const;
  std::size_t step_evaluations() const;  // reported intermediate values
};

// Trial t draws from Rng::derive(seed, t), so a resumed study continues
// exactly as an uninterrupted one. on_trial runs after each finished trial.
Study run_study(const Objective& objective, const SearchSpace& space, const StudyConfig& config,
                std::vector<Trial> resume = {},
                const std::function<void(const Trial&)>& on_trial = {});

// One JSON object per line: trial, state, params, intermediate, value.
// Wall time is kept out so logs of identical runs are byte-identical; see
// write_timing.
std::string trial_to_json(const SearchSpace& space, const Trial& trial);
void write_study_log(std::ostream& out, const SearchSpace& space, const std::vector<Trial>& trials);
std::vector<Trial> read_study_log(std::istream& in, const SearchSpace& space);  // Parse
void write_timing(std::ostream& out, const std::vector<Trial>& trials);

// Share of total split gain per parameter in a small leaf-wise model of
// score against parameters (internal coordinates). Sums to 1; uniform when
// the scores are constant. TooFewTrials below kMinImportanceTrials.
inline constexpr std::size_t kMinImportanceTrials = 10;
std::vector<std::pair<std::string, double>> hyperparam_importance(const Study& study);

}  // namespace valuecast::hpo
