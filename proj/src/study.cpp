#include "valuecast/study.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "valuecast/boosting.hpp"
#include "valuecast/error.hpp"
#include "valuecast/parzen.hpp"
#include "valuecast/text.hpp"

namespace valuecast::hpo {

std::string to_string(TrialState state) {
  switch (state) {
    case TrialState::kRunning: return "running";
    case TrialState::kComplete: return "complete";
    case TrialState::kPruned: return "pruned";
    case TrialState::kFailed: return "failed";
  }
  return "running";
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kRandom: return "random";
    case SamplerKind::kIndependentTpe: return "itpe";
    case SamplerKind::kMultivariateTpe: return "mtpe";
  }
  return "random";
}

std::string to_string(PrunerKind kind) { return kind == PrunerKind::kMedian ? "median" : "none"; }

SamplerKind parse_sampler(const std::string& name) {
  for (auto k : {SamplerKind::kRandom, SamplerKind::kIndependentTpe, SamplerKind::kMultivariateTpe}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown sampler '" + name + "'");
}

PrunerKind parse_pruner(const std::string& name) {
  if (name == "none") return PrunerKind::kNone;
  if (name == "median") return PrunerKind::kMedian;
  throw Error(ErrorCode::kInvalidArgument, "unknown pruner '" + name + "'");
}

Params suggest_random(const SearchSpace& space, Rng& rng) { return space.sample(rng); }

namespace {

struct Split {
  std::vector<Params> good;
  std::vector<Params> bad;
};

std::optional<Split> split_history(const std::vector<Trial>& history, const TpeOptions& o) {
  std::vector<const Trial*> complete;
  std::vector<const Trial*> pruned;
  for (const Trial& t : history) {
    if (t.state == TrialState::kComplete && t.value) complete.push_back(&t);
    if (t.state == TrialState::kPruned) pruned.push_back(&t);
  }
  const std::size_t finished = complete.size() + pruned.size();
  if (finished < o.n_startup || complete.empty()) return std::nullopt;
  std::stable_sort(complete.begin(), complete.end(),
                   [](const Trial* a, const Trial* b) { return *a->value < *b->value; });
  const auto by_gamma = static_cast<std::size_t>(std::ceil(o.gamma * static_cast<double>(finished)));
  const std::size_t n_good = std::min({by_gamma, o.max_good, complete.size()});
  Split s;
  for (std::size_t i = 0; i < complete.size(); ++i) {
    (i < n_good ? s.good : s.bad).push_back(complete[i]->params);
  }
  for (const Trial* t : pruned) s.bad.push_back(t->params);
  return s;
}

}  // namespace

Params suggest_itpe(const SearchSpace& space, const std::vector<Trial>& history, Rng& rng,
                    const TpeOptions& options) {
  const auto split = split_history(history, options);
  if (!split) return space.sample(rng);
  const ParzenModel l(space, split->good, 1);
  const ParzenModel g(space, split->bad, 1);
  Params out(space.size());
  for (std::size_t j = 0; j < space.size(); ++j) {
    double best_u = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < options.n_candidates; ++c) {
      const double u = l.sample(j, rng);
      const double score = l.log_density(j, u) - g.log_density(j, u);
      if (c == 0 || score > best_score) {
        best_score = score;
        best_u = u;
      }
    }
    out[j] = space.domains[j].from_internal(best_u);
  }
  return out;
}

Params suggest_mtpe(const SearchSpace& space, const std::vector<Trial>& history, Rng& rng,
                    const TpeOptions& options) {
  const auto split = split_history(history, options);
  if (!split) return space.sample(rng);
  const ParzenModel l(space, split->good, space.size());
  const ParzenModel g(space, split->bad, space.size());
  std::vector<double> best_u;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < options.n_candidates; ++c) {
    std::vector<double> u = l.sample(rng);
    const double score = l.log_density(u) - g.log_density(u);
    if (c == 0 || score > best_score) {
      best_score = score;
      best_u = std::move(u);
    }
  }
  Params out(space.size());
  for (std::size_t j = 0; j < space.size(); ++j) out[j] = space.domains[j].from_internal(best_u[j]);
  return out;
}

namespace {

double running_mean(const std::vector<double>& scores, std::size_t step) {
  double s = 0;
  for (std::size_t i = 0; i <= step; ++i) s += scores[i];
  return s / static_cast<double>(step + 1);
}

}  // namespace

PruneDecision prune_decision(const std::vector<Trial>& history, const std::vector<double>& scores,
                             std::size_t step, const MedianPrunerOptions& options) {
  if (step >= scores.size()) {
    throw Error(ErrorCode::kInvalidArgument, "no score reported at step " + std::to_string(step));
  }
  if (step < options.n_warmup_steps) return PruneDecision::kContinue;
  std::vector<double> peers;
  std::size_t complete = 0;
  for (const Trial& t : history) {
    if (t.state != TrialState::kComplete) continue;
    ++complete;
    if (t.intermediate.size() > step) peers.push_back(running_mean(t.intermediate, step));
  }
  if (complete < options.n_startup_trials || peers.empty()) return PruneDecision::kContinue;
  std::sort(peers.begin(), peers.end());
  const std::size_t m = peers.size();
  const double median = m % 2 ? peers[m / 2] : 0.5 * (peers[m / 2 - 1] + peers[m / 2]);
  return running_mean(scores, step) > median ? PruneDecision::kPrune : PruneDecision::kContinue;
}

bool TrialContext::report(double value) {
  scores_.push_back(value);
  if (pruner_ == PrunerKind::kMedian &&
      prune_decision(history_, scores_, scores_.size() - 1, options_) == PruneDecision::kPrune) {
    pruned_ = true;
  }
  return pruned_;
}

const Trial* Study::best_trial() const {
  const Trial* best = nullptr;
  for (const Trial& t : trials) {
    if (t.state == TrialState::kComplete && t.value && (!best || *t.value < *best->value)) best = &t;
  }
  return best;
}

std::size_t Study::count(TrialState state) const {
  return static_cast<std::size_t>(std::count_if(
      trials.begin(), trials.end(), [&](const Trial& t) { return t.state == state; }));
}

std::size_t Study::step_evaluations() const {
  std::size_t n = 0;
  for (const Trial& t : trials) n += t.intermediate.size();
  return n;
}

Study run_study(const Objective& objective, const SearchSpace& space, const StudyConfig& config,
                std::vector<Trial> resume, const std::function<void(const Trial&)>& on_trial) {
  space.validate();
  Study study;
  study.space = space;
  study.config = config;
  study.trials = std::move(resume);
  for (std::size_t i = 0; i < study.trials.size(); ++i) {
    if (study.trials[i].id != i) {
      throw Error(ErrorCode::kParse, "resumed trials must be numbered 0.." +
                                         std::to_string(study.trials.size() - 1));
    }
  }
  for (std::size_t id = study.trials.size(); id < config.n_trials; ++id) {
    Rng rng = Rng::derive(config.seed, id);
    Trial trial;
    trial.id = id;
    switch (config.sampler) {
      case SamplerKind::kRandom: trial.params = suggest_random(space, rng); break;
      case SamplerKind::kIndependentTpe:
        trial.params = suggest_itpe(space, study.trials, rng, config.tpe);
        break;
      case SamplerKind::kMultivariateTpe:
        trial.params = suggest_mtpe(space, study.trials, rng, config.tpe);
        break;
    }
    TrialContext ctx(study.trials, config.pruner, config.median);
    const auto start = std::chrono::steady_clock::now();
    try {
      const double value = objective(trial.params, ctx);
      if (ctx.pruned()) {
        trial.state = TrialState::kPruned;
      } else if (std::isfinite(value)) {
        trial.state = TrialState::kComplete;
        trial.value = value;
      } else {
        trial.state = TrialState::kFailed;
        trial.error = std::string(to_string(ErrorCode::kObjectiveFailure)) + ": non-finite score";
      }
    } catch (const std::exception& e) {
      trial.state = TrialState::kFailed;
      trial.error = std::string(to_string(ErrorCode::kObjectiveFailure)) + ": " + e.what();
    }
    trial.intermediate = ctx.intermediate();
    trial.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    study.trials.push_back(std::move(trial));
    if (on_trial) on_trial(study.trials.back());
  }
  return study;
}

std::string trial_to_json(const SearchSpace& space, const Trial& t) {
  nlohmann::ordered_json j;
  j["trial"] = t.id;
  j["state"] = to_string(t.state);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < space.size() && i < t.params.size(); ++i) {
    const Domain& d = space.domains[i];
    switch (d.kind) {
      case Domain::Kind::kFloat: params[d.name] = t.params[i]; break;
      case Domain::Kind::kInt: params[d.name] = static_cast<long>(t.params[i]); break;
      case Domain::Kind::kCategorical: params[d.name] = d.format(t.params[i]); break;
    }
  }
  j["params"] = params;
  j["intermediate"] = t.intermediate;
  j["value"] = t.value ? nlohmann::ordered_json(*t.value) : nlohmann::ordered_json(nullptr);
  if (!t.error.empty()) j["error"] = t.error;
  return j.dump();
}

void write_study_log(std::ostream& out, const SearchSpace& space, const std::vector<Trial>& trials) {
  for (const Trial& t : trials) out << trial_to_json(space, t) << '\n';
}

std::vector<Trial> read_study_log(std::istream& in, const SearchSpace& space) {
  std::vector<Trial> trials;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kParse, "study log line " + std::to_string(line_no) + ": " + why);
    };
    try {
      const auto j = nlohmann::json::parse(line);
      Trial t;
      t.id = j.at("trial").get<std::size_t>();
      const auto state = j.at("state").get<std::string>();
      if (state == "complete") t.state = TrialState::kComplete;
      else if (state == "pruned") t.state = TrialState::kPruned;
      else if (state == "failed") t.state = TrialState::kFailed;
      else fail("bad state '" + state + "'");
      for (const Domain& d : space.domains) {
        const auto& v = j.at("params").at(d.name);
        double x = 0;
        if (d.kind == Domain::Kind::kCategorical) {
          const auto s = v.get<std::string>();
          const auto it = std::find(d.choices.begin(), d.choices.end(), s);
          if (it == d.choices.end()) fail("unknown choice '" + s + "' for " + d.name);
          x = static_cast<double>(it - d.choices.begin());
        } else {
          x = v.get<double>();
        }
        if (!d.contains(x)) fail("value of " + d.name + " outside the search space");
        t.params.push_back(x);
      }
      t.intermediate = j.at("intermediate").get<std::vector<double>>();
      if (!j.at("value").is_null()) t.value = j.at("value").get<double>();
      if (j.contains("error")) t.error = j.at("error").get<std::string>();
      if (t.state == TrialState::kComplete && !t.value) fail("complete trial without value");
      trials.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
  }
  return trials;
}

void write_timing(std::ostream& out, const std::vector<Trial>& trials) {
  out << "trial,wall_seconds\n";
  for (const Trial& t : trials) out << t.id << ',' << text::format_fixed(t.wall_seconds, 6) << '\n';
}

std::vector<std::pair<std::string, double>> hyperparam_importance(const Study& study) {
  const SearchSpace& space = study.space;
  std::vector<const Trial*> complete;
  for (const Trial& t : study.trials) {
    if (t.state == TrialState::kComplete && t.value) complete.push_back(&t);
  }
  if (complete.size() < kMinImportanceTrials) {
    throw Error(ErrorCode::kTooFewTrials, std::to_string(complete.size()) +
                                              " complete trials, need " +
                                              std::to_string(kMinImportanceTrials));
  }
  const auto n = static_cast<Eigen::Index>(complete.size());
  const auto d = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  std::vector<std::size_t> categorical;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (space.domains[static_cast<std::size_t>(j)].kind == Domain::Kind::kCategorical) {
      categorical.push_back(static_cast<std::size_t>(j));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Trial& t = *complete[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) {
      X(i, j) = space.domains[static_cast<std::size_t>(j)].to_internal(t.params[static_cast<std::size_t>(j)]);
    }
    y(i) = *t.value;
  }

  std::vector<double> gain(space.size(), 0.0);
  boosting::BoostParams p;
  p.n_estimators = 50;
  p.num_leaves = 8;
  p.min_child_samples = 2;
  p.learning_rate = 0.1;
  boosting::FitHooks hooks;
  hooks.on_split = [&](const boosting::SplitEvent& e) {
    gain[static_cast<std::size_t>(e.split->feature)] += e.split->gain;
  };
  boosting::fit_leafwise(X, y, p, categorical, hooks);

  double total = 0;
  for (double g : gain) total += g;
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t j = 0; j < space.size(); ++j) {
    const double share = total > 0 ? gain[j] / total : 1.0 / static_cast<double>(space.size());
    out.emplace_back(space.domains[j].name, share);
  }
  return out;
}

}  // namespace valuecast::hpo
