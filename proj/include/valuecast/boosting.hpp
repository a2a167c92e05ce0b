#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "valuecast/binning.hpp"
#include "valuecast/tree.hpp"

namespace valuecast::boosting {

enum class BoostingType { kGbdt, kGoss };
std::string to_string(BoostingType type);
BoostingType parse_boosting_type(const std::string& name);

// GOSS keeps the top kGossTopRate share of rows by |gradient| and a random
// kGossOtherRate share of the rest, scaled by (1 - a) / b.
inline constexpr double kGossTopRate = 0.2;
inline constexpr double kGossOtherRate = 0.1;

struct BoostParams {
  double learning_rate = 0.1;
  int n_estimators = 100;
  int num_leaves = 31;
  int max_depth = -1;  // <= 0: unlimited
  int min_child_samples = 20;
  double min_split_gain = 0;
  double lambda_l2 = 0;
  double feature_fraction = 1;
  double bagging_fraction = 1;
  BoostingType boosting_type = BoostingType::kGbdt;
  int max_bins = 255;
  Loss loss = Loss::kSquared;
  // Quantile level for the quantile loss; for huber, the quantile of
  // |residual| used as the transition point each round.
  double alpha = 0.9;
  std::uint64_t seed = 0;

  // Level-wise exact-split engine: depth 3, leaves of one sample allowed.
  static BoostParams gbdt_defaults();
  static BoostParams leafwise_defaults() { return {}; }
  void validate() const;  // InvalidArgument
};

// Per-split constraints shared by both engines.
struct SplitParams {
  double lambda_l2 = 0;
  double min_split_gain = 0;
  int min_child_samples = 1;
};

// G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)
double split_gain(double gl, double hl, double gr, double hr, double lambda_l2);
double leaf_output(double g, double h, double lambda_l2) ;
// A split is taken only if it strictly reduces the loss and clears the
// configured minimum.
inline bool admissible(double gain, const SplitParams& p) {
  return gain > 0 && gain >= p.min_split_gain;
}

struct SplitCandidate {
  int feature = -1;
  SplitKind kind = SplitKind::kNumeric;
  int bin = -1;               // numeric: last bin on the left
  std::vector<int> left_bins;   // categorical, sorted
  std::vector<int> right_bins;  // categorical, sorted; bins empty in the node are in neither
  double gain = 0;
  HistBin left;
  HistBin right;
};

// Best threshold over one histogram; ties keep the lowest bin.
std::optional<SplitCandidate> best_numeric_split(std::span<const HistBin> hist,
                                                 const SplitParams& params);

// Categories present in the node are ordered by G/(H+lambda) and the best
// prefix of that order goes left. With lambda = 0 the ordering argument of
// Fisher's grouping makes this the optimum over all subsets.
std::optional<SplitCandidate> best_categorical_split(std::span<const HistBin> hist,
                                                     const SplitParams& params);

// Reported before each split is applied, for diagnostics and oracle tests.
struct SplitEvent {
  int tree = 0;
  std::size_t leaf = 0;  // index into leaf_rows
  const std::vector<std::vector<std::uint32_t>>* leaf_rows = nullptr;
  const std::vector<bool>* splittable = nullptr;  // depth limit per leaf
  std::span<const double> gradients;
  std::span<const double> hessians;
  const SplitCandidate* split = nullptr;
  double threshold = 0;  // numeric splits
};

struct FitHooks {
  std::function<void(const SplitEvent&)> on_split;
  std::vector<double>* train_rmse = nullptr;  // base score first, then one per round
};

// Level-wise, depth-limited trees on exact thresholds (every distinct value
// is a candidate). All columns are treated as numeric.
TreeEnsemble fit_gbdt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const BoostParams& params, const FitHooks& hooks = {});

// Leaf-wise histogram booster: each tree repeatedly splits the leaf with the
// globally largest gain until num_leaves or no admissible split remains.
TreeEnsemble fit_leafwise(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const BoostParams& params,
                          const std::vector<std::size_t>& categorical_columns,
                          const FitHooks& hooks = {});

Eigen::VectorXd predict_ensemble(const TreeEnsemble& model, const Eigen::MatrixXd& X);

// Type-7 sample quantile, used for base scores and leaf renewal.
double quantile(std::vector<double> values, double q);

}  // namespace valuecast::boosting
