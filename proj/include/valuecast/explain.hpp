#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "valuecast/tree.hpp"

namespace valuecast::explain {

struct ShapExplanation {
  double base_value = 0;          // expected output under the cover distribution
  Eigen::MatrixXd values;         // rows x features
  std::vector<std::string> column_names;
  Eigen::VectorXd predictions;
  double max_local_error = 0;     // max |base + sum(phi) - prediction|
};

// Cover-weighted mean of the tree's leaf values.
double tree_expectation(const boosting::Tree& tree);

// Unscaled path-dependent TreeSHAP values of one tree for one row.
std::vector<double> tree_shap(const boosting::Tree& tree, std::span<const double> x,
                              std::size_t num_features);

// Ensemble attribution: per-tree values summed and scaled by the learning
// rate. Throws MissingCover if a node has non-positive cover and
// SchemaMismatch on a width mismatch.
ShapExplanation tree_shap(const boosting::TreeEnsemble& model, const Eigen::MatrixXd& X,
                          std::vector<std::string> column_names = {});

// Exponential-time Shapley values over the same conditional expectation
// TreeSHAP uses; a test oracle. TooManyFeatures above kBruteForceLimit.
inline constexpr std::size_t kBruteForceLimit = 12;
std::vector<double> brute_shapley(const boosting::TreeEnsemble& model,
                                  std::span<const double> x);

// E[f(x) | x_S] with unknown features averaged by cover.
double conditional_expectation(const boosting::Tree& tree, std::span<const double> x,
                               const std::vector<bool>& known);

struct FeatureImportance {
  std::size_t column = 0;
  std::string name;
  double mean_abs = 0;
};

// Top-k features by mean |phi|, ties in column order.
std::vector<FeatureImportance> shap_summary(const ShapExplanation& expl, std::size_t k);

// row,prediction,base_value,<feature columns>
void write_shap_csv(std::ostream& out, const ShapExplanation& expl);
void write_summary_csv(std::ostream& out, const std::vector<FeatureImportance>& ranking);

}  // namespace valuecast::explain
