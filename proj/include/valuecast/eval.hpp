#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "valuecast/features.hpp"

namespace valuecast::eval {

struct SplitIndices {
  std::vector<std::size_t> train;  // increasing
  std::vector<std::size_t> test;   // increasing
};

// Seeded shuffle; round(n * test_fraction) rows go to test. TooSmall if
// either side would be empty, InvalidArgument unless 0 < fraction < 1.
SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);
std::pair<features::FeatureMatrix, features::FeatureMatrix> train_test_split(
    const features::FeatureMatrix& m, double test_fraction, std::uint64_t seed);

// Validation rows of each fold after a seeded shuffle; the first n % k folds
// hold one extra row. TooSmall unless 2 <= k <= n.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

using FitPredict = std::function<Eigen::VectorXd(const features::FeatureMatrix& train,
                                                 const features::FeatureMatrix& valid)>;

// Per-fold validation RMSE in fold order. `after_fold` sees each score as it
// is produced and may stop the run early by returning true.
std::vector<double> kfold_cv(const features::FeatureMatrix& train, std::size_t k,
                             const FitPredict& fit, std::uint64_t seed,
                             const std::function<bool(std::size_t, double)>& after_fold = {});

// LengthMismatch on unequal lengths, EmptyDataset on empty input.
double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& prediction);
double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& prediction);

}  // namespace valuecast::eval
