#include "valuecast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "valuecast/error.hpp"
#include "valuecast/random.hpp"

namespace valuecast::eval {

SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0 && test_fraction < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "test fraction must lie in (0, 1)");
  }
  const auto n_test =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  if (n_test == 0 || n_test >= n) {
    throw Error(ErrorCode::kTooSmall, std::to_string(n) + " rows cannot be split with test fraction " +
                                          std::to_string(test_fraction));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  SplitIndices s;
  s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

std::pair<features::FeatureMatrix, features::FeatureMatrix> train_test_split(
    const features::FeatureMatrix& m, double test_fraction, std::uint64_t seed) {
  const auto s = train_test_split(static_cast<std::size_t>(m.rows()), test_fraction, seed);
  return {m.subset(s.train), m.subset(s.test)};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
  if (k < 2 || n < k) {
    throw Error(ErrorCode::kTooSmall,
                std::to_string(n) + " rows cannot form " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

std::vector<double> kfold_cv(const features::FeatureMatrix& train, std::size_t k,
                             const FitPredict& fit, std::uint64_t seed,
                             const std::function<bool(std::size_t, double)>& after_fold) {
  const auto n = static_cast<std::size_t>(train.rows());
  const auto folds = kfold_indices(n, k, seed);
  std::vector<double> scores;
  std::vector<char> in_fold(n);
  for (std::size_t f = 0; f < k; ++f) {
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (auto i : folds[f]) in_fold[i] = 1;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_fold[i]) rest.push_back(i);
    }
    const auto tr = train.subset(rest);
    const auto va = train.subset(folds[f]);
    scores.push_back(rmse(va.y, fit(tr, va)));
    if (after_fold && after_fold(f, scores.back())) break;
  }
  return scores;
}

namespace {

void check(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
  if (y.size() != p.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(y.size()) + " targets vs " +
                                                std::to_string(p.size()) + " predictions");
  }
  if (y.size() == 0) throw Error(ErrorCode::kEmptyDataset, "no predictions to score");
}

}  // namespace

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& prediction) {
  check(y, prediction);
  return std::sqrt((y - prediction).squaredNorm() / static_cast<double>(y.size()));
}

double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& prediction) {
  check(y, prediction);
  return (y - prediction).cwiseAbs().mean();
}

}  // namespace valuecast::eval
