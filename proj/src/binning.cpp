#include "valuecast/binning.hpp"

#include <algorithm>
#include <cmath>

#include "valuecast/error.hpp"

namespace valuecast::boosting {

BinIndex BinMapper::bin(double value) const {
  if (categorical) {
    const int code = static_cast<int>(std::lround(value));
    const auto it = std::lower_bound(categories.begin(), categories.end(), code);
    if (it == categories.end() || *it != code) {
      // Unseen category; callers that care test membership themselves.
      return static_cast<BinIndex>(categories.size());
    }
    return static_cast<BinIndex>(it - categories.begin());
  }
  const auto it = std::lower_bound(upper.begin(), upper.end(), value);
  return static_cast<BinIndex>(std::min<std::ptrdiff_t>(
      it - upper.begin(), static_cast<std::ptrdiff_t>(upper.size()) - 1));
}

BinMapper fit_numeric_bins(std::span<const double> column, int max_bins) {
  if (max_bins < 2) throw Error(ErrorCode::kInvalidArgument, "max_bins must be >= 2");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }

  BinMapper m;
  const auto inf = std::numeric_limits<double>::infinity();
  if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      m.upper.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    }
    m.upper.push_back(inf);
    return m;
  }

  // Greedy equal-count bins over the distinct values.
  const double target = static_cast<double>(sorted.size()) / max_bins;
  double filled = 0;
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    filled += static_cast<double>(counts[i]);
    if (filled >= target &&
        m.upper.size() + 1 < static_cast<std::size_t>(max_bins)) {
      m.upper.push_back(0.5 * (distinct[i] + distinct[i + 1]));
      filled = 0;
    }
  }
  m.upper.push_back(inf);
  return m;
}

BinMapper fit_categorical_bins(std::span<const double> column) {
  BinMapper m;
  m.categorical = true;
  for (double v : column) m.categories.push_back(static_cast<int>(std::lround(v)));
  std::sort(m.categories.begin(), m.categories.end());
  m.categories.erase(std::unique(m.categories.begin(), m.categories.end()),
                     m.categories.end());
  if (m.categories.size() >= kUnlimitedBins) {
    throw Error(ErrorCode::kInvalidArgument, "too many categories");
  }
  return m;
}

BinnedMatrix bin_matrix(const Eigen::MatrixXd& X,
                        const std::vector<bool>& categorical, int max_bins) {
  BinnedMatrix b;
  b.rows = static_cast<std::size_t>(X.rows());
  b.cols = static_cast<std::size_t>(X.cols());
  b.codes.resize(b.rows * b.cols);
  b.mappers.reserve(b.cols);
  for (std::size_t j = 0; j < b.cols; ++j) {
    const auto col = std::span<const double>(X.col(static_cast<Eigen::Index>(j)).data(), b.rows);
    const bool is_cat = j < categorical.size() && categorical[j];
    b.mappers.push_back(is_cat ? fit_categorical_bins(col) : fit_numeric_bins(col, max_bins));
    const BinMapper& m = b.mappers.back();
    BinIndex* out = b.codes.data() + j * b.rows;
    for (std::size_t i = 0; i < b.rows; ++i) out[i] = m.bin(col[i]);
  }
  return b;
}

void build_histogram(std::span<const BinIndex> column,
                     std::span<const double> gradients,
                     std::span<const double> hessians,
                     std::span<const std::uint32_t> rows,
                     std::span<HistBin> out) {
  std::fill(out.begin(), out.end(), HistBin{});
  for (const std::uint32_t r : rows) {
    HistBin& b = out[column[r]];
    b.sum_gradient += gradients[r];
    b.sum_hessian += hessians[r];
    ++b.count;
  }
}

void subtract_histogram(std::span<const HistBin> parent,
                        std::span<const HistBin> child, std::span<HistBin> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].sum_gradient = parent[i].sum_gradient - child[i].sum_gradient;
    out[i].sum_hessian = parent[i].sum_hessian - child[i].sum_hessian;
    out[i].count = parent[i].count - child[i].count;
  }
}

}  // namespace valuecast::boosting
