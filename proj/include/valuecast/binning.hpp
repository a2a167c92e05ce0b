#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace valuecast::boosting {

using BinIndex = std::uint16_t;
inline constexpr int kUnlimitedBins = std::numeric_limits<BinIndex>::max();

// Maps one column to bins. Numeric bin b holds values v with
// upper[b-1] < v <= upper[b]; the last bound is +inf. Categorical bins are
// the sorted distinct integer codes seen in training.
struct BinMapper {
  bool categorical = false;
  std::vector<double> upper;     // numeric
  std::vector<int> categories;   // categorical

  int num_bins() const {
    return static_cast<int>(categorical ? categories.size() : upper.size());
  }
  BinIndex bin(double value) const;
  // Split threshold for "value <= threshold" after numeric bin b.
  double threshold(int b) const { return upper[static_cast<std::size_t>(b)]; }
};

// Distinct values get their own bin while they fit in max_bins (exact
// splits); otherwise equal-count quantile bins with ties never separated.
// Bin edges sit halfway between neighbouring distinct values.
BinMapper fit_numeric_bins(std::span<const double> column, int max_bins);
BinMapper fit_categorical_bins(std::span<const double> column);

// Column-major bin codes for a whole design matrix.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<BinIndex> codes;
  std::vector<BinMapper> mappers;

  std::span<const BinIndex> column(std::size_t j) const {
    return {codes.data() + j * rows, rows};
  }
};

BinnedMatrix bin_matrix(const Eigen::MatrixXd& X,
                        const std::vector<bool>& categorical, int max_bins);

// Gradient statistics of one histogram bin.
struct HistBin {
  double sum_gradient = 0;
  double sum_hessian = 0;
  std::uint32_t count = 0;
};

// Accumulates (sum g, sum h, count) per bin over the given rows.
void build_histogram(std::span<const BinIndex> column,
                     std::span<const double> gradients,
                     std::span<const double> hessians,
                     std::span<const std::uint32_t> rows,
                     std::span<HistBin> out);

// out = parent - child, the sibling's histogram.
void subtract_histogram(std::span<const HistBin> parent,
                        std::span<const HistBin> child, std::span<HistBin> out);

}  // namespace valuecast::boosting
