#pragma once

#include <span>
#include <vector>

#include "valuecast/random.hpp"
#include "valuecast/search_space.hpp"

namespace valuecast::hpo {

// Gaussian kernel truncated to [lo, hi] and renormalized.
double truncated_normal_pdf(double x, double mu, double sigma, double lo, double hi);
double truncated_normal_log_pdf(double x, double mu, double sigma, double lo, double hi);
double truncated_normal_sample(Rng& rng, double mu, double sigma, double lo, double hi);

// Mixture of truncated kernels; weights are normalized internally.
double parzen_density(std::span<const double> points, std::span<const double> weights,
                      std::span<const double> bandwidths, double lo, double hi, double query);

// Scott's rule sigma * n^(-1/(dims+4)), clipped to [width / min(100, n + 1),
// width]; 10% of the width (or the clip) when fewer than two points or no
// spread. The lower clip is 1% of the width from 99 points on.
double scott_bandwidth(std::span<const double> points, double width, std::size_t dims);

// Kernel density over a whole search space in internal coordinates. One
// component per observation plus a prior component (domain midpoint,
// bandwidth = width, uniform over categories), all weighted 1/(n+1).
// Categorical dimensions use an indicator kernel, so their marginal is the
// observed frequency smoothed by the prior.
class ParzenModel {
 public:
  // `dims` selects the bandwidth exponent: 1 for per-dimension models,
  // the space size for the joint model.
  ParzenModel(const SearchSpace& space, const std::vector<Params>& observations,
              std::size_t dims);

  std::size_t components() const { return weights_.size(); }

  // Marginal density of one dimension.
  double log_density(std::size_t dim, double u) const;
  double sample(std::size_t dim, Rng& rng) const;

  // Product-kernel joint density; sampling keeps one component for all dims.
  double log_density(const std::vector<double>& u) const;
  std::vector<double> sample(Rng& rng) const;

 private:
  double log_kernel(std::size_t k, std::size_t dim, double u) const;
  double sample_kernel(std::size_t k, std::size_t dim, Rng& rng) const;
  std::size_t pick(Rng& rng) const;

  const SearchSpace& space_;
  std::vector<std::vector<double>> centers_;  // [component][dim]
  std::vector<double> bandwidths_;            // [dim]
  std::vector<double> weights_;
};

}  // namespace valuecast::hpo
