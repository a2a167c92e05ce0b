#include "valuecast/parzen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "valuecast/error.hpp"

namespace valuecast::hpo {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr int kMaxRejections = 1000;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double truncated_normal_log_pdf(double x, double mu, double sigma, double lo, double hi) {
  if (x < lo || x > hi) return -std::numeric_limits<double>::infinity();
  const double mass = normal_cdf((hi - mu) / sigma) - normal_cdf((lo - mu) / sigma);
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - kLogSqrt2Pi - std::log(sigma) - std::log(mass);
}

double truncated_normal_pdf(double x, double mu, double sigma, double lo, double hi) {
  return std::exp(truncated_normal_log_pdf(x, mu, sigma, lo, hi));
}

double truncated_normal_sample(Rng& rng, double mu, double sigma, double lo, double hi) {
  for (int i = 0; i < kMaxRejections; ++i) {
    const double x = mu + sigma * rng.normal();
    if (x >= lo && x <= hi) return x;
  }
  return std::clamp(mu, lo, hi);
}

double parzen_density(std::span<const double> points, std::span<const double> weights,
                      std::span<const double> bandwidths, double lo, double hi, double query) {
  if (points.empty() || points.size() != weights.size() || points.size() != bandwidths.size()) {
    throw Error(ErrorCode::kInvalidArgument, "points, weights and bandwidths must align");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double d = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    d += weights[k] / total * truncated_normal_pdf(query, points[k], bandwidths[k], lo, hi);
  }
  return d;
}

double scott_bandwidth(std::span<const double> points, double width, std::size_t dims) {
  const auto n = points.size();
  // Floor shrinks with the number of points; without it a tight good set
  // collapses to a spike and the sampler stops exploring.
  const double floor = width / std::min(100.0, 1.0 + static_cast<double>(n));
  if (n < 2) return std::max(0.1 * width, floor);
  const double mean = std::accumulate(points.begin(), points.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (double x : points) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0)) return std::max(0.1 * width, floor);
  const double h = sd * std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(dims) + 4.0));
  return std::clamp(h, floor, width);
}

ParzenModel::ParzenModel(const SearchSpace& space, const std::vector<Params>& observations,
                         std::size_t dims)
    : space_(space) {
  const std::size_t d = space.size();
  for (const Params& p : observations) {
    std::vector<double> c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = space.domains[j].to_internal(p[j]);
    centers_.push_back(std::move(c));
  }
  std::vector<double> prior(d);
  bandwidths_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const Domain& dom = space.domains[j];
    const double lo = dom.internal_low();
    const double hi = dom.internal_high();
    prior[j] = 0.5 * (lo + hi);
    std::vector<double> column;
    for (const auto& c : centers_) column.push_back(c[j]);
    bandwidths_[j] = scott_bandwidth(column, hi - lo, dims);
  }
  centers_.push_back(std::move(prior));
  weights_.assign(centers_.size(), 1.0 / static_cast<double>(centers_.size()));
}

double ParzenModel::log_kernel(std::size_t k, std::size_t dim, double u) const {
  const Domain& dom = space_.domains[dim];
  const bool is_prior = k + 1 == centers_.size();
  if (dom.kind == Domain::Kind::kCategorical) {
    if (is_prior) return -std::log(static_cast<double>(dom.choices.size()));
    return u == centers_[k][dim] ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double lo = dom.internal_low();
  const double hi = dom.internal_high();
  const double sigma = is_prior ? hi - lo : bandwidths_[dim];
  return truncated_normal_log_pdf(u, centers_[k][dim], sigma, lo, hi);
}

double ParzenModel::sample_kernel(std::size_t k, std::size_t dim, Rng& rng) const {
  const Domain& dom = space_.domains[dim];
  const bool is_prior = k + 1 == centers_.size();
  if (dom.kind == Domain::Kind::kCategorical) {
    if (is_prior) return static_cast<double>(rng.below(dom.choices.size()));
    return centers_[k][dim];
  }
  const double lo = dom.internal_low();
  const double hi = dom.internal_high();
  const double sigma = is_prior ? hi - lo : bandwidths_[dim];
  return truncated_normal_sample(rng, centers_[k][dim], sigma, lo, hi);
}

std::size_t ParzenModel::pick(Rng& rng) const {
  double u = rng.uniform();
  for (std::size_t k = 0; k + 1 < weights_.size(); ++k) {
    if (u < weights_[k]) return k;
    u -= weights_[k];
  }
  return weights_.size() - 1;
}

double ParzenModel::log_density(std::size_t dim, double u) const {
  std::vector<double> terms(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    terms[k] = std::log(weights_[k]) + log_kernel(k, dim, u);
  }
  return log_sum_exp(terms);
}

double ParzenModel::sample(std::size_t dim, Rng& rng) const {
  return sample_kernel(pick(rng), dim, rng);
}

double ParzenModel::log_density(const std::vector<double>& u) const {
  std::vector<double> terms(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    double t = std::log(weights_[k]);
    for (std::size_t j = 0; j < u.size(); ++j) t += log_kernel(k, j, u[j]);
    terms[k] = t;
  }
  return log_sum_exp(terms);
}

std::vector<double> ParzenModel::sample(Rng& rng) const {
  const std::size_t k = pick(rng);
  std::vector<double> u(space_.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = sample_kernel(k, j, rng);
  return u;
}

}  // namespace valuecast::hpo
