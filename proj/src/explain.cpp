#include "valuecast/explain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "valuecast/csv.hpp"
#include "valuecast/error.hpp"
#include "valuecast/text.hpp"

namespace valuecast::explain {

using boosting::Tree;
using boosting::TreeEnsemble;
using boosting::TreeNode;

namespace {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0;
  double one_fraction = 0;
  double weight = 0;
};

void extend(std::vector<PathElement>& path, int depth, double zero, double one, int feature) {
  const auto d = static_cast<std::size_t>(depth);
  path[d] = {feature, zero, one, depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    path[k + 1].weight += one * path[k].weight * (i + 1) / (depth + 1);
    path[k].weight = zero * path[k].weight * (depth - i) / (depth + 1);
  }
}

void unwind(std::vector<PathElement>& path, int depth, int index) {
  const double one = path[static_cast<std::size_t>(index)].one_fraction;
  const double zero = path[static_cast<std::size_t>(index)].zero_fraction;
  double next = path[static_cast<std::size_t>(depth)].weight;
  for (int i = depth - 1; i >= 0; --i) {
    auto& e = path[static_cast<std::size_t>(i)];
    if (one != 0) {
      const double tmp = e.weight;
      e.weight = next * (depth + 1) / ((i + 1) * one);
      next = tmp - e.weight * zero * (depth - i) / (depth + 1);
    } else {
      e.weight = e.weight * (depth + 1) / (zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    auto& e = path[static_cast<std::size_t>(i)];
    const auto& f = path[static_cast<std::size_t>(i + 1)];
    e.feature = f.feature;
    e.zero_fraction = f.zero_fraction;
    e.one_fraction = f.one_fraction;
  }
}

// Sum of path weights as if element `index` had been unwound.
double unwound_sum(const std::vector<PathElement>& path, int depth, int index) {
  const double one = path[static_cast<std::size_t>(index)].one_fraction;
  const double zero = path[static_cast<std::size_t>(index)].zero_fraction;
  double next = path[static_cast<std::size_t>(depth)].weight;
  double total = 0;
  for (int i = depth - 1; i >= 0; --i) {
    const auto& e = path[static_cast<std::size_t>(i)];
    if (one != 0) {
      const double tmp = next * (depth + 1) / ((i + 1) * one);
      total += tmp;
      next = e.weight - tmp * zero * (depth - i) / (depth + 1);
    } else if (zero != 0) {
      total += e.weight / zero / (static_cast<double>(depth - i) / (depth + 1));
    }
  }
  return total;
}

void recurse(const Tree& tree, std::span<const double> x, std::vector<double>& phi, int node,
             std::vector<PathElement> path, int depth, double zero, double one, int feature) {
  path.resize(static_cast<std::size_t>(depth) + 1);
  extend(path, depth, zero, one, feature);
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) {
    for (int i = 1; i <= depth; ++i) {
      const auto& e = path[static_cast<std::size_t>(i)];
      const double w = unwound_sum(path, depth, i);
      phi[static_cast<std::size_t>(e.feature)] += w * (e.one_fraction - e.zero_fraction) * n.value;
    }
    return;
  }
  const int hot = tree.next(node, x);
  const int cold = hot == n.left ? n.right : n.left;
  const double hot_zero = tree.nodes[static_cast<std::size_t>(hot)].cover / n.cover;
  const double cold_zero = tree.nodes[static_cast<std::size_t>(cold)].cover / n.cover;
  double incoming_zero = 1;
  double incoming_one = 1;
  // A feature met again on the path is merged with its earlier occurrence.
  for (int k = 1; k <= depth; ++k) {
    if (path[static_cast<std::size_t>(k)].feature == n.feature) {
      incoming_zero = path[static_cast<std::size_t>(k)].zero_fraction;
      incoming_one = path[static_cast<std::size_t>(k)].one_fraction;
      unwind(path, depth, k);
      --depth;
      break;
    }
  }
  recurse(tree, x, phi, hot, path, depth + 1, hot_zero * incoming_zero, incoming_one, n.feature);
  recurse(tree, x, phi, cold, path, depth + 1, cold_zero * incoming_zero, 0, n.feature);
}

void require_cover(const Tree& tree) {
  for (const TreeNode& n : tree.nodes) {
    if (!(n.cover > 0) || !std::isfinite(n.cover)) {
      throw Error(ErrorCode::kMissingCover, "tree node without positive cover");
    }
  }
}

double ensemble_base(const TreeEnsemble& model) {
  double sum = 0;
  for (const Tree& t : model.trees) sum += tree_expectation(t);
  return model.base_score + model.learning_rate * sum;
}

}  // namespace

double tree_expectation(const Tree& tree) {
  const double root = tree.nodes.front().cover;
  double sum = 0;
  for (const TreeNode& n : tree.nodes) {
    if (n.is_leaf()) sum += n.cover * n.value;
  }
  return sum / root;
}

std::vector<double> tree_shap(const Tree& tree, std::span<const double> x,
                              std::size_t num_features) {
  require_cover(tree);
  std::vector<double> phi(num_features, 0.0);
  recurse(tree, x, phi, 0, {}, 0, 1, 1, -1);
  return phi;
}

ShapExplanation tree_shap(const TreeEnsemble& model, const Eigen::MatrixXd& X,
                          std::vector<std::string> column_names) {
  const std::size_t p = model.num_features;
  if (static_cast<std::size_t>(X.cols()) != p) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model expects " + std::to_string(p) + " columns, got " + std::to_string(X.cols()));
  }
  for (const Tree& t : model.trees) require_cover(t);
  if (column_names.empty()) {
    for (std::size_t j = 0; j < p; ++j) column_names.push_back("f" + std::to_string(j));
  }
  if (column_names.size() != p) {
    throw Error(ErrorCode::kSchemaMismatch, "column name count does not match the model");
  }

  ShapExplanation e;
  e.column_names = std::move(column_names);
  e.base_value = ensemble_base(model);
  e.values = Eigen::MatrixXd::Zero(X.rows(), static_cast<Eigen::Index>(p));
  e.predictions = Eigen::VectorXd(X.rows());
  std::vector<double> x(p);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < p; ++j) x[j] = X(i, static_cast<Eigen::Index>(j));
    std::vector<double> phi(p, 0.0);
    for (const Tree& t : model.trees) recurse(t, x, phi, 0, {}, 0, 1, 1, -1);
    double sum = 0;
    for (std::size_t j = 0; j < p; ++j) {
      const double v = model.learning_rate * phi[j];
      e.values(i, static_cast<Eigen::Index>(j)) = v;
      sum += v;
    }
    e.predictions(i) = model.predict(x);
    e.max_local_error = std::max(e.max_local_error, std::abs(e.base_value + sum - e.predictions(i)));
  }
  return e;
}

double conditional_expectation(const Tree& tree, std::span<const double> x,
                               const std::vector<bool>& known) {
  const auto walk = [&](auto&& self, int node) -> double {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) return n.value;
    if (known[static_cast<std::size_t>(n.feature)]) return self(self, tree.next(node, x));
    const TreeNode& l = tree.nodes[static_cast<std::size_t>(n.left)];
    const TreeNode& r = tree.nodes[static_cast<std::size_t>(n.right)];
    return (l.cover * self(self, n.left) + r.cover * self(self, n.right)) / n.cover;
  };
  return walk(walk, 0);
}

std::vector<double> brute_shapley(const TreeEnsemble& model, std::span<const double> x) {
  const std::size_t p = model.num_features;
  if (p > kBruteForceLimit) {
    throw Error(ErrorCode::kTooManyFeatures,
                std::to_string(p) + " features exceed the limit of " +
                    std::to_string(kBruteForceLimit));
  }
  for (const Tree& t : model.trees) require_cover(t);
  const std::size_t subsets = std::size_t{1} << p;
  std::vector<double> v(subsets);
  std::vector<bool> known(p);
  for (std::size_t s = 0; s < subsets; ++s) {
    for (std::size_t j = 0; j < p; ++j) known[j] = (s >> j) & 1U;
    double sum = 0;
    for (const Tree& t : model.trees) sum += conditional_expectation(t, x, known);
    v[s] = model.base_score + model.learning_rate * sum;
  }
  // |S|! (p - |S| - 1)! / p!
  std::vector<double> weight(p);
  for (std::size_t k = 0; k < p; ++k) {
    weight[k] = std::exp(std::lgamma(static_cast<double>(k) + 1) +
                         std::lgamma(static_cast<double>(p - k)) -
                         std::lgamma(static_cast<double>(p) + 1));
  }
  std::vector<double> phi(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t s = 0; s < subsets; ++s) {
      if (s & bit) continue;
      const auto size = static_cast<std::size_t>(__builtin_popcountll(s));
      phi[j] += weight[size] * (v[s | bit] - v[s]);
    }
  }
  return phi;
}

std::vector<FeatureImportance> shap_summary(const ShapExplanation& expl, std::size_t k) {
  const auto p = static_cast<std::size_t>(expl.values.cols());
  if (k > p) {
    throw Error(ErrorCode::kInvalidArgument,
                "k=" + std::to_string(k) + " exceeds " + std::to_string(p) + " features");
  }
  std::vector<FeatureImportance> all(p);
  for (std::size_t j = 0; j < p; ++j) {
    all[j].column = j;
    all[j].name = j < expl.column_names.size() ? expl.column_names[j] : "f" + std::to_string(j);
    all[j].mean_abs =
        expl.values.rows() > 0 ? expl.values.col(static_cast<Eigen::Index>(j)).cwiseAbs().mean() : 0.0;
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.mean_abs > b.mean_abs;
  });
  all.resize(k);
  return all;
}

void write_shap_csv(std::ostream& out, const ShapExplanation& expl) {
  std::vector<std::string> header{"row", "prediction", "base_value"};
  header.insert(header.end(), expl.column_names.begin(), expl.column_names.end());
  csv::write_row(out, header);
  std::vector<std::string> fields;
  for (Eigen::Index i = 0; i < expl.values.rows(); ++i) {
    fields.clear();
    fields.push_back(std::to_string(i));
    fields.push_back(text::format_double(expl.predictions(i)));
    fields.push_back(text::format_double(expl.base_value));
    for (Eigen::Index j = 0; j < expl.values.cols(); ++j) {
      fields.push_back(text::format_double(expl.values(i, j)));
    }
    csv::write_row(out, fields);
  }
}

void write_summary_csv(std::ostream& out, const std::vector<FeatureImportance>& ranking) {
  csv::write_row(out, {"rank", "feature", "column", "mean_abs_shap"});
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    csv::write_row(out, {std::to_string(r + 1), ranking[r].name,
                         std::to_string(ranking[r].column),
                         text::format_double(ranking[r].mean_abs)});
  }
}

}  // namespace valuecast::explain
