#include "valuecast/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "valuecast/error.hpp"
#include "valuecast/random.hpp"

namespace valuecast::boosting {

std::string to_string(BoostingType type) {
  return type == BoostingType::kGoss ? "goss" : "gbdt";
}

BoostingType parse_boosting_type(const std::string& name) {
  if (name == "gbdt") return BoostingType::kGbdt;
  if (name == "goss") return BoostingType::kGoss;
  throw Error(ErrorCode::kInvalidArgument, "unknown boosting type '" + name + "'");
}

BoostParams BoostParams::gbdt_defaults() {
  BoostParams p;
  p.max_depth = 3;
  p.min_child_samples = 1;
  p.num_leaves = 8;
  p.max_bins = kUnlimitedBins;
  return p;
}

void BoostParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(learning_rate > 0 && learning_rate <= 1, "learning_rate must be in (0, 1]");
  require(n_estimators >= 0, "n_estimators must be >= 0");
  require(num_leaves >= 2, "num_leaves must be >= 2");
  require(min_child_samples >= 1, "min_child_samples must be >= 1");
  require(min_split_gain >= 0, "min_split_gain must be >= 0");
  require(lambda_l2 >= 0, "lambda_l2 must be >= 0");
  require(feature_fraction > 0 && feature_fraction <= 1, "feature_fraction must be in (0, 1]");
  require(bagging_fraction > 0 && bagging_fraction <= 1, "bagging_fraction must be in (0, 1]");
  require(max_bins >= 2, "max_bins must be >= 2");
  require(alpha > 0 && alpha < 1, "alpha must be in (0, 1)");
}

double split_gain(double gl, double hl, double gr, double hr, double lambda_l2) {
  const double g = gl + gr;
  const double h = hl + hr;
  return gl * gl / (hl + lambda_l2) + gr * gr / (hr + lambda_l2) - g * g / (h + lambda_l2);
}

double leaf_output(double g, double h, double lambda_l2) {
  const double d = h + lambda_l2;
  return d > 0 ? -g / d : 0.0;
}

namespace {

HistBin add(const HistBin& a, const HistBin& b) {
  return {a.sum_gradient + b.sum_gradient, a.sum_hessian + b.sum_hessian, a.count + b.count};
}

HistBin total(std::span<const HistBin> hist) {
  HistBin t;
  for (const auto& b : hist) t = add(t, b);
  return t;
}

}  // namespace

std::optional<SplitCandidate> best_numeric_split(std::span<const HistBin> hist,
                                                 const SplitParams& params) {
  const HistBin all = total(hist);
  const auto min_child = static_cast<std::uint32_t>(params.min_child_samples);
  std::optional<SplitCandidate> best;
  HistBin left;
  for (std::size_t b = 0; b + 1 < hist.size(); ++b) {
    left = add(left, hist[b]);
    const HistBin right{all.sum_gradient - left.sum_gradient,
                        all.sum_hessian - left.sum_hessian, all.count - left.count};
    if (left.count < min_child || right.count < min_child) continue;
    const double gain = split_gain(left.sum_gradient, left.sum_hessian, right.sum_gradient,
                                   right.sum_hessian, params.lambda_l2);
    if (!admissible(gain, params)) continue;
    if (!best || gain > best->gain) {
      if (!best) best.emplace();
      best->kind = SplitKind::kNumeric;
      best->bin = static_cast<int>(b);
      best->gain = gain;
      best->left = left;
      best->right = right;
    }
  }
  return best;
}

std::optional<SplitCandidate> best_categorical_split(std::span<const HistBin> hist,
                                                     const SplitParams& params) {
  std::vector<int> present;
  for (std::size_t b = 0; b < hist.size(); ++b) {
    if (hist[b].count > 0) present.push_back(static_cast<int>(b));
  }
  if (present.size() < 2) return std::nullopt;
  const auto ratio = [&](int b) {
    const HistBin& s = hist[static_cast<std::size_t>(b)];
    const double d = s.sum_hessian + params.lambda_l2;
    return d > 0 ? s.sum_gradient / d : 0.0;
  };
  std::stable_sort(present.begin(), present.end(),
                   [&](int a, int b) { return ratio(a) < ratio(b); });

  const HistBin all = total(hist);
  const auto min_child = static_cast<std::uint32_t>(params.min_child_samples);
  std::optional<SplitCandidate> best;
  std::size_t best_prefix = 0;
  HistBin left;
  for (std::size_t i = 0; i + 1 < present.size(); ++i) {
    left = add(left, hist[static_cast<std::size_t>(present[i])]);
    const HistBin right{all.sum_gradient - left.sum_gradient,
                        all.sum_hessian - left.sum_hessian, all.count - left.count};
    if (left.count < min_child || right.count < min_child) continue;
    const double gain = split_gain(left.sum_gradient, left.sum_hessian, right.sum_gradient,
                                   right.sum_hessian, params.lambda_l2);
    if (!admissible(gain, params)) continue;
    if (!best || gain > best->gain) {
      if (!best) best.emplace();
      best->kind = SplitKind::kCategorical;
      best->gain = gain;
      best->left = left;
      best->right = right;
      best_prefix = i + 1;
    }
  }
  if (best) {
    best->left_bins.assign(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(best_prefix));
    best->right_bins.assign(present.begin() + static_cast<std::ptrdiff_t>(best_prefix), present.end());
    std::sort(best->left_bins.begin(), best->left_bins.end());
    std::sort(best->right_bins.begin(), best->right_bins.end());
  }
  return best;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kEmptyDataset, "quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

struct Leaf {
  int node = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  int depth = 0;
  double sum_gradient = 0;
  double sum_hessian = 0;
  std::vector<HistBin> hist;
  std::optional<SplitCandidate> best;

  std::size_t size() const { return end - begin; }
};

// Grows one tree over a fixed row sample. Leaf-wise growth always splits the
// best leaf; level-wise growth splits the shallowest splittable leaf first,
// which visits every leaf of depth d before any of depth d + 1.
class Grower {
 public:
  Grower(const BinnedMatrix& bins, const BoostParams& params, bool leafwise)
      : bins_(bins), params_(params), leafwise_(leafwise) {
    split_.lambda_l2 = params.lambda_l2;
    split_.min_split_gain = params.min_split_gain;
    split_.min_child_samples = params.min_child_samples;
    offsets_.resize(bins.cols + 1, 0);
    for (std::size_t j = 0; j < bins.cols; ++j) {
      offsets_[j + 1] = offsets_[j] + static_cast<std::size_t>(bins.mappers[j].num_bins());
    }
  }

  Tree grow(int tree_index, std::vector<std::uint32_t> rows, std::span<const double> g,
            std::span<const double> h, std::vector<int> features, const FitHooks& hooks) {
    rows_ = std::move(rows);
    g_ = g;
    h_ = h;
    features_ = std::move(features);
    leaves_.clear();

    Tree tree;
    tree.nodes.emplace_back();
    Leaf root;
    root.begin = 0;
    root.end = rows_.size();
    root.hist.assign(offsets_.back(), HistBin{});
    build(root);
    leaves_.push_back(std::move(root));
    summarize(leaves_.back());
    find_best(leaves_.back());

    while (!leafwise_ || static_cast<int>(leaves_.size()) < params_.num_leaves) {
      const std::optional<std::size_t> pick = choose();
      if (!pick) break;
      if (hooks.on_split) report(tree_index, *pick, hooks);
      apply(tree, *pick);
    }

    for (const Leaf& leaf : leaves_) {
      TreeNode& n = tree.nodes[static_cast<std::size_t>(leaf.node)];
      n.value = leaf_output(leaf.sum_gradient, leaf.sum_hessian, params_.lambda_l2);
      n.cover = leaf.sum_hessian;
    }
    for (std::size_t i = tree.nodes.size(); i-- > 0;) {
      TreeNode& n = tree.nodes[i];
      if (n.is_leaf()) continue;
      n.cover = tree.nodes[static_cast<std::size_t>(n.left)].cover +
                tree.nodes[static_cast<std::size_t>(n.right)].cover;
    }
    return tree;
  }

  // Rows that ended in each leaf, keyed by node id.
  std::vector<std::pair<int, std::span<const std::uint32_t>>> leaf_rows() const {
    std::vector<std::pair<int, std::span<const std::uint32_t>>> out;
    for (const Leaf& l : leaves_) {
      out.emplace_back(l.node, std::span<const std::uint32_t>(rows_.data() + l.begin, l.size()));
    }
    return out;
  }

 private:
  std::span<HistBin> slice(Leaf& leaf, std::size_t j) {
    return {leaf.hist.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
  }

  void build(Leaf& leaf) {
    const std::span<const std::uint32_t> rows(rows_.data() + leaf.begin, leaf.size());
    for (int j : features_) {
      const auto jj = static_cast<std::size_t>(j);
      build_histogram(bins_.column(jj), g_, h_, rows, slice(leaf, jj));
    }
  }

  void summarize(Leaf& leaf) const {
    double sg = 0, sh = 0;
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
      sg += g_[rows_[i]];
      sh += h_[rows_[i]];
    }
    leaf.sum_gradient = sg;
    leaf.sum_hessian = sh;
  }

  bool depth_ok(const Leaf& leaf) const {
    return params_.max_depth <= 0 || leaf.depth < params_.max_depth;
  }

  void find_best(Leaf& leaf) {
    leaf.best.reset();
    if (!depth_ok(leaf)) return;
    if (leaf.size() < 2 * static_cast<std::size_t>(params_.min_child_samples)) return;
    for (int j : features_) {
      const auto jj = static_cast<std::size_t>(j);
      const auto hist = slice(leaf, jj);
      auto cand = bins_.mappers[jj].categorical ? best_categorical_split(hist, split_)
                                                : best_numeric_split(hist, split_);
      if (cand && (!leaf.best || cand->gain > leaf.best->gain)) {
        cand->feature = j;
        leaf.best = std::move(cand);
      }
    }
  }

  std::optional<std::size_t> choose() const {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
      const Leaf& l = leaves_[i];
      if (!l.best) continue;
      if (!pick) {
        pick = i;
        continue;
      }
      const Leaf& p = leaves_[*pick];
      const bool better =
          leafwise_ ? (l.best->gain > p.best->gain ||
                       (l.best->gain == p.best->gain && l.node < p.node))
                    : (l.depth < p.depth || (l.depth == p.depth && l.node < p.node));
      if (better) pick = i;
    }
    return pick;
  }

  void report(int tree_index, std::size_t pick, const FitHooks& hooks) const {
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<bool> splittable;
    for (const Leaf& l : leaves_) {
      rows.emplace_back(rows_.begin() + static_cast<std::ptrdiff_t>(l.begin),
                        rows_.begin() + static_cast<std::ptrdiff_t>(l.end));
      splittable.push_back(depth_ok(l));
    }
    const SplitCandidate& s = *leaves_[pick].best;
    SplitEvent ev;
    ev.tree = tree_index;
    ev.leaf = pick;
    ev.leaf_rows = &rows;
    ev.splittable = &splittable;
    ev.gradients = g_;
    ev.hessians = h_;
    ev.split = &s;
    if (s.kind == SplitKind::kNumeric) {
      ev.threshold = bins_.mappers[static_cast<std::size_t>(s.feature)].threshold(s.bin);
    }
    hooks.on_split(ev);
  }

  void apply(Tree& tree, std::size_t pick) {
    Leaf parent = std::move(leaves_[pick]);
    const SplitCandidate s = std::move(*parent.best);
    const auto feature = static_cast<std::size_t>(s.feature);
    const BinMapper& mapper = bins_.mappers[feature];
    const auto column = bins_.column(feature);

    std::vector<char> goes_left;
    if (s.kind == SplitKind::kCategorical) {
      goes_left.assign(static_cast<std::size_t>(mapper.num_bins()), 0);
      for (int b : s.left_bins) goes_left[static_cast<std::size_t>(b)] = 1;
    }
    const auto first = rows_.begin() + static_cast<std::ptrdiff_t>(parent.begin);
    const auto last = rows_.begin() + static_cast<std::ptrdiff_t>(parent.end);
    const auto mid = std::stable_partition(first, last, [&](std::uint32_t r) {
      const BinIndex code = column[r];
      return s.kind == SplitKind::kNumeric ? code <= s.bin : goes_left[code] != 0;
    });

    const int left_id = static_cast<int>(tree.nodes.size());
    const int right_id = left_id + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(parent.node)];
    node.kind = s.kind;
    node.feature = s.feature;
    node.left = left_id;
    node.right = right_id;
    node.value = leaf_output(parent.sum_gradient, parent.sum_hessian, params_.lambda_l2);
    if (s.kind == SplitKind::kNumeric) {
      node.threshold = mapper.threshold(s.bin);
    } else {
      for (int b : s.left_bins) node.left_categories.push_back(mapper.categories[static_cast<std::size_t>(b)]);
      for (int b : s.right_bins) node.right_categories.push_back(mapper.categories[static_cast<std::size_t>(b)]);
    }

    Leaf left, right;
    left.node = left_id;
    right.node = right_id;
    left.depth = right.depth = parent.depth + 1;
    left.begin = parent.begin;
    left.end = static_cast<std::size_t>(mid - rows_.begin());
    right.begin = left.end;
    right.end = parent.end;

    // Build the smaller child, derive the larger one from the parent.
    Leaf& small = left.size() <= right.size() ? left : right;
    Leaf& large = left.size() <= right.size() ? right : left;
    small.hist.assign(offsets_.back(), HistBin{});
    build(small);
    large.hist = std::move(parent.hist);
    for (int j : features_) {
      const auto jj = static_cast<std::size_t>(j);
      subtract_histogram(slice(large, jj), slice(small, jj), slice(large, jj));
    }
    summarize(left);
    summarize(right);
    find_best(left);
    find_best(right);
    leaves_[pick] = std::move(left);
    leaves_.push_back(std::move(right));
  }

  const BinnedMatrix& bins_;
  const BoostParams& params_;
  bool leafwise_;
  SplitParams split_;
  std::vector<std::size_t> offsets_;

  std::vector<std::uint32_t> rows_;
  std::span<const double> g_;
  std::span<const double> h_;
  std::vector<int> features_;
  std::vector<Leaf> leaves_;
};

double base_score_for(const Eigen::VectorXd& y, const BoostParams& p) {
  std::vector<double> v(y.data(), y.data() + y.size());
  switch (p.loss) {
    case Loss::kSquared: return y.mean();
    case Loss::kAbsolute:
    case Loss::kHuber: return quantile(std::move(v), 0.5);
    case Loss::kQuantile: return quantile(std::move(v), p.alpha);
  }
  return y.mean();
}

double rmse_of(const Eigen::VectorXd& y, const std::vector<double>& pred) {
  double s = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double e = y(i) - pred[static_cast<std::size_t>(i)];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

// Leaf value minimizing the loss over the leaf's residuals, replacing the
// Newton step for losses whose hessian is not informative.
double renew_leaf(std::vector<double> r, const BoostParams& p, double delta) {
  switch (p.loss) {
    case Loss::kSquared: break;
    case Loss::kAbsolute: return quantile(std::move(r), 0.5);
    case Loss::kQuantile: return quantile(std::move(r), p.alpha);
    case Loss::kHuber: {
      const double med = quantile(r, 0.5);
      double adj = 0;
      for (double v : r) {
        const double d = v - med;
        adj += (d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0) * std::min(delta, std::abs(d));
      }
      return med + adj / static_cast<double>(r.size());
    }
  }
  return 0;
}

TreeEnsemble fit_impl(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const BoostParams& params, std::vector<std::size_t> categorical,
                      bool leafwise, const FitHooks& hooks) {
  params.validate();
  if (X.rows() == 0) throw Error(ErrorCode::kEmptyDataset, "no training rows");
  if (X.rows() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "X has " + std::to_string(X.rows()) +
                                                " rows, y has " + std::to_string(y.size()));
  }
  if (params.max_depth <= 0 && !leafwise) {
    throw Error(ErrorCode::kInvalidArgument, "level-wise growth needs max_depth >= 1");
  }
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  std::sort(categorical.begin(), categorical.end());
  categorical.erase(std::unique(categorical.begin(), categorical.end()), categorical.end());
  if (!categorical.empty() && categorical.back() >= p) {
    throw Error(ErrorCode::kInvalidArgument, "categorical column out of range");
  }

  TreeEnsemble model;
  model.learning_rate = params.learning_rate;
  model.loss = params.loss;
  model.num_features = p;
  model.categorical_columns = categorical;
  model.base_score = base_score_for(y, params);

  std::vector<double> pred(n, model.base_score);
  if (hooks.train_rmse) {
    hooks.train_rmse->clear();
    hooks.train_rmse->push_back(rmse_of(y, pred));
  }
  const bool degenerate = y.maxCoeff() == y.minCoeff();
  if (degenerate || params.n_estimators == 0) return model;
  if (n < 2 * static_cast<std::size_t>(params.min_child_samples)) {
    throw Error(ErrorCode::kTooSmall, std::to_string(n) + " rows cannot hold two children of " +
                                          std::to_string(params.min_child_samples));
  }

  std::vector<bool> is_cat(p, false);
  for (auto j : categorical) is_cat[j] = true;
  const BinnedMatrix bins = bin_matrix(X, is_cat, leafwise ? params.max_bins : kUnlimitedBins);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows_major = X;

  Grower grower(bins, params, leafwise);
  Rng rng(params.seed);
  std::vector<double> residual(n), g(n), h(n);
  std::vector<std::uint32_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0u);

  for (int t = 0; t < params.n_estimators; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y(static_cast<Eigen::Index>(i)) - pred[i];
    double delta = 0;
    if (params.loss == Loss::kHuber) {
      std::vector<double> a(n);
      for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(residual[i]);
      delta = quantile(std::move(a), params.alpha);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double r = residual[i];
      switch (params.loss) {
        case Loss::kSquared: g[i] = -r; break;
        case Loss::kAbsolute: g[i] = r > 0 ? -1.0 : r < 0 ? 1.0 : 0.0; break;
        case Loss::kHuber:
          g[i] = std::abs(r) <= delta ? -r : (r > 0 ? -delta : delta);
          break;
        case Loss::kQuantile: g[i] = r >= 0 ? -params.alpha : 1.0 - params.alpha; break;
      }
      h[i] = 1.0;
    }

    std::vector<std::uint32_t> rows;
    if (leafwise && params.boosting_type == BoostingType::kGoss) {
      std::vector<std::uint32_t> order = all_rows;
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double ga = std::abs(g[a]), gb = std::abs(g[b]);
        return ga > gb || (ga == gb && a < b);
      });
      const auto top = static_cast<std::size_t>(kGossTopRate * static_cast<double>(n));
      const auto other = static_cast<std::size_t>(kGossOtherRate * static_cast<double>(n));
      rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top));
      const double w = (1.0 - kGossTopRate) / kGossOtherRate;
      for (std::size_t k : rng.sample(n - top, other)) {
        const std::uint32_t r = order[top + k];
        g[r] *= w;
        h[r] *= w;
        rows.push_back(r);
      }
      std::sort(rows.begin(), rows.end());
    } else if (params.bagging_fraction < 1.0) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(params.bagging_fraction * static_cast<double>(n))));
      for (std::size_t r : rng.sample(n, k)) rows.push_back(static_cast<std::uint32_t>(r));
    } else {
      rows = all_rows;
    }

    std::vector<int> features;
    if (params.feature_fraction < 1.0) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(params.feature_fraction * static_cast<double>(p))));
      for (std::size_t j : rng.sample(p, k)) features.push_back(static_cast<int>(j));
    } else {
      features.resize(p);
      std::iota(features.begin(), features.end(), 0);
    }

    Tree tree = grower.grow(t, std::move(rows), g, h, std::move(features), hooks);
    if (params.loss != Loss::kSquared) {
      for (const auto& [node, leaf_rows] : grower.leaf_rows()) {
        if (leaf_rows.empty()) continue;
        std::vector<double> r;
        r.reserve(leaf_rows.size());
        for (std::uint32_t i : leaf_rows) r.push_back(residual[i]);
        tree.nodes[static_cast<std::size_t>(node)].value = renew_leaf(std::move(r), params, delta);
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const double> x(rows_major.data() + i * p, p);
      pred[i] += params.learning_rate * tree.predict(x);
    }
    if (hooks.train_rmse) hooks.train_rmse->push_back(rmse_of(y, pred));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace

TreeEnsemble fit_gbdt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const BoostParams& params, const FitHooks& hooks) {
  return fit_impl(X, y, params, {}, false, hooks);
}

TreeEnsemble fit_leafwise(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const BoostParams& params,
                          const std::vector<std::size_t>& categorical_columns,
                          const FitHooks& hooks) {
  return fit_impl(X, y, params, categorical_columns, true, hooks);
}

Eigen::VectorXd predict_ensemble(const TreeEnsemble& model, const Eigen::MatrixXd& X) {
  return model.predict(X);
}

}  // namespace valuecast::boosting
