#include "valuecast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "valuecast/error.hpp"
#include "valuecast/text.hpp"

namespace valuecast::boosting {

namespace {

bool contains(const std::vector<int>& sorted, int code) {
  return std::binary_search(sorted.begin(), sorted.end(), code);
}

}  // namespace

std::string to_string(Loss loss) {
  switch (loss) {
    case Loss::kSquared: return "squared";
    case Loss::kAbsolute: return "absolute";
    case Loss::kHuber: return "huber";
    case Loss::kQuantile: return "quantile";
  }
  return "squared";
}

Loss parse_loss(const std::string& name) {
  for (Loss l : {Loss::kSquared, Loss::kAbsolute, Loss::kHuber, Loss::kQuantile}) {
    if (to_string(l) == name) return l;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown loss '" + name + "'");
}

int Tree::next(int node, std::span<const double> x) const {
  const TreeNode& n = nodes[static_cast<std::size_t>(node)];
  const double v = x[static_cast<std::size_t>(n.feature)];
  if (n.kind == SplitKind::kNumeric) {
    if (v <= n.threshold) return n.left;
    if (v > n.threshold) return n.right;
  } else {
    const int code = static_cast<int>(std::lround(v));
    if (contains(n.left_categories, code)) return n.left;
    if (contains(n.right_categories, code)) return n.right;
  }
  // NaN or unseen category.
  const auto& l = nodes[static_cast<std::size_t>(n.left)];
  const auto& r = nodes[static_cast<std::size_t>(n.right)];
  return r.cover > l.cover ? n.right : n.left;
}

int Tree::leaf(std::span<const double> x) const {
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].is_leaf()) node = next(node, x);
  return node;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
    d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

int Tree::num_leaves() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                        [](const TreeNode& n) { return n.is_leaf(); }));
}

double TreeEnsemble::predict(std::span<const double> x) const {
  double sum = 0;
  for (const Tree& t : trees) sum += t.predict(x);
  return base_score + learning_rate * sum;
}

Eigen::VectorXd TreeEnsemble::predict(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != num_features) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model expects " + std::to_string(num_features) + " columns, got " +
                    std::to_string(X.cols()));
  }
  Eigen::VectorXd out(X.rows());
  std::vector<double> row(num_features);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (std::size_t j = 0; j < num_features; ++j) row[j] = X(i, static_cast<Eigen::Index>(j));
    out(i) = predict(row);
  }
  return out;
}

void write_ensemble(std::ostream& out, const TreeEnsemble& m) {
  using text::format_double;
  out << "valuecast-ensemble 1\n";
  out << "loss " << to_string(m.loss) << '\n';
  out << "learning_rate " << format_double(m.learning_rate) << '\n';
  out << "base_score " << format_double(m.base_score) << '\n';
  out << "features " << m.num_features << '\n';
  out << "categorical " << m.categorical_columns.size();
  for (auto j : m.categorical_columns) out << ' ' << j;
  out << '\n';
  out << "trees " << m.trees.size() << '\n';
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    const auto& nodes = m.trees[t].nodes;
    out << "tree " << t << ' ' << nodes.size() << '\n';
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const TreeNode& n = nodes[i];
      out << i << ' ';
      switch (n.kind) {
        case SplitKind::kLeaf:
          out << "leaf " << format_double(n.value) << ' ' << format_double(n.cover);
          break;
        case SplitKind::kNumeric:
          out << "num " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left
              << ' ' << n.right << ' ' << format_double(n.value) << ' '
              << format_double(n.cover);
          break;
        case SplitKind::kCategorical:
          out << "cat " << n.feature << ' ' << n.left << ' ' << n.right << ' '
              << format_double(n.value) << ' ' << format_double(n.cover) << ' '
              << n.left_categories.size();
          for (int c : n.left_categories) out << ' ' << c;
          out << ' ' << n.right_categories.size();
          for (int c : n.right_categories) out << ' ' << c;
          break;
      }
      out << '\n';
    }
  }
}

namespace {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream line(const std::string& tag) {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of input, wanted '" + tag + "'");
    ++line_no_;
    std::istringstream ls(s);
    std::string got;
    ls >> got;
    if (got != tag) fail("expected '" + tag + "', got '" + got + "'");
    return ls;
  }

  std::istringstream any() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of input");
    ++line_no_;
    return std::istringstream(s);
  }

  template <typename T>
  T get(std::istringstream& ls) {
    std::string tok;
    if (!(ls >> tok)) fail("missing field");
    if constexpr (std::is_floating_point_v<T>) {
      auto v = text::parse_double(tok);
      if (!v) fail("bad number '" + tok + "'");
      return *v;
    } else {
      auto v = text::parse_int(tok);
      if (!v) fail("bad integer '" + tok + "'");
      return static_cast<T>(*v);
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kParse, "ensemble line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

TreeEnsemble read_ensemble(std::istream& in) {
  Reader r(in);
  TreeEnsemble m;
  {
    auto ls = r.line("valuecast-ensemble");
    if (r.get<int>(ls) != 1) r.fail("unsupported version");
  }
  {
    auto ls = r.line("loss");
    std::string name;
    ls >> name;
    try {
      m.loss = parse_loss(name);
    } catch (const Error&) {
      r.fail("unknown loss " + name);
    }
  }
  { auto ls = r.line("learning_rate"); m.learning_rate = r.get<double>(ls); }
  { auto ls = r.line("base_score"); m.base_score = r.get<double>(ls); }
  { auto ls = r.line("features"); m.num_features = r.get<std::size_t>(ls); }
  {
    auto ls = r.line("categorical");
    const auto k = r.get<std::size_t>(ls);
    for (std::size_t i = 0; i < k; ++i) m.categorical_columns.push_back(r.get<std::size_t>(ls));
  }
  std::size_t num_trees = 0;
  { auto ls = r.line("trees"); num_trees = r.get<std::size_t>(ls); }
  for (std::size_t t = 0; t < num_trees; ++t) {
    auto ls = r.line("tree");
    if (r.get<std::size_t>(ls) != t) r.fail("tree out of order");
    const auto count = r.get<std::size_t>(ls);
    Tree tree;
    tree.nodes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      auto ns = r.any();
      if (r.get<std::size_t>(ns) != i) r.fail("node out of order");
      std::string kind;
      ns >> kind;
      TreeNode& n = tree.nodes[i];
      if (kind == "leaf") {
        n.value = r.get<double>(ns);
        n.cover = r.get<double>(ns);
        continue;
      }
      n.feature = r.get<int>(ns);
      if (kind == "num") {
        n.kind = SplitKind::kNumeric;
        n.threshold = r.get<double>(ns);
      } else if (kind == "cat") {
        n.kind = SplitKind::kCategorical;
      } else {
        r.fail("unknown node kind '" + kind + "'");
      }
      n.left = r.get<int>(ns);
      n.right = r.get<int>(ns);
      n.value = r.get<double>(ns);
      n.cover = r.get<double>(ns);
      if (n.kind == SplitKind::kCategorical) {
        for (auto* set : {&n.left_categories, &n.right_categories}) {
          const auto k = r.get<std::size_t>(ns);
          for (std::size_t c = 0; c < k; ++c) set->push_back(r.get<int>(ns));
        }
      }
      const auto ok = [&](int child) {
        return child > static_cast<int>(i) && child < static_cast<int>(count);
      };
      if (!ok(n.left) || !ok(n.right) ||
          n.feature < 0 || static_cast<std::size_t>(n.feature) >= m.num_features) {
        r.fail("bad node references");
      }
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

std::string ensemble_to_string(const TreeEnsemble& model) {
  std::ostringstream out;
  write_ensemble(out, model);
  return out.str();
}

TreeEnsemble ensemble_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_ensemble(in);
}

}  // namespace valuecast::boosting
