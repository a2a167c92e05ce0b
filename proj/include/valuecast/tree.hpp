#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace valuecast::boosting {

enum class Loss { kSquared, kAbsolute, kHuber, kQuantile };
std::string to_string(Loss loss);
Loss parse_loss(const std::string& name);

enum class SplitKind { kLeaf, kNumeric, kCategorical };

struct TreeNode {
  SplitKind kind = SplitKind::kLeaf;
  int feature = -1;
  double threshold = 0;            // numeric: x <= threshold goes left
  std::vector<int> left_categories;   // sorted
  std::vector<int> right_categories;  // sorted
  int left = -1;
  int right = -1;
  double value = 0;  // unscaled output; meaningful on leaves
  double cover = 0;  // sum of hessians of the training rows reaching the node

  bool is_leaf() const { return kind == SplitKind::kLeaf; }
};

// Node 0 is the root. Children always have larger ids than their parent.
struct Tree {
  std::vector<TreeNode> nodes;

  // Child id taken by x at an internal node. A category seen on neither side
  // during training goes to the child with larger cover (left on a tie).
  int next(int node, std::span<const double> x) const;
  int leaf(std::span<const double> x) const;
  double predict(std::span<const double> x) const { return nodes[leaf(x)].value; }
  int depth() const;
  int num_leaves() const;
};

// prediction(x) = base_score + learning_rate * sum_t tree_t(x). Trees hold
// unscaled leaf outputs; the learning rate is applied once, here.
struct TreeEnsemble {
  std::vector<Tree> trees;
  double learning_rate = 0.1;
  double base_score = 0;
  Loss loss = Loss::kSquared;
  std::size_t num_features = 0;
  std::vector<std::size_t> categorical_columns;

  double predict(std::span<const double> x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;  // SchemaMismatch
};

// Line-oriented text format:
//   valuecast-ensemble 1
//   loss <name> / learning_rate <x> / base_score <x> / features <p>
//   categorical <k> <j1> ... <jk>
//   trees <T>
//   tree <t> <m>            followed by m node lines:
//   <id> leaf <value> <cover>
//   <id> num <feature> <threshold> <left> <right> <value> <cover>
//   <id> cat <feature> <left> <right> <value> <cover> <nl> <c...> <nr> <c...>
// Numbers use the shortest round-trip form, so a reload predicts bit-for-bit.
void write_ensemble(std::ostream& out, const TreeEnsemble& model);
TreeEnsemble read_ensemble(std::istream& in);  // Parse
std::string ensemble_to_string(const TreeEnsemble& model);
TreeEnsemble ensemble_from_string(const std::string& text);

}  // namespace valuecast::boosting
