#include "valuecast/models.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "valuecast/error.hpp"
#include "valuecast/linear.hpp"
#include "valuecast/text.hpp"

namespace valuecast::models {

using hpo::Domain;
using hpo::Params;
using hpo::SearchSpace;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLm: return "LM";
    case ModelKind::kLasso: return "lasso";
    case ModelKind::kElasticNet: return "E-Net";
    case ModelKind::kKrr: return "KRR";
    case ModelKind::kGbdt: return "GBDT";
    case ModelKind::kLeafwise: return "leafwise";
    case ModelKind::kLeafwisePruning: return "leafwise+pruning";
  }
  return "LM";
}

ModelKind parse_model(const std::string& name) {
  const std::string want = text::to_lower(text::trim(name));
  for (ModelKind k : kAllModels) {
    if (text::to_lower(to_string(k)) == want) return k;
  }
  if (want == "enet" || want == "elasticnet") return ModelKind::kElasticNet;
  throw Error(ErrorCode::kInvalidArgument, "unknown model '" + name + "'");
}

bool is_linear_family(ModelKind kind) {
  return kind == ModelKind::kLm || kind == ModelKind::kLasso ||
         kind == ModelKind::kElasticNet || kind == ModelKind::kKrr;
}

bool is_tree_model(ModelKind kind) { return !is_linear_family(kind); }

SearchSpace search_space(ModelKind kind, std::size_t num_features) {
  SearchSpace s;
  auto& d = s.domains;
  const auto tol = Domain::log_uniform("tol", 1e-6, 1e-2, 1e-4);
  switch (kind) {
    case ModelKind::kLm:
      break;
    case ModelKind::kLasso:
      d = {Domain::log_uniform("alpha", 1e-4, 10, 1e-3), tol};
      break;
    case ModelKind::kElasticNet:
      d = {Domain::log_uniform("alpha", 1e-4, 10, 1e-3), Domain::uniform("l1_ratio", 0, 1, 0.5), tol};
      break;
    case ModelKind::kKrr: {
      const double gamma = std::clamp(1.0 / static_cast<double>(std::max<std::size_t>(num_features, 1)),
                                      1e-4, 10.0);
      d = {Domain::log_uniform("alpha", 1e-4, 10, 1), Domain::log_uniform("gamma", 1e-4, 10, gamma),
           Domain::uniform("coef0", 0, 10, 1)};
      break;
    }
    case ModelKind::kGbdt:
      d = {Domain::uniform("learning_rate", 0, 1, 0.1, true),
           Domain::integer("n_estimators", 50, 3000, 100),
           Domain::integer("max_depth", 1, 8, 3),
           Domain::integer("min_child_samples", 1, 50, 1),
           Domain::categorical("loss", {"squared", "absolute", "huber", "quantile"})};
      break;
    case ModelKind::kLeafwise:
    case ModelKind::kLeafwisePruning:
      d = {Domain::uniform("learning_rate", 0, 1, 0.1, true),
           Domain::integer("n_estimators", 50, 3000, 100),
           Domain::integer("num_leaves", 2, 512, 31, true),
           Domain::integer("min_child_samples", 1, 100, 20),
           Domain::log_uniform("lambda_l2", 1e-8, 10, 1e-8),
           Domain::uniform("min_split_gain", 0, 1, 0),
           Domain::uniform("feature_fraction", 0.4, 1, 1, true),
           Domain::uniform("bagging_fraction", 0.4, 1, 1, true),
           Domain::categorical("boosting_type", {"gbdt", "goss"})};
      break;
  }
  s.validate();
  return s;
}

std::string describe_params(const SearchSpace& space, const Params& params) {
  std::string out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!out.empty()) out += ';';
    out += space.domains[i].name + '=' + space.domains[i].format(params.at(i));
  }
  return out;
}

boosting::BoostParams boost_params(ModelKind kind, const SearchSpace& s, const Params& p,
                                   std::uint64_t seed) {
  boosting::BoostParams b;
  if (kind == ModelKind::kGbdt) {
    b = boosting::BoostParams::gbdt_defaults();
    b.learning_rate = s.get(p, "learning_rate");
    b.n_estimators = static_cast<int>(s.get(p, "n_estimators"));
    b.max_depth = static_cast<int>(s.get(p, "max_depth"));
    b.min_child_samples = static_cast<int>(s.get(p, "min_child_samples"));
    b.loss = boosting::parse_loss(s.domains[s.index("loss")].format(s.get(p, "loss")));
  } else if (kind == ModelKind::kLeafwise || kind == ModelKind::kLeafwisePruning) {
    b = boosting::BoostParams::leafwise_defaults();
    b.learning_rate = s.get(p, "learning_rate");
    b.n_estimators = static_cast<int>(s.get(p, "n_estimators"));
    b.num_leaves = static_cast<int>(s.get(p, "num_leaves"));
    b.min_child_samples = static_cast<int>(s.get(p, "min_child_samples"));
    b.lambda_l2 = s.get(p, "lambda_l2");
    b.min_split_gain = s.get(p, "min_split_gain");
    b.feature_fraction = s.get(p, "feature_fraction");
    b.bagging_fraction = s.get(p, "bagging_fraction");
    b.boosting_type = boosting::parse_boosting_type(
        s.domains[s.index("boosting_type")].format(s.get(p, "boosting_type")));
  } else {
    throw Error(ErrorCode::kInvalidArgument, to_string(kind) + " is not a boosting model");
  }
  b.seed = seed;
  return b;
}

namespace {

class LinearRegressor final : public Regressor {
 public:
  LinearRegressor(ModelKind kind, linear::LinearModel m) : kind_(kind), model_(std::move(m)) {}
  ModelKind kind() const override { return kind_; }
  Eigen::VectorXd predict(const features::FeatureMatrix& m) const override {
    return model_.predict(m.X);
  }
  void save(std::ostream& out) const override { linear::write_model(out, model_); }

 private:
  ModelKind kind_;
  linear::LinearModel model_;
};

class KernelRegressor final : public Regressor {
 public:
  explicit KernelRegressor(linear::KernelModel m) : model_(std::move(m)) {}
  ModelKind kind() const override { return ModelKind::kKrr; }
  Eigen::VectorXd predict(const features::FeatureMatrix& m) const override {
    return model_.predict(m.X);
  }
  void save(std::ostream& out) const override { linear::write_model(out, model_); }

 private:
  linear::KernelModel model_;
};

bool collapses(ModelKind kind) {
  return kind == ModelKind::kLeafwise || kind == ModelKind::kLeafwisePruning;
}

class TreeRegressor final : public Regressor {
 public:
  TreeRegressor(ModelKind kind, boosting::TreeEnsemble e) : kind_(kind), model_(std::move(e)) {}
  ModelKind kind() const override { return kind_; }
  Eigen::VectorXd predict(const features::FeatureMatrix& m) const override {
    return model_.predict(model_input(m).X);
  }
  void save(std::ostream& out) const override { boosting::write_ensemble(out, model_); }
  const boosting::TreeEnsemble* ensemble() const override { return &model_; }
  features::FeatureMatrix model_input(const features::FeatureMatrix& m) const override {
    if (collapses(kind_) && !m.groups.empty()) return features::collapse_one_hot(m);
    return m;
  }

 private:
  ModelKind kind_;
  boosting::TreeEnsemble model_;
};

}  // namespace

std::unique_ptr<Regressor> fit_model(ModelKind kind, const Params& params,
                                     const features::FeatureMatrix& train, std::uint64_t seed) {
  const SearchSpace space = search_space(kind, static_cast<std::size_t>(train.cols()));
  if (!space.contains(params)) {
    throw Error(ErrorCode::kInvalidArgument, "parameters outside the " + to_string(kind) + " space");
  }
  switch (kind) {
    case ModelKind::kLm: {
      try {
        return std::make_unique<LinearRegressor>(kind, linear::fit_ols(train.X, train.y));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingularDesign) throw;
        return std::make_unique<LinearRegressor>(kind, linear::fit_ridge(train.X, train.y, kLmRidge));
      }
    }
    case ModelKind::kLasso:
    case ModelKind::kElasticNet: {
      linear::CoordinateDescentOptions o;
      o.alpha = space.get(params, "alpha");
      o.tol = space.get(params, "tol");
      o.l1_ratio = kind == ModelKind::kLasso ? 1.0 : space.get(params, "l1_ratio");
      return std::make_unique<LinearRegressor>(kind, linear::fit_elastic_net(train.X, train.y, o));
    }
    case ModelKind::kKrr: {
      linear::Kernel k;
      k.type = linear::Kernel::Type::kPolynomial;
      k.degree = 2;
      k.gamma = space.get(params, "gamma");
      k.coef0 = space.get(params, "coef0");
      return std::make_unique<KernelRegressor>(
          linear::fit_krr(train.X, train.y, space.get(params, "alpha"), k));
    }
    case ModelKind::kGbdt:
      return std::make_unique<TreeRegressor>(
          kind, boosting::fit_gbdt(train.X, train.y, boost_params(kind, space, params, seed)));
    case ModelKind::kLeafwise:
    case ModelKind::kLeafwisePruning: {
      const features::FeatureMatrix in =
          train.groups.empty() ? train : features::collapse_one_hot(train);
      return std::make_unique<TreeRegressor>(
          kind, boosting::fit_leafwise(in.X, in.y, boost_params(kind, space, params, seed),
                                       in.categorical_columns));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model");
}

void save_model(std::ostream& out, const Regressor& model) {
  out << "valuecast-model " << to_string(model.kind()) << '\n';
  model.save(out);
}

std::unique_ptr<Regressor> load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "empty model file");
  std::istringstream ls(line);
  std::string tag, name;
  ls >> tag;
  std::getline(ls >> std::ws, name);
  if (tag != "valuecast-model") throw Error(ErrorCode::kParse, "not a model file");
  const ModelKind kind = parse_model(name);
  switch (kind) {
    case ModelKind::kLm:
    case ModelKind::kLasso:
    case ModelKind::kElasticNet:
      return std::make_unique<LinearRegressor>(kind, linear::read_linear_model(in));
    case ModelKind::kKrr:
      return std::make_unique<KernelRegressor>(linear::read_kernel_model(in));
    default:
      return std::make_unique<TreeRegressor>(kind, boosting::read_ensemble(in));
  }
}

}  // namespace valuecast::models
