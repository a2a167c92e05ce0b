#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include "valuecast/boosting.hpp"
#include "valuecast/features.hpp"
#include "valuecast/search_space.hpp"

namespace valuecast::models {

enum class ModelKind { kLm, kLasso, kElasticNet, kKrr, kGbdt, kLeafwise, kLeafwisePruning };
inline constexpr std::array<ModelKind, 7> kAllModels = {
    ModelKind::kLm,   ModelKind::kLasso,    ModelKind::kElasticNet,     ModelKind::kKrr,
    ModelKind::kGbdt, ModelKind::kLeafwise, ModelKind::kLeafwisePruning};

// LM, lasso, E-Net, KRR, GBDT, leafwise, leafwise+pruning
std::string to_string(ModelKind kind);
ModelKind parse_model(const std::string& name);  // case-insensitive
bool is_linear_family(ModelKind kind);
bool is_tree_model(ModelKind kind);

// Tunable parameters and their defaults. LM has none. The pruning variant
// shares the leaf-wise space; pruning is a property of the study.
hpo::SearchSpace search_space(ModelKind kind, std::size_t num_features);
std::string describe_params(const hpo::SearchSpace& space, const hpo::Params& params);

boosting::BoostParams boost_params(ModelKind kind, const hpo::SearchSpace& space,
                                   const hpo::Params& params, std::uint64_t seed);

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual ModelKind kind() const = 0;
  virtual Eigen::VectorXd predict(const features::FeatureMatrix& m) const = 0;
  virtual void save(std::ostream& out) const = 0;
  // Tree models expose their ensemble and the design matrix it reads.
  virtual const boosting::TreeEnsemble* ensemble() const { return nullptr; }
  virtual features::FeatureMatrix model_input(const features::FeatureMatrix& m) const { return m; }
};

// Linear models read the expanded one-hot matrix; GBDT reads it as all
// numeric; the leaf-wise booster reads the collapsed matrix with native
// categorical columns. LM falls back to a ridge penalty of kLmRidge when the
// design is singular (complete dummy groups always are).
inline constexpr double kLmRidge = 1e-8;
std::unique_ptr<Regressor> fit_model(ModelKind kind, const hpo::Params& params,
                                     const features::FeatureMatrix& train, std::uint64_t seed);

// A saved model starts with "valuecast-model <kind>".
void save_model(std::ostream& out, const Regressor& model);
std::unique_ptr<Regressor> load_model(std::istream& in);

}  // namespace valuecast::models
