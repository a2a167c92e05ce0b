#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuecast/ingest.hpp"

namespace valuecast::features {

// Composite ratings derived from the 35 abilities. Averages round half-up to
// integers; sums are exact.
struct CalculatedAbilities {
  int pac = 0;
  int sho = 0;
  int pas = 0;
  int dri = 0;
  int def = 0;
  int phy = 0;
  int attacking = 0;
  int skill = 0;
  int movement = 0;
  int power = 0;
  int defending = 0;
  int mentality = 0;
  int goalkeeping = 0;
  int base_stats = 0;
  int total_stats = 0;
  int growth = 0;

  bool operator==(const CalculatedAbilities&) const = default;
};

struct DeclaredRange {
  std::string_view name;
  int lo;
  int hi;
  int CalculatedAbilities::*member;
};

// The documented value range of every calculated attribute.
const std::array<DeclaredRange, 16>& declared_ranges();

CalculatedAbilities calc_abilities(const std::array<int, kNumAbilities>& abilities,
                                   int overall, int potential);
CalculatedAbilities calc_abilities(const ingest::PlayerRecord& record);

// Unit normalization. Each result is rounded to 2 decimals.
double convert_height(std::string_view raw);  // cm; throws kBadHeight
double convert_weight(std::string_view raw);  // kg; throws kBadWeight
double compute_bmi(double height_cm, double weight_kg);
double unify_monetary(std::string_view raw);  // k€; throws kBadMoney

// A block of indicator columns produced by one categorical attribute.
struct OneHotGroup {
  std::string name;
  std::size_t first = 0;
  std::size_t size = 0;
  bool multi_label = false;
};

struct FeatureMatrix {
  std::vector<std::string> column_names;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;  // market value, k€
  std::vector<std::size_t> categorical_columns;
  std::vector<OneHotGroup> groups;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }
  FeatureMatrix subset(std::span<const std::size_t> rows) const;
};

// Number of columns of the expanded design matrix.
inline constexpr std::size_t kNumFeatureColumns = 152;

const std::vector<std::string>& feature_columns();
const std::vector<OneHotGroup>& one_hot_groups();

std::vector<double> encode_record(const ingest::PlayerRecord& record);

// Categorical fields recovered from an encoded row.
struct DecodedCategoricals {
  Continent continent;
  Foot preferred_foot;
  League league;
  WorkRate attacking_work_rate;
  WorkRate defensive_work_rate;
  std::vector<Position> positions;
  Position best_position;

  bool operator==(const DecodedCategoricals&) const = default;
};
DecodedCategoricals decode_categoricals(std::span<const double> row);

// Throws Error(kEmptyDataset) on an empty list.
FeatureMatrix build_matrix(const std::vector<ingest::PlayerRecord>& records);

// Replaces every single-label one-hot group with one integer-coded column
// flagged categorical, for learners that split categories natively. The
// multi-label position block stays as indicators.
FeatureMatrix collapse_one_hot(const FeatureMatrix& m);

// Pearson product-moment correlation. Throws kZeroVariance or
// kInvalidArgument (n < 2, length mismatch).
double pearson(std::span<const double> x, std::span<const double> y);

struct Correlation {
  std::string feature;
  std::size_t column = 0;
  double r = 0;
};

// Features with |r(feature, y)| >= threshold, by |r| descending (ties by
// column order). Constant columns are skipped.
std::vector<Correlation> correlation_report(const FeatureMatrix& m,
                                            double threshold);

void write_matrix_csv(std::ostream& os, const FeatureMatrix& m);
FeatureMatrix read_matrix_csv(const std::filesystem::path& path);
FeatureMatrix parse_matrix_csv(std::string_view content);

void write_correlation_csv(std::ostream& os,
                           const std::vector<Correlation>& report);

}  // namespace valuecast::features
