#include "valuecast/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "valuecast/csv.hpp"
#include "valuecast/error.hpp"
#include "valuecast/text.hpp"

namespace valuecast::features {

namespace {

int sum_of(const std::array<int, kNumAbilities>& a,
           std::initializer_list<Ability> which) {
  int s = 0;
  for (Ability w : which) s += a[w];
  return s;
}

// Half-up rounding of sum/n for non-negative integers.
int average_of(const std::array<int, kNumAbilities>& a,
               std::initializer_list<Ability> which) {
  const int n = static_cast<int>(which.size());
  return (2 * sum_of(a, which) + n) / (2 * n);
}

// Splits "<number><suffix>" with optional whitespace between them.
bool split_number(std::string_view raw, double& value, std::string& suffix) {
  raw = text::trim(raw);
  std::size_t i = 0;
  while (i < raw.size() &&
         ((raw[i] >= '0' && raw[i] <= '9') || raw[i] == '.')) {
    ++i;
  }
  const auto v = text::parse_double(raw.substr(0, i));
  if (!v) return false;
  value = *v;
  suffix = text::to_lower(text::trim(raw.substr(i)));
  return true;
}

}  // namespace

const std::array<DeclaredRange, 16>& declared_ranges() {
  using C = CalculatedAbilities;
  static const std::array<DeclaredRange, 16> ranges = {{
      {"PAC", 1, 99, &C::pac},
      {"SHO", 1, 99, &C::sho},
      {"PAS", 1, 99, &C::pas},
      {"DRI", 1, 99, &C::dri},
      {"DEF", 1, 99, &C::def},
      {"PHY", 1, 99, &C::phy},
      {"Total Attacking", 5, 495, &C::attacking},
      {"Total Skill", 5, 495, &C::skill},
      {"Total Movement", 5, 495, &C::movement},
      {"Total Power", 5, 495, &C::power},
      {"Total Defending", 3, 297, &C::defending},
      {"Total Mentality", 6, 594, &C::mentality},
      {"Total Goalkeeping", 5, 495, &C::goalkeeping},
      {"Base Stats", 6, 594, &C::base_stats},
      {"Total Stats", 39, 3500, &C::total_stats},
      {"Growth", 0, 98, &C::growth},
  }};
  return ranges;
}

CalculatedAbilities calc_abilities(const std::array<int, kNumAbilities>& a,
                                   int overall, int potential) {
  CalculatedAbilities c;
  c.pac = average_of(a, {kSprintSpeed, kAcceleration});
  c.sho = average_of(a, {kFinishing, kLongShots, kShotPower});
  c.pas = average_of(a, {kCrossing, kShortPassing, kLongPassing});
  c.dri = average_of(a, {kBallControl, kAgility, kBalance});
  // "Tackling" is the standing tackle.
  c.def = average_of(a, {kMarking, kStandingTackle, kStrength});
  c.phy = average_of(a, {kStrength, kStamina, kJumping});
  c.attacking = sum_of(a, {kCrossing, kFinishing, kHeadingAccuracy,
                           kShortPassing, kVolleys});
  c.skill = sum_of(a, {kDribbling, kCurve, kFkAccuracy, kLongPassing,
                       kBallControl});
  c.movement = sum_of(a, {kAcceleration, kAgility, kSprintSpeed, kReactions,
                          kBalance});
  c.power = sum_of(a, {kShotPower, kJumping, kStamina, kStrength, kLongShots});
  c.defending = sum_of(a, {kMarking, kSlidingTackle, kStandingTackle});
  c.mentality = sum_of(a, {kAggression, kReactions, kPositioning,
                           kInterceptions, kVision, kComposure});
  c.goalkeeping = sum_of(a, {kGkPositioning, kGkDiving, kGkHandling,
                             kGkKicking, kGkReflexes});
  c.base_stats = c.pac + c.sho + c.pas + c.dri + c.def + c.phy;
  c.total_stats = std::accumulate(a.begin(), a.end(), 0);
  c.growth = potential - overall;
  return c;
}

CalculatedAbilities calc_abilities(const ingest::PlayerRecord& record) {
  return calc_abilities(record.abilities, record.overall, record.potential);
}

double convert_height(std::string_view raw) {
  const std::string_view s = text::trim(raw);
  const auto bad = [&] {
    return Error(ErrorCode::kBadHeight, "cannot read height '" + std::string(s) + "'");
  };
  const auto feet_mark = s.find('\'');
  if (feet_mark != std::string_view::npos) {
    const auto feet = text::parse_int(s.substr(0, feet_mark));
    std::string_view rest = text::trim(s.substr(feet_mark + 1));
    if (!rest.empty() && rest.back() == '"') rest.remove_suffix(1);
    const auto inches = rest.empty() ? std::optional<long>(0) : text::parse_int(rest);
    if (!feet || !inches || *feet < 0 || *inches < 0 || *inches >= 12) throw bad();
    const double cm = static_cast<double>(*feet * 12 + *inches) * 2.54;
    if (cm <= 0) throw bad();
    return text::round_to(cm, 2);
  }
  double value = 0;
  std::string suffix;
  if (!split_number(s, value, suffix) || suffix != "cm" || value <= 0) throw bad();
  return text::round_to(value, 2);
}

double convert_weight(std::string_view raw) {
  const std::string_view s = text::trim(raw);
  double value = 0;
  std::string suffix;
  if (!split_number(s, value, suffix) || value <= 0) {
    throw Error(ErrorCode::kBadWeight, "cannot read weight '" + std::string(s) + "'");
  }
  if (suffix == "lbs" || suffix == "lb") return text::round_to(value * 0.45359237, 2);
  if (suffix == "kg") return text::round_to(value, 2);
  throw Error(ErrorCode::kBadWeight, "unknown weight unit in '" + std::string(s) + "'");
}

double compute_bmi(double height_cm, double weight_kg) {
  if (!(height_cm > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "height must be positive");
  }
  const double m = height_cm / 100.0;
  return text::round_to(weight_kg / (m * m), 2);
}

double unify_monetary(std::string_view raw) {
  std::string_view s = text::trim(raw);
  const auto bad = [&] {
    return Error(ErrorCode::kBadMoney, "cannot read amount '" + std::string(raw) + "'");
  };
  constexpr std::string_view kEuro = "\xE2\x82\xAC";  // €
  if (s.substr(0, kEuro.size()) != kEuro) throw bad();
  s.remove_prefix(kEuro.size());
  double value = 0;
  std::string suffix;
  if (!split_number(s, value, suffix) || value < 0) throw bad();
  if (suffix == "m") return text::round_to(value * 1000.0, 3);
  if (suffix == "k") return text::round_to(value, 3);
  if (suffix.empty()) return text::round_to(value / 1000.0, 3);
  throw bad();
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.column_names = column_names;
  out.categorical_columns = categorical_columns;
  out.groups = groups;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
    out.y(static_cast<Eigen::Index>(i)) = y(r);
  }
  return out;
}

namespace {

struct Layout {
  std::vector<std::string> names;
  std::vector<OneHotGroup> groups;
};

const Layout& layout() {
  static const Layout l = [] {
    Layout out;
    auto& n = out.names;
    auto group = [&](std::string name, auto labels, bool multi) {
      OneHotGroup g{name, n.size(), labels.size(), multi};
      for (auto label : labels) n.push_back(name + "_" + std::string(label));
      out.groups.push_back(g);
    };
    for (auto c : {"Age", "Height", "Weight", "BMI"}) n.emplace_back(c);
    group("Continent", kContinentNames, false);
    for (auto c : {"International Reputation", "Weak Foot", "Skill Moves",
                   "Attacking Work Rate", "Defensive Work Rate"}) {
      n.emplace_back(c);
    }
    group("Preferred Foot", kFootNames, false);
    group("League", kLeagueNames, false);
    for (auto a : kAbilityNames) n.emplace_back(a);
    for (const auto& r : declared_ranges()) {
      if (r.name != "Growth") n.emplace_back(r.name);
    }
    for (auto c : {"Overall", "BOV", "Potential", "Growth", "Wage",
                   "Release Clause"}) {
      n.emplace_back(c);
    }
    group("Position", kPositionCodes, true);
    group("Best Position", kPositionCodes, false);
    for (auto s : kMatchStatNames) n.emplace_back(s);
    return out;
  }();
  return l;
}

std::size_t group_start(std::string_view name) {
  for (const auto& g : layout().groups) {
    if (g.name == name) return g.first;
  }
  throw Error(ErrorCode::kInvalidArgument, "no group " + std::string(name));
}

}  // namespace

const std::vector<std::string>& feature_columns() { return layout().names; }
const std::vector<OneHotGroup>& one_hot_groups() { return layout().groups; }

std::vector<double> encode_record(const ingest::PlayerRecord& r) {
  std::vector<double> row;
  row.reserve(kNumFeatureColumns);
  auto one_hot = [&](std::size_t size, std::size_t hot) {
    for (std::size_t i = 0; i < size; ++i) row.push_back(i == hot ? 1.0 : 0.0);
  };
  row.push_back(r.age);
  row.push_back(r.height_cm);
  row.push_back(r.weight_kg);
  row.push_back(compute_bmi(r.height_cm, r.weight_kg));
  one_hot(kContinentNames.size(), static_cast<std::size_t>(r.continent));
  row.push_back(r.international_reputation);
  row.push_back(r.weak_foot);
  row.push_back(r.skill_moves);
  row.push_back(static_cast<double>(r.attacking_work_rate));
  row.push_back(static_cast<double>(r.defensive_work_rate));
  one_hot(kFootNames.size(), static_cast<std::size_t>(r.preferred_foot));
  one_hot(kLeagueNames.size(), static_cast<std::size_t>(r.league));
  for (int a : r.abilities) row.push_back(a);
  const CalculatedAbilities c = calc_abilities(r);
  for (const auto& range : declared_ranges()) {
    if (range.name != "Growth") row.push_back(c.*range.member);
  }
  row.push_back(r.overall);
  row.push_back(r.best_overall);
  row.push_back(r.potential);
  row.push_back(c.growth);
  row.push_back(r.wage);
  row.push_back(r.release_clause);
  for (std::size_t p = 0; p < kNumPositions; ++p) {
    const bool listed =
        std::find(r.positions.begin(), r.positions.end(), p) != r.positions.end();
    row.push_back(listed ? 1.0 : 0.0);
  }
  one_hot(kNumPositions, r.best_position);
  for (double s : r.stats) row.push_back(s);
  return row;
}

DecodedCategoricals decode_categoricals(std::span<const double> row) {
  if (row.size() != kNumFeatureColumns) {
    throw Error(ErrorCode::kSchemaMismatch, "row has wrong width");
  }
  auto hot = [&](std::string_view group, std::size_t size) {
    const std::size_t first = group_start(group);
    for (std::size_t i = 0; i < size; ++i) {
      if (row[first + i] == 1.0) return i;
    }
    throw Error(ErrorCode::kSchemaMismatch, "no hot column in " + std::string(group));
  };
  const auto& names = feature_columns();
  const auto col = [&](std::string_view name) {
    return static_cast<std::size_t>(
        std::find(names.begin(), names.end(), name) - names.begin());
  };
  DecodedCategoricals d;
  d.continent = static_cast<Continent>(hot("Continent", kContinentNames.size()));
  d.preferred_foot = static_cast<Foot>(hot("Preferred Foot", kFootNames.size()));
  d.league = static_cast<League>(hot("League", kLeagueNames.size()));
  d.attacking_work_rate = static_cast<WorkRate>(row[col("Attacking Work Rate")]);
  d.defensive_work_rate = static_cast<WorkRate>(row[col("Defensive Work Rate")]);
  const std::size_t first = group_start("Position");
  for (std::size_t p = 0; p < kNumPositions; ++p) {
    if (row[first + p] == 1.0) d.positions.push_back(static_cast<Position>(p));
  }
  d.best_position = static_cast<Position>(hot("Best Position", kNumPositions));
  return d;
}

FeatureMatrix build_matrix(const std::vector<ingest::PlayerRecord>& records) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no records to encode");
  }
  FeatureMatrix m;
  m.column_names = feature_columns();
  m.groups = one_hot_groups();
  for (const auto& g : m.groups) {
    for (std::size_t i = 0; i < g.size; ++i) m.categorical_columns.push_back(g.first + i);
  }
  const auto n = static_cast<Eigen::Index>(records.size());
  const auto p = static_cast<Eigen::Index>(kNumFeatureColumns);
  m.X.resize(n, p);
  m.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    const std::vector<double> row = encode_record(r);
    for (Eigen::Index j = 0; j < p; ++j) m.X(i, j) = row[static_cast<std::size_t>(j)];
    m.y(i) = r.market_value;
  }
  return m;
}

FeatureMatrix collapse_one_hot(const FeatureMatrix& m) {
  std::vector<const OneHotGroup*> owner(static_cast<std::size_t>(m.cols()), nullptr);
  for (const auto& g : m.groups) {
    for (std::size_t i = 0; i < g.size; ++i) owner[g.first + i] = &g;
  }

  FeatureMatrix out;
  out.y = m.y;
  // Each output column copies a source column or codes a whole group.
  std::vector<std::pair<std::size_t, const OneHotGroup*>> plan;
  for (std::size_t j = 0; j < owner.size(); ++j) {
    const OneHotGroup* g = owner[j];
    if (g != nullptr && g->multi_label && j == g->first) {
      out.groups.push_back({g->name, out.column_names.size(), g->size, true});
    }
    if (g == nullptr || g->multi_label) {
      if (g != nullptr) out.categorical_columns.push_back(out.column_names.size());
      plan.emplace_back(j, nullptr);
      out.column_names.push_back(m.column_names[j]);
    } else if (j == g->first) {
      out.categorical_columns.push_back(out.column_names.size());
      plan.emplace_back(j, g);
      out.column_names.push_back(g->name);
    }
  }

  out.X.resize(m.rows(), static_cast<Eigen::Index>(plan.size()));
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto [src, g] = plan[k];
    const auto dst = static_cast<Eigen::Index>(k);
    if (g == nullptr) {
      out.X.col(dst) = m.X.col(static_cast<Eigen::Index>(src));
      continue;
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double code = -1;
      for (std::size_t c = 0; c < g->size; ++c) {
        if (m.X(i, static_cast<Eigen::Index>(g->first + c)) == 1.0) {
          code = static_cast<double>(c);
          break;
        }
      }
      out.X(i, dst) = code;
    }
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pearson: length mismatch");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pearson: need at least 2 points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) {
    throw Error(ErrorCode::kZeroVariance, "pearson: constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<Correlation> correlation_report(const FeatureMatrix& m,
                                            double threshold) {
  if (!(threshold >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be >= 0");
  }
  std::vector<Correlation> out;
  const std::vector<double> y(m.y.data(), m.y.data() + m.y.size());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const Eigen::VectorXd col = m.X.col(j);
    double r = 0;
    try {
      r = pearson(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), y);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kZeroVariance) continue;
      throw;
    }
    if (std::abs(r) >= threshold) {
      out.push_back({m.column_names[static_cast<std::size_t>(j)],
                     static_cast<std::size_t>(j), r});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::abs(a.r) > std::abs(b.r);
  });
  return out;
}

void write_matrix_csv(std::ostream& os, const FeatureMatrix& m) {
  std::vector<std::string> header = m.column_names;
  header.emplace_back("Value");
  csv::write_row(os, header);
  std::vector<std::string> fields(header.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      fields[static_cast<std::size_t>(j)] = text::format_double(m.X(i, j));
    }
    fields.back() = text::format_double(m.y(i));
    csv::write_row(os, fields);
  }
}

FeatureMatrix parse_matrix_csv(std::string_view content) {
  const csv::Table t = csv::parse(content);
  if (t.header.size() < 2) {
    throw Error(ErrorCode::kSchemaMismatch, "matrix needs features and a target");
  }
  FeatureMatrix m;
  m.column_names.assign(t.header.begin(), t.header.end() - 1);
  if (m.column_names == feature_columns()) {
    m.groups = one_hot_groups();
    for (const auto& g : m.groups) {
      for (std::size_t i = 0; i < g.size; ++i) m.categorical_columns.push_back(g.first + i);
    }
  }
  if (t.rows.empty()) throw Error(ErrorCode::kEmptyDataset, "matrix has no rows");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto p = static_cast<Eigen::Index>(m.column_names.size());
  m.X.resize(n, p);
  m.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = t.rows[static_cast<std::size_t>(i)];
    if (rec.fields.size() != t.header.size()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(rec.line) + ": wrong field count");
    }
    for (Eigen::Index j = 0; j <= p; ++j) {
      const auto v = text::parse_double(rec.fields[static_cast<std::size_t>(j)]);
      if (!v) {
        throw Error(ErrorCode::kBadNumber, "line " + std::to_string(rec.line) +
                                               ": non-numeric entry");
      }
      if (j == p) {
        m.y(i) = *v;
      } else {
        m.X(i, j) = *v;
      }
    }
  }
  return m;
}

FeatureMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_csv(buf.str());
}

void write_correlation_csv(std::ostream& os,
                           const std::vector<Correlation>& report) {
  csv::write_row(os, {"rank", "feature", "column", "r", "abs_r"});
  for (std::size_t i = 0; i < report.size(); ++i) {
    const auto& c = report[i];
    csv::write_row(os, {std::to_string(i + 1), c.feature, std::to_string(c.column),
                        text::format_fixed(c.r, 6), text::format_fixed(std::abs(c.r), 6)});
  }
}

}  // namespace valuecast::features
