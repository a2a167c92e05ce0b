#include "valuecast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "valuecast/csv.hpp"
#include "valuecast/features.hpp"
#include "valuecast/text.hpp"

namespace valuecast::internal {
extern const std::string_view kCountryContinentCsv;
}

namespace valuecast::ingest {

namespace {

constexpr std::string_view kName = "Name";
constexpr std::string_view kAge = "Age";
constexpr std::string_view kHeight = "Height";
constexpr std::string_view kWeight = "Weight";
constexpr std::string_view kNationality = "Nationality";
constexpr std::string_view kClub = "Club";
constexpr std::string_view kLeague = "League";
constexpr std::string_view kPreferredFoot = "Preferred Foot";
constexpr std::string_view kReputation = "International Reputation";
constexpr std::string_view kWeakFoot = "Weak Foot";
constexpr std::string_view kSkillMoves = "Skill Moves";
constexpr std::string_view kAttackingWorkRate = "Attacking Work Rate";
constexpr std::string_view kDefensiveWorkRate = "Defensive Work Rate";
constexpr std::string_view kPositions = "Positions";
constexpr std::string_view kBestPosition = "Best Position";
constexpr std::string_view kOverall = "Overall";
constexpr std::string_view kBestOverall = "BOV";
constexpr std::string_view kPotential = "Potential";
constexpr std::string_view kValue = "Value";
constexpr std::string_view kWage = "Wage";
constexpr std::string_view kReleaseClause = "Release Clause";

// Thrown inside row parsing and converted to an Issue for that line.
struct RowError {
  ErrorCode code;
  std::string message;
};

class RowReader {
 public:
  RowReader(const csv::Record& record, const std::vector<int>& index,
            const std::vector<std::string>& names)
      : record_(record), index_(index), names_(names) {}

  // Returns the trimmed field, or nullopt (and records a hole) when empty.
  std::optional<std::string_view> get(std::size_t field) {
    const auto col = static_cast<std::size_t>(index_[field]);
    const std::string_view raw = text::trim(record_.fields[col]);
    if (raw.empty()) {
      missing_.push_back(names_[field]);
      return std::nullopt;
    }
    return raw;
  }

  std::vector<std::string> take_missing() { return std::move(missing_); }

 private:
  const csv::Record& record_;
  const std::vector<int>& index_;
  const std::vector<std::string>& names_;
  std::vector<std::string> missing_;
};

long require_int(std::string_view raw, std::string_view field) {
  const auto v = text::parse_int(raw);
  if (!v) {
    throw RowError{ErrorCode::kBadNumber,
                   std::string(field) + "='" + std::string(raw) +
                       "' is not an integer"};
  }
  return *v;
}

double require_number(std::string_view raw, std::string_view field) {
  const auto v = text::parse_double(raw);
  if (!v) {
    throw RowError{ErrorCode::kBadNumber,
                   std::string(field) + "='" + std::string(raw) +
                       "' is not a number"};
  }
  return *v;
}

int ranged(std::string_view raw, std::string_view field, long lo, long hi,
           ErrorCode code) {
  const long v = require_int(raw, field);
  if (v < lo || v > hi) {
    throw RowError{code, std::string(field) + "=" + std::to_string(v) +
                             " outside " + std::to_string(lo) + ".." +
                             std::to_string(hi)};
  }
  return static_cast<int>(v);
}

template <std::size_t N>
std::size_t category(const std::array<std::string_view, N>& names,
                     std::string_view raw, std::string_view field) {
  for (std::size_t i = 0; i < N; ++i) {
    if (text::to_lower(names[i]) == text::to_lower(raw)) return i;
  }
  throw RowError{ErrorCode::kBadCategory, std::string(field) + "='" +
                                              std::string(raw) +
                                              "' is not a known value"};
}

Position position_code(std::string_view raw, std::string_view field) {
  return static_cast<Position>(category(kPositionCodes, raw, field));
}

std::vector<Position> parse_positions(std::string_view raw) {
  std::vector<Position> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const Position p = position_code(token, kPositions);
    if (std::find(out.begin(), out.end(), p) != out.end()) {
      throw RowError{ErrorCode::kBadCategory,
                     "Positions lists " + token + " twice"};
    }
    out.push_back(p);
    token.clear();
  };
  for (char c : raw) {
    if (c == ',' || c == ' ' || c == '|' || c == ';') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  if (out.empty() || out.size() > 3) {
    throw RowError{ErrorCode::kBadCategory,
                   "Positions must list 1..3 codes, got " +
                       std::to_string(out.size())};
  }
  return out;
}

std::vector<int> resolve_columns(const csv::Table& table,
                                 const std::vector<std::string>& canonical,
                                 const ColumnMap& schema) {
  std::vector<int> index;
  index.reserve(canonical.size());
  for (const auto& name : canonical) {
    const auto it = schema.find(name);
    const std::string& header = it == schema.end() ? name : it->second;
    const int col = table.column(header);
    if (col < 0) {
      throw Error(ErrorCode::kMissingColumn,
                  "header lacks column '" + header + "'");
    }
    index.push_back(col);
  }
  return index;
}

bool width_ok(const csv::Record& rec, const csv::Table& table,
              std::vector<Issue>& issues) {
  if (rec.fields.size() == table.header.size()) return true;
  issues.push_back({rec.line, ErrorCode::kParse,
                    "expected " + std::to_string(table.header.size()) +
                        " fields, found " + std::to_string(rec.fields.size())});
  return false;
}

std::string join_positions(const std::vector<Position>& positions) {
  std::string out;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i) out += ',';
    out += kPositionCodes[positions[i]];
  }
  return out;
}

const std::unordered_map<std::string, Continent>& continent_table() {
  static const auto table = [] {
    std::unordered_map<std::string, Continent> map;
    const csv::Table t = csv::parse(internal::kCountryContinentCsv);
    const int country = t.column("country");
    const int continent = t.column("continent");
    for (const auto& row : t.rows) {
      const auto c = lookup(kContinentNames,
                            text::trim(row.fields[static_cast<std::size_t>(continent)]));
      if (!c) continue;
      map.emplace(text::normalize_key(row.fields[static_cast<std::size_t>(country)]),
                  static_cast<Continent>(*c));
    }
    return map;
  }();
  return table;
}

}  // namespace

std::string format_issue(const Issue& issue, std::string_view source) {
  std::ostringstream os;
  os << source << ':' << issue.line << ": " << to_string(issue.code) << ": "
     << issue.message;
  return os.str();
}

std::vector<std::string> sofifa_columns() {
  std::vector<std::string> cols = {
      std::string(kName),          std::string(kAge),
      std::string(kHeight),        std::string(kWeight),
      std::string(kNationality),   std::string(kClub),
      std::string(kLeague),        std::string(kPreferredFoot),
      std::string(kReputation),    std::string(kWeakFoot),
      std::string(kSkillMoves),    std::string(kAttackingWorkRate),
      std::string(kDefensiveWorkRate), std::string(kPositions),
      std::string(kBestPosition)};
  for (auto name : kAbilityNames) cols.emplace_back(name);
  for (auto name : {kOverall, kBestOverall, kPotential, kValue, kWage,
                    kReleaseClause}) {
    cols.emplace_back(name);
  }
  return cols;
}

std::vector<std::string> whoscored_columns() {
  std::vector<std::string> cols = {std::string(kName), std::string(kClub)};
  for (auto name : kMatchStatNames) cols.emplace_back(name);
  return cols;
}

ParseResult<RawSofifaRow> parse_sofifa(std::string_view content,
                                       const ColumnMap& schema) {
  const csv::Table table = csv::parse(content);
  const std::vector<std::string> names = sofifa_columns();
  const std::vector<int> index = resolve_columns(table, names, schema);

  ParseResult<RawSofifaRow> result;
  for (const auto& rec : table.rows) {
    if (!width_ok(rec, table, result.issues)) continue;
    RowReader in(rec, index, names);
    RawSofifaRow row;
    row.line = rec.line;
    try {
      std::size_t f = 0;
      if (auto v = in.get(f++)) row.name = *v;
      if (auto v = in.get(f++)) row.age = ranged(*v, kAge, 10, 60, ErrorCode::kBadNumber);
      if (auto v = in.get(f++)) row.height = *v;
      if (auto v = in.get(f++)) row.weight = *v;
      if (auto v = in.get(f++)) row.nationality = *v;
      if (auto v = in.get(f++)) row.club = *v;
      if (auto v = in.get(f++)) row.league = static_cast<League>(category(kLeagueNames, *v, kLeague));
      if (auto v = in.get(f++)) row.preferred_foot = static_cast<Foot>(category(kFootNames, *v, kPreferredFoot));
      if (auto v = in.get(f++)) row.international_reputation = ranged(*v, kReputation, 1, 5, ErrorCode::kBadOrdinal);
      if (auto v = in.get(f++)) row.weak_foot = ranged(*v, kWeakFoot, 1, 5, ErrorCode::kBadOrdinal);
      if (auto v = in.get(f++)) row.skill_moves = ranged(*v, kSkillMoves, 1, 5, ErrorCode::kBadOrdinal);
      if (auto v = in.get(f++)) row.attacking_work_rate = static_cast<WorkRate>(category(kWorkRateNames, *v, kAttackingWorkRate));
      if (auto v = in.get(f++)) row.defensive_work_rate = static_cast<WorkRate>(category(kWorkRateNames, *v, kDefensiveWorkRate));
      if (auto v = in.get(f++)) row.positions = parse_positions(*v);
      if (auto v = in.get(f++)) row.best_position = position_code(*v, kBestPosition);
      for (std::size_t a = 0; a < kNumAbilities; ++a) {
        if (auto v = in.get(f++)) {
          row.abilities[a] = ranged(*v, kAbilityNames[a], 1, 99, ErrorCode::kBadAbility);
        }
      }
      if (auto v = in.get(f++)) row.overall = ranged(*v, kOverall, 1, 99, ErrorCode::kBadAbility);
      if (auto v = in.get(f++)) row.best_overall = ranged(*v, kBestOverall, 1, 99, ErrorCode::kBadAbility);
      if (auto v = in.get(f++)) row.potential = ranged(*v, kPotential, 1, 99, ErrorCode::kBadAbility);
      if (auto v = in.get(f++)) row.market_value = *v;
      if (auto v = in.get(f++)) row.wage = *v;
      if (auto v = in.get(f++)) row.release_clause = *v;
      row.missing = in.take_missing();

      const auto has = [&](std::string_view field) {
        return std::find(row.missing.begin(), row.missing.end(), field) ==
               row.missing.end();
      };
      if (has(kPotential) && has(kOverall) && row.potential < row.overall) {
        throw RowError{ErrorCode::kInconsistentRow,
                       "Potential " + std::to_string(row.potential) +
                           " below Overall " + std::to_string(row.overall)};
      }
    } catch (const RowError& e) {
      result.issues.push_back({rec.line, e.code, e.message});
      continue;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

ParseResult<RawSofifaRow> parse_sofifa_csv(const std::filesystem::path& path,
                                           const ColumnMap& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sofifa(buf.str(), schema);
}

ParseResult<RawWhoscoredRow> parse_whoscored(std::string_view content) {
  const csv::Table table = csv::parse(content);
  const std::vector<std::string> names = whoscored_columns();
  const std::vector<int> index = resolve_columns(table, names, {});

  ParseResult<RawWhoscoredRow> result;
  for (const auto& rec : table.rows) {
    if (!width_ok(rec, table, result.issues)) continue;
    RowReader in(rec, index, names);
    RawWhoscoredRow row;
    row.line = rec.line;
    try {
      if (auto v = in.get(0)) row.name = *v;
      if (auto v = in.get(1)) row.club = *v;
      std::array<bool, kNumMatchStats> present{};
      for (std::size_t s = 0; s < kNumMatchStats; ++s) {
        const auto v = in.get(s + 2);
        if (!v) continue;
        present[s] = true;
        row.stats[s] = require_number(*v, kMatchStatNames[s]);
        if (row.stats[s] < 0 && s != kGoalDifference) {
          throw RowError{ErrorCode::kBadNumber,
                         std::string(kMatchStatNames[s]) + " is negative"};
        }
      }
      row.missing = in.take_missing();

      const auto& st = row.stats;
      if (present[kTeamStanding] &&
          (st[kTeamStanding] < 1 || st[kTeamStanding] > 20 ||
           st[kTeamStanding] != std::floor(st[kTeamStanding]))) {
        throw RowError{ErrorCode::kBadOrdinal, "Team Standing outside 1..20"};
      }
      if (present[kGoalAcquisition] && present[kGoalAgainst] &&
          present[kGoalDifference] &&
          std::abs(st[kGoalDifference] -
                   (st[kGoalAcquisition] - st[kGoalAgainst])) > 1e-9) {
        throw RowError{ErrorCode::kInconsistentRow,
                       "Goal Difference " + text::format_double(st[kGoalDifference]) +
                           " != Goal Acquisition - Goal Against"};
      }
      if (present[kScoringPoint] && present[kAssistPoint] &&
          present[kGoalPoint] &&
          std::abs(st[kGoalPoint] - (st[kScoringPoint] + st[kAssistPoint])) >
              1e-9) {
        throw RowError{ErrorCode::kInconsistentRow,
                       "Goal Point " + text::format_double(st[kGoalPoint]) +
                           " != Scoring Point + Assist Point"};
      }
    } catch (const RowError& e) {
      result.issues.push_back({rec.line, e.code, e.message});
      continue;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

ParseResult<RawWhoscoredRow> parse_whoscored_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_whoscored(buf.str());
}

void write_sofifa_csv(std::ostream& os, const std::vector<RawSofifaRow>& rows) {
  csv::write_row(os, sofifa_columns());
  for (const auto& r : rows) {
    const auto is_missing = [&](std::string_view field) {
      return std::find(r.missing.begin(), r.missing.end(), field) !=
             r.missing.end();
    };
    auto put = [&](std::string_view field, std::string value) {
      return is_missing(field) ? std::string() : std::move(value);
    };
    std::vector<std::string> f;
    f.push_back(put(kName, r.name));
    f.push_back(put(kAge, std::to_string(r.age)));
    f.push_back(put(kHeight, r.height));
    f.push_back(put(kWeight, r.weight));
    f.push_back(put(kNationality, r.nationality));
    f.push_back(put(kClub, r.club));
    f.push_back(put(kLeague, std::string(kLeagueNames[static_cast<std::size_t>(r.league)])));
    f.push_back(put(kPreferredFoot, std::string(kFootNames[static_cast<std::size_t>(r.preferred_foot)])));
    f.push_back(put(kReputation, std::to_string(r.international_reputation)));
    f.push_back(put(kWeakFoot, std::to_string(r.weak_foot)));
    f.push_back(put(kSkillMoves, std::to_string(r.skill_moves)));
    f.push_back(put(kAttackingWorkRate, std::string(kWorkRateNames[static_cast<std::size_t>(r.attacking_work_rate)])));
    f.push_back(put(kDefensiveWorkRate, std::string(kWorkRateNames[static_cast<std::size_t>(r.defensive_work_rate)])));
    f.push_back(put(kPositions, join_positions(r.positions)));
    f.push_back(put(kBestPosition, std::string(kPositionCodes[r.best_position])));
    for (std::size_t a = 0; a < kNumAbilities; ++a) {
      f.push_back(put(kAbilityNames[a], std::to_string(r.abilities[a])));
    }
    f.push_back(put(kOverall, std::to_string(r.overall)));
    f.push_back(put(kBestOverall, std::to_string(r.best_overall)));
    f.push_back(put(kPotential, std::to_string(r.potential)));
    f.push_back(put(kValue, r.market_value));
    f.push_back(put(kWage, r.wage));
    f.push_back(put(kReleaseClause, r.release_clause));
    csv::write_row(os, f);
  }
}

void write_whoscored_csv(std::ostream& os,
                         const std::vector<RawWhoscoredRow>& rows) {
  csv::write_row(os, whoscored_columns());
  for (const auto& r : rows) {
    const auto is_missing = [&](std::string_view field) {
      return std::find(r.missing.begin(), r.missing.end(), field) !=
             r.missing.end();
    };
    std::vector<std::string> f;
    f.push_back(is_missing(kName) ? "" : r.name);
    f.push_back(is_missing(kClub) ? "" : r.club);
    for (std::size_t s = 0; s < kNumMatchStats; ++s) {
      f.push_back(is_missing(kMatchStatNames[s]) ? ""
                                                 : text::format_double(r.stats[s]));
    }
    csv::write_row(os, f);
  }
}

std::string join_key(std::string_view name, std::string_view club) {
  return text::normalize_key(name) + '\x1f' + text::normalize_key(club);
}

MergeResult merge_sources(const std::vector<RawSofifaRow>& sofifa,
                          const std::vector<RawWhoscoredRow>& whoscored,
                          const JoinSpec& key) {
  std::map<std::string, const RawSofifaRow*> left;
  std::map<std::string, const RawWhoscoredRow*> right;
  for (const auto& r : sofifa) {
    const auto k = join_key(r.name, r.club);
    if (!left.emplace(k, &r).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  "SOFIFA rows share key (" + r.name + ", " + r.club +
                      ") at line " + std::to_string(r.line));
    }
  }
  for (const auto& r : whoscored) {
    const auto k = join_key(r.name, r.club);
    if (!right.emplace(k, &r).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  "WhoScored rows share key (" + r.name + ", " + r.club +
                      ") at line " + std::to_string(r.line));
    }
  }

  std::vector<std::string> allowed_clubs;
  for (const auto& c : key.clubs) allowed_clubs.push_back(text::normalize_key(c));
  std::sort(allowed_clubs.begin(), allowed_clubs.end());

  MergeResult out;
  for (const auto& [k, s] : left) {
    const auto it = right.find(k);
    if (it == right.end()) {
      out.unmatched_sofifa.push_back(s->name + " (" + s->club + ")");
      continue;
    }
    if (!allowed_clubs.empty() &&
        !std::binary_search(allowed_clubs.begin(), allowed_clubs.end(),
                            text::normalize_key(s->club))) {
      continue;
    }
    const RawWhoscoredRow& w = *it->second;

    PlayerCandidate cand;
    cand.missing = s->missing;
    cand.missing.insert(cand.missing.end(), w.missing.begin(), w.missing.end());
    const auto missing = [&](std::string_view field) {
      return std::find(s->missing.begin(), s->missing.end(), field) !=
             s->missing.end();
    };

    PlayerRecord& p = cand.record;
    p.name = s->name;
    p.club = s->club;
    p.age = s->age;
    p.nationality = s->nationality;
    p.league = s->league;
    p.preferred_foot = s->preferred_foot;
    p.international_reputation = s->international_reputation;
    p.weak_foot = s->weak_foot;
    p.skill_moves = s->skill_moves;
    p.attacking_work_rate = s->attacking_work_rate;
    p.defensive_work_rate = s->defensive_work_rate;
    p.positions = s->positions;
    p.best_position = s->best_position;
    p.abilities = s->abilities;
    p.overall = s->overall;
    p.best_overall = s->best_overall;
    p.potential = s->potential;
    p.stats = w.stats;
    try {
      if (!missing(kHeight)) p.height_cm = features::convert_height(s->height);
      if (!missing(kWeight)) p.weight_kg = features::convert_weight(s->weight);
      if (!missing(kValue)) p.market_value = features::unify_monetary(s->market_value);
      if (!missing(kWage)) p.wage = features::unify_monetary(s->wage);
      if (!missing(kReleaseClause)) p.release_clause = features::unify_monetary(s->release_clause);
      if (!missing(kNationality)) p.continent = map_continent(s->nationality);
      if (!missing(kValue) && p.market_value <= 0) {
        throw Error(ErrorCode::kBadMoney, "market value must be positive");
      }
    } catch (const Error& e) {
      out.rejected.push_back({s->line, e.code(), e.what()});
      continue;
    }
    out.records.push_back(std::move(cand));
  }
  for (const auto& [k, w] : right) {
    if (!left.count(k)) {
      out.unmatched_whoscored.push_back(w->name + " (" + w->club + ")");
    }
  }
  return out;
}

DropResult drop_missing(const std::vector<PlayerCandidate>& candidates) {
  DropResult out;
  for (const auto& c : candidates) {
    if (c.missing.empty()) {
      out.records.push_back(c.record);
    } else {
      ++out.dropped;
    }
  }
  return out;
}

Continent map_continent(std::string_view nationality) {
  const auto& table = continent_table();
  const auto it = table.find(text::normalize_key(nationality));
  if (it == table.end()) {
    throw Error(ErrorCode::kUnknownCountry,
                "'" + std::string(nationality) + "' is not in the country table");
  }
  return it->second;
}

namespace {

std::vector<std::string> player_columns() {
  std::vector<std::string> cols = {
      "Name", "Club", "Age", "Height (cm)", "Weight (kg)", "Nationality",
      "Continent", "League", "Preferred Foot", "International Reputation",
      "Weak Foot", "Skill Moves", "Attacking Work Rate", "Defensive Work Rate",
      "Positions", "Best Position"};
  for (auto name : kAbilityNames) cols.emplace_back(name);
  for (auto name : {"Overall", "BOV", "Potential", "Value (kEUR)",
                    "Wage (kEUR)", "Release Clause (kEUR)"}) {
    cols.emplace_back(name);
  }
  for (auto name : kMatchStatNames) cols.emplace_back(name);
  return cols;
}

}  // namespace

void write_players_csv(std::ostream& os, const std::vector<PlayerRecord>& rows) {
  csv::write_row(os, player_columns());
  for (const auto& p : rows) {
    std::vector<std::string> f = {
        p.name,
        p.club,
        std::to_string(p.age),
        text::format_double(p.height_cm),
        text::format_double(p.weight_kg),
        p.nationality,
        std::string(kContinentNames[static_cast<std::size_t>(p.continent)]),
        std::string(kLeagueNames[static_cast<std::size_t>(p.league)]),
        std::string(kFootNames[static_cast<std::size_t>(p.preferred_foot)]),
        std::to_string(p.international_reputation),
        std::to_string(p.weak_foot),
        std::to_string(p.skill_moves),
        std::string(kWorkRateNames[static_cast<std::size_t>(p.attacking_work_rate)]),
        std::string(kWorkRateNames[static_cast<std::size_t>(p.defensive_work_rate)]),
        join_positions(p.positions),
        std::string(kPositionCodes[p.best_position])};
    for (int a : p.abilities) f.push_back(std::to_string(a));
    f.push_back(std::to_string(p.overall));
    f.push_back(std::to_string(p.best_overall));
    f.push_back(std::to_string(p.potential));
    f.push_back(text::format_double(p.market_value));
    f.push_back(text::format_double(p.wage));
    f.push_back(text::format_double(p.release_clause));
    for (double s : p.stats) f.push_back(text::format_double(s));
    csv::write_row(os, f);
  }
}

std::vector<PlayerRecord> parse_players(std::string_view content) {
  const csv::Table table = csv::parse(content);
  const auto names = player_columns();
  const auto index = resolve_columns(table, names, {});
  std::vector<PlayerRecord> out;
  for (const auto& rec : table.rows) {
    if (rec.fields.size() != table.header.size()) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(rec.line) + ": wrong field count");
    }
    auto field = [&](std::size_t i) -> std::string_view {
      return text::trim(rec.fields[static_cast<std::size_t>(index[i])]);
    };
    try {
      PlayerRecord p;
      std::size_t f = 0;
      p.name = field(f++);
      p.club = field(f++);
      p.age = static_cast<int>(require_int(field(f++), "Age"));
      p.height_cm = require_number(field(f++), "Height");
      p.weight_kg = require_number(field(f++), "Weight");
      p.nationality = field(f++);
      p.continent = static_cast<Continent>(category(kContinentNames, field(f++), "Continent"));
      p.league = static_cast<League>(category(kLeagueNames, field(f++), kLeague));
      p.preferred_foot = static_cast<Foot>(category(kFootNames, field(f++), kPreferredFoot));
      p.international_reputation = ranged(field(f++), kReputation, 1, 5, ErrorCode::kBadOrdinal);
      p.weak_foot = ranged(field(f++), kWeakFoot, 1, 5, ErrorCode::kBadOrdinal);
      p.skill_moves = ranged(field(f++), kSkillMoves, 1, 5, ErrorCode::kBadOrdinal);
      p.attacking_work_rate = static_cast<WorkRate>(category(kWorkRateNames, field(f++), kAttackingWorkRate));
      p.defensive_work_rate = static_cast<WorkRate>(category(kWorkRateNames, field(f++), kDefensiveWorkRate));
      p.positions = parse_positions(field(f++));
      p.best_position = position_code(field(f++), kBestPosition);
      for (std::size_t a = 0; a < kNumAbilities; ++a) {
        p.abilities[a] = ranged(field(f++), kAbilityNames[a], 1, 99, ErrorCode::kBadAbility);
      }
      p.overall = ranged(field(f++), kOverall, 1, 99, ErrorCode::kBadAbility);
      p.best_overall = ranged(field(f++), kBestOverall, 1, 99, ErrorCode::kBadAbility);
      p.potential = ranged(field(f++), kPotential, 1, 99, ErrorCode::kBadAbility);
      p.market_value = require_number(field(f++), kValue);
      p.wage = require_number(field(f++), kWage);
      p.release_clause = require_number(field(f++), kReleaseClause);
      for (std::size_t s = 0; s < kNumMatchStats; ++s) {
        p.stats[s] = require_number(field(f++), kMatchStatNames[s]);
      }
      out.push_back(std::move(p));
    } catch (const RowError& e) {
      throw Error(e.code, "line " + std::to_string(rec.line) + ": " + e.message);
    }
  }
  return out;
}

std::vector<PlayerRecord> read_players_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_players(buf.str());
}

}  // namespace valuecast::ingest
