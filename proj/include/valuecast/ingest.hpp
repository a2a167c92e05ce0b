#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "valuecast/error.hpp"
#include "valuecast/schema.hpp"

namespace valuecast::ingest {

// A problem with a single data line. Rows with an issue are excluded from
// the parse result; the caller decides whether any issue is fatal.
struct Issue {
  std::size_t line = 0;
  ErrorCode code = ErrorCode::kParse;
  std::string message;
};

std::string format_issue(const Issue& issue, std::string_view source);

struct RawSofifaRow {
  std::size_t line = 0;
  std::string name;
  int age = 0;
  std::string height;  // 6'0" or 183cm
  std::string weight;  // 154lbs or 70kg
  std::string nationality;
  std::string club;
  League league = League::kPremierLeague;
  Foot preferred_foot = Foot::kRight;
  int international_reputation = 1;
  int weak_foot = 1;
  int skill_moves = 1;
  WorkRate attacking_work_rate = WorkRate::kMedium;
  WorkRate defensive_work_rate = WorkRate::kMedium;
  std::vector<Position> positions;
  Position best_position = 0;
  std::array<int, kNumAbilities> abilities{};
  int overall = 0;
  int best_overall = 0;
  int potential = 0;
  std::string market_value;  // €1.5M, €500K, €750
  std::string wage;
  std::string release_clause;
  // Canonical names of fields that were empty in the source line.
  std::vector<std::string> missing;

  bool operator==(const RawSofifaRow&) const = default;
};

struct RawWhoscoredRow {
  std::size_t line = 0;
  std::string name;
  std::string club;
  std::array<double, kNumMatchStats> stats{};
  std::vector<std::string> missing;

  bool operator==(const RawWhoscoredRow&) const = default;
};

struct PlayerRecord {
  std::string name;
  std::string club;
  int age = 0;
  double height_cm = 0;
  double weight_kg = 0;
  std::string nationality;
  Continent continent = Continent::kEurope;
  League league = League::kPremierLeague;
  Foot preferred_foot = Foot::kRight;
  int international_reputation = 1;
  int weak_foot = 1;
  int skill_moves = 1;
  WorkRate attacking_work_rate = WorkRate::kMedium;
  WorkRate defensive_work_rate = WorkRate::kMedium;
  std::vector<Position> positions;
  Position best_position = 0;
  std::array<int, kNumAbilities> abilities{};
  int overall = 0;
  int best_overall = 0;
  int potential = 0;
  double market_value = 0;  // k€
  double wage = 0;          // k€
  double release_clause = 0;  // k€
  std::array<double, kNumMatchStats> stats{};

  bool operator==(const PlayerRecord&) const = default;
};

// A merged row that may still have holes.
struct PlayerCandidate {
  PlayerRecord record;
  std::vector<std::string> missing;
};

template <typename Row>
struct ParseResult {
  std::vector<Row> rows;
  std::vector<Issue> issues;
};

// Canonical field name -> header name in the file. Fields absent from the map
// use their canonical name.
using ColumnMap = std::map<std::string, std::string>;

// Canonical column order of the two source files.
std::vector<std::string> sofifa_columns();
std::vector<std::string> whoscored_columns();

ParseResult<RawSofifaRow> parse_sofifa(std::string_view content,
                                       const ColumnMap& schema = {});
ParseResult<RawSofifaRow> parse_sofifa_csv(const std::filesystem::path& path,
                                           const ColumnMap& schema = {});
ParseResult<RawWhoscoredRow> parse_whoscored(std::string_view content);
ParseResult<RawWhoscoredRow> parse_whoscored_csv(
    const std::filesystem::path& path);

void write_sofifa_csv(std::ostream& os, const std::vector<RawSofifaRow>& rows);
void write_whoscored_csv(std::ostream& os,
                         const std::vector<RawWhoscoredRow>& rows);

struct JoinSpec {
  // When non-empty, only players of these clubs are kept.
  std::vector<std::string> clubs;
};

struct MergeResult {
  std::vector<PlayerCandidate> records;  // sorted by join key
  std::vector<std::string> unmatched_sofifa;
  std::vector<std::string> unmatched_whoscored;
  std::vector<Issue> rejected;  // conversion or continent failures
};

std::string join_key(std::string_view name, std::string_view club);

// Inner join on the normalized (name, club) pair. Throws
// Error(kDuplicateKey) when a key occurs twice on the same side.
MergeResult merge_sources(const std::vector<RawSofifaRow>& sofifa,
                          const std::vector<RawWhoscoredRow>& whoscored,
                          const JoinSpec& key = {});

struct DropResult {
  std::vector<PlayerRecord> records;
  std::size_t dropped = 0;
};

DropResult drop_missing(const std::vector<PlayerCandidate>& candidates);

// Throws Error(kUnknownCountry).
Continent map_continent(std::string_view nationality);

// Cleaned records as a flat CSV (units already normalized).
void write_players_csv(std::ostream& os, const std::vector<PlayerRecord>& rows);
std::vector<PlayerRecord> read_players_csv(const std::filesystem::path& path);
std::vector<PlayerRecord> parse_players(std::string_view content);

}  // namespace valuecast::ingest
