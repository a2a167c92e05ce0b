#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

// Fixed vocabularies shared by ingestion and feature encoding. The order of
// every list here is part of the documented column layout.
namespace valuecast {

enum class Foot { kLeft, kRight };
enum class WorkRate { kLow, kMedium, kHigh };
enum class Continent { kAfrica, kAmerica, kAsia, kEurope, kOceania };
enum class League { kPremierLeague, kLaLiga, kSerieA, kBundesliga, kLigue1 };

inline constexpr std::array<std::string_view, 2> kFootNames = {"Left", "Right"};
inline constexpr std::array<std::string_view, 3> kWorkRateNames = {
    "Low", "Medium", "High"};
inline constexpr std::array<std::string_view, 5> kContinentNames = {
    "Africa", "America", "Asia", "Europe", "Oceania"};
inline constexpr std::array<std::string_view, 5> kLeagueNames = {
    "Premier League", "La Liga", "Serie A", "Bundesliga", "Ligue 1"};

// The 27 position codes: attackers, midfielders, defenders, goalkeeper.
inline constexpr std::size_t kNumPositions = 27;
inline constexpr std::array<std::string_view, kNumPositions> kPositionCodes = {
    "ST",  "LS",  "RS",  "LF",  "CF",  "RF",  "LW",  "RW",  "LM",
    "RM",  "LAM", "CAM", "RAM", "LCM", "CM",  "RCM", "LDM", "CDM",
    "RDM", "LCB", "CB",  "RCB", "LB",  "RB",  "LWB", "RWB", "GK"};
using Position = std::uint8_t;  // index into kPositionCodes

// The 35 ability attributes, grouped as on the player page. "Marking" is the
// legacy name; newer vintages call the same stat "Defensive Awareness" and
// carry both columns, so both are kept.
enum Ability : std::size_t {
  kCrossing, kFinishing, kHeadingAccuracy, kShortPassing, kVolleys,
  kDribbling, kCurve, kFkAccuracy, kLongPassing, kBallControl,
  kAcceleration, kSprintSpeed, kAgility, kReactions, kBalance,
  kShotPower, kJumping, kStamina, kStrength, kLongShots,
  kAggression, kInterceptions, kPositioning, kVision, kPenalties, kComposure,
  kMarking, kDefensiveAwareness, kStandingTackle, kSlidingTackle,
  kGkDiving, kGkHandling, kGkKicking, kGkPositioning, kGkReflexes,
  kNumAbilities
};
static_assert(kNumAbilities == 35);

inline constexpr std::array<std::string_view, kNumAbilities> kAbilityNames = {
    "Crossing",       "Finishing",     "Heading Accuracy",
    "Short Passing",  "Volleys",       "Dribbling",
    "Curve",          "FK Accuracy",   "Long Passing",
    "Ball Control",   "Acceleration",  "Sprint Speed",
    "Agility",        "Reactions",     "Balance",
    "Shot Power",     "Jumping",       "Stamina",
    "Strength",       "Long Shots",    "Aggression",
    "Interceptions",  "Positioning",   "Vision",
    "Penalties",      "Composure",     "Marking",
    "Defensive Awareness", "Standing Tackle", "Sliding Tackle",
    "GK Diving",      "GK Handling",   "GK Kicking",
    "GK Positioning", "GK Reflexes"};

// Match statistics merged from the league tables.
enum MatchStat : std::size_t {
  kGoalAcquisition, kGoalAgainst, kGoalDifference, kVictoryPoint,
  kWin, kDraw, kLose, kTeamStanding,
  kScoringPoint, kAssistPoint, kGoalPoint, kShooting, kEffectiveShooting,
  kPersonalScoreRanking, kCornerKick, kPenaltyKick, kFoul, kYellowCard,
  kRedCard, kOffside, kGamesPlayed,
  kNumMatchStats
};
static_assert(kNumMatchStats == 21);

inline constexpr std::array<std::string_view, kNumMatchStats> kMatchStatNames = {
    "Goal Acquisition", "Goal Against",      "Goal Difference",
    "Victory Point",    "Win",               "Draw",
    "Lose",             "Team Standing",     "Scoring Point",
    "Assist Point",     "Goal Point",        "Shooting",
    "Effective Shooting", "Personal Score Ranking", "Corner Kick",
    "Penalty Kick",     "Foul",              "Yellow Card",
    "Red Card",         "Offside",           "Games Played"};

template <std::size_t N>
std::optional<std::size_t> lookup(const std::array<std::string_view, N>& names,
                                  std::string_view value) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == value) return i;
  }
  return std::nullopt;
}

}  // namespace valuecast
