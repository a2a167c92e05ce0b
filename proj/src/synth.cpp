#include "valuecast/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "valuecast/error.hpp"
#include "valuecast/random.hpp"
#include "valuecast/text.hpp"

namespace valuecast::synth {

namespace {

constexpr std::array<const char*, 24> kFirstNames = {
    "Luka", "José", "Thomas", "Kylian", "Mohamed", "Sadio", "Kevin", "Bruno",
    "Joshua", "Andrés", "Marco", "Virgil", "Heung-min", "Raphaël", "Søren", "Paulo",
    "Erling", "Ángel", "Jordan", "Ivan", "Naby", "Hakim", "Takumi", "Emil"};
constexpr std::array<const char*, 24> kLastNames = {
    "Müller", "García", "Silva", "Rossi", "Dubois", "Kovač", "Mensah", "Okafor",
    "Hernández", "Schmidt", "Novak", "Lindqvist", "Costa", "Moreau", "Fernández", "Kim",
    "Tanaka", "Bianchi", "Walker", "Jansen", "Peeters", "Çelik", "Nowak", "Andersen"};
constexpr std::array<const char*, 30> kCountries = {
    "England", "Spain", "Germany", "France", "Italy", "Brazil", "Argentina", "Portugal",
    "Netherlands", "Belgium", "Croatia", "Uruguay", "Colombia", "Senegal", "Nigeria", "Ghana",
    "Morocco", "Korea Republic", "Japan", "Australia", "United States", "Mexico", "Poland",
    "Denmark", "Sweden", "Norway", "Switzerland", "Serbia", "Côte d'Ivoire", "Egypt"};
constexpr std::array<const char*, 10> kClubStems = {
    "Northbridge", "Red Harbour", "Vale", "Eastmoor", "Kingsford",
    "Port Alder", "Highcastle", "Westbrook", "Riverton", "Stonegate"};
constexpr std::array<const char*, 5> kClubSuffix = {"FC", "CF", "Calcio", "SV", "AC"};
// Release clause over market value, and wage scale, per league.
constexpr std::array<double, 5> kReleaseRatio = {1.2, 3.0, 1.8, 1.5, 2.4};
constexpr std::array<double, 5> kWageScale = {1.0, 1.3, 0.7, 1.4, 0.8};
constexpr double kYouthClausePremium = 1.8;
constexpr double kValueCeiling = 100000;
constexpr int kClubsPerLeague = 10;
constexpr int kGames = 38;

enum class Role { kForward, kMidfielder, kDefender, kGoalkeeper };

// Ability profile shift per role, added to the player's base level.
int role_shift(Role role, std::size_t a) {
  const bool gk = a >= kGkDiving;
  if (role == Role::kGoalkeeper) return gk ? 8 : (a == kReactions ? 0 : -28);
  if (gk) return -55;
  const bool attacking = a == kFinishing || a == kVolleys || a == kPositioning ||
                         a == kShotPower || a == kLongShots || a == kPenalties ||
                         a == kDribbling || a == kBallControl;
  const bool defending = a == kMarking || a == kDefensiveAwareness || a == kStandingTackle ||
                         a == kSlidingTackle || a == kInterceptions || a == kHeadingAccuracy ||
                         a == kStrength || a == kAggression;
  switch (role) {
    case Role::kForward: return attacking ? 6 : defending ? -22 : 0;
    case Role::kMidfielder: return attacking ? 0 : defending ? -8 : 4;
    case Role::kDefender: return attacking ? -18 : defending ? 7 : -4;
    case Role::kGoalkeeper: break;
  }
  return 0;
}

Position code(std::string_view c) {
  return static_cast<Position>(*lookup(kPositionCodes, c));
}

std::vector<Position> role_positions(Role role) {
  std::vector<std::string_view> codes;
  switch (role) {
    case Role::kForward: codes = {"ST", "CF", "LW", "RW", "LF", "RF"}; break;
    case Role::kMidfielder: codes = {"CM", "CAM", "CDM", "LM", "RM", "LCM", "RCM"}; break;
    case Role::kDefender: codes = {"CB", "LB", "RB", "LCB", "RCB", "LWB", "RWB"}; break;
    case Role::kGoalkeeper: codes = {"GK"}; break;
  }
  std::vector<Position> out;
  for (auto c : codes) out.push_back(code(c));
  return out;
}

std::string money(double k_eur) {
  if (k_eur >= 1000) return "€" + text::format_fixed(k_eur / 1000.0, 3) + "M";
  return "€" + std::to_string(std::max(1L, std::lround(k_eur))) + "K";
}

int clampi(double v, int lo, int hi) {
  return static_cast<int>(std::clamp<long>(std::lround(v), lo, hi));
}

struct Club {
  std::string name;
  League league;
  std::array<double, 8> table{};  // the team-level match stats
};

std::vector<Club> make_clubs(Rng& rng) {
  std::vector<Club> clubs;
  for (std::size_t l = 0; l < kLeagueNames.size(); ++l) {
    std::vector<std::pair<int, std::size_t>> points;
    for (int c = 0; c < kClubsPerLeague; ++c) {
      Club club;
      club.league = static_cast<League>(l);
      club.name = std::string(kClubStems[static_cast<std::size_t>(c)]) + " " + kClubSuffix[l];
      const double strength = rng.normal();
      const int win = clampi(14 + 5 * strength, 2, 32);
      const int draw = clampi(9 + 2 * rng.normal(), 0, kGames - win);
      const int lose = kGames - win - draw;
      const int scored = clampi(50 + 14 * strength + 5 * rng.normal(), 15, 110);
      const int against = clampi(50 - 12 * strength + 5 * rng.normal(), 15, 100);
      auto& t = club.table;
      t[kGoalAcquisition] = scored;
      t[kGoalAgainst] = against;
      t[kGoalDifference] = scored - against;
      t[kVictoryPoint] = 3 * win + draw;
      t[kWin] = win;
      t[kDraw] = draw;
      t[kLose] = lose;
      points.emplace_back(3 * win + draw, clubs.size());
      clubs.push_back(std::move(club));
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; r < points.size(); ++r) {
      clubs[points[r].second].table[kTeamStanding] = static_cast<double>(r + 1);
    }
  }
  return clubs;
}

}  // namespace

SynthData generate(std::size_t n, std::uint64_t seed) {
  if (n < kMinPlayers) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least " + std::to_string(kMinPlayers) + " players, got " + std::to_string(n));
  }
  Rng rng(seed);
  const std::vector<Club> clubs = make_clubs(rng);

  SynthData out;
  for (std::size_t i = 0; i < n; ++i) {
    ingest::RawSofifaRow s;
    s.line = i + 2;
    const Club& club = clubs[rng.below(clubs.size())];
    s.name = std::string(kFirstNames[rng.below(kFirstNames.size())]) + " " +
             kLastNames[rng.below(kLastNames.size())] + " " + std::to_string(i + 1);
    s.club = club.name;
    s.league = club.league;
    s.nationality = kCountries[rng.below(kCountries.size())];

    const double r = rng.uniform();
    const Role role = r < 0.1 ? Role::kGoalkeeper
                      : r < 0.4 ? Role::kDefender
                      : r < 0.75 ? Role::kMidfielder
                                 : Role::kForward;
    s.age = clampi(17 + 21 * std::pow(rng.uniform(), 1.3), 17, 38);
    s.overall = clampi(66 + 3.5 * rng.normal(), 46, 93);
    const double youth = std::max(0, 27 - s.age);
    s.potential = std::min(99, s.overall + clampi(youth * 1.3 + 2 * rng.normal(), 0, 30));
    s.best_overall = std::min(99, s.overall + clampi(std::abs(rng.normal()) * 1.5, 0, 4));
    s.international_reputation = clampi(1 + (s.overall - 62) / 7.0 + 0.5 * rng.normal(), 1, 5);
    s.weak_foot = clampi(3 + rng.normal(), 1, 5);
    s.skill_moves = role == Role::kGoalkeeper ? 1 : clampi(2.5 + (s.overall - 66) / 10.0 + rng.normal(), 1, 5);
    s.attacking_work_rate = static_cast<WorkRate>(rng.below(3));
    s.defensive_work_rate = static_cast<WorkRate>(rng.below(3));
    s.preferred_foot = rng.uniform() < 0.25 ? Foot::kLeft : Foot::kRight;

    const double height = 181 + (role == Role::kGoalkeeper ? 6 : 0) + 6.5 * rng.normal();
    const double bmi = 23.2 + 1.2 * rng.normal();
    const double weight = bmi * (height / 100) * (height / 100);
    if (rng.uniform() < 0.5) {
      s.height = std::to_string(clampi(height, 160, 205)) + "cm";
      s.weight = std::to_string(clampi(weight, 55, 105)) + "kg";
    } else {
      const int inches = clampi(height / 2.54, 63, 81);
      s.height = std::to_string(inches / 12) + "'" + std::to_string(inches % 12) + "\"";
      s.weight = std::to_string(clampi(weight / 0.45359237, 121, 231)) + "lbs";
    }

    for (std::size_t a = 0; a < kNumAbilities; ++a) {
      s.abilities[a] = clampi(s.overall - 4 + role_shift(role, a) + 7 * rng.normal(), 1, 99);
    }
    s.abilities[kDefensiveAwareness] =
        clampi(s.abilities[kMarking] + 2 * rng.normal(), 1, 99);

    const auto pool = role_positions(role);
    s.best_position = pool[rng.below(pool.size())];
    s.positions.push_back(s.best_position);
    const std::size_t extra = role == Role::kGoalkeeper ? 0 : rng.below(3);
    for (std::size_t k = 0; k < extra; ++k) {
      const Position p = pool[rng.below(pool.size())];
      if (std::find(s.positions.begin(), s.positions.end(), p) == s.positions.end()) {
        s.positions.push_back(p);
      }
    }

    const double growth = std::max(0, s.potential - s.overall);
    const double old = std::max(0, s.age - 28);
    const double sd = rng.uniform() < 0.05 ? 0.6 : 0.3;
    const double log_value = 8.63 + 0.13 * (s.overall - 66) + (s.age <= 23 ? 0.05 * std::min(growth, 12.0) : 0.0) -
                             0.012 * old * old + 0.22 * (s.international_reputation - 1) +
                             sd * rng.normal();
    const double value = std::clamp(std::exp(log_value), 10.0, kValueCeiling);
    const auto league = static_cast<std::size_t>(s.league);
    const double release = value * kReleaseRatio[league] * (s.age <= 23 ? kYouthClausePremium : 1.0) *
                           std::exp(0.05 * rng.normal());
    const double wage = std::max(1.0, value * 0.004 * kWageScale[league] * std::exp(0.35 * rng.normal()));
    s.market_value = money(value);
    s.release_clause = money(release);
    s.wage = money(wage);
    out.sofifa.push_back(std::move(s));

    ingest::RawWhoscoredRow w;
    const auto& sofifa = out.sofifa.back();
    w.name = text::to_lower(sofifa.name);
    w.club = club.name;
    for (std::size_t k = 0; k < 8; ++k) w.stats[k] = club.table[k];
    const double attack = role == Role::kForward ? 1.0 : role == Role::kMidfielder ? 0.5
                          : role == Role::kDefender ? 0.15 : 0.0;
    const int games = clampi(12 + 22 * rng.uniform(), 1, kGames);
    const double level = (sofifa.overall - 60) / 20.0;
    const int goals = clampi(games * attack * (0.25 + 0.2 * level) * std::exp(0.4 * rng.normal()), 0, 45);
    const int assists = clampi(games * (0.05 + 0.1 * attack) * std::exp(0.5 * rng.normal()), 0, 25);
    w.stats[kScoringPoint] = goals;
    w.stats[kAssistPoint] = assists;
    w.stats[kGoalPoint] = goals + assists;
    const int shots = clampi(goals * 4 + games * attack * (1 + rng.uniform()), 0, 200);
    w.stats[kShooting] = shots;
    w.stats[kEffectiveShooting] = clampi(shots * (0.3 + 0.15 * rng.uniform()), 0, shots);
    w.stats[kPersonalScoreRanking] = text::round_to(6.3 + 0.6 * level + 0.25 * rng.normal(), 2);
    w.stats[kCornerKick] = role == Role::kGoalkeeper ? 0 : clampi(games * 0.6 * rng.uniform(), 0, 120);
    w.stats[kPenaltyKick] = clampi(attack * 3 * rng.uniform(), 0, 10);
    w.stats[kFoul] = clampi(games * (0.6 + 0.8 * rng.uniform()), 0, 90);
    w.stats[kYellowCard] = clampi(games * 0.12 * std::exp(0.5 * rng.normal()), 0, 15);
    w.stats[kRedCard] = rng.uniform() < 0.08 ? 1 : 0;
    w.stats[kOffside] = clampi(games * attack * 0.5 * rng.uniform(), 0, 40);
    w.stats[kGamesPlayed] = games;
    out.whoscored.push_back(std::move(w));
  }
  rng.shuffle(out.whoscored);
  for (std::size_t i = 0; i < out.whoscored.size(); ++i) out.whoscored[i].line = i + 2;
  return out;
}

}  // namespace valuecast::synth
