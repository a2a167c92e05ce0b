#pragma once

#include <cstdint>
#include <vector>

#include "valuecast/ingest.hpp"

namespace valuecast::synth {

struct SynthData {
  std::vector<ingest::RawSofifaRow> sofifa;
  std::vector<ingest::RawWhoscoredRow> whoscored;  // same players, shuffled, names re-cased
};

inline constexpr std::size_t kMinPlayers = 50;

// The bundled benchmark dataset in data/synthetic is generate(500, 42).
inline constexpr std::size_t kReferenceSize = 500;
inline constexpr std::uint64_t kReferenceSeed = 42;

// Schema-conformant synthetic players spread over the five leagues, with
// overall ~ normal(66, 3.5). The market value (k€) is
//   log v = 8.63 + 0.13 (overall - 66)
//         + 0.05 min(12, potential - overall) [age <= 23]
//         - 0.012 max(0, age - 28)^2 + 0.22 (IR - 1) + e
// with e normal(0, 0.3) and, for one player in twenty, normal(0, 0.6);
// v is clamped to [10, 100000]. The release clause is v times a league ratio
// (1.2 to 3.0), times 1.8 for players aged 23 or less, times lognormal noise
// (sd 0.05). The wage is 0.4% of v times a league scale and lognormal noise
// (sd 0.35). Every row passes ingest and feature extraction.
// InvalidArgument if n < kMinPlayers.
SynthData generate(std::size_t n, std::uint64_t seed);

}  // namespace valuecast::synth
