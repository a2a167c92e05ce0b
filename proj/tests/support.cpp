#include "support.hpp"

#include "valuecast/ingest.hpp"
#include "valuecast/synth.hpp"

namespace support {

valuecast::features::FeatureMatrix synthetic_matrix(std::size_t n, std::uint64_t seed) {
  using namespace valuecast;
  const auto data = synth::generate(n, seed);
  const auto merged = ingest::merge_sources(data.sofifa, data.whoscored);
  return features::build_matrix(ingest::drop_missing(merged.records).records);
}

valuecast::features::FeatureMatrix bundled_matrix() {
  using namespace valuecast;
  const auto sofifa = ingest::parse_sofifa_csv(data_file("synthetic/sofifa.csv"));
  const auto whoscored = ingest::parse_whoscored_csv(data_file("synthetic/whoscored.csv"));
  if (!sofifa.issues.empty() || !whoscored.issues.empty()) {
    throw Error(ErrorCode::kParse, "bundled dataset has rejected rows");
  }
  const auto merged = ingest::merge_sources(sofifa.rows, whoscored.rows);
  return features::build_matrix(ingest::drop_missing(merged.records).records);
}

}  // namespace support
