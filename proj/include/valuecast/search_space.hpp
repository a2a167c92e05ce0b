#pragma once

#include <string>
#include <vector>

#include "valuecast/random.hpp"

namespace valuecast::hpo {

// One tunable parameter. Numeric domains are searched in an internal
// coordinate: the log of the value for log domains, and for integers the
// interval [lo - 0.5, hi + 0.5] (in log space if log) rounded on the way out.
struct Domain {
  enum class Kind { kFloat, kInt, kCategorical };

  std::string name;
  Kind kind = Kind::kFloat;
  double lo = 0;
  double hi = 1;
  bool log = false;
  bool open_low = false;  // (lo, hi]
  std::vector<std::string> choices;
  double default_value = 0;  // categorical: index into choices

  static Domain uniform(std::string name, double lo, double hi, double def, bool open_low = false);
  static Domain log_uniform(std::string name, double lo, double hi, double def);
  static Domain integer(std::string name, long lo, long hi, long def, bool log = false);
  static Domain categorical(std::string name, std::vector<std::string> choices,
                            std::size_t def = 0);

  void validate() const;  // InvalidArgument
  bool contains(double value) const;
  double sample(Rng& rng) const;

  double internal_low() const;
  double internal_high() const;
  double to_internal(double value) const;
  double from_internal(double u) const;  // clamps and rounds into the domain

  std::string format(double value) const;
};

using Params = std::vector<double>;  // aligned with SearchSpace::domains

struct SearchSpace {
  std::vector<Domain> domains;

  std::size_t size() const { return domains.size(); }
  std::size_t index(const std::string& name) const;  // InvalidArgument
  double get(const Params& params, const std::string& name) const;
  Params defaults() const;
  Params sample(Rng& rng) const;
  bool contains(const Params& params) const;
  void validate() const;
};

}  // namespace valuecast::hpo
