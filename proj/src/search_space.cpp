#include "valuecast/search_space.hpp"

#include <algorithm>
#include <cmath>

#include "valuecast/error.hpp"
#include "valuecast/text.hpp"

namespace valuecast::hpo {

namespace {

// Smallest step taken above an open lower bound.
constexpr double kOpenLowStep = 1e-6;

}  // namespace

Domain Domain::uniform(std::string name, double lo, double hi, double def, bool open_low) {
  Domain d;
  d.name = std::move(name);
  d.lo = lo;
  d.hi = hi;
  d.open_low = open_low;
  d.default_value = def;
  d.validate();
  return d;
}

Domain Domain::log_uniform(std::string name, double lo, double hi, double def) {
  Domain d = uniform(std::move(name), lo, hi, def);
  d.log = true;
  d.validate();
  return d;
}

Domain Domain::integer(std::string name, long lo, long hi, long def, bool log) {
  Domain d;
  d.name = std::move(name);
  d.kind = Kind::kInt;
  d.lo = static_cast<double>(lo);
  d.hi = static_cast<double>(hi);
  d.log = log;
  d.default_value = static_cast<double>(def);
  d.validate();
  return d;
}

Domain Domain::categorical(std::string name, std::vector<std::string> choices, std::size_t def) {
  Domain d;
  d.name = std::move(name);
  d.kind = Kind::kCategorical;
  d.choices = std::move(choices);
  d.lo = 0;
  d.hi = static_cast<double>(d.choices.size()) - 1;
  d.default_value = static_cast<double>(def);
  d.validate();
  return d;
}

void Domain::validate() const {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, "parameter '" + name + "': " + why);
  };
  if (kind == Kind::kCategorical) {
    if (choices.empty()) fail("no choices");
  } else {
    if (!(lo < hi)) fail("lo must be < hi");
    if (log && lo <= 0) fail("log domain needs lo > 0");
  }
  if (!contains(default_value)) fail("default outside the domain");
}

bool Domain::contains(double v) const {
  if (!std::isfinite(v)) return false;
  switch (kind) {
    case Kind::kCategorical:
    case Kind::kInt:
      if (v != std::round(v)) return false;
      return v >= lo && v <= hi;
    case Kind::kFloat:
      return (open_low ? v > lo : v >= lo) && v <= hi;
  }
  return false;
}

double Domain::internal_low() const {
  switch (kind) {
    case Kind::kCategorical: return 0;
    case Kind::kInt: return log ? std::log(lo - 0.5) : lo - 0.5;
    case Kind::kFloat: return log ? std::log(lo) : lo;
  }
  return lo;
}

double Domain::internal_high() const {
  switch (kind) {
    case Kind::kCategorical: return static_cast<double>(choices.size());
    case Kind::kInt: return log ? std::log(hi + 0.5) : hi + 0.5;
    case Kind::kFloat: return log ? std::log(hi) : hi;
  }
  return hi;
}

double Domain::to_internal(double v) const {
  if (kind == Kind::kCategorical) return v;
  return log ? std::log(v) : v;
}

double Domain::from_internal(double u) const {
  if (kind == Kind::kCategorical) {
    return std::clamp(std::floor(u), 0.0, static_cast<double>(choices.size()) - 1);
  }
  double v = log ? std::exp(u) : u;
  if (kind == Kind::kInt) return std::clamp(std::round(v), lo, hi);
  v = std::clamp(v, lo, hi);
  if (open_low && v <= lo) v = lo + kOpenLowStep * (hi - lo);
  return v;
}

double Domain::sample(Rng& rng) const {
  if (kind == Kind::kCategorical) return static_cast<double>(rng.below(choices.size()));
  return from_internal(rng.uniform(internal_low(), internal_high()));
}

std::string Domain::format(double v) const {
  if (kind == Kind::kCategorical) return choices[static_cast<std::size_t>(v)];
  if (kind == Kind::kInt) return std::to_string(static_cast<long>(v));
  return text::format_double(v);
}

std::size_t SearchSpace::index(const std::string& name) const {
  for (std::size_t i = 0; i < domains.size(); ++i) {
    if (domains[i].name == name) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown parameter '" + name + "'");
}

double SearchSpace::get(const Params& params, const std::string& name) const {
  return params.at(index(name));
}

Params SearchSpace::defaults() const {
  Params p;
  for (const auto& d : domains) p.push_back(d.default_value);
  return p;
}

Params SearchSpace::sample(Rng& rng) const {
  Params p;
  for (const auto& d : domains) p.push_back(d.sample(rng));
  return p;
}

bool SearchSpace::contains(const Params& params) const {
  if (params.size() != domains.size()) return false;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    if (!domains[i].contains(params[i])) return false;
  }
  return true;
}

void SearchSpace::validate() const {
  for (std::size_t i = 0; i < domains.size(); ++i) {
    domains[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (domains[j].name == domains[i].name) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate parameter '" + domains[i].name + "'");
      }
    }
  }
}

}  // namespace valuecast::hpo
