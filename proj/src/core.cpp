#include "braid/core.hpp"

#include <cstdio>

namespace braid {

std::string WeightFunction::name() const {
  switch (kind_) {
    case WeightKind::Average:
      return "avg";
    case WeightKind::Median:
      return "median";
    case WeightKind::Quantile: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "q:%.6g", phi_);
      return buf;
    }
    case WeightKind::Max:
      return "max";
    case WeightKind::Min:
      return "min";
    case WeightKind::SecondMax:
      return "secondmax";
    case WeightKind::Spread:
      return "spread";
  }
  return "?";
}

WeightFunction WeightFunction::parse(const std::string& token) {
  if (token == "avg" || token == "average") return average();
  if (token == "median") return median();
  if (token == "max") return max();
  if (token == "min") return min();
  if (token == "secondmax") return second_max();
  if (token == "spread") return spread();
  if (token.rfind("q:", 0) == 0) {
    char* end = nullptr;
    double phi = std::strtod(token.c_str() + 2, &end);
    if (end == nullptr || *end != '\0') throw DomainError("bad quantile token: " + token);
    return quantile(phi);
  }
  throw DomainError("unknown weight token: " + token);
}

}  // namespace braid
