#include "cflab/extended.hpp"

#include <cstdio>
#include <stdexcept>

namespace cflab {

Extended Extended::parse(std::string_view text) {
  std::string s(text);
  if (s == "inf" || s == "infinity" || s == "Inf" || s == "INF") return infinity();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not an exponent: '" + s + "'");
  }
  if (used != s.size()) throw DomainError("not an exponent: '" + s + "'");
  return finite(v);
}

std::string Extended::to_string() const {
  if (infinite_) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

}  // namespace cflab
