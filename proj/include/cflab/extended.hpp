#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "cflab/errors.hpp"

namespace cflab {

/// A value in [0, inf] where inf is a distinguished point, not a real.
class Extended {
 public:
  static Extended finite(double v) {
    if (!(v >= 0.0) || v == std::numeric_limits<double>::infinity()) {
      throw DomainError("exponent must be a finite real >= 0 or inf");
    }
    return Extended(v, false);
  }
  static Extended infinity() { return Extended(0.0, true); }
  /// Accepts a decimal number or "inf".
  static Extended parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_) throw DomainError("exponent is infinite");
    return value_;
  }
  double as_double() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }
  std::string to_string() const;

  friend bool operator==(const Extended&, const Extended&) = default;

 private:
  Extended(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

}  // namespace cflab
