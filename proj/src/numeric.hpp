#pragma once

// Private numeric helpers shared by the library sources.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace cflab::detail {

/// An exponent stored exactly as num/den when it is (numerically) a rational
/// with a small denominator, otherwise as a double.
struct Exponent {
  double value = 0.0;
  bool rational = false;
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Exponent from_double(double e);
};

/// floor(n^e), exact. Returns nullopt in `small` when it does not fit below 2^62.
struct FloorPow {
  std::optional<std::uint64_t> small;
  mpz_class big;
};
FloorPow floor_pow(std::uint64_t n, const Exponent& e);
std::uint64_t ceil_pow_u64(std::uint64_t n, const Exponent& e);

/// floor(e^n) via MPFR with enough guard bits.
mpz_class floor_exp(std::uint64_t n);

/// Natural log of an arbitrary-precision positive integer.
double log_big(const mpz_class& z);

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace cflab::detail
