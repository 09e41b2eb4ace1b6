#pragma once

// Exact continued-fraction arithmetic: partial-quotient sequences, convergents,
// cylinder intervals and the Gauss map.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cflab/errors.hpp"

namespace cflab {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Parses "p/q" or "p" into a canonical rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
std::string to_string(const BigInt& z);

/// A 0/1 sequence, either finite (zero beyond its end) or repeated cyclically.
struct BitPattern {
  std::vector<std::uint8_t> bits;
  bool cyclic = false;

  int at(std::uint64_t n) const;  // n is 1-based

  static BitPattern alternating() { return {{0, 1}, true}; }
  static BitPattern constant(std::uint8_t bit) { return {{bit}, true}; }
};

/// A partial-quotient sequence a_1, a_2, ... given either explicitly or by a
/// closed form. Values are immutable and cheap to copy (shared nodes).
///
/// log_a(n) is available at any depth; closed forms switch to their analytic
/// logarithm once the exact term no longer fits in 53 bits, so the discrepancy
/// against log(a(n)) stays below 1/a(n). The exact a(n) is materialized on
/// demand and refuses terms above `bit_cap` bits.
class PQSeq {
 public:
  enum class Kind { explicit_list, exp_floor, power_floor, constant, spliced, perturbed };

  static constexpr std::uint64_t kDefaultBitCap = 1'000'000;

  static PQSeq from_terms(std::vector<BigInt> terms);
  static PQSeq from_terms(const std::vector<std::uint64_t>& terms);
  /// a_n = floor(e^n)
  static PQSeq exp_floor();
  /// a_n = floor(n^(1/alpha)), alpha > 0
  static PQSeq power_floor(double alpha);
  /// a_n = scale * floor(n^exponent), exponent >= 0
  static PQSeq scaled_power_floor(std::uint64_t scale, double exponent);
  static PQSeq constant(std::uint64_t value);
  static PQSeq constant_one() { return constant(1); }
  /// First `cut` terms of `prefix`, then `tail` at matching indices.
  static PQSeq spliced(PQSeq prefix, std::uint64_t cut, PQSeq tail);
  /// a_n = base.a(n) + bits(n)
  static PQSeq perturbed(PQSeq base, BitPattern bits);

  Kind kind() const;
  std::string describe() const;

  BigInt a(std::uint64_t n, std::uint64_t bit_cap = kDefaultBitCap) const;
  /// Exact term when it is below 2^62, otherwise nullopt.
  std::optional<std::uint64_t> a_small(std::uint64_t n) const;
  double log_a(std::uint64_t n) const;

  /// Number of terms for finite sequences (rationals).
  std::optional<std::uint64_t> length() const;
  /// The sequence is known to be nondecreasing on [monotone_from(), inf).
  /// Returns UINT64_MAX when nothing is known structurally.
  std::uint64_t monotone_from() const;

  std::vector<BigInt> terms(std::uint64_t n) const;

  struct Node;

 private:
  explicit PQSeq(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  void check_index(std::uint64_t n) const;

  std::shared_ptr<const Node> node_;
};

struct Convergent {
  std::uint64_t n = 0;
  BigInt p;
  BigInt q;
};

struct CylinderInterval {
  std::vector<BigInt> prefix;
  Rational lo;
  Rational hi;
  Rational length;
};

/// Canonical expansion of a rational in [0,1): last quotient >= 2, empty for 0.
std::vector<BigInt> expansion_terms(const Rational& x, std::uint64_t max_terms = UINT64_MAX);
PQSeq expand(const Rational& x, std::uint64_t max_terms = UINT64_MAX);
/// Value of the finite continued fraction [a_1, ..., a_n] (0 when empty).
Rational evaluate(std::span<const BigInt> quotients);

std::vector<Convergent> convergents(std::span<const BigInt> quotients);
std::vector<Convergent> convergents(const PQSeq& seq, std::uint64_t n);

CylinderInterval cylinder(std::span<const BigInt> prefix);
CylinderInterval cylinder(const std::vector<std::uint64_t>& prefix);

/// T(x) = 1/x - floor(1/x) for x in (0,1).
Rational gauss_map(const Rational& x);

/// Exact test of c >= phi^m with phi the golden ratio, via
/// phi^m = (L_m + F_m sqrt 5)/2.
bool at_least_golden_power(const Rational& c, std::uint64_t m);
/// q_n >= phi^n / (2 sqrt 5), decided exactly.
bool fibonacci_lower_bound_holds(const BigInt& q, std::uint64_t n);
/// Fibonacci numbers F_0 = 0, F_1 = 1.
BigInt fibonacci(std::uint64_t n);

}  // namespace cflab
