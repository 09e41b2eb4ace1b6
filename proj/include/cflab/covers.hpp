#pragma once

// Cover constructions: constrained cylinder families, monotone-tuple counting,
// Stirling and count bounds, gap estimates, and dimension estimators built on
// them.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cflab/cf_core.hpp"
#include "cflab/log_sequence.hpp"
#include "cflab/tail_estimate.hpp"

namespace cflab {

/// Half-open integer interval [lo, hi); empty when hi <= lo.
struct IntRange {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;

  std::uint64_t width() const { return hi > lo ? hi - lo : 0; }
};

/// Admissible values of sigma_k at each index k of generation n, optionally
/// constrained to sigma_1 <= sigma_2 <= ... <= sigma_n.
class ConstraintFamily {
 public:
  using RangeFn = std::function<IntRange(std::uint64_t index, std::uint64_t generation)>;

  ConstraintFamily(std::string name, RangeFn range, bool monotone);

  /// k s_k <= sigma_k < (k+1) s_k
  static ConstraintFamily d_family(const PQSeq& s);
  /// sigma nondecreasing, sigma_j >= j^(alpha-eps), sigma_k <= k^(alpha+eps)
  static ConstraintFamily c_family(double alpha, double eps);
  /// sigma nondecreasing, sigma_k <= k^(alpha+eps)
  static ConstraintFamily c_tilde_family(double alpha, double eps);
  /// sigma nondecreasing with values in [1, L]
  static ConstraintFamily monotone_bounded(std::uint64_t L);
  /// every sigma_k in [lo, hi] (inclusive), no ordering
  static ConstraintFamily box(std::uint64_t lo, std::uint64_t hi);
  /// exactly one tuple
  static ConstraintFamily single(std::vector<std::uint64_t> prefix);

  const std::string& name() const { return name_; }
  bool monotone() const { return monotone_; }
  IntRange range(std::uint64_t index, std::uint64_t generation) const;

 private:
  std::string name_;
  RangeFn range_;
  bool monotone_;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

/// Lexicographic stream of the tuples of a family at generation n.
class TupleStream {
 public:
  TupleStream(const ConstraintFamily& family, std::uint64_t n);
  /// Advances to the next tuple; false once exhausted.
  bool next();
  std::span<const std::uint64_t> tuple() const { return current_; }

 private:
  bool descend(std::size_t from);

  std::vector<IntRange> ranges_;
  bool monotone_;
  std::vector<std::uint64_t> current_;
  bool started_ = false;
  bool done_ = false;
};

/// Throws EnumerationTooLarge when the product of range widths exceeds `cap`.
TupleStream enumerate_family(const ConstraintFamily& family, std::uint64_t n,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// Exact number of tuples in the family at generation n (DP over values for
/// monotone families, product of widths otherwise).
BigInt count_family(const ConstraintFamily& family, std::uint64_t n);

/// N_n(L) = C(n+L-1, n), the number of nondecreasing n-tuples over [1, L].
BigInt count_monotone(std::uint64_t n, std::uint64_t L);

struct StirlingBounds {
  double log_lower = 0.0;      // log(sqrt(2 pi) n^(n+1/2) e^-n)
  double log_upper = 0.0;      // log(e n^(n+1/2) e^-n)
  double log_factorial = 0.0;  // sum_{k<=n} log k
};
StirlingBounds stirling_bounds(std::uint64_t n);

/// log of 2^k (k!)^(alpha+eps-1) (e^k / sqrt(2 pi k))^(alpha+eps)
double ck_count_bound(std::uint64_t k, double alpha, double eps);
/// log of 2^k k^(k(alpha+eps)) / k!
double ck_count_bound_intermediate(std::uint64_t k, double alpha, double eps);
/// log of e^((1 + log k) k^(alpha+eps)), the bound used for alpha < 1
double c_tilde_count_bound(std::uint64_t k, double alpha, double eps);

/// log eps_n = -log 8 - 2 sum_{k<=n} log((k+1) s_k); requires s_k >= 3.
double gap_epsilon(const LogSequence& s, std::uint64_t n);
/// Exact eps_n for an integer sequence s.
Rational gap_epsilon_exact(const PQSeq& s, std::uint64_t n);

/// Running sum_{k<=n} log m_k / -(log m_{n+1} + log eps_{n+1}); tail inf.
/// Requires m_n >= 2 and log_eps strictly decreasing on 1..N+1.
TailEstimate falconer_lower_bound(const LogSequence& log_m, const std::function<double(std::uint64_t)>& log_eps,
                                  std::uint64_t N, std::uint64_t window = 0);

/// Running log(s_1...s_n) / (2 log(s_1...s_n) + log s_{n+1}); tail inf.
TailEstimate fan_dimension_estimate(const LogSequence& s, std::uint64_t N, std::uint64_t window = 0);

/// One generation of a cover: counts and natural-log lengths.
struct CoverReport {
  std::uint64_t generation = 0;
  BigInt count;
  double log_count = 0.0;
  double log_min_len = 0.0;
  double log_max_len = 0.0;
  bool exact_lengths = false;
  std::vector<double> log_lengths;  // per cylinder, when exact_lengths

  /// log sum |I|^s; with analytic lengths this is the upper bound.
  double log_weighted_sum(double s) const;
  /// (lower, upper) bracket of log sum |I|^s.
  std::pair<double, double> log_weighted_sum_bounds(double s) const;
};

/// Exact cylinder lengths of every tuple (enumerated, partitioned by first
/// coordinate across `threads` workers).
CoverReport cover_report_enumerated(const ConstraintFamily& family, std::uint64_t n,
                                    std::uint64_t cap = kDefaultEnumerationCap, unsigned threads = 1);
/// Exact count; lengths bounded by prod lo_k^-2 >= |I| >= 1/2 prod hi_k^-2.
CoverReport cover_report_analytic(const ConstraintFamily& family, std::uint64_t n);

struct LevelBounds {
  std::uint64_t generation = 0;
  double log_count = 0.0;
  double log_min_len = 0.0;
  double log_max_len = 0.0;
};

struct CriticalLevel {
  std::uint64_t generation = 0;
  double s_star = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  bool exact = false;
};

struct CriticalExponent {
  std::vector<CriticalLevel> levels;
  double s_star = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  std::uint64_t truncation_index = 0;  // outer tail truncated at n_max
};

inline constexpr double kBisectionTolerance = 1e-4;

struct CriticalOptions {
  bool enumerate = true;  // exact lengths when the family fits under the cap
  std::uint64_t cap = 1'000'000;
  std::uint64_t n_min = 1;
  double tolerance = kBisectionTolerance;
  unsigned threads = 1;
};

/// Root in s of log sum |I|^s = 0 per generation, with its bracket.
CriticalExponent critical_exponent(const ConstraintFamily& family, std::uint64_t n_max,
                                   const CriticalOptions& opts = {});
CriticalExponent critical_exponent(const std::function<LevelBounds(std::uint64_t)>& levels, std::uint64_t n_max,
                                   std::uint64_t n_min = 1, double tolerance = kBisectionTolerance);
CriticalLevel critical_level(const CoverReport& report, double tolerance = kBisectionTolerance);

}  // namespace cflab
