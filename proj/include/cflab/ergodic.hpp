#pragma once

// Gauss-measure Monte Carlo: sampling, certified partial-quotient extraction
// and Birkhoff averages of a_k^-t against the bounds on P(t).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cflab/cf_core.hpp"

namespace cflab {

inline constexpr const char* kGeneratorId = "splitmix64-counter/v1";

std::uint64_t splitmix64(std::uint64_t x);
/// Draw i of the stream for `seed`, uniform on the open interval (0,1).
double uniform_open01(std::uint64_t seed, std::uint64_t i);
/// x = 2^u - 1
double gauss_inverse_cdf(double u);
std::vector<double> sample_gauss(std::uint64_t count, std::uint64_t seed);

/// lo <= x <= hi, exact rationals.
struct Enclosure {
  Rational lo;
  Rational hi;
};

/// Produces an enclosure of a fixed real at the requested working precision.
using RealSource = std::function<Enclosure(std::uint64_t bits)>;

/// The Gauss sample 2^u - 1 for the uniform draw u.
RealSource gauss_sample_source(double u);
/// (sqrt 5 - 1)/2 = [1, 1, 1, ...]
RealSource golden_conjugate_source();
/// sqrt 2 - 1 = [2, 2, 2, ...]
RealSource sqrt2_minus_one_source();
/// An exact rational; its expansion is certified to the end.
RealSource rational_source(Rational x);

/// Partial quotients shared by every real in the enclosure, at most
/// `max_terms`. Quotients beyond 2^64 - 1 are saturated.
std::vector<std::uint64_t> common_prefix_quotients(const Enclosure& e, std::uint64_t max_terms);

struct Extraction {
  std::vector<std::uint64_t> quotients;
  std::uint64_t bits = 0;     // working precision of the final attempt
  unsigned retries = 0;       // precision doublings used
  bool terminated = false;    // the source is rational and its expansion ended
};

/// First n quotients at max(64, 4n) bits, doubling up to `max_doublings`
/// times. Throws TruncationError with the achieved depth when n is not
/// reached (unless the expansion terminates).
Extraction extract_quotients(const RealSource& x, std::uint64_t n, unsigned max_doublings = 4);

/// (1/n) sum_{k<=n} a_k^-t
double birkhoff_average(std::span<const std::uint64_t> quotients, double t);
double birkhoff_average(const RealSource& x, double t, std::uint64_t n);

struct PBounds {
  double p_lower = 0.0;      // S / (2 log 2)
  double p_upper = 0.0;      // (S + tail) / log 2
  double partial_sum = 0.0;  // S = sum_{k<=K} 1/(k^(t+1)(k+1))
  double tail = 0.0;         // 1/(t K^t)
};

inline constexpr std::uint64_t kDefaultSeriesTerms = 1'000'000;

PBounds p_bounds(double t, std::uint64_t K = kDefaultSeriesTerms);

struct ErgodicRun {
  std::uint64_t seed = 0;
  std::uint64_t sample_count = 0;
  std::uint64_t orbit_length = 0;
  double t = 1.0;
  std::vector<double> averages;
  double p_lower = 0.0;
  double p_upper = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::string generator = kGeneratorId;
  std::uint64_t precision_retries = 0;
};

struct ErgodicOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::uint64_t series_terms = kDefaultSeriesTerms;
};

/// One run per t over the same samples; quotients are extracted once.
std::vector<ErgodicRun> ergodic_runs(std::uint64_t seed, std::uint64_t samples, std::uint64_t orbit,
                                     std::span<const double> ts, const ErgodicOptions& opts = {});
ErgodicRun ergodic_run(std::uint64_t seed, std::uint64_t samples, std::uint64_t orbit, double t,
                       const ErgodicOptions& opts = {});

}  // namespace cflab
