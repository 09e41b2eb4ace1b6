#pragma once

// Convergence-exponent estimation for partial-quotient sequences and the
// explicit constructions realizing a prescribed exponent.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cflab/cf_core.hpp"
#include "cflab/extended.hpp"
#include "cflab/tail_estimate.hpp"

namespace cflab {

/// log sum_{n<=N} a_n^{-s}, accumulated with log-sum-exp.
double tau_series_sum(const PQSeq& seq, double s, std::uint64_t N);
/// The same sum reported at every checkpoint (ascending, each <= the last).
std::vector<double> tau_series_sums(const PQSeq& seq, double s, std::span<const std::uint64_t> checkpoints);

struct MonotoneOptions {
  std::uint64_t window = 0;   // 0: last half of the samples
  std::uint64_t burn_in = 0;  // leading indices skipped
  /// Apply the lim sup formula to the nondecreasing rearrangement of the first
  /// N terms instead of rejecting a non-monotone prefix.
  bool rearrange = false;
};

/// Running values log n / log a_n (indices with a_n = 1 excluded); the tail
/// sup is the tau estimate. An all-ones prefix reports tau = inf through
/// `diverged`.
TailEstimate tau_monotone_estimate(const PQSeq& seq, std::uint64_t N, const MonotoneOptions& opts = {});

/// Running values log a_n / log n for n >= 2; the tail inf is the estimate.
TailEstimate liminf_ratio_estimate(const PQSeq& seq, std::uint64_t N, std::uint64_t window = 0);

/// alpha = 0: floor(e^n); 0 < alpha < inf: floor(n^(1/alpha)); inf: all ones.
PQSeq construct_tau(const Extended& alpha);
PQSeq perturb(const PQSeq& base, const BitPattern& bits);
PQSeq splice(const PQSeq& prefix_src, std::uint64_t cut, const PQSeq& tail_src);

/// -1, 0, 1 as a_n <, =, > a_m.
int compare_terms(const PQSeq& seq, std::uint64_t n, std::uint64_t m);
/// First index k <= N with a_k < a_{k-1}.
std::optional<std::uint64_t> first_descent(const PQSeq& seq, std::uint64_t N);

struct LambdaReport {
  std::uint64_t checked = 0;
  std::uint64_t monotone_up_to = 0;
  std::vector<std::uint64_t> growth_witnesses;  // indices n with a_n > a_{n-1}
};

LambdaReport lambda_membership_report(const PQSeq& seq, std::uint64_t N);

}  // namespace cflab
