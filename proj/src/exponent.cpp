#include "cflab/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numeric.hpp"

namespace cflab {

namespace {

// Logs of closed-form terms may sit up to 1/a(n) away from the exact value;
// differences above this margin are decided without materializing terms.
constexpr double kLogMargin = 1e-9;

std::uint64_t effective_length(const PQSeq& seq, std::uint64_t N, bool& terminated) {
  terminated = false;
  if (auto len = seq.length(); len && *len < N) {
    terminated = true;
    return *len;
  }
  return N;
}

}  // namespace

double tau_series_sum(const PQSeq& seq, double s, std::uint64_t N) {
  const std::uint64_t checkpoint[] = {N};
  return tau_series_sums(seq, s, checkpoint).front();
}

std::vector<double> tau_series_sums(const PQSeq& seq, double s, std::span<const std::uint64_t> checkpoints) {
  if (checkpoints.empty()) return {};
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() < 1) {
    throw DomainError("series checkpoints must be ascending and >= 1");
  }
  if (s < 0) throw DomainError("series exponent s must be >= 0");
  bool terminated = false;
  const std::uint64_t limit = effective_length(seq, checkpoints.back(), terminated);

  std::vector<double> out;
  out.reserve(checkpoints.size());
  double acc = -std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  for (std::uint64_t n = 1; n <= limit && next < checkpoints.size(); ++n) {
    acc = detail::log_add_exp(acc, -s * seq.log_a(n));
    while (next < checkpoints.size() && checkpoints[next] == n) {
      out.push_back(acc);
      ++next;
    }
  }
  // A finite expansion contributes nothing beyond its last term.
  while (out.size() < checkpoints.size()) out.push_back(acc);
  return out;
}

int compare_terms(const PQSeq& seq, std::uint64_t n, std::uint64_t m) {
  const auto an = seq.a_small(n), am = seq.a_small(m);
  if (an && am) return *an < *am ? -1 : (*an > *am ? 1 : 0);
  const double ln = seq.log_a(n), lm = seq.log_a(m);
  if (ln + kLogMargin < lm) return -1;
  if (lm + kLogMargin < ln) return 1;
  const int c = cmp(seq.a(n), seq.a(m));
  return (c > 0) - (c < 0);
}

std::optional<std::uint64_t> first_descent(const PQSeq& seq, std::uint64_t N) {
  bool terminated = false;
  N = effective_length(seq, N, terminated);
  // Pairs (k-1, k) with k-1 >= monotone_from() are known to be ordered.
  const std::uint64_t known = seq.monotone_from();
  const std::uint64_t last = known == UINT64_MAX ? N : std::min(N, known);
  for (std::uint64_t k = 2; k <= last; ++k) {
    if (compare_terms(seq, k, k - 1) < 0) return k;
  }
  return std::nullopt;
}

TailEstimate tau_monotone_estimate(const PQSeq& seq, std::uint64_t N, const MonotoneOptions& opts) {
  if (N < 1) throw DomainError("tau estimate needs N >= 1");
  bool terminated = false;
  const std::uint64_t limit = effective_length(seq, N, terminated);

  std::vector<double> logs;
  logs.reserve(limit);
  for (std::uint64_t n = 1; n <= limit; ++n) logs.push_back(seq.log_a(n));

  if (opts.rearrange) {
    std::sort(logs.begin(), logs.end());
  } else if (auto k = first_descent(seq, limit)) {
    throw ContractViolation("sequence is not nondecreasing: a_" + std::to_string(*k) + " < a_" +
                                std::to_string(*k - 1),
                            *k);
  }

  std::vector<TailSample> values;
  values.reserve(limit);
  for (std::uint64_t n = opts.burn_in + 1; n <= limit; ++n) {
    const double la = logs[n - 1];
    if (la <= 0.0) continue;  // a_n = 1
    values.push_back({n, std::log(static_cast<double>(n)) / la});
  }

  TailEstimate out;
  if (values.empty()) {
    out.kind = TailKind::lim_sup;
    out.estimate = out.tail_sup = out.tail_inf = std::numeric_limits<double>::infinity();
    out.diverged = true;
  } else {
    out = summarize_tail(std::move(values), opts.window, TailKind::lim_sup);
  }
  if (terminated) {
    // Rationals have tau = 0.
    out.terminated = true;
    out.diverged = false;
    out.estimate = 0.0;
  }
  return out;
}

TailEstimate liminf_ratio_estimate(const PQSeq& seq, std::uint64_t N, std::uint64_t window) {
  if (N < 2) throw DomainError("liminf ratio estimate needs N >= 2");
  bool terminated = false;
  const std::uint64_t limit = effective_length(seq, N, terminated);
  std::vector<TailSample> values;
  values.reserve(limit);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    values.push_back({n, seq.log_a(n) / std::log(static_cast<double>(n))});
  }
  TailEstimate out = summarize_tail(std::move(values), window, TailKind::lim_inf);
  out.terminated = terminated;
  return out;
}

PQSeq construct_tau(const Extended& alpha) {
  if (alpha.is_infinite()) return PQSeq::constant_one();
  if (alpha.value() == 0.0) return PQSeq::exp_floor();
  return PQSeq::power_floor(alpha.value());
}

PQSeq perturb(const PQSeq& base, const BitPattern& bits) { return PQSeq::perturbed(base, bits); }

PQSeq splice(const PQSeq& prefix_src, std::uint64_t cut, const PQSeq& tail_src) {
  return PQSeq::spliced(prefix_src, cut, tail_src);
}

LambdaReport lambda_membership_report(const PQSeq& seq, std::uint64_t N) {
  if (N < 1) throw DomainError("lambda report needs N >= 1");
  bool terminated = false;
  const std::uint64_t limit = effective_length(seq, N, terminated);
  LambdaReport out;
  out.checked = limit;
  out.monotone_up_to = limit == 0 ? 0 : 1;
  for (std::uint64_t k = 2; k <= limit; ++k) {
    const int c = compare_terms(seq, k, k - 1);
    if (c < 0) break;
    out.monotone_up_to = k;
    if (c > 0) out.growth_witnesses.push_back(k);
  }
  return out;
}

}  // namespace cflab
