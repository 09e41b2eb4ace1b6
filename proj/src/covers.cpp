#include "cflab/covers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "numeric.hpp"

namespace cflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMaxDpValues = 50'000'000;

std::vector<IntRange> ranges_at(const ConstraintFamily& family, std::uint64_t n) {
  std::vector<IntRange> out;
  out.reserve(n);
  for (std::uint64_t k = 1; k <= n; ++k) out.push_back(family.range(k, n));
  return out;
}

// Saturating product of the range widths.
std::uint64_t width_product(const std::vector<IntRange>& ranges) {
  unsigned __int128 acc = 1;
  for (const auto& r : ranges) {
    acc *= r.width();
    if (acc > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(acc);
}

double log_sum_exp(const std::vector<double>& xs, double scale) {
  double mx = -kInf;
  for (double x : xs) mx = std::max(mx, scale * x);
  if (mx == -kInf) return -kInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(scale * x - mx);
  return mx + std::log(acc);
}

}  // namespace

ConstraintFamily::ConstraintFamily(std::string name, RangeFn range, bool monotone)
    : name_(std::move(name)), range_(std::move(range)), monotone_(monotone) {}

IntRange ConstraintFamily::range(std::uint64_t index, std::uint64_t generation) const {
  if (index < 1 || index > generation) throw DomainError("family index out of range");
  const IntRange r = range_(index, generation);
  if (r.lo < 1) {
    throw ContractViolation("family " + name_ + " has lower bound < 1 at index " + std::to_string(index), index);
  }
  return r;
}

ConstraintFamily ConstraintFamily::d_family(const PQSeq& s) {
  return ConstraintFamily(
      "D[" + s.describe() + "]",
      [s](std::uint64_t k, std::uint64_t) {
        const auto sk = s.a_small(k);
        if (!sk || *sk > (UINT64_MAX >> 1) / (k + 1)) {
          throw EnumerationTooLarge("s_" + std::to_string(k) + " too large for an integer range");
        }
        return IntRange{k * *sk, (k + 1) * *sk};
      },
      false);
}

ConstraintFamily ConstraintFamily::c_family(double alpha, double eps) {
  if (!(eps > 0) || !(eps < alpha)) throw DomainError("C family needs 0 < eps < alpha");
  const auto lower = detail::Exponent::from_double(alpha - eps);
  const auto upper = detail::Exponent::from_double(alpha + eps);
  return ConstraintFamily(
      "C[alpha=" + std::to_string(alpha) + ",eps=" + std::to_string(eps) + "]",
      [lower, upper](std::uint64_t j, std::uint64_t k) {
        const auto top = detail::floor_pow(k, upper);
        if (!top.small) throw EnumerationTooLarge("k^(alpha+eps) too large");
        return IntRange{std::max<std::uint64_t>(1, detail::ceil_pow_u64(j, lower)), *top.small + 1};
      },
      true);
}

ConstraintFamily ConstraintFamily::c_tilde_family(double alpha, double eps) {
  if (!(eps > 0) || !(alpha >= 0)) throw DomainError("C~ family needs alpha >= 0 and eps > 0");
  const auto upper = detail::Exponent::from_double(alpha + eps);
  return ConstraintFamily(
      "Ctilde[alpha=" + std::to_string(alpha) + ",eps=" + std::to_string(eps) + "]",
      [upper](std::uint64_t, std::uint64_t k) {
        const auto top = detail::floor_pow(k, upper);
        if (!top.small) throw EnumerationTooLarge("k^(alpha+eps) too large");
        return IntRange{1, *top.small + 1};
      },
      true);
}

ConstraintFamily ConstraintFamily::monotone_bounded(std::uint64_t L) {
  return ConstraintFamily(
      "monotone[1.." + std::to_string(L) + "]", [L](std::uint64_t, std::uint64_t) { return IntRange{1, L + 1}; },
      true);
}

ConstraintFamily ConstraintFamily::box(std::uint64_t lo, std::uint64_t hi) {
  if (lo < 1) throw DomainError("box family needs lo >= 1");
  return ConstraintFamily(
      "box[" + std::to_string(lo) + ".." + std::to_string(hi) + "]",
      [lo, hi](std::uint64_t, std::uint64_t) { return IntRange{lo, hi + 1}; }, false);
}

ConstraintFamily ConstraintFamily::single(std::vector<std::uint64_t> prefix) {
  if (prefix.empty()) throw DomainError("single family needs a nonempty prefix");
  for (auto v : prefix) {
    if (v < 1) throw DomainError("partial quotients must be >= 1");
  }
  std::string name = "single[";
  for (std::size_t i = 0; i < prefix.size(); ++i) name += (i ? "," : "") + std::to_string(prefix[i]);
  name += "]";
  return ConstraintFamily(
      std::move(name),
      [prefix](std::uint64_t k, std::uint64_t) {
        if (k > prefix.size()) return IntRange{1, 1};
        return IntRange{prefix[k - 1], prefix[k - 1] + 1};
      },
      false);
}

// ---------------------------------------------------------------------------
// Enumeration

TupleStream::TupleStream(const ConstraintFamily& family, std::uint64_t n)
    : ranges_(ranges_at(family, n)), monotone_(family.monotone()), current_(n, 0) {
  if (n == 0) throw DomainError("enumeration needs n >= 1");
}

bool TupleStream::descend(std::size_t from) {
  for (std::size_t k = from; k < current_.size(); ++k) {
    std::uint64_t lo = ranges_[k].lo;
    if (monotone_ && k > 0) lo = std::max(lo, current_[k - 1]);
    if (lo >= ranges_[k].hi) return false;
    current_[k] = lo;
  }
  return true;
}

bool TupleStream::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    // Raising an earlier coordinate only raises later lower bounds, so a
    // failed minimal fill means the family is empty.
    if (!descend(0)) done_ = true;
    return !done_;
  }
  for (std::size_t i = current_.size(); i-- > 0;) {
    ++current_[i];
    if (current_[i] < ranges_[i].hi && descend(i + 1)) return true;
  }
  done_ = true;
  return false;
}

TupleStream enumerate_family(const ConstraintFamily& family, std::uint64_t n, std::uint64_t cap) {
  const std::uint64_t product = width_product(ranges_at(family, n));
  if (product > cap) {
    throw EnumerationTooLarge("family " + family.name() + " at generation " + std::to_string(n) +
                              " spans more than " + std::to_string(cap) + " tuples; use analytic bounds");
  }
  return TupleStream(family, n);
}

BigInt count_family(const ConstraintFamily& family, std::uint64_t n) {
  const auto ranges = ranges_at(family, n);
  if (!family.monotone()) {
    BigInt acc(1);
    for (const auto& r : ranges) acc *= BigInt(static_cast<unsigned long>(r.width()));
    return acc;
  }
  std::uint64_t vmin = UINT64_MAX, vmax = 0;
  for (const auto& r : ranges) {
    if (r.width() == 0) return BigInt(0);
    vmin = std::min(vmin, r.lo);
    vmax = std::max(vmax, r.hi);
  }
  if (vmax - vmin > kMaxDpValues) throw EnumerationTooLarge("value range too wide for exact counting");
  const std::size_t width = vmax - vmin;
  // ways[v]: tuples of the first i coordinates ending at value vmin + v.
  std::vector<BigInt> ways(width, 0), next(width, 0);
  for (std::uint64_t v = ranges[0].lo; v < ranges[0].hi; ++v) ways[v - vmin] = 1;
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    BigInt running(0);
    for (std::size_t v = 0; v < width; ++v) {
      running += ways[v];
      const std::uint64_t value = vmin + v;
      next[v] = (value >= ranges[i].lo && value < ranges[i].hi) ? running : BigInt(0);
    }
    std::swap(ways, next);
  }
  BigInt total(0);
  for (const auto& w : ways) total += w;
  return total;
}

BigInt count_monotone(std::uint64_t n, std::uint64_t L) {
  if (n < 1 || L < 1) throw DomainError("count_monotone needs n >= 1 and L >= 1");
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n + L - 1, n);
  return out;
}

// ---------------------------------------------------------------------------
// Bounds

StirlingBounds stirling_bounds(std::uint64_t n) {
  if (n < 1) throw DomainError("stirling_bounds needs n >= 1");
  detail::CompensatedSum sum;
  for (std::uint64_t k = 2; k <= n; ++k) sum.add(std::log(static_cast<double>(k)));
  const double x = static_cast<double>(n);
  const double core = (x + 0.5) * std::log(x) - x;
  return {0.5 * std::log(2.0 * M_PI) + core, 1.0 + core, sum.value()};
}

namespace {

void check_ck_args(std::uint64_t k, double alpha, double eps) {
  if (k < 1) throw DomainError("count bounds need k >= 1");
  if (!(alpha >= 1.0)) throw DomainError("C_k count bounds need alpha >= 1");
  if (!(eps > 0) || !(eps < alpha)) throw DomainError("C_k count bounds need 0 < eps < alpha");
}

double log_factorial(std::uint64_t k) { return stirling_bounds(k).log_factorial; }

}  // namespace

double ck_count_bound(std::uint64_t k, double alpha, double eps) {
  check_ck_args(k, alpha, eps);
  const double x = static_cast<double>(k);
  const double p = alpha + eps;
  return x * std::log(2.0) + (p - 1.0) * log_factorial(k) + p * (x - 0.5 * std::log(2.0 * M_PI * x));
}

double ck_count_bound_intermediate(std::uint64_t k, double alpha, double eps) {
  check_ck_args(k, alpha, eps);
  const double x = static_cast<double>(k);
  return x * std::log(2.0) + x * (alpha + eps) * std::log(x) - log_factorial(k);
}

double c_tilde_count_bound(std::uint64_t k, double alpha, double eps) {
  if (k < 1 || !(eps > 0) || !(alpha >= 0)) throw DomainError("c_tilde_count_bound needs k >= 1, eps > 0");
  const double x = static_cast<double>(k);
  return (1.0 + std::log(x)) * std::pow(x, alpha + eps);
}

double gap_epsilon(const LogSequence& s, std::uint64_t n) {
  if (n < 1) throw DomainError("gap_epsilon needs n >= 1");
  const double log3 = std::log(3.0);
  detail::CompensatedSum acc;
  for (std::uint64_t k = 1; k <= n; ++k) {
    const double ls = s(k);
    if (!(ls >= log3 - 1e-12)) throw ContractViolation("gap_epsilon needs s_k >= 3; fails at k=" + std::to_string(k), k);
    acc.add(std::log(static_cast<double>(k + 1)) + ls);
  }
  return -std::log(8.0) - 2.0 * acc.value();
}

Rational gap_epsilon_exact(const PQSeq& s, std::uint64_t n) {
  if (n < 1) throw DomainError("gap_epsilon needs n >= 1");
  BigInt prod(1);
  for (std::uint64_t k = 1; k <= n; ++k) {
    const BigInt sk = s.a(k);
    if (sk < 3) throw ContractViolation("gap_epsilon needs s_k >= 3; fails at k=" + std::to_string(k), k);
    prod *= BigInt(static_cast<unsigned long>(k + 1)) * sk;
  }
  Rational out(1, 8 * prod * prod);
  out.canonicalize();
  return out;
}

TailEstimate falconer_lower_bound(const LogSequence& log_m, const std::function<double(std::uint64_t)>& log_eps,
                                  std::uint64_t N, std::uint64_t window) {
  if (N < 1) throw DomainError("falconer_lower_bound needs N >= 1");
  const double log2 = std::log(2.0);
  std::vector<double> lm(N + 2), le(N + 2);
  for (std::uint64_t k = 1; k <= N + 1; ++k) {
    lm[k] = log_m(k);
    le[k] = log_eps(k);
    if (!(lm[k] >= log2 - 1e-12)) {
      throw ContractViolation("falconer_lower_bound needs m_n >= 2; fails at n=" + std::to_string(k), k);
    }
    if (k > 1 && !(le[k] < le[k - 1])) {
      throw ContractViolation("gaps eps_n must be strictly decreasing; fails at n=" + std::to_string(k), k);
    }
  }
  std::vector<TailSample> values;
  values.reserve(N);
  detail::CompensatedSum num;
  for (std::uint64_t n = 1; n <= N; ++n) {
    num.add(lm[n]);
    const double denom = -(lm[n + 1] + le[n + 1]);
    if (!(denom > 0)) {
      throw ContractViolation("m_{n+1} eps_{n+1} must be < 1; fails at n=" + std::to_string(n + 1), n + 1);
    }
    values.push_back({n, num.value() / denom});
  }
  return summarize_tail(std::move(values), window, TailKind::lim_inf);
}

TailEstimate fan_dimension_estimate(const LogSequence& s, std::uint64_t N, std::uint64_t window) {
  if (N < 1) throw DomainError("fan_dimension_estimate needs N >= 1");
  std::vector<TailSample> values;
  values.reserve(N);
  detail::CompensatedSum prod;
  for (std::uint64_t n = 1; n <= N; ++n) {
    prod.add(s(n));
    values.push_back({n, prod.value() / (2.0 * prod.value() + s(n + 1))});
  }
  return summarize_tail(std::move(values), window, TailKind::lim_inf);
}

// ---------------------------------------------------------------------------
// Cover reports and critical exponents

double CoverReport::log_weighted_sum(double s) const {
  if (exact_lengths) return log_sum_exp(log_lengths, s);
  return log_count + s * log_max_len;
}

std::pair<double, double> CoverReport::log_weighted_sum_bounds(double s) const {
  if (exact_lengths) {
    const double v = log_sum_exp(log_lengths, s);
    return {v, v};
  }
  return {log_count + s * log_min_len, log_count + s * log_max_len};
}

namespace {

// -log(q_n (q_n + q_{n-1})) for a tuple, in extended precision.
double log_cylinder_length(std::span<const std::uint64_t> tuple) {
  long double q_prev = 0.0L, q = 1.0L;
  for (auto a : tuple) {
    const long double next = static_cast<long double>(a) * q + q_prev;
    q_prev = q;
    q = next;
  }
  return -static_cast<double>(std::log(q) + std::log(q + q_prev));
}

void collect_lengths(const ConstraintFamily& family, std::uint64_t n, std::uint64_t first_lo,
                     std::uint64_t first_hi, std::vector<double>& out) {
  ConstraintFamily slice(
      family.name(),
      [&family, first_lo, first_hi](std::uint64_t k, std::uint64_t g) {
        IntRange r = family.range(k, g);
        if (k == 1) r = {std::max(r.lo, first_lo), std::min(r.hi, first_hi)};
        if (r.hi < r.lo) r.hi = r.lo;
        return r;
      },
      family.monotone());
  TupleStream stream(slice, n);
  while (stream.next()) out.push_back(log_cylinder_length(stream.tuple()));
}

}  // namespace

CoverReport cover_report_enumerated(const ConstraintFamily& family, std::uint64_t n, std::uint64_t cap,
                                    unsigned threads) {
  const auto ranges = ranges_at(family, n);
  if (width_product(ranges) > cap) {
    throw EnumerationTooLarge("family " + family.name() + " at generation " + std::to_string(n) +
                              " exceeds the enumeration cap");
  }
  CoverReport out;
  out.generation = n;
  out.exact_lengths = true;

  const IntRange first = ranges[0];
  const std::uint64_t values = first.width();
  const unsigned workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, values)));
  std::vector<std::vector<double>> parts(workers);
  if (workers == 1) {
    collect_lengths(family, n, first.lo, first.hi, parts[0]);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (values + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = first.lo + w * chunk;
      const std::uint64_t hi = std::min(first.hi, lo + chunk);
      pool.emplace_back([&, lo, hi, w] {
        if (lo < hi) collect_lengths(family, n, lo, hi, parts[w]);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& p : parts) out.log_lengths.insert(out.log_lengths.end(), p.begin(), p.end());

  out.count = BigInt(static_cast<unsigned long>(out.log_lengths.size()));
  out.log_count = out.log_lengths.empty() ? -kInf : std::log(static_cast<double>(out.log_lengths.size()));
  if (out.log_lengths.empty()) {
    out.log_min_len = out.log_max_len = -kInf;
  } else {
    const auto [mn, mx] = std::minmax_element(out.log_lengths.begin(), out.log_lengths.end());
    out.log_min_len = *mn;
    out.log_max_len = *mx;
  }
  return out;
}

CoverReport cover_report_analytic(const ConstraintFamily& family, std::uint64_t n) {
  CoverReport out;
  out.generation = n;
  out.count = count_family(family, n);
  out.log_count = out.count == 0 ? -kInf : detail::log_big(out.count);
  detail::CompensatedSum lo_sum, hi_sum;
  for (const auto& r : ranges_at(family, n)) {
    lo_sum.add(std::log(static_cast<double>(r.lo)));
    hi_sum.add(std::log(static_cast<double>(r.hi)));
  }
  out.log_max_len = -2.0 * lo_sum.value();
  out.log_min_len = -std::log(2.0) - 2.0 * hi_sum.value();
  return out;
}

CriticalLevel critical_level(const CoverReport& report, double tolerance) {
  CriticalLevel level;
  level.generation = report.generation;
  level.exact = report.exact_lengths;
  if (report.count == 0) throw NonBracketing("empty cover: log sum is -inf for every s", -kInf, -kInf);
  if (report.log_count == 0.0) return level;  // a single cylinder: s* = 0

  if (report.exact_lengths) {
    const double at0 = report.log_weighted_sum(0.0), at1 = report.log_weighted_sum(1.0);
    if (at1 > 0.0) throw NonBracketing("log sum |I|^s stays positive on [0,1]", at0, at1);
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (report.log_weighted_sum(mid) > 0.0 ? lo : hi) = mid;
    }
    level.s_lo = lo;
    level.s_hi = hi;
  } else {
    // Roots of the two linear bounds bracket the root of the true sum.
    level.s_lo = report.log_count / -report.log_min_len;
    level.s_hi = report.log_count / -report.log_max_len;
    if (!(level.s_lo <= 1.0)) {
      throw NonBracketing("lower bound on log sum |I|^s stays positive on [0,1]", report.log_count,
                          report.log_count + report.log_min_len);
    }
    level.s_hi = std::min(level.s_hi, 1.0);
  }
  level.s_star = 0.5 * (level.s_lo + level.s_hi);
  return level;
}

namespace {

CriticalExponent finish(std::vector<CriticalLevel> levels, std::uint64_t n_max) {
  CriticalExponent out;
  out.levels = std::move(levels);
  out.truncation_index = n_max;
  if (!out.levels.empty()) {
    out.s_star = out.levels.back().s_star;
    out.s_lo = out.levels.back().s_lo;
    out.s_hi = out.levels.back().s_hi;
  }
  return out;
}

}  // namespace

CriticalExponent critical_exponent(const ConstraintFamily& family, std::uint64_t n_max, const CriticalOptions& opts) {
  if (n_max < opts.n_min || opts.n_min < 1) throw DomainError("critical_exponent needs 1 <= n_min <= n_max");
  std::vector<CriticalLevel> levels;
  for (std::uint64_t n = opts.n_min; n <= n_max; ++n) {
    const bool fits = opts.enumerate && width_product(ranges_at(family, n)) <= opts.cap;
    const CoverReport report =
        fits ? cover_report_enumerated(family, n, opts.cap, opts.threads) : cover_report_analytic(family, n);
    levels.push_back(critical_level(report, opts.tolerance));
  }
  return finish(std::move(levels), n_max);
}

CriticalExponent critical_exponent(const std::function<LevelBounds(std::uint64_t)>& levels_fn, std::uint64_t n_max,
                                   std::uint64_t n_min, double tolerance) {
  if (n_max < n_min || n_min < 1) throw DomainError("critical_exponent needs 1 <= n_min <= n_max");
  std::vector<CriticalLevel> levels;
  for (std::uint64_t n = n_min; n <= n_max; ++n) {
    const LevelBounds b = levels_fn(n);
    CoverReport report;
    report.generation = n;
    report.log_count = b.log_count;
    report.count = b.log_count == -kInf ? 0 : 2;  // only the log count is known
    report.log_min_len = b.log_min_len;
    report.log_max_len = b.log_max_len;
    levels.push_back(critical_level(report, tolerance));
  }
  return finish(std::move(levels), n_max);
}

}  // namespace cflab
