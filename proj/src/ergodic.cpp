#include "cflab/ergodic.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <thread>

#include "numeric.hpp"

namespace cflab {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

Rational mpfr_to_rational(const mpfr_t x) {
  BigInt z;
  const mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), x);
  Rational out(z);
  if (e >= 0) {
    mpq_mul_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return out;
}

class Mpfr {
 public:
  explicit Mpfr(std::uint64_t bits) { mpfr_init2(v_, static_cast<mpfr_prec_t>(bits)); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

// Evaluates f under downward and upward rounding.
template <typename F>
Enclosure directed(std::uint64_t bits, F f) {
  Mpfr lo(bits), hi(bits);
  f(lo.get(), MPFR_RNDD);
  f(hi.get(), MPFR_RNDU);
  return {mpfr_to_rational(lo.get()), mpfr_to_rational(hi.get())};
}

std::uint64_t saturate(const mpz_t q) {
  return mpz_fits_ulong_p(q) ? mpz_get_ui(q) : UINT64_MAX;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

double uniform_open01(std::uint64_t seed, std::uint64_t i) {
  const std::uint64_t bits = splitmix64(seed + (i + 1) * kGamma) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double gauss_inverse_cdf(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("inverse CDF needs u in [0,1]");
  return std::exp2(u) - 1.0;
}

std::vector<double> sample_gauss(std::uint64_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample_gauss needs count >= 1");
  std::vector<double> out(count);
  for (std::uint64_t i = 0; i < count; ++i) out[i] = gauss_inverse_cdf(uniform_open01(seed, i));
  return out;
}

RealSource gauss_sample_source(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("Gauss sample needs u in (0,1)");
  return [u](std::uint64_t bits) {
    return directed(std::max<std::uint64_t>(bits, 64), [u](mpfr_ptr r, mpfr_rnd_t rnd) {
      mpfr_set_d(r, u, MPFR_RNDN);  // exact: 53 <= precision
      mpfr_exp2(r, r, rnd);
      mpfr_sub_ui(r, r, 1, rnd);
    });
  };
}

RealSource golden_conjugate_source() {
  return [](std::uint64_t bits) {
    return directed(std::max<std::uint64_t>(bits, 64), [](mpfr_ptr r, mpfr_rnd_t rnd) {
      mpfr_sqrt_ui(r, 5, rnd);
      mpfr_sub_ui(r, r, 1, rnd);
      mpfr_div_2ui(r, r, 1, rnd);
    });
  };
}

RealSource sqrt2_minus_one_source() {
  return [](std::uint64_t bits) {
    return directed(std::max<std::uint64_t>(bits, 64), [](mpfr_ptr r, mpfr_rnd_t rnd) {
      mpfr_sqrt_ui(r, 2, rnd);
      mpfr_sub_ui(r, r, 1, rnd);
    });
  };
}

RealSource rational_source(Rational x) {
  x.canonicalize();
  if (x < 0 || x >= 1) throw DomainError("rational source needs x in [0,1)");
  return [x](std::uint64_t) { return Enclosure{x, x}; };
}

std::vector<std::uint64_t> common_prefix_quotients(const Enclosure& e, std::uint64_t max_terms) {
  if (e.lo > e.hi) throw DomainError("enclosure has lo > hi");
  const bool exact = e.lo == e.hi;
  std::vector<std::uint64_t> out;
  // x = num/den; each step replaces (num, den) by (den mod num, num).
  BigInt ln = e.lo.get_num(), ld = e.lo.get_den(), hn = e.hi.get_num(), hd = e.hi.get_den();
  BigInt lq, lr, hq, hr;
  while (out.size() < max_terms) {
    if (sgn(ln) <= 0 || sgn(hn) <= 0) break;
    mpz_tdiv_qr(lq.get_mpz_t(), lr.get_mpz_t(), ld.get_mpz_t(), ln.get_mpz_t());
    if (!exact) {
      mpz_tdiv_qr(hq.get_mpz_t(), hr.get_mpz_t(), hd.get_mpz_t(), hn.get_mpz_t());
      // An endpoint landing on a cylinder boundary admits two expansions.
      if (lq != hq || sgn(lr) == 0 || sgn(hr) == 0) break;
      hd.swap(hn);
      hn.swap(hr);
    }
    out.push_back(saturate(lq.get_mpz_t()));
    ld.swap(ln);
    ln.swap(lr);
  }
  return out;
}

Extraction extract_quotients(const RealSource& x, std::uint64_t n, unsigned max_doublings) {
  if (n < 1) throw DomainError("extraction needs n >= 1");
  Extraction out;
  out.bits = std::max<std::uint64_t>(64, 4 * n);
  for (;;) {
    const Enclosure e = x(out.bits);
    out.quotients = common_prefix_quotients(e, n);
    if (out.quotients.size() >= n) return out;
    if (e.lo == e.hi) {
      out.terminated = true;
      return out;
    }
    if (out.retries >= max_doublings) {
      throw TruncationError("certified " + std::to_string(out.quotients.size()) + " of " + std::to_string(n) +
                                " partial quotients at " + std::to_string(out.bits) + " bits",
                            out.quotients.size());
    }
    ++out.retries;
    out.bits *= 2;
  }
}

double birkhoff_average(std::span<const std::uint64_t> quotients, double t) {
  if (quotients.empty()) throw DomainError("Birkhoff average needs n >= 1");
  if (!(t > 0)) throw DomainError("Birkhoff average needs t > 0");
  detail::CompensatedSum acc;
  for (auto a : quotients) acc.add(std::pow(static_cast<double>(a), -t));
  return acc.value() / static_cast<double>(quotients.size());
}

double birkhoff_average(const RealSource& x, double t, std::uint64_t n) {
  const Extraction ex = extract_quotients(x, n);
  if (ex.quotients.size() < n) {
    throw TruncationError("expansion terminates after " + std::to_string(ex.quotients.size()) + " quotients",
                          ex.quotients.size());
  }
  return birkhoff_average(ex.quotients, t);
}

PBounds p_bounds(double t, std::uint64_t K) {
  if (!(t > 0)) throw DomainError("p_bounds needs t > 0");
  if (K < 1) throw DomainError("p_bounds needs K >= 1");
  // Smallest terms first.
  double sum = 0.0;
  for (std::uint64_t k = K; k >= 1; --k) {
    const double x = static_cast<double>(k);
    sum += 1.0 / (std::pow(x, t + 1.0) * (x + 1.0));
  }
  PBounds out;
  out.partial_sum = sum;
  out.tail = 1.0 / (t * std::pow(static_cast<double>(K), t));
  out.p_lower = sum / (2.0 * std::log(2.0));
  out.p_upper = (sum + out.tail) / std::log(2.0);
  return out;
}

std::vector<ErgodicRun> ergodic_runs(std::uint64_t seed, std::uint64_t samples, std::uint64_t orbit,
                                     std::span<const double> ts, const ErgodicOptions& opts) {
  if (samples < 1 || orbit < 1) throw DomainError("ergodic run needs samples >= 1 and orbit >= 1");
  if (ts.empty()) throw DomainError("ergodic run needs at least one t");
  for (double t : ts) {
    if (!(t > 0)) throw DomainError("ergodic run needs t > 0");
  }
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, samples));

  std::vector<std::vector<double>> averages(ts.size(), std::vector<double>(samples));
  std::vector<std::uint64_t> retries(threads, 0);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned w) {
    try {
      for (std::uint64_t i = w; i < samples; i += threads) {
        const Extraction ex = extract_quotients(gauss_sample_source(uniform_open01(seed, i)), orbit);
        retries[w] += ex.retries;
        for (std::size_t j = 0; j < ts.size(); ++j) averages[j][i] = birkhoff_average(ex.quotients, ts[j]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::uint64_t total_retries = 0;
  for (auto r : retries) total_retries += r;

  std::vector<ErgodicRun> runs;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    ErgodicRun run;
    run.seed = seed;
    run.sample_count = samples;
    run.orbit_length = orbit;
    run.t = ts[j];
    run.averages = std::move(averages[j]);
    const PBounds b = p_bounds(ts[j], opts.series_terms);
    run.p_lower = b.p_lower;
    run.p_upper = b.p_upper;
    detail::CompensatedSum sum;
    for (double a : run.averages) sum.add(a);
    run.mean = sum.value() / static_cast<double>(samples);
    if (samples > 1) {
      detail::CompensatedSum sq;
      for (double a : run.averages) sq.add((a - run.mean) * (a - run.mean));
      run.std_error = std::sqrt(sq.value() / static_cast<double>(samples - 1) / static_cast<double>(samples));
    }
    run.precision_retries = total_retries;
    runs.push_back(std::move(run));
  }
  return runs;
}

ErgodicRun ergodic_run(std::uint64_t seed, std::uint64_t samples, std::uint64_t orbit, double t,
                       const ErgodicOptions& opts) {
  const double ts[] = {t};
  return std::move(ergodic_runs(seed, samples, orbit, ts, opts).front());
}

}  // namespace cflab
