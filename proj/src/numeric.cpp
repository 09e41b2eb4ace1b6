#include "numeric.hpp"

#include <mpfr.h>

#include <cmath>

namespace cflab::detail {

namespace {

constexpr std::uint64_t kSmallLimit = std::uint64_t{1} << 62;

// r^v <= bound, with saturation.
bool pow_at_most(unsigned __int128 r, std::uint64_t v, unsigned __int128 bound) {
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 0; i < v; ++i) {
    if (r != 0 && acc > bound / r) return false;
    acc *= r;
  }
  return acc <= bound;
}

std::optional<unsigned __int128> pow_u128(std::uint64_t n, std::uint64_t u) {
  constexpr unsigned __int128 kMax = (static_cast<unsigned __int128>(1) << 126);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 0; i < u; ++i) {
    if (n != 0 && acc > kMax / n) return std::nullopt;
    acc *= n;
  }
  return acc;
}

FloorPow from_mpz(mpz_class z) {
  FloorPow out;
  if (mpz_sizeinbase(z.get_mpz_t(), 2) <= 61) {
    out.small = mpz_get_ui(z.get_mpz_t());
  }
  out.big = std::move(z);
  return out;
}

mpz_class floor_pow_mpfr(std::uint64_t n, double e) {
  const double bits = e * std::log2(static_cast<double>(n)) + 1.0;
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::max(0.0, bits)) + 128;
  mpfr_t base, x;
  mpfr_init2(base, prec);
  mpfr_init2(x, prec);
  mpfr_set_ui(base, n, MPFR_RNDN);
  mpfr_set_d(x, e, MPFR_RNDN);
  mpfr_pow(x, base, x, MPFR_RNDD);
  mpz_class out;
  mpfr_get_z(out.get_mpz_t(), x, MPFR_RNDD);
  mpfr_clear(base);
  mpfr_clear(x);
  return out;
}

}  // namespace

Exponent Exponent::from_double(double e) {
  Exponent out;
  out.value = e;
  if (!(e >= 0.0) || !std::isfinite(e)) return out;
  // Convergents of e; accept the first one with a small denominator that
  // reproduces e to within rounding.
  double x = e;
  std::uint64_t p0 = 1, q0 = 0, p1 = static_cast<std::uint64_t>(std::floor(x)), q1 = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 40; ++iter) {
    const double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::fabs(approx - e) <= 1e-12 * std::max(1.0, e)) {
      out.rational = true;
      out.num = p1;
      out.den = q1;
      return out;
    }
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    const double a = std::floor(x);
    frac = x - a;
    if (a > 1e6) break;
    const auto ai = static_cast<std::uint64_t>(a);
    const std::uint64_t p2 = ai * p1 + p0;
    const std::uint64_t q2 = ai * q1 + q0;
    if (q2 > 1000) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return out;
}

FloorPow floor_pow(std::uint64_t n, const Exponent& e) {
  if (n == 0) return from_mpz(mpz_class(0));
  if (e.rational) {
    if (e.num == 0) return from_mpz(mpz_class(1));
    if (auto big_n = pow_u128(n, e.num)) {
      const long double approx = std::pow(static_cast<long double>(*big_n),
                                          1.0L / static_cast<long double>(e.den));
      if (approx < static_cast<long double>(kSmallLimit)) {
        auto r = static_cast<unsigned __int128>(std::floor(approx));
        while (pow_at_most(r + 1, e.den, *big_n)) ++r;
        while (r > 0 && !pow_at_most(r, e.den, *big_n)) --r;
        if (r < kSmallLimit) {
          FloorPow out;
          out.small = static_cast<std::uint64_t>(r);
          out.big = mpz_class(static_cast<unsigned long>(r));
          return out;
        }
      }
    }
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), n, e.num);
    mpz_class r;
    mpz_root(r.get_mpz_t(), pw.get_mpz_t(), e.den);
    return from_mpz(std::move(r));
  }
  const long double approx = std::pow(static_cast<long double>(n), static_cast<long double>(e.value));
  if (approx < 1e17L) {
    const long double fl = std::floor(approx);
    if (approx - fl > 1e-9L && fl + 1 - approx > 1e-9L) {
      FloorPow out;
      out.small = static_cast<std::uint64_t>(fl);
      out.big = mpz_class(static_cast<unsigned long>(fl));
      return out;
    }
  }
  return from_mpz(floor_pow_mpfr(n, e.value));
}

std::uint64_t ceil_pow_u64(std::uint64_t n, const Exponent& e) {
  const FloorPow f = floor_pow(n, e);
  if (!f.small) return UINT64_MAX;
  const std::uint64_t fl = *f.small;
  // n^e is an integer exactly when fl^den == n^num (rational case); for
  // irrational exponents n^e is never an integer for n >= 2.
  if (e.rational) {
    mpz_class lhs, rhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), fl, e.den);
    mpz_ui_pow_ui(rhs.get_mpz_t(), n, e.num);
    return lhs == rhs ? fl : fl + 1;
  }
  return n == 1 ? 1 : fl + 1;
}

mpz_class floor_exp(std::uint64_t n) {
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::ceil(static_cast<double>(n) * 1.4426950408889634)) + 96;
  mpfr_t x;
  mpfr_init2(x, prec);
  mpfr_set_ui(x, n, MPFR_RNDN);
  mpfr_exp(x, x, MPFR_RNDD);
  mpz_class out;
  mpfr_get_z(out.get_mpz_t(), x, MPFR_RNDD);
  mpfr_clear(x);
  return out;
}

double log_big(const mpz_class& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace cflab::detail
