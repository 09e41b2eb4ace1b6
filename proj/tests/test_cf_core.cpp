#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cflab/cf_core.hpp"

using namespace cflab;

namespace {

std::vector<BigInt> big(std::initializer_list<unsigned long> xs) {
  std::vector<BigInt> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

// Plain Euclid on machine integers.
std::vector<std::uint64_t> euclid(std::uint64_t p, std::uint64_t q) {
  std::vector<std::uint64_t> out;
  while (p != 0) {
    out.push_back(q / p);
    const std::uint64_t r = q % p;
    q = p;
    p = r;
  }
  return out;
}

std::vector<BigInt> random_prefix(std::mt19937_64& rng, std::size_t max_len, unsigned max_entry) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<unsigned> entry(1, max_entry);
  std::vector<BigInt> out(len(rng));
  for (auto& a : out) a = entry(rng);
  return out;
}

}  // namespace

TEST_CASE("expand: examples") {
  CHECK(expansion_terms(Rational(0)).empty());
  CHECK(expansion_terms(Rational(1, 2)) == big({2}));
  CHECK(expansion_terms(Rational(3, 7)) == big({2, 3}));
  CHECK(expand(Rational(3, 7)).length() == 2u);
  CHECK_THROWS_AS(expansion_terms(Rational(1)), DomainError);
  CHECK_THROWS_AS(expansion_terms(Rational(-1, 2)), DomainError);
  CHECK_THROWS_AS(expansion_terms(Rational(3, 7), 1), DomainError);
}

TEST_CASE("expand: agrees with machine Euclid and round-trips") {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::uint64_t> den(2, 1'000'000);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t q = den(rng);
    const std::uint64_t p = std::uniform_int_distribution<std::uint64_t>(0, q - 1)(rng);
    Rational x(static_cast<unsigned long>(p), static_cast<unsigned long>(q));
    x.canonicalize();
    const auto terms = expansion_terms(x);
    const auto g = std::gcd(p, q);
    const auto oracle = euclid(p / g, q / g);
    REQUIRE(terms.size() == oracle.size());
    for (std::size_t k = 0; k < terms.size(); ++k) CHECK(terms[k] == static_cast<unsigned long>(oracle[k]));
    if (!terms.empty()) CHECK(terms.back() >= 2);
    CHECK(evaluate(terms) == x);
  }
}

TEST_CASE("parse_rational") {
  CHECK(parse_rational("6/14") == Rational(3, 7));
  CHECK(parse_rational(" 5 ") == Rational(5));
  CHECK(to_string(parse_rational("6/14")) == "3/7");
  CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
  CHECK_THROWS_AS(parse_rational("x/2"), DomainError);
}

TEST_CASE("convergents: examples") {
  const auto ones = convergents(big({1, 1, 1, 1, 1}));
  const unsigned long fib[] = {1, 2, 3, 5, 8};
  for (std::size_t i = 0; i < 5; ++i) CHECK(ones[i].q == fib[i]);
  const auto two = convergents(big({2}));
  CHECK(two[0].p == 1);
  CHECK(two[0].q == 2);
  CHECK_THROWS_AS(convergents(big({1, 0})), DomainError);
}

TEST_CASE("convergents: determinant and gcd on random prefixes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto prefix = random_prefix(rng, 30, 10);
    const auto cs = convergents(prefix);
    BigInt p_prev(0), q_prev(1);
    for (const auto& c : cs) {
      const BigInt det = c.p * q_prev - p_prev * c.q;
      CHECK(det == (c.n % 2 == 1 ? 1 : -1));
      BigInt g;
      mpz_gcd(g.get_mpz_t(), c.p.get_mpz_t(), c.q.get_mpz_t());
      CHECK(g == 1);
      CHECK(Rational(c.p, c.q) == evaluate(std::span<const BigInt>(prefix).first(c.n)));
      p_prev = c.p;
      q_prev = c.q;
    }
  }
  std::vector<BigInt> thirty(30, BigInt(3));
  const auto cs = convergents(thirty);
  CHECK(cs[29].p * cs[28].q - cs[28].p * cs[29].q == -1);
}

TEST_CASE("convergents of a closed-form sequence") {
  const auto cs = convergents(PQSeq::constant_one(), 10);
  REQUIRE(cs.size() == 10);
  CHECK(cs[9].q == fibonacci(11));
  CHECK_THROWS_AS(convergents(PQSeq::constant_one(), 0), DomainError);
}

TEST_CASE("cylinder: examples") {
  const auto c1 = cylinder(std::vector<std::uint64_t>{1});
  CHECK(c1.lo == Rational(1, 2));
  CHECK(c1.hi == Rational(1));
  CHECK(c1.length == Rational(1, 2));
  const auto c2 = cylinder(std::vector<std::uint64_t>{2});
  CHECK(c2.lo == Rational(1, 3));
  CHECK(c2.hi == Rational(1, 2));
  CHECK(c2.length == Rational(1, 6));
  const auto c11 = cylinder(std::vector<std::uint64_t>{1, 1});
  CHECK(c11.lo == Rational(1, 2));
  CHECK(c11.hi == Rational(2, 3));
  CHECK(c11.length == Rational(1, 6));
  CHECK_THROWS_AS(cylinder(std::vector<std::uint64_t>{}), DomainError);
}

TEST_CASE("cylinder: endpoints are the extreme continuations") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto prefix = random_prefix(rng, 30, 10);
    const auto c = cylinder(prefix);
    // [a_1..a_n] and [a_1..a_n + 1] bound every continuation.
    const Rational e1 = evaluate(prefix);
    prefix.back() += 1;
    const Rational e2 = evaluate(prefix);
    CHECK(c.lo == std::min(e1, e2));
    CHECK(c.hi == std::max(e1, e2));
    CHECK(c.length == c.hi - c.lo);
  }
}

TEST_CASE("gauss_map: examples and shift property") {
  CHECK(gauss_map(Rational(1, 2)) == 0);
  CHECK(gauss_map(Rational(2, 5)) == Rational(1, 2));
  CHECK(gauss_map(Rational(3, 7)) == Rational(1, 3));
  CHECK(expansion_terms(gauss_map(Rational(3, 7))) == big({3}));
  CHECK_THROWS_AS(gauss_map(Rational(0)), DomainError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto prefix = random_prefix(rng, 20, 50);
    std::vector<BigInt> canon = prefix;
    if (canon.back() == 1) canon.back() = 2;
    Rational x = evaluate(canon);
    for (std::size_t k = 1; k < canon.size(); ++k) {
      x = gauss_map(x);
      CHECK(expansion_terms(x) == std::vector<BigInt>(canon.begin() + static_cast<long>(k), canon.end()));
    }
  }
}

TEST_CASE("golden-ratio comparisons") {
  // L_m = phi^m + psi^m exceeds phi^m exactly when m is even.
  BigInt l0(2), l1(1);
  for (std::uint64_t m = 1; m <= 100; ++m) {
    CHECK(at_least_golden_power(Rational(l1), m) == (m % 2 == 0));
    const BigInt next = l0 + l1;
    l0 = l1;
    l1 = next;
  }
  CHECK(at_least_golden_power(Rational(1), 0));
  CHECK_FALSE(at_least_golden_power(Rational(99, 100), 0));
  CHECK(at_least_golden_power(Rational(1618034, 1000000), 1));
  CHECK_FALSE(at_least_golden_power(Rational(1618033, 1000000), 1));
}

TEST_CASE("all-ones q_n are Fibonacci numbers and satisfy the golden lower bound") {
  BigInt a(1), b(1);  // F_1, F_2
  const auto cs = convergents(PQSeq::constant_one(), 200);
  for (std::uint64_t n = 1; n <= 200; ++n) {
    CHECK(cs[n - 1].q == b);  // F_{n+1}
    CHECK(fibonacci(n + 1) == b);
    CHECK(fibonacci_lower_bound_holds(cs[n - 1].q, n));
    const BigInt next = a + b;
    a = b;
    b = next;
  }
  CHECK_FALSE(fibonacci_lower_bound_holds(BigInt(1), 10));
}

TEST_CASE("PQSeq: closed forms against direct evaluation") {
  const PQSeq e = PQSeq::exp_floor();
  for (std::uint64_t n = 1; n <= 25; ++n) {
    CHECK(e.a(n) == static_cast<unsigned long>(std::floor(std::exp(static_cast<long double>(n)))));
  }
  const PQSeq sq = PQSeq::power_floor(2.0);
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    std::uint64_t r = 0;
    while ((r + 1) * (r + 1) <= n) ++r;
    REQUIRE(sq.a(n) == static_cast<unsigned long>(r));
  }
  const PQSeq cube = PQSeq::power_floor(1.0 / 3.0);
  for (std::uint64_t n = 1; n <= 2000; ++n) CHECK(cube.a(n) == static_cast<unsigned long>(n * n * n));
  const PQSeq scaled = PQSeq::scaled_power_floor(3, 2.0);
  CHECK(scaled.a(7) == 147);
  CHECK(PQSeq::constant(5).a(1000) == 5);
  CHECK_THROWS_AS(PQSeq::power_floor(0.0), DomainError);
}

TEST_CASE("PQSeq: log_a within 1/a_n of log a_n") {
  const PQSeq seqs[] = {PQSeq::exp_floor(), PQSeq::power_floor(0.3), PQSeq::power_floor(0.05),
                        PQSeq::scaled_power_floor(3, 4.0)};
  for (const auto& s : seqs) {
    for (std::uint64_t n = 1; n <= 400; n += 7) {
      const BigInt a = s.a(n);
      long exp2 = 0;
      const double mant = mpz_get_d_2exp(&exp2, a.get_mpz_t());
      const double exact = std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
      const double bound = std::max(1e-12 * exact, std::exp(-exact));
      CHECK(std::fabs(s.log_a(n) - exact) <= bound + 1e-12);
    }
  }
  CHECK(PQSeq::exp_floor().log_a(100000) == doctest::Approx(100000.0));
  CHECK_THROWS_AS(PQSeq::exp_floor().a(10'000'000, 1000), BitCapExceeded);
}

TEST_CASE("PQSeq: splice and perturb") {
  const PQSeq s = PQSeq::spliced(PQSeq::from_terms(std::vector<std::uint64_t>{5, 5, 5}), 3, PQSeq::power_floor(1.0));
  CHECK(s.a(2) == 5);
  CHECK(s.a(4) == 4);
  const PQSeq zero_cut = PQSeq::spliced(PQSeq::constant(9), 0, PQSeq::power_floor(1.0));
  for (std::uint64_t n = 1; n <= 50; ++n) CHECK(zero_cut.a(n) == static_cast<unsigned long>(n));
  const PQSeq p = PQSeq::perturbed(PQSeq::constant_one(), BitPattern::alternating());
  CHECK(p.a(1) == 1);
  CHECK(p.a(2) == 2);
  CHECK(p.log_a(2) == doctest::Approx(std::log(2.0)));
  const PQSeq same = PQSeq::perturbed(PQSeq::exp_floor(), BitPattern::constant(0));
  for (std::uint64_t n = 1; n <= 30; ++n) CHECK(same.a(n) == PQSeq::exp_floor().a(n));
  CHECK(same.monotone_from() == 1);
  const PQSeq finite = expand(Rational(3, 7));
  CHECK_THROWS_AS(finite.a(3), DomainError);
}
