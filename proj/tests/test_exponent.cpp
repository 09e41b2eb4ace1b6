#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cflab/exponent.hpp"

using namespace cflab;

namespace {

PQSeq explicit_from(std::uint64_t N, const std::function<std::uint64_t(std::uint64_t)>& f) {
  std::vector<std::uint64_t> terms(N);
  for (std::uint64_t n = 1; n <= N; ++n) terms[n - 1] = f(n);
  return PQSeq::from_terms(terms);
}

}  // namespace

TEST_CASE("tau_series_sum: examples") {
  CHECK(tau_series_sum(PQSeq::constant_one(), 1.0, 10) == doctest::Approx(std::log(10.0)));

  const std::uint64_t N = 40;
  std::vector<BigInt> powers;
  for (std::uint64_t k = 1; k <= N; ++k) powers.push_back(BigInt(1) << static_cast<mp_bitcnt_t>(k));
  CHECK(tau_series_sum(PQSeq::from_terms(powers), 1.0, N) ==
        doctest::Approx(std::log1p(-std::ldexp(1.0, -static_cast<int>(N)))).epsilon(1e-9));

  // Partial sums of 1/n^2 computed directly, smallest terms first.
  const std::uint64_t M = 1'000'000;
  double direct = 0.0;
  for (std::uint64_t n = M; n >= 1; --n) direct += 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  const double got = tau_series_sum(PQSeq::power_floor(1.0), 2.0, M);
  CHECK(got == doctest::Approx(std::log(direct)).epsilon(1e-12));
  CHECK(std::fabs(got - std::log(std::numbers::pi * std::numbers::pi / 6.0)) <= 1e-5);
}

TEST_CASE("tau_series_sums: checkpoints and validation") {
  const std::uint64_t cps[] = {10, 100, 1000};
  const auto sums = tau_series_sums(PQSeq::constant_one(), 0.5, cps);
  REQUIRE(sums.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(sums[i] == doctest::Approx(std::log(static_cast<double>(cps[i]))));
  const std::uint64_t bad[] = {100, 10};
  CHECK_THROWS_AS(tau_series_sums(PQSeq::constant_one(), 1.0, bad), DomainError);
  CHECK_THROWS_AS(tau_series_sum(PQSeq::constant_one(), -1.0, 10), DomainError);
}

TEST_CASE("tau_monotone_estimate: examples") {
  const auto sq = tau_monotone_estimate(PQSeq::power_floor(2.0), 1'000'000);
  CHECK(std::fabs(sq.estimate - 2.0) <= 0.1);
  CHECK(sq.tail_inf <= sq.final_value());
  CHECK(sq.final_value() <= sq.tail_sup);

  CHECK(tau_monotone_estimate(PQSeq::exp_floor(), 10'000).estimate <= 0.01);

  const auto lin = tau_monotone_estimate(explicit_from(100'000, [](std::uint64_t n) { return n; }), 100'000);
  CHECK(std::fabs(lin.estimate - 1.0) <= 0.05);
}

TEST_CASE("tau_monotone_estimate: contract and conventions") {
  const PQSeq bumpy = PQSeq::from_terms(std::vector<std::uint64_t>{2, 3, 5, 4, 9});
  try {
    tau_monotone_estimate(bumpy, 5);
    FAIL("expected a contract violation");
  } catch (const ContractViolation& e) {
    CHECK(e.index() == 4);
  }
  CHECK_NOTHROW(tau_monotone_estimate(bumpy, 5, {0, 0, true}));

  const auto ones = tau_monotone_estimate(PQSeq::constant_one(), 1000);
  CHECK(ones.diverged);
  CHECK(std::isinf(ones.estimate));

  const auto rational = tau_monotone_estimate(expand(Rational(3, 7)), 100);
  CHECK(rational.terminated);
  CHECK(rational.estimate == 0.0);
}

TEST_CASE("tau_monotone_estimate: window shrinks for a converging input") {
  const auto est = tau_monotone_estimate(PQSeq::power_floor(1.0), 10'000, {1000, 1, false});
  CHECK(est.window == 1000);
  const auto wide = tau_monotone_estimate(PQSeq::power_floor(0.5), 100'000, {50'000, 0, false});
  const auto narrow = tau_monotone_estimate(PQSeq::power_floor(0.5), 100'000, {5'000, 0, false});
  CHECK(narrow.tail_sup - narrow.tail_inf <= wide.tail_sup - wide.tail_inf);
}

TEST_CASE("monotone estimator consistency constant") {
  double C = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (std::uint64_t N : {1000ULL, 10'000ULL, 100'000ULL}) {
      const auto e = tau_monotone_estimate(PQSeq::power_floor(alpha), N);
      C = std::max(C, std::fabs(e.estimate - alpha) * std::log(static_cast<double>(N)) / (alpha * alpha));
    }
  }
  MESSAGE("calibrated C = " << C);
  CHECK(C <= 2.0);
}

TEST_CASE("liminf_ratio_estimate: examples") {
  CHECK(std::fabs(liminf_ratio_estimate(PQSeq::power_floor(1.0 / 3.0), 100'000).estimate - 3.0) <= 0.05);
  CHECK(liminf_ratio_estimate(PQSeq::constant_one(), 500).estimate == 0.0);
  const PQSeq mixed = explicit_from(100'000, [](std::uint64_t n) { return n % 2 == 0 ? n : n * n; });
  const auto e = liminf_ratio_estimate(mixed, 100'000);
  CHECK(std::fabs(e.estimate - 1.0) <= 0.01);
  CHECK(e.tail_sup >= 1.99);
  CHECK_THROWS_AS(liminf_ratio_estimate(PQSeq::constant_one(), 1), DomainError);
}

TEST_CASE("construct_tau") {
  CHECK(construct_tau(Extended::infinity()).kind() == PQSeq::Kind::constant);
  const std::uint64_t cps[] = {100, 10'000, 1'000'000};
  const auto sums = tau_series_sums(construct_tau(Extended::infinity()), 0.1, cps);
  CHECK(sums[1] > sums[0] + 4.0);
  CHECK(sums[2] > sums[1] + 4.0);
  CHECK(construct_tau(Extended::finite(0.0)).kind() == PQSeq::Kind::exp_floor);
  const PQSeq two = construct_tau(Extended::finite(2.0));
  CHECK(!first_descent(two, 10'000).has_value());
  CHECK(two.a(1'000'000) == 1000);
  CHECK_THROWS_AS(construct_tau(Extended::finite(-1.0)), DomainError);
  CHECK_THROWS_AS(Extended::parse("-2"), DomainError);
  CHECK(Extended::parse("inf").is_infinite());
}

TEST_CASE("perturb: examples") {
  const PQSeq twos = perturb(PQSeq::constant_one(), BitPattern::constant(1));
  for (std::uint64_t n = 1; n <= 100; ++n) CHECK(twos.a(n) == 2);
  const std::uint64_t cps[] = {1000, 100'000};
  const auto sums = tau_series_sums(twos, 2.0, cps);
  CHECK(sums[1] > sums[0] + 4.0);

  const PQSeq base = PQSeq::power_floor(2.0);
  const PQSeq alt = perturb(base, BitPattern::alternating());
  CHECK(first_descent(alt, 100).has_value());
  const double b = tau_monotone_estimate(base, 100'000).estimate;
  const double p = tau_monotone_estimate(alt, 100'000, {0, 0, true}).estimate;
  CHECK(std::fabs(b - p) <= 0.1);

  const PQSeq same = perturb(PQSeq::exp_floor(), BitPattern::constant(0));
  for (std::uint64_t n = 1; n <= 60; ++n) CHECK(same.a(n) == PQSeq::exp_floor().a(n));
}

TEST_CASE("splice: examples") {
  const PQSeq tail = PQSeq::power_floor(1.0);
  const PQSeq zero = splice(PQSeq::constant(7), 0, tail);
  for (std::uint64_t n = 1; n <= 100; ++n) CHECK(zero.a(n) == tail.a(n));

  const PQSeq prefix = PQSeq::from_terms(std::vector<std::uint64_t>{5, 5, 5});
  const PQSeq s = splice(prefix, 3, tail);
  CHECK(std::fabs(liminf_ratio_estimate(s, 100'000).estimate - 1.0) <= 0.05);
  for (std::uint64_t n = 1; n <= 3; ++n) {
    const auto a = cylinder(std::span<const BigInt>(s.terms(n)));
    const auto b = cylinder(std::span<const BigInt>(prefix.terms(n)));
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
  }
}

TEST_CASE("tail and perturbation invariance") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> entry(1, 1000);
  for (double alpha : {0.5, 2.0}) {
    const PQSeq base = PQSeq::power_floor(alpha);
    const double b = tau_monotone_estimate(base, 100'000).estimate;
    for (std::uint64_t cut : {0ULL, 10ULL, 1000ULL}) {
      std::vector<std::uint64_t> junk(cut);
      for (auto& v : junk) v = entry(rng);
      const PQSeq s = splice(PQSeq::from_terms(junk), cut, base);
      CHECK(std::fabs(tau_monotone_estimate(s, 100'000, {0, 0, true}).estimate - b) <= 0.1);
    }
    std::vector<std::uint8_t> bits(97);
    for (auto& v : bits) v = static_cast<std::uint8_t>(rng() & 1);
    const PQSeq p = perturb(base, BitPattern{bits, true});
    CHECK(std::fabs(tau_monotone_estimate(p, 100'000, {0, 0, true}).estimate - b) <= 0.1);
  }
}

TEST_CASE("series and lim sup coherence") {
  const std::uint64_t cps[] = {10'000, 100'000, 999'999, 1'000'000};
  for (double alpha : {0.5, 1.0, 2.0}) {
    const PQSeq s = PQSeq::power_floor(alpha);
    const auto above = tau_series_sums(s, alpha + 0.2, cps);
    CHECK(std::exp(above[3]) - std::exp(above[2]) < 1e-6);
    const auto below = tau_series_sums(s, alpha - 0.2, cps);
    CHECK(below[1] > below[0] + 0.1);
    CHECK(below[3] > below[1] + 0.1);
  }
}

TEST_CASE("lambda_membership_report") {
  const auto sq = lambda_membership_report(PQSeq::power_floor(2.0), 1000);
  CHECK(sq.monotone_up_to == 1000);
  CHECK(sq.growth_witnesses.front() == 4);
  const auto bad = lambda_membership_report(PQSeq::from_terms(std::vector<std::uint64_t>{3, 2, 4, 5}), 4);
  CHECK(bad.monotone_up_to == 1);
  const auto ones = lambda_membership_report(PQSeq::constant_one(), 1000);
  CHECK(ones.monotone_up_to == 1000);
  CHECK(ones.growth_witnesses.empty());
}

TEST_CASE("compare_terms decides large closed-form terms") {
  const PQSeq e = PQSeq::exp_floor();
  CHECK(compare_terms(e, 500, 499) == 1);
  CHECK(compare_terms(e, 499, 500) == -1);
  CHECK(compare_terms(e, 300, 300) == 0);
  const PQSeq p = PQSeq::perturbed(PQSeq::exp_floor(), BitPattern::alternating());
  CHECK(compare_terms(p, 200, 199) == 1);
}
