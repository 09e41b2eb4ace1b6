#include <doctest.h>

#include <cmath>

#include "cflab/spectra.hpp"

using namespace cflab;

namespace {

Extended fin(double a) { return Extended::finite(a); }

// Tail sup over the last half of (2 lgamma(n+2) + log s_{n+1}) / sum log s_k.
double xi_oracle(const std::function<long double(std::uint64_t)>& log_s, std::uint64_t N) {
  long double denom = 0;
  double best = -INFINITY;
  for (std::uint64_t n = 1; n <= N; ++n) {
    denom += log_s(n);
    const long double v = (2.0L * std::lgamma(static_cast<long double>(n) + 2.0L) + log_s(n + 1)) / denom;
    if (n > N / 2) best = std::max(best, static_cast<double>(v));
  }
  return best;
}

std::vector<double> staircase(std::uint64_t size) {
  std::vector<double> v(size);
  for (std::uint64_t n = 1; n <= size; ++n) v[n - 1] = 10.0 * std::ceil(n / 10.0) * std::log(2.0);
  return v;
}

}  // namespace

TEST_CASE("dimension formulas at their boundary points") {
  CHECK(dim_level_full(fin(0)).dim == 0.5);
  CHECK(dim_level_full(fin(7)).dim == 0.5);
  CHECK(dim_level_full(Extended::infinity()).dim == 1.0);

  CHECK(dim_level_lambda(fin(0)).dim == 0.5);
  CHECK(dim_level_lambda(fin(1)).dim == 0.0);
  CHECK(dim_level_lambda(fin(0.5)).dim == 0.25);
  CHECK(dim_level_lambda(fin(3)).dim == 0.0);
  CHECK_THROWS_AS(dim_level_lambda(fin(-1)), DomainError);

  CHECK(dim_E(fin(1)).dim == 0.0);
  CHECK(dim_E(fin(3)).dim == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(dim_E(fin(0.5)).dim == 0.0);
  CHECK(dim_E(Extended::infinity()).dim == 0.5);
  CHECK(dim_E(fin(1e12)).dim == doctest::Approx(0.5));

  CHECK(dim_F(fin(0)).dim == 1.0);
  CHECK(dim_F(fin(0.01)).dim == 0.5);
  CHECK(dim_F(fin(5)).dim == 0.5);
}

TEST_CASE("spectrum regimes and ranges") {
  CHECK(dim_level_lambda(fin(0.3)).regime == "sub-critical");
  CHECK(dim_level_lambda(fin(1)).regime == "critical");
  CHECK(dim_level_lambda(fin(2)).regime == "super-critical");
  double prev_lambda = 1.0, prev_e = -1.0;
  for (int k = 0; k <= 200; ++k) {
    const double a = k * 0.05;
    const double l = dim_level_lambda(fin(a)).dim;
    CHECK(l <= prev_lambda);
    prev_lambda = l;
    const double e = dim_E(fin(a)).dim;
    CHECK(e >= prev_e);
    CHECK(e < 0.5);
    prev_e = e;
    for (const auto& p : {dim_level_full(fin(a)), dim_level_lambda(fin(a)), dim_E(fin(a)), dim_F(fin(a))}) {
      CHECK(p.dim >= 0.0);
      CHECK(p.dim <= 1.0);
    }
  }
}

TEST_CASE("dim_E(alpha) equals dim_level_lambda(1/alpha)") {
  for (int k = 0; k < 20; ++k) {
    const double a = 1.0 + 0.37 * k * k;
    CHECK(dim_E(fin(a)).dim == doctest::Approx(dim_level_lambda(fin(1.0 / a)).dim).epsilon(1e-14));
  }
}

TEST_CASE("intersection trichotomy") {
  CHECK(intersection_trichotomy(fin(0)).label == '<');
  CHECK(intersection_trichotomy(fin(0.5)).label == '=');
  CHECK(intersection_trichotomy(fin(2)).label == '>');
  for (int k = 0; k < 50; ++k) {
    const double a = 0.1 * k;
    const char expected = a == 0.0 ? '<' : (a <= 1.0 ? '=' : '>');
    const Trichotomy t = intersection_trichotomy(fin(a));
    CHECK(t.label == expected);
    CHECK(t.dim_E < t.min_rule);
  }
  CHECK_THROWS_AS(intersection_trichotomy(Extended::infinity()), DomainError);
}

TEST_CASE("xi_limit: polynomial s_n against a direct oracle") {
  const PQSeq s = PQSeq::scaled_power_floor(3, 2.0);
  const auto e = xi_limit(LogSequence::of(s), 10'000);
  const double oracle = xi_oracle([](std::uint64_t n) { return std::log(3.0L * n * n); }, 10'000);
  CHECK(e.xi == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(e.dim == doctest::Approx(1.0 / (2.0 + e.xi)));
  CHECK_FALSE(e.tail.diverged);
  // Converges to 2/(alpha-1) = 1 from below, slowly.
  CHECK(e.xi < 1.0);
  CHECK(e.xi > 0.9);
  CHECK(std::fabs(e.extrapolated_xi - 1.0) < 0.05);
  CHECK(std::fabs(e.dim - 1.0 / 3.0) < 0.01);
}

TEST_CASE("xi_limit: exponential s_n") {
  // e^n itself has s_1 < 3; shift by one index.
  CHECK_THROWS_AS(xi_limit(LogSequence::exponential(1.0), 1000), ContractViolation);
  const LogSequence shifted{[](std::uint64_t n) { return static_cast<double>(n + 1); }, "e^(n+1)"};
  const auto e = xi_limit(shifted, 1000);
  const double oracle = xi_oracle([](std::uint64_t n) { return static_cast<long double>(n + 1); }, 1000);
  CHECK(e.xi == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(e.xi < 0.05);
  CHECK(e.dim > 0.48);
  CHECK(xi_limit(shifted, 100'000).xi < e.xi);
}

TEST_CASE("xi_limit: constant s_n diverges; s_n < 3 is rejected") {
  const auto e = xi_limit(LogSequence::of(PQSeq::constant(3)), 10'000);
  CHECK(e.tail.diverged);
  CHECK(e.dim == 0.0);
  try {
    xi_limit(LogSequence::of(PQSeq::from_terms(std::vector<std::uint64_t>{5, 5, 2, 5, 5, 5})), 4);
    FAIL("expected a contract violation");
  } catch (const ContractViolation& ex) {
    CHECK(ex.index() == 3);
  }
}

TEST_CASE("B_growth: examples") {
  const auto b = B_growth(PhiSpec::exponential(2.0, 3.0), 1000);
  CHECK(b.log_B == doctest::Approx(std::log(3.0) + std::log(2.0) / 501.0));
  CHECK(std::fabs(b.dim - 0.25) < 1e-3);
  const auto p = B_growth(PhiSpec::power(1.0, 2.0), 1000);
  CHECK(std::fabs(p.dim - 0.5) < 1e-2);
  CHECK(p.log_B < 0.03);
  const auto d = B_growth(PhiSpec::exp_poly_log(1.0, 1.0), 1000);
  CHECK(d.tail.diverged);
  CHECK(d.dim == 0.0);
}

TEST_CASE("B_hirst: examples") {
  const auto b = B_hirst(PhiSpec::double_exponential(2.0, 3.0), 1000);
  CHECK(std::fabs(b.dim - 0.25) < 1e-3);
  const auto c = B_hirst(PhiSpec::double_exponential(std::exp(1.0), 1.5), 1000);
  CHECK(c.B == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(c.dim == doctest::Approx(0.4).epsilon(1e-9));
  const auto p = B_hirst(PhiSpec::power(1.0, 2.0), 1000, 2);
  CHECK(std::fabs(p.dim - 0.5) < 1e-2);
  CHECK_THROWS_AS(B_hirst(PhiSpec::power(1.0, 2.0), 1000, 1), ContractViolation);
}

TEST_CASE("PhiSpec hypothesis checks") {
  const auto ok = PhiSpec::power(1.0, 2.0).check_hypothesis(1000);
  CHECK(ok.nondecreasing);
  CHECK(ok.outgrows_log);
  const auto bad = PhiSpec::from_log_values({1.0, 2.0, 1.5, 3.0}, "dip").check_hypothesis(4);
  CHECK_FALSE(bad.nondecreasing);
  CHECK(bad.first_descent == 3);
  const auto slow = PhiSpec::from_log_values(std::vector<double>(100, 0.0), "flat").check_hypothesis(100);
  CHECK_FALSE(slow.outgrows_log);
  CHECK_THROWS_AS(PhiSpec::power(-1.0, 2.0), DomainError);
  CHECK_THROWS_AS(PhiSpec::from_log_values({}, "empty"), DomainError);
}

TEST_CASE("t_sequence: exponential phi attains its supremum at n = j") {
  const TSeq t = t_sequence(PhiSpec::exponential(1.0, 2.0), 0.05, 200);
  for (const auto& e : t.entries) {
    CHECK(e.argmax == e.j);
    CHECK(e.log_log_T == doctest::Approx(static_cast<double>(e.j) * std::log(2.0)));
  }
}

TEST_CASE("t_sequence: invariants and liminf on three specimens") {
  const PhiSpec specimens[] = {PhiSpec::power(1.0, 2.0), PhiSpec::exponential(2.0, 3.0),
                               PhiSpec::from_log_values(staircase(10'000), "2^(10 ceil(n/10))")};
  for (const auto& phi : specimens) {
    const TSeq t = t_sequence(phi, kDefaultTEps, 1000);
    INFO(phi.label());
    CHECK(t.entries.size() == 1000);
    CHECK_FALSE(first_tseq_violation(t).has_value());
    CHECK(t.liminf_ratio.estimate >= 1.0);
    CHECK(t.liminf_ratio.estimate <= 1.01);
    CHECK(t.certified_from <= t.scan_end);
    for (const auto& e : t.entries) CHECK(e.argmax >= e.j);
  }
}

TEST_CASE("t_sequence: unsupported regimes") {
  CHECK_THROWS_AS(t_sequence(PhiSpec::exp_poly_log(1.0, 1.0), 0.1, 100), UnsupportedRegime);
  CHECK_THROWS_AS(t_sequence(PhiSpec::power(1.0, 2.0), 0.0, 100), DomainError);
}

TEST_CASE("first_tseq_violation detects broken entries") {
  TSeq t = t_sequence(PhiSpec::exponential(1.0, 2.0), 0.1, 20);
  t.entries[5].log_log_T = t.entries[4].log_log_T - 1.0;
  CHECK(first_tseq_violation(t) == std::optional<std::uint64_t>(5));
}

TEST_CASE("ephi figure table") {
  const auto rows = ephi_figure_table(default_phi_family(), 1000);
  REQUIRE(rows.size() == 9);
  CHECK(std::fabs(rows[0].dim - 0.5) < 1e-2);
  CHECK(rows[4].dim == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(rows[8].diverged);
  CHECK(rows[8].dim == 0.0);
  for (const auto& r : rows) CHECK(r.hypothesis_ok);
}
