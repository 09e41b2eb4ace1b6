#include "cflab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "numeric.hpp"

namespace cflab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double log_or_nan(double x) { return x > 0.0 ? std::log(x) : kNaN; }

}  // namespace

SpectrumPoint dim_level_full(const Extended& alpha) {
  if (alpha.is_infinite()) return {alpha, 1.0, "full-measure"};
  return {alpha, 0.5, "finite-level"};
}

SpectrumPoint dim_level_lambda(const Extended& alpha) {
  if (alpha.is_infinite()) return {alpha, 0.0, "super-critical"};
  const double a = alpha.value();
  if (a < 1.0) return {alpha, (1.0 - a) / 2.0, "sub-critical"};
  if (a == 1.0) return {alpha, 0.0, "critical"};
  return {alpha, 0.0, "super-critical"};
}

SpectrumPoint dim_E(const Extended& alpha) {
  if (alpha.is_infinite()) return {alpha, 0.5, "limit"};
  const double a = alpha.value();
  if (a < 1.0) return {alpha, 0.0, "sub-critical"};
  if (a == 1.0) return {alpha, 0.0, "critical"};
  return {alpha, (a - 1.0) / (2.0 * a), "super-critical"};
}

SpectrumPoint dim_F(const Extended& alpha) {
  if (!alpha.is_infinite() && alpha.value() == 0.0) return {alpha, 1.0, "zero-level"};
  return {alpha, 0.5, "positive-level"};
}

Trichotomy intersection_trichotomy(const Extended& alpha) {
  if (alpha.is_infinite()) throw DomainError("the trichotomy is defined for finite alpha");
  Trichotomy t;
  t.dim_E = dim_E(alpha).dim;
  const double f = dim_F(alpha).dim;
  t.sum_rule = kDimLambda + f - 1.0;
  t.min_rule = std::min(kDimLambda, f);
  t.label = t.dim_E < t.sum_rule ? '<' : (t.dim_E == t.sum_rule ? '=' : '>');
  if (!(t.dim_E < t.min_rule)) {
    throw ContractViolation("dim E(alpha) < min(dim Lambda, dim F(alpha)) fails at alpha=" + alpha.to_string());
  }
  return t;
}

// ---------------------------------------------------------------------------
// PhiSpec

PhiSpec PhiSpec::power(double c, double gamma) {
  if (!(c > 0) || !(gamma > 0)) throw DomainError("power phi needs c > 0 and gamma > 0");
  return PhiSpec(Kind::power, c, gamma, fmt_num(c) + "*n^" + fmt_num(gamma));
}

PhiSpec PhiSpec::exponential(double c, double b) {
  if (!(c > 0) || !(b > 1)) throw DomainError("exponential phi needs c > 0 and b > 1");
  return PhiSpec(Kind::exponential, c, b, fmt_num(c) + "*" + fmt_num(b) + "^n");
}

PhiSpec PhiSpec::double_exponential(double a, double b) {
  if (!(a > 1) || !(b > 1)) throw DomainError("double exponential phi needs a > 1 and b > 1");
  return PhiSpec(Kind::double_exponential, a, b, fmt_num(a) + "^(" + fmt_num(b) + "^n)");
}

PhiSpec PhiSpec::exp_poly_log(double p, double q) {
  if (!(p >= 0) || !(q >= 0) || (p == 0 && q == 0)) throw DomainError("exp_poly_log phi needs p, q >= 0, not both 0");
  return PhiSpec(Kind::exp_poly_log, p, q, "exp(n^" + fmt_num(p) + "*log(n)^" + fmt_num(q) + ")");
}

PhiSpec PhiSpec::from_log_values(std::vector<double> log_phi, std::string label) {
  if (log_phi.empty()) throw DomainError("explicit phi needs at least one value");
  PhiSpec out(Kind::explicit_values, 0, 0, std::move(label));
  out.values_ = std::move(log_phi);
  return out;
}

std::optional<std::uint64_t> PhiSpec::size() const {
  if (kind_ == Kind::explicit_values) return values_.size();
  return std::nullopt;
}

void PhiSpec::check_index(std::uint64_t n) const {
  if (n == 0) throw DomainError("phi is indexed from 1");
  if (kind_ == Kind::explicit_values && n > values_.size()) {
    throw DomainError("phi(" + std::to_string(n) + ") is beyond the explicit values");
  }
}

double PhiSpec::log_phi(std::uint64_t n) const {
  check_index(n);
  const double x = static_cast<double>(n);
  switch (kind_) {
    case Kind::power:
      return std::log(p1_) + p2_ * std::log(x);
    case Kind::exponential:
      return std::log(p1_) + x * std::log(p2_);
    case Kind::double_exponential:
      return std::exp(log_log_phi(n));
    case Kind::exp_poly_log: {
      const double ln = std::log(x);
      return std::pow(x, p1_) * (p2_ == 0 ? 1.0 : std::pow(ln, p2_));
    }
    case Kind::explicit_values:
      return values_[n - 1];
  }
  return kNaN;
}

double PhiSpec::log_log_phi(std::uint64_t n) const {
  check_index(n);
  const double x = static_cast<double>(n);
  switch (kind_) {
    case Kind::double_exponential:
      return x * std::log(p2_) + std::log(std::log(p1_));
    case Kind::exp_poly_log: {
      if (n == 1) return p2_ == 0 ? 0.0 : kNaN;
      return p1_ * std::log(x) + p2_ * std::log(std::log(x));
    }
    default:
      return log_or_nan(log_phi(n));
  }
}

PhiSpec::HypothesisCheck PhiSpec::check_hypothesis(std::uint64_t N) const {
  HypothesisCheck out;
  if (auto sz = size()) N = std::min<std::uint64_t>(N, *sz);
  double prev = log_phi(1);
  for (std::uint64_t n = 2; n <= N; ++n) {
    const double cur = log_phi(n);
    if (cur < prev - 1e-12 * std::max(1.0, std::fabs(prev))) {
      out.nondecreasing = false;
      out.first_descent = n;
      break;
    }
    prev = cur;
  }
  // log(phi(n)/log n) should increase and be positive at the end of the range.
  if (N >= 6) {
    const auto ratio = [this](std::uint64_t n) { return log_phi(n) - std::log(std::log(static_cast<double>(n))); };
    const double end = ratio(N), mid = ratio(N / 2);
    out.outgrows_log = std::isinf(end) ? end > 0.0 : end > mid && end > 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// xi and B

XiEstimate xi_limit(const LogSequence& s, std::uint64_t N, std::uint64_t window) {
  if (N < 2) throw DomainError("xi_limit needs N >= 2");
  const double log3 = std::log(3.0);
  std::vector<double> log_s(N + 2);
  for (std::uint64_t n = 1; n <= N + 1; ++n) {
    log_s[n] = s(n);
    if (!(log_s[n] >= log3 - 1e-12)) {
      throw ContractViolation("xi_limit needs s(n) >= 3; fails at n=" + std::to_string(n), n);
    }
  }
  detail::CompensatedSum log_fact;  // log (n+1)!
  detail::CompensatedSum denom;     // log(s_1 ... s_n)
  std::vector<TailSample> values;
  values.reserve(N);
  for (std::uint64_t n = 1; n <= N; ++n) {
    log_fact.add(std::log(static_cast<double>(n + 1)));
    denom.add(log_s[n]);
    values.push_back({n, (2.0 * log_fact.value() + log_s[n + 1]) / denom.value()});
  }
  XiEstimate out;
  out.tail = summarize_tail(std::move(values), window, TailKind::lim_sup);
  out.xi = out.tail.estimate;
  out.dim = out.tail.diverged ? 0.0 : 1.0 / (2.0 + out.xi);
  out.extrapolated_xi = extrapolate_inverse_log(out.tail);
  return out;
}

namespace {

BEstimate finish_B(std::vector<TailSample> values, std::uint64_t window) {
  BEstimate out;
  out.tail = summarize_tail(std::move(values), window, TailKind::lim_sup);
  out.log_B = out.tail.estimate;
  out.B = std::exp(out.log_B);
  out.dim = out.tail.diverged ? 0.0 : 1.0 / (out.B + 1.0);
  out.out_of_hypothesis = out.log_B < 0.0;
  return out;
}

}  // namespace

BEstimate B_growth(const PhiSpec& phi, std::uint64_t N, std::uint64_t window) {
  if (N < 1) throw DomainError("B_growth needs N >= 1");
  std::vector<TailSample> values;
  values.reserve(N);
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double lp = phi.log_phi(n);
    const double v = std::isfinite(lp) ? lp / static_cast<double>(n)
                                       : std::exp(phi.log_log_phi(n) - std::log(static_cast<double>(n)));
    values.push_back({n, v});
  }
  return finish_B(std::move(values), window);
}

BEstimate B_hirst(const PhiSpec& phi, std::uint64_t N, std::uint64_t first_index, std::uint64_t window) {
  if (first_index < 1 || N < first_index) throw DomainError("B_hirst needs 1 <= first_index <= N");
  std::vector<TailSample> values;
  values.reserve(N - first_index + 1);
  for (std::uint64_t n = first_index; n <= N; ++n) {
    const double ll = phi.log_log_phi(n);
    if (std::isnan(ll) || !(phi.log_phi(n) > 0.0)) {
      throw ContractViolation("B_hirst needs phi(n) > 1; fails at n=" + std::to_string(n), n);
    }
    values.push_back({n, ll / static_cast<double>(n)});
  }
  return finish_B(std::move(values), window);
}

// ---------------------------------------------------------------------------
// T_j

TSeq t_sequence(const PhiSpec& phi, double eps, std::uint64_t N) {
  if (!(eps > 0)) throw DomainError("t_sequence needs eps > 0");
  if (N < 1) throw DomainError("t_sequence needs N >= 1");
  const BEstimate b = B_growth(phi, N);
  if (b.tail.diverged || !std::isfinite(b.B)) {
    throw UnsupportedRegime("t_sequence needs a finite B; B_growth diverges for " + phi.label());
  }
  TSeq out;
  out.eps = eps;
  out.out_of_hypothesis = b.B < 1.0;
  out.B = std::max(1.0, b.B);

  const double log_step = std::log(out.B + eps);
  const double log_half = std::log(out.B + eps / 2.0);
  const double gap = log_step - log_half;

  out.scan_end = phi.size() ? *phi.size() : std::max<std::uint64_t>(8 * N, 10000);
  std::vector<double> g(out.scan_end + 1);
  std::uint64_t last_violation = 0;
  for (std::uint64_t n = 1; n <= out.scan_end; ++n) {
    g[n] = phi.log_phi(n);
    if (!std::isfinite(g[n])) throw UnsupportedRegime("log phi overflows at n=" + std::to_string(n));
    if (g[n] > static_cast<double>(n) * log_half) last_violation = n;
  }
  out.certified_from = last_violation + 1;

  out.entries.reserve(N);
  std::vector<TailSample> ratios;
  ratios.reserve(N);
  for (std::uint64_t j = 1; j <= N; ++j) {
    double best = -kInf;
    std::uint64_t argmax = j;
    std::uint64_t n = j;
    const double jd = static_cast<double>(j);
    for (;; ++n) {
      if (n > out.scan_end) {
        throw UnsupportedRegime("supremum for T_" + std::to_string(j) + " not certified within n <= " +
                                std::to_string(out.scan_end));
      }
      const double term = g[n] + (jd - static_cast<double>(n)) * log_step;
      if (term > best) {
        best = term;
        argmax = n;
      }
      // Beyond certified_from every later term is below j log(B+eps) - m * gap.
      if (n >= out.certified_from && jd * log_step - static_cast<double>(n + 1) * gap <= best) break;
    }
    out.horizon = std::max(out.horizon, n - j);
    out.entries.push_back({j, best, std::exp(best), argmax});
    ratios.push_back({j, std::exp(best - g[j])});
  }
  out.liminf_ratio = summarize_tail(std::move(ratios), 0, TailKind::lim_inf);
  return out;
}

std::optional<std::uint64_t> first_tseq_violation(const TSeq& t, double rel_tol) {
  const double log_step = std::log(t.B + t.eps);
  for (std::size_t i = 0; i + 1 < t.entries.size(); ++i) {
    const double a = t.entries[i].log_log_T, b = t.entries[i + 1].log_log_T;
    const double tol = rel_tol * std::max(1.0, std::fabs(a));
    if (b < a - tol || b > a + log_step + tol) return t.entries[i].j;
  }
  return std::nullopt;
}

std::vector<FigureRow> ephi_figure_table(const std::vector<PhiSpec>& family, std::uint64_t N) {
  std::vector<FigureRow> rows;
  rows.reserve(family.size());
  for (const auto& phi : family) {
    const auto hyp = phi.check_hypothesis(N);
    const BEstimate b = B_growth(phi, N);
    rows.push_back({phi.label(), b.log_B, b.B, b.dim, b.tail.diverged, hyp.nondecreasing && hyp.outgrows_log});
  }
  return rows;
}

std::vector<PhiSpec> default_phi_family() {
  return {
      PhiSpec::power(1.0, 2.0),          PhiSpec::power(1.0, 5.0),        PhiSpec::exp_poly_log(0.5, 0.0),
      PhiSpec::exponential(1.0, 1.5),    PhiSpec::exponential(1.0, 2.0),  PhiSpec::exponential(2.0, 3.0),
      PhiSpec::exponential(1.0, 10.0),   PhiSpec::exp_poly_log(1.0, 1.0), PhiSpec::exp_poly_log(2.0, 0.0),
  };
}

}  // namespace cflab
