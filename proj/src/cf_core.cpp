#include "cflab/cf_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>
#include <variant>

#include "numeric.hpp"

namespace cflab {

namespace {

constexpr std::uint64_t kExpFloorSmallMax = 42;  // e^42 < 2^62

struct ExplicitNode {
  std::vector<BigInt> terms;
  std::vector<double> logs;
};
struct ExpFloorNode {};
struct PowerFloorNode {
  std::uint64_t scale = 1;
  detail::Exponent exponent;
  double alpha = 0.0;  // only for describe(); 0 when built from an exponent
};
struct ConstantNode {
  std::uint64_t value = 1;
};
struct SplicedNode {
  PQSeq prefix;
  std::uint64_t cut = 0;
  PQSeq tail;
};
struct PerturbedNode {
  PQSeq base;
  BitPattern bits;
};

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

struct PQSeq::Node {
  std::variant<ExplicitNode, ExpFloorNode, PowerFloorNode, ConstantNode, SplicedNode, PerturbedNode> v;
};

Rational parse_rational(std::string_view text) {
  std::string s(text);
  const auto trim = [](std::string& t) {
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
  };
  trim(s);
  const auto slash = s.find('/');
  BigInt num, den(1);
  try {
    if (slash == std::string::npos) {
      num = BigInt(s);
    } else {
      std::string a = s.substr(0, slash), b = s.substr(slash + 1);
      trim(a);
      trim(b);
      num = BigInt(a);
      den = BigInt(b);
    }
  } catch (const std::invalid_argument&) {
    throw DomainError("not a rational: '" + s + "'");
  }
  if (den == 0) throw DomainError("zero denominator in '" + s + "'");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const BigInt& z) { return z.get_str(); }

int BitPattern::at(std::uint64_t n) const {
  if (bits.empty() || n == 0) return 0;
  const std::uint64_t i = n - 1;
  if (cyclic) return bits[i % bits.size()] ? 1 : 0;
  return i < bits.size() && bits[i] ? 1 : 0;
}

PQSeq PQSeq::from_terms(std::vector<BigInt> terms) {
  ExplicitNode node;
  node.logs.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] < 1) {
      throw DomainError("partial quotient a_" + std::to_string(i + 1) + " must be >= 1");
    }
    node.logs.push_back(detail::log_big(terms[i]));
  }
  node.terms = std::move(terms);
  return PQSeq(std::make_shared<Node>(Node{std::move(node)}));
}

PQSeq PQSeq::from_terms(const std::vector<std::uint64_t>& terms) {
  std::vector<BigInt> big;
  big.reserve(terms.size());
  for (auto t : terms) big.emplace_back(static_cast<unsigned long>(t));
  return from_terms(std::move(big));
}

PQSeq PQSeq::exp_floor() { return PQSeq(std::make_shared<Node>(Node{ExpFloorNode{}})); }

PQSeq PQSeq::power_floor(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("power_floor needs 0 < alpha < inf");
  }
  PowerFloorNode node;
  node.exponent = detail::Exponent::from_double(1.0 / alpha);
  // Prefer the exact reciprocal when alpha itself is a small rational.
  const auto inv = detail::Exponent::from_double(alpha);
  if (inv.rational && inv.num != 0) {
    node.exponent.rational = true;
    node.exponent.num = inv.den;
    node.exponent.den = inv.num;
    node.exponent.value = static_cast<double>(inv.den) / static_cast<double>(inv.num);
  }
  node.alpha = alpha;
  return PQSeq(std::make_shared<Node>(Node{node}));
}

PQSeq PQSeq::scaled_power_floor(std::uint64_t scale, double exponent) {
  if (scale < 1) throw DomainError("scale must be >= 1");
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw DomainError("exponent must be finite and >= 0");
  }
  PowerFloorNode node;
  node.scale = scale;
  node.exponent = detail::Exponent::from_double(exponent);
  return PQSeq(std::make_shared<Node>(Node{node}));
}

PQSeq PQSeq::constant(std::uint64_t value) {
  if (value < 1) throw DomainError("constant partial quotient must be >= 1");
  return PQSeq(std::make_shared<Node>(Node{ConstantNode{value}}));
}

PQSeq PQSeq::spliced(PQSeq prefix, std::uint64_t cut, PQSeq tail) {
  if (auto len = prefix.length(); len && *len < cut) {
    throw DomainError("splice cut exceeds the prefix length");
  }
  return PQSeq(std::make_shared<Node>(Node{SplicedNode{std::move(prefix), cut, std::move(tail)}}));
}

PQSeq PQSeq::perturbed(PQSeq base, BitPattern bits) {
  for (auto b : bits.bits) {
    if (b > 1) throw DomainError("perturbation bits must be 0 or 1");
  }
  return PQSeq(std::make_shared<Node>(Node{PerturbedNode{std::move(base), std::move(bits)}}));
}

PQSeq::Kind PQSeq::kind() const {
  return static_cast<Kind>(node_->v.index());
}

std::string PQSeq::describe() const {
  struct Visitor {
    std::string operator()(const ExplicitNode& n) const {
      return "explicit(" + std::to_string(n.terms.size()) + " terms)";
    }
    std::string operator()(const ExpFloorNode&) const { return "exp_floor"; }
    std::string operator()(const PowerFloorNode& n) const {
      if (n.alpha > 0.0) return "power_floor(alpha=" + format_double(n.alpha) + ")";
      return "scaled_power_floor(scale=" + std::to_string(n.scale) +
             ",exponent=" + format_double(n.exponent.value) + ")";
    }
    std::string operator()(const ConstantNode& n) const {
      return n.value == 1 ? "constant_one" : "constant(" + std::to_string(n.value) + ")";
    }
    std::string operator()(const SplicedNode& n) const {
      return "spliced(" + n.prefix.describe() + ",cut=" + std::to_string(n.cut) + "," +
             n.tail.describe() + ")";
    }
    std::string operator()(const PerturbedNode& n) const {
      return "perturbed(" + n.base.describe() + ")";
    }
  };
  return std::visit(Visitor{}, node_->v);
}

void PQSeq::check_index(std::uint64_t n) const {
  if (n == 0) throw DomainError("partial quotients are indexed from 1");
  if (auto len = length(); len && n > *len) {
    throw DomainError("index " + std::to_string(n) + " beyond the end of a finite expansion of length " +
                      std::to_string(*len));
  }
}

std::optional<std::uint64_t> PQSeq::length() const {
  return std::visit(
      [](const auto& n) -> std::optional<std::uint64_t> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExplicitNode>) return n.terms.size();
        else if constexpr (std::is_same_v<T, SplicedNode>) return n.tail.length();
        else if constexpr (std::is_same_v<T, PerturbedNode>) return n.base.length();
        else return std::nullopt;
      },
      node_->v);
}

std::uint64_t PQSeq::monotone_from() const {
  return std::visit(
      [](const auto& n) -> std::uint64_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExplicitNode>) {
          return UINT64_MAX;
        } else if constexpr (std::is_same_v<T, SplicedNode>) {
          const std::uint64_t tail = n.tail.monotone_from();
          return tail == UINT64_MAX ? UINT64_MAX : std::max(n.cut + 1, tail);
        } else if constexpr (std::is_same_v<T, PerturbedNode>) {
          const bool all_zero =
              std::all_of(n.bits.bits.begin(), n.bits.bits.end(), [](std::uint8_t b) { return b == 0; });
          return all_zero ? n.base.monotone_from() : UINT64_MAX;
        } else {
          return 1;
        }
      },
      node_->v);
}

std::optional<std::uint64_t> PQSeq::a_small(std::uint64_t n) const {
  check_index(n);
  struct Visitor {
    std::uint64_t n;
    std::optional<std::uint64_t> operator()(const ExplicitNode& node) const {
      const BigInt& t = node.terms[n - 1];
      if (mpz_sizeinbase(t.get_mpz_t(), 2) <= 61) return mpz_get_ui(t.get_mpz_t());
      return std::nullopt;
    }
    std::optional<std::uint64_t> operator()(const ExpFloorNode&) const {
      if (n > kExpFloorSmallMax) return std::nullopt;
      return mpz_get_ui(detail::floor_exp(n).get_mpz_t());
    }
    std::optional<std::uint64_t> operator()(const PowerFloorNode& node) const {
      const auto f = detail::floor_pow(n, node.exponent);
      if (!f.small) return std::nullopt;
      const unsigned __int128 v = static_cast<unsigned __int128>(*f.small) * node.scale;
      if (v >= (static_cast<unsigned __int128>(1) << 62)) return std::nullopt;
      return static_cast<std::uint64_t>(v);
    }
    std::optional<std::uint64_t> operator()(const ConstantNode& node) const { return node.value; }
    std::optional<std::uint64_t> operator()(const SplicedNode& node) const {
      return n <= node.cut ? node.prefix.a_small(n) : node.tail.a_small(n);
    }
    std::optional<std::uint64_t> operator()(const PerturbedNode& node) const {
      auto b = node.base.a_small(n);
      if (!b || *b + 1 >= (std::uint64_t{1} << 62)) return std::nullopt;
      return *b + static_cast<std::uint64_t>(node.bits.at(n));
    }
  };
  return std::visit(Visitor{n}, node_->v);
}

BigInt PQSeq::a(std::uint64_t n, std::uint64_t bit_cap) const {
  check_index(n);
  struct Visitor {
    std::uint64_t n;
    std::uint64_t cap;
    BigInt operator()(const ExplicitNode& node) const { return node.terms[n - 1]; }
    BigInt operator()(const ExpFloorNode&) const {
      const double bits = static_cast<double>(n) * 1.4426950408889634;
      if (bits > static_cast<double>(cap)) {
        throw BitCapExceeded("floor(e^" + std::to_string(n) + ") needs more than " + std::to_string(cap) + " bits");
      }
      return detail::floor_exp(n);
    }
    BigInt operator()(const PowerFloorNode& node) const {
      const double bits = node.exponent.value * std::log2(static_cast<double>(n)) +
                          std::log2(static_cast<double>(node.scale));
      if (bits > static_cast<double>(cap)) {
        throw BitCapExceeded("term " + std::to_string(n) + " needs more than " + std::to_string(cap) + " bits");
      }
      auto f = detail::floor_pow(n, node.exponent);
      return f.big * BigInt(static_cast<unsigned long>(node.scale));
    }
    BigInt operator()(const ConstantNode& node) const { return BigInt(static_cast<unsigned long>(node.value)); }
    BigInt operator()(const SplicedNode& node) const {
      return n <= node.cut ? node.prefix.a(n, cap) : node.tail.a(n, cap);
    }
    BigInt operator()(const PerturbedNode& node) const {
      return node.base.a(n, cap) + node.bits.at(n);
    }
  };
  return std::visit(Visitor{n, bit_cap}, node_->v);
}

double PQSeq::log_a(std::uint64_t n) const {
  check_index(n);
  struct Visitor {
    std::uint64_t n;
    double operator()(const ExplicitNode& node) const { return node.logs[n - 1]; }
    double operator()(const ExpFloorNode&) const {
      if (n <= kExpFloorSmallMax) {
        return std::log(static_cast<double>(mpz_get_ui(detail::floor_exp(n).get_mpz_t())));
      }
      return static_cast<double>(n);
    }
    double operator()(const PowerFloorNode& node) const {
      const double log_n = std::log(static_cast<double>(n));
      const double log_scale = std::log(static_cast<double>(node.scale));
      if (node.exponent.value * log_n < 40.0) {
        const auto f = detail::floor_pow(n, node.exponent);
        return std::log(static_cast<double>(*f.small)) + log_scale;
      }
      return node.exponent.value * log_n + log_scale;
    }
    double operator()(const ConstantNode& node) const { return std::log(static_cast<double>(node.value)); }
    double operator()(const SplicedNode& node) const {
      return n <= node.cut ? node.prefix.log_a(n) : node.tail.log_a(n);
    }
    double operator()(const PerturbedNode& node) const {
      if (node.bits.at(n) == 0) return node.base.log_a(n);
      if (auto b = node.base.a_small(n)) return std::log(static_cast<double>(*b) + 1.0);
      const double la = node.base.log_a(n);
      return la + std::log1p(std::exp(-la));
    }
  };
  return std::visit(Visitor{n}, node_->v);
}

std::vector<BigInt> PQSeq::terms(std::uint64_t n) const {
  std::vector<BigInt> out;
  out.reserve(n);
  for (std::uint64_t k = 1; k <= n; ++k) out.push_back(a(k));
  return out;
}

std::vector<BigInt> expansion_terms(const Rational& x, std::uint64_t max_terms) {
  if (x < 0 || x >= 1) throw DomainError("expand needs 0 <= x < 1, got " + to_string(x));
  std::vector<BigInt> out;
  BigInt num = x.get_num(), den = x.get_den();
  BigInt q, r;
  while (num != 0) {
    if (out.size() >= max_terms) {
      throw DomainError("expansion of " + to_string(x) + " has more than " + std::to_string(max_terms) + " terms");
    }
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
    out.push_back(q);
    den = num;
    num = r;
  }
  // The Euclidean algorithm already ends with a quotient >= 2 unless the
  // expansion is [1] (x = 1), which is excluded above.
  return out;
}

PQSeq expand(const Rational& x, std::uint64_t max_terms) {
  return PQSeq::from_terms(expansion_terms(x, max_terms));
}

Rational evaluate(std::span<const BigInt> quotients) {
  Rational value(0);
  for (auto it = quotients.rbegin(); it != quotients.rend(); ++it) {
    if (*it < 1) throw DomainError("partial quotients must be >= 1");
    value = 1 / (Rational(*it) + value);
  }
  value.canonicalize();
  return value;
}

std::vector<Convergent> convergents(std::span<const BigInt> quotients) {
  std::vector<Convergent> out;
  out.reserve(quotients.size());
  BigInt p_prev(1), p(0), q_prev(0), q(1);  // seeds p_{-1}, p_0, q_{-1}, q_0
  std::uint64_t n = 0;
  for (const BigInt& a : quotients) {
    if (a < 1) throw DomainError("partial quotients must be >= 1");
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
    out.push_back({++n, p, q});
  }
  return out;
}

std::vector<Convergent> convergents(const PQSeq& seq, std::uint64_t n) {
  if (n < 1) throw DomainError("convergents needs n >= 1");
  const auto terms = seq.terms(n);
  return convergents(terms);
}

CylinderInterval cylinder(std::span<const BigInt> prefix) {
  if (prefix.empty()) throw DomainError("cylinder needs a nonempty prefix");
  const auto conv = convergents(prefix);
  const BigInt& p = conv.back().p;
  const BigInt& q = conv.back().q;
  const BigInt p_prev = conv.size() >= 2 ? conv[conv.size() - 2].p : BigInt(0);
  const BigInt q_prev = conv.size() >= 2 ? conv[conv.size() - 2].q : BigInt(1);

  CylinderInterval out;
  out.prefix.assign(prefix.begin(), prefix.end());
  Rational a(p, q), b(p + p_prev, q + q_prev);
  a.canonicalize();
  b.canonicalize();
  if (a < b) {
    out.lo = a;
    out.hi = b;
  } else {
    out.lo = b;
    out.hi = a;
  }
  out.length = Rational(1, q * (q + q_prev));
  out.length.canonicalize();
  return out;
}

CylinderInterval cylinder(const std::vector<std::uint64_t>& prefix) {
  std::vector<BigInt> big;
  big.reserve(prefix.size());
  for (auto t : prefix) big.emplace_back(static_cast<unsigned long>(t));
  return cylinder(big);
}

Rational gauss_map(const Rational& x) {
  if (x <= 0 || x >= 1) throw DomainError("gauss_map needs 0 < x < 1, got " + to_string(x));
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_den().get_mpz_t(), x.get_num().get_mpz_t());
  Rational out(r, x.get_num());
  out.canonicalize();
  return out;
}

BigInt fibonacci(std::uint64_t n) {
  BigInt out;
  mpz_fib_ui(out.get_mpz_t(), n);
  return out;
}

bool at_least_golden_power(const Rational& c, std::uint64_t m) {
  BigInt lucas, fib;
  mpz_lucnum_ui(lucas.get_mpz_t(), m);
  mpz_fib_ui(fib.get_mpz_t(), m);
  // c >= (L + F sqrt5)/2  <=>  2c - L >= F sqrt5  <=>  d >= 0 and d^2 >= 5 F^2
  const Rational d = 2 * c - Rational(lucas);
  if (d < 0) return false;
  return d * d >= Rational(5 * fib * fib);
}

bool fibonacci_lower_bound_holds(const BigInt& q, std::uint64_t n) {
  // q >= phi^n/(2 sqrt5)  <=>  20 q^2 >= phi^(2n)
  return at_least_golden_power(Rational(20 * q * q), 2 * n);
}

}  // namespace cflab
