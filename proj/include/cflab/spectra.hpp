#pragma once

// Closed-form dimension spectra and the limit quantities (xi, B, T_j) that
// parametrize them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cflab/extended.hpp"
#include "cflab/log_sequence.hpp"
#include "cflab/tail_estimate.hpp"

namespace cflab {

struct SpectrumPoint {
  Extended alpha = Extended::finite(0.0);
  double dim = 0.0;
  std::string regime;
};

/// dim {x : tau(x) = alpha}: 1/2 for finite alpha, 1 at inf.
SpectrumPoint dim_level_full(const Extended& alpha);
/// dim {x in Lambda : tau(x) = alpha}: (1 - alpha)/2 on [0,1], 0 beyond.
SpectrumPoint dim_level_lambda(const Extended& alpha);
/// dim E(alpha): 0 below 1, (alpha - 1)/(2 alpha) from 1 on; 1/2 at inf.
SpectrumPoint dim_E(const Extended& alpha);
/// dim F(alpha): 1 at alpha = 0, 1/2 otherwise.
SpectrumPoint dim_F(const Extended& alpha);

inline constexpr double kDimLambda = 0.5;

struct Trichotomy {
  char label = '=';       // '<', '=' or '>'
  double dim_E = 0.0;     // dim (Lambda ∩ F(alpha))
  double sum_rule = 0.0;  // dim Lambda + dim F(alpha) - 1
  double min_rule = 0.0;  // min(dim Lambda, dim F(alpha))
};

/// Compares dim E(alpha) against the sum rule for finite alpha; throws
/// ContractViolation if dim E(alpha) < min(dim Lambda, dim F(alpha)) fails.
Trichotomy intersection_trichotomy(const Extended& alpha);

/// phi: N -> R+, accessed in the log domain.
class PhiSpec {
 public:
  enum class Kind { power, exponential, double_exponential, exp_poly_log, explicit_values };

  /// c n^gamma
  static PhiSpec power(double c, double gamma);
  /// c b^n
  static PhiSpec exponential(double c, double b);
  /// a^(b^n)
  static PhiSpec double_exponential(double a, double b);
  /// exp(n^p (log n)^q)
  static PhiSpec exp_poly_log(double p, double q);
  /// log phi(1), log phi(2), ...
  static PhiSpec from_log_values(std::vector<double> log_phi, std::string label);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  std::optional<std::uint64_t> size() const;

  /// log phi(n); +inf when phi(n) overflows the double range of its log.
  double log_phi(std::uint64_t n) const;
  /// log log phi(n); NaN when phi(n) <= 1.
  double log_log_phi(std::uint64_t n) const;

  struct HypothesisCheck {
    bool nondecreasing = true;
    std::uint64_t first_descent = 0;
    bool outgrows_log = true;  // phi(n)/log n increasing and > 1 at the end of the range
  };
  HypothesisCheck check_hypothesis(std::uint64_t N) const;

 private:
  PhiSpec(Kind kind, double p1, double p2, std::string label)
      : kind_(kind), p1_(p1), p2_(p2), label_(std::move(label)) {}
  void check_index(std::uint64_t n) const;

  Kind kind_;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::string label_;
  std::vector<double> values_;
};

struct XiEstimate {
  TailEstimate tail;  // running (2 log (n+1)! + log s_{n+1}) / log(s_1 ... s_n)
  double xi = 0.0;
  double dim = 0.0;   // 1/(2 + xi); 0 when the quotient diverges
  double extrapolated_xi = 0.0;  // diagnostic fit in 1/log n
};

/// Requires s(n) >= 3 for n <= N + 1.
XiEstimate xi_limit(const LogSequence& s, std::uint64_t N, std::uint64_t window = 0);

struct BEstimate {
  TailEstimate tail;  // running log phi(n)/n (B_growth) or log log phi(n)/n (B_hirst)
  double log_B = 0.0;
  double B = 1.0;
  double dim = 0.0;  // 1/(B + 1); 0 when diverged
  bool out_of_hypothesis = false;  // B_hat < 1
};

BEstimate B_growth(const PhiSpec& phi, std::uint64_t N, std::uint64_t window = 0);
/// Requires phi(n) > 1 on [first_index, N].
BEstimate B_hirst(const PhiSpec& phi, std::uint64_t N, std::uint64_t first_index = 1, std::uint64_t window = 0);

struct TEntry {
  std::uint64_t j = 0;
  double log_log_T = 0.0;  // log log T_j
  double log_T = 0.0;      // log T_j (may be +inf)
  std::uint64_t argmax = 0;  // smallest n attaining the supremum
};

struct TSeq {
  double eps = 0.1;
  double B = 1.0;
  bool out_of_hypothesis = false;
  std::uint64_t certified_from = 0;  // phi(n) <= (B + eps/2)^n on [certified_from, scan_end]
  std::uint64_t scan_end = 0;
  std::uint64_t horizon = 0;  // max over j of the searched n - j
  std::vector<TEntry> entries;
  TailEstimate liminf_ratio;  // running log T_n / phi(n)
};

inline constexpr double kDefaultTEps = 0.1;

/// log T_j = sup_{n >= j} phi(n) (B + eps)^(j - n), for j = 1..N.
TSeq t_sequence(const PhiSpec& phi, double eps, std::uint64_t N);
/// First j violating T_j <= T_{j+1} or T_{j+1} <= T_j^(B+eps), if any.
std::optional<std::uint64_t> first_tseq_violation(const TSeq& t, double rel_tol = 1e-12);

struct FigureRow {
  std::string label;
  double log_B = 0.0;
  double B = 1.0;
  double dim = 0.0;
  bool diverged = false;
  bool hypothesis_ok = true;
};

std::vector<FigureRow> ephi_figure_table(const std::vector<PhiSpec>& family, std::uint64_t N = 1000);

/// The phi family plotted for dim E_phi: powers, exponentials and
/// super-exponentials.
std::vector<PhiSpec> default_phi_family();

}  // namespace cflab
