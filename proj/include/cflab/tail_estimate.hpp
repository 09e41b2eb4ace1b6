#pragma once

// Finite-data readings of lim sup / lim inf: a running estimate sequence plus
// its behavior over a trailing window.

#include <cstdint>
#include <vector>

namespace cflab {

struct TailSample {
  std::uint64_t index = 0;
  double value = 0.0;
};

enum class TailKind { lim_sup, lim_inf };

struct TailEstimate {
  TailKind kind = TailKind::lim_sup;
  std::vector<TailSample> values;
  std::uint64_t window = 0;  // trailing samples summarized
  double tail_sup = 0.0;
  double tail_inf = 0.0;
  double estimate = 0.0;  // tail_sup for lim sup, tail_inf for lim inf
  double log_slope = 0.0;  // least-squares slope of value against log(index) over the window
  bool diverged = false;
  bool terminated = false;  // a finite expansion ran out before N

  double final_value() const { return values.empty() ? estimate : values.back().value; }
};

/// Default slope (per unit of log n) above which a running value is treated
/// as diverging.
inline constexpr double kDivergenceSlope = 0.5;

/// window == 0 selects the last half of the samples.
TailEstimate summarize_tail(std::vector<TailSample> values, std::uint64_t window, TailKind kind,
                            double divergence_slope = kDivergenceSlope);

/// Least-squares fit value = limit + c / log(index) over the window; returns
/// the fitted limit. Diagnostic only.
double extrapolate_inverse_log(const TailEstimate& est);

}  // namespace cflab
