#include "cflab/tail_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>


namespace cflab {

namespace {

// Slope and intercept of y against x by ordinary least squares.
std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return {0.0, my};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

TailEstimate summarize_tail(std::vector<TailSample> values, std::uint64_t window, TailKind kind,
                            double divergence_slope) {
  TailEstimate out;
  out.kind = kind;
  out.values = std::move(values);
  if (out.values.empty()) {
    out.estimate = out.tail_sup = out.tail_inf = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const std::uint64_t total = out.values.size();
  if (window == 0) window = std::max<std::uint64_t>(1, total - total / 2);
  window = std::min(window, total);
  out.window = window;

  const auto first = out.values.end() - static_cast<std::ptrdiff_t>(window);
  out.tail_sup = -std::numeric_limits<double>::infinity();
  out.tail_inf = std::numeric_limits<double>::infinity();
  bool finite = true;
  std::vector<double> xs, ys;
  xs.reserve(window);
  ys.reserve(window);
  for (auto it = first; it != out.values.end(); ++it) {
    out.tail_sup = std::max(out.tail_sup, it->value);
    out.tail_inf = std::min(out.tail_inf, it->value);
    if (!std::isfinite(it->value)) {
      finite = false;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(std::max<std::uint64_t>(it->index, 1))));
    ys.push_back(it->value);
  }
  out.estimate = kind == TailKind::lim_sup ? out.tail_sup : out.tail_inf;
  if (xs.size() >= 2) out.log_slope = least_squares(xs, ys).first;
  out.diverged = !finite || out.log_slope > divergence_slope;
  return out;
}

double extrapolate_inverse_log(const TailEstimate& est) {
  if (est.window < 2) return est.estimate;
  std::vector<double> xs, ys;
  for (auto it = est.values.end() - static_cast<std::ptrdiff_t>(est.window); it != est.values.end(); ++it) {
    if (it->index < 2 || !std::isfinite(it->value)) continue;
    xs.push_back(1.0 / std::log(static_cast<double>(it->index)));
    ys.push_back(it->value);
  }
  if (xs.size() < 2) return est.estimate;
  return least_squares(xs, ys).second;
}

}  // namespace cflab
