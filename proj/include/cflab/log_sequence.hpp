#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "cflab/cf_core.hpp"

namespace cflab {

/// A positive real sequence s_1, s_2, ... accessed through log s(n).
struct LogSequence {
  std::function<double(std::uint64_t)> log_value;
  std::string label;

  double operator()(std::uint64_t n) const { return log_value(n); }

  static LogSequence of(const PQSeq& seq) {
    return {[seq](std::uint64_t n) { return seq.log_a(n); }, seq.describe()};
  }
  /// s_n = e^(rate n)
  static LogSequence exponential(double rate = 1.0) {
    return {[rate](std::uint64_t n) { return rate * static_cast<double>(n); },
            "exp(" + std::to_string(rate) + "n)"};
  }
};

}  // namespace cflab
