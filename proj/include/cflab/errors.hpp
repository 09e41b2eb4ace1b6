#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cflab {

/// Input outside the mathematical domain of an operation (x outside [0,1),
/// negative exponent, empty prefix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A checked precondition on a sequence does not hold. `index` names the first
/// offending position (1-based), or 0 when no single index is at fault.
class ContractViolation : public std::logic_error {
 public:
  ContractViolation(const std::string& what, std::uint64_t index = 0)
      : std::logic_error(what), index_(index) {}
  std::uint64_t index() const noexcept { return index_; }

 private:
  std::uint64_t index_;
};

class EnumerationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough precision to certify the requested number of partial quotients.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, std::uint64_t achieved_depth)
      : std::runtime_error(what), achieved_depth_(achieved_depth) {}
  std::uint64_t achieved_depth() const noexcept { return achieved_depth_; }

 private:
  std::uint64_t achieved_depth_;
};

class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonBracketing : public std::runtime_error {
 public:
  NonBracketing(const std::string& what, double value_at_lo, double value_at_hi)
      : std::runtime_error(what), lo_(value_at_lo), hi_(value_at_hi) {}
  double value_at_lo() const noexcept { return lo_; }
  double value_at_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Materializing an exact term would exceed the configured bit budget.
class BitCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cflab
