#pragma once

// Δ_t: the expected normalised Hamming distance of a uniform t-bit string to
// the nearer of 0^t and 1^t,
//
//   Δ_t = (1/t) * Σ_{i=0..t} C(t,i) * min(i, t-i) / 2^t.

#include "junta/rational.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace junta {

/// Exact values are computed up to this t; larger t only in floating point.
inline constexpr std::uint64_t kDeltaExactMax = 4096;

/// Exact Δ_t from the defining binomial sum.
inline Rational delta(std::uint64_t t) {
  if (t == 0) throw std::invalid_argument("delta: t must be positive");
  if (t > kDeltaExactMax) throw std::out_of_range("delta: exact mode limited to t <= 4096");
  Integer c(1);  // C(t, i)
  Integer sum(0);
  for (std::uint64_t i = 0; i <= t; ++i) {
    sum += c * static_cast<unsigned long>(std::min(i, t - i));
    c *= static_cast<unsigned long>(t - i);
    mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(i + 1));
  }
  return ratio(sum, Integer(static_cast<unsigned long>(t)) * pow2(static_cast<unsigned long>(t)));
}

/// Exact Δ_1..Δ_tmax (index 0 unused) through the random-walk identity
/// Δ_t = 1/2 - E|S_t|/(2t), with E|S_{2m}| = E|S_{2m-1}| = 2m C(2m,m) / 4^m.
inline std::vector<Rational> delta_sequence(std::uint64_t t_max) {
  if (t_max > kDeltaExactMax) throw std::out_of_range("delta_sequence: exact mode limited to t <= 4096");
  std::vector<Rational> out(t_max + 1);
  Integer central(2);  // C(2m, m), starting at m = 1
  std::uint64_t m = 1;
  const Rational half(1, 2);
  for (std::uint64_t t = 1; t <= t_max; ++t) {
    const std::uint64_t want = (t + 1) / 2;
    while (m < want) {
      // C(2m+2, m+1) = C(2m, m) * (2m+1)(2m+2) / (m+1)^2
      central *= static_cast<unsigned long>(2 * m + 1);
      central *= static_cast<unsigned long>(2 * m + 2);
      mpz_divexact_ui(central.get_mpz_t(), central.get_mpz_t(), static_cast<unsigned long>((m + 1) * (m + 1)));
      ++m;
    }
    const Rational walk = ratio(central * static_cast<unsigned long>(m),
                                Integer(static_cast<unsigned long>(t)) * pow2(static_cast<unsigned long>(2 * m)));
    out[t] = half - walk;
  }
  return out;
}

struct DeltaApprox {
  double value = 0;
  double error_bound = 0;
};

namespace detail {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

/// Windowed per-term ratio recurrence around the central binomial term.
inline DeltaApprox delta_by_recurrence(std::uint64_t t) {
  const std::uint64_t centre = t / 2;
  const auto half_width = static_cast<std::uint64_t>(std::ceil(6.0 * std::sqrt(static_cast<double>(t)))) + 2;
  const std::uint64_t lo = centre > half_width ? centre - half_width : 0;
  const std::uint64_t hi = std::min(t, centre + half_width);

  CompensatedSum weight, moment;
  auto add = [&](std::uint64_t i, double term) {
    weight.add(term);
    moment.add(term * static_cast<double>(std::min(i, t - i)));
  };
  add(centre, 1.0);
  double term = 1.0;
  for (std::uint64_t i = centre; i < hi; ++i) {
    term *= static_cast<double>(t - i) / static_cast<double>(i + 1);
    add(i + 1, term);
  }
  term = 1.0;
  for (std::uint64_t i = centre; i > lo; --i) {
    term *= static_cast<double>(i) / static_cast<double>(t - i + 1);
    add(i - 1, term);
  }
  const double value = moment.value() / (weight.value() * static_cast<double>(t));
  // Term errors of relative size w*u at offset w move the ratio by at most
  // (w/t) * w * u <= 36u; the truncated tails lie beyond 12 standard deviations.
  return {value, 0x1.0p-44};
}

/// Asymptotic expansion of C(2m,m)/4^m for very large t.
inline DeltaApprox delta_by_expansion(std::uint64_t t) {
  const double m = static_cast<double>((t + 1) / 2);
  const double inv = 1.0 / m;
  const double series =
      1.0 + inv * (-1.0 / 8 + inv * (1.0 / 128 + inv * (5.0 / 1024 + inv * (-21.0 / 32768))));
  const double central_ratio = series / std::sqrt(std::numbers::pi * m);
  const double value = 0.5 - m * central_ratio / static_cast<double>(t);
  return {value, 0x1.0p-50};
}

}  // namespace detail

/// Floating Δ_t for any t >= 1 with an absolute error bound.
inline DeltaApprox delta_float(std::uint64_t t) {
  if (t == 0) throw std::invalid_argument("delta_float: t must be positive");
  if (t <= kDeltaExactMax) return {to_double(delta(t)), 0x1.0p-53};
  if (t <= (std::uint64_t{1} << 24)) return detail::delta_by_recurrence(t);
  return detail::delta_by_expansion(t);
}

/// Δ_{2^e}, exact where possible, as a double.
inline double delta_pow2(unsigned e) {
  if (e >= 63) return detail::delta_by_expansion(std::uint64_t{1} << 62).value;
  return delta_float(std::uint64_t{1} << e).value;
}

/// Cache of computed Δ_t values, exact and floating.
struct DeltaTable {
  std::map<std::uint64_t, Rational> values;
  std::map<std::uint64_t, DeltaApprox> float_values;

  void add(std::uint64_t t) {
    if (t <= kDeltaExactMax && !values.contains(t)) values.emplace(t, delta(t));
    if (!float_values.contains(t))
      float_values.emplace(t, t <= (std::uint64_t{1} << 24) ? detail::delta_by_recurrence(t) : delta_float(t));
  }

  /// Exact and floating entries agree within the stated bound.
  bool consistent() const {
    for (const auto& [t, q] : values) {
      auto it = float_values.find(t);
      if (it == float_values.end()) continue;
      if (std::fabs(to_double(q) - it->second.value) > it->second.error_bound + 0x1.0p-52) return false;
    }
    return true;
  }
};

}  // namespace junta
