#pragma once

// Exact expectations and the joint-probability engine behind the
// indistinguishability checks. Everything here returns exact rationals.

#include "junta/boolfn.hpp"
#include "junta/constructions.hpp"
#include "junta/delta.hpp"
#include "junta/rational.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace junta {

inline constexpr std::size_t kEnumerationCap = 20;

// ---------------------------------------------------------------------------
// Weighted sign sums

/// Non-negative rational weights summing to exactly 1.
class WeightVector {
 public:
  explicit WeightVector(std::vector<Rational> weights) : weights_(std::move(weights)) {
    Rational total = 0;
    for (const auto& w : weights_) {
      if (w < 0) throw std::invalid_argument("WeightVector: negative weight");
      total += w;
    }
    if (total != 1) throw std::invalid_argument("WeightVector: weights must sum to 1");
  }

  static WeightVector uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("WeightVector: empty");
    return WeightVector(std::vector<Rational>(n, Rational(1, static_cast<unsigned long>(n))));
  }

  /// Normalises non-negative integer masses (not all zero).
  static WeightVector from_masses(const std::vector<std::uint64_t>& masses) {
    Integer total(0);
    for (auto m : masses) total += static_cast<unsigned long>(m);
    if (total == 0) throw std::invalid_argument("WeightVector: zero total mass");
    std::vector<Rational> w;
    for (auto m : masses) w.push_back(ratio(Integer(static_cast<unsigned long>(m)), total));
    return WeightVector(std::move(w));
  }

  const std::vector<Rational>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<Rational> weights_;
};

/// E|Σ λ_i X_i| over independent uniform signs, by Gray-code enumeration of
/// all 2^n sign vectors over a common denominator.
inline Rational weighted_sign_expectation(const WeightVector& lambda) {
  const std::size_t n = lambda.size();
  if (n == 0 || n > kEnumerationCap) throw std::out_of_range("weighted_sign_expectation: length must be in [1, 20]");
  Integer common(1);
  for (const auto& w : lambda.weights()) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), w.get_den_mpz_t());
  std::vector<Integer> num;
  Integer sum(0);  // all signs +1
  for (const auto& w : lambda.weights()) {
    num.push_back(w.get_num() * (common / w.get_den()));
    sum += num.back();
  }
  std::vector<bool> negative(n, false);
  Integer total = abs(sum);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < count; ++step) {
    const int flip = std::countr_zero(step);
    if (negative[flip])
      sum += 2 * num[flip];
    else
      sum -= 2 * num[flip];
    negative[flip] = !negative[flip];
    total += abs(sum);
  }
  return ratio(total, common * pow2(n));
}

// ---------------------------------------------------------------------------
// Distance of random strings to {0^n, 1^n}

/// (E_uniform[dist(x, {0^n,1^n})], E_odd-parity[dist(x, {0^n,1^n})]) for 4 | n.
inline std::pair<Rational, Rational> parity_gap(int n) {
  if (n <= 0 || n % 4 != 0 || n > 64) throw std::invalid_argument("parity_gap: n must be a positive multiple of 4, at most 64");
  Integer all(0), odd(0);
  for (int i = 0; i <= n; ++i) {
    const Integer term = binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(i)) *
                         static_cast<unsigned long>(std::min(i, n - i));
    all += term;
    if (i % 2 == 1) odd += term;
  }
  return {ratio(all, pow2(static_cast<unsigned long>(n))), ratio(odd, pow2(static_cast<unsigned long>(n - 1)))};
}

/// E[dist(x, {0^n,1^n})] for independent x_i ~ Bernoulli(p_i), p_i in [0, 1/2].
/// The distance depends only on the weight of x, whose exact law is built by
/// the Poisson-binomial recursion.
inline Rational biased_dist_to_constants(const std::vector<Rational>& p) {
  const std::size_t n = p.size();
  if (n > kEnumerationCap) throw std::out_of_range("biased_dist_to_constants: at most 20 coordinates");
  for (const auto& pi : p)
    if (pi < 0 || pi > Rational(1, 2)) throw std::invalid_argument("biased_dist_to_constants: p_i outside [0, 1/2]");
  std::vector<Rational> law{Rational(1)};
  for (const auto& pi : p) {
    std::vector<Rational> next(law.size() + 1, Rational(0));
    const Rational qi = Rational(1) - pi;
    for (std::size_t w = 0; w < law.size(); ++w) {
      next[w] += law[w] * qi;
      next[w + 1] += law[w] * pi;
    }
    law = std::move(next);
  }
  Rational e = 0;
  for (std::size_t w = 0; w <= n; ++w) e += law[w] * static_cast<unsigned long>(std::min(w, n - w));
  return e;
}

/// n e^{-n δ^2 / 3} with δ = 1/2 - mean(p): the concentration envelope for
/// |E dist - Σ p_i|.
inline double unbalanced_distance_bound(const std::vector<Rational>& p) {
  Rational mean = 0;
  for (const auto& pi : p) mean += pi;
  const double n = static_cast<double>(p.size());
  const double delta = 0.5 - to_double(mean) / n;
  return n * std::exp(-n * delta * delta / 3.0);
}

// ---------------------------------------------------------------------------
// Joint probabilities

struct PointQuery {
  std::uint64_t point = 0;
  bool value = false;
};

namespace detail {

/// Collapses duplicate points; nullopt when two copies disagree.
inline std::optional<std::map<std::uint64_t, bool>> collapse(const std::vector<PointQuery>& queries, int n) {
  std::map<std::uint64_t, bool> out;
  for (const auto& q : queries) {
    if (q.point > low_mask(n)) throw std::invalid_argument("query point outside {0,1}^n");
    auto [it, inserted] = out.emplace(q.point, q.value);
    if (!inserted && it->second != q.value) return std::nullopt;
  }
  return out;
}

inline Rational bernoulli_mass(const Rational& p, bool value) { return value ? p : Rational(1) - p; }

}  // namespace detail

/// Pr_{f ~ D_NO}[f(x_i) = y_i for all i].
inline Rational joint_prob_no(const std::vector<PointQuery>& queries, const HardInstanceParams& hp) {
  const auto points = detail::collapse(queries, hp.n());
  if (!points) return 0;
  const std::uint64_t rmask = hp.r_mask();
  Rational prob = 1;
  unsigned long uniform = 0;
  for (const auto& [x, y] : *points) {
    if ((x & rmask) != 0)
      prob *= detail::bernoulli_mass(hp.p, y);
    else
      ++uniform;
  }
  return prob * pow2_inv(uniform);
}

/// Pr_{f ~ D_YES}[f(x_i) = y_i for all i | J].
inline Rational joint_prob_yes_given_J(const std::vector<PointQuery>& queries, const HardInstanceParams& hp,
                                       const VarSet& J, const Coloring* chi = nullptr) {
  J.check_within(hp.n());
  if (static_cast<int>(J.size()) != hp.ell || (!J.empty() && J.indices().front() <= hp.r))
    throw std::invalid_argument("joint_prob_yes_given_J: J must be an ell-subset of {r+1, ..., n}");
  if ((hp.variant == Variant::Colored) != (chi != nullptr))
    throw std::invalid_argument("joint_prob_yes_given_J: coloring required exactly for the colored variant");
  if (chi && (chi->ell != hp.ell || chi->d != hp.d))
    throw std::invalid_argument("joint_prob_yes_given_J: coloring does not match (ell, d)");
  const auto points = detail::collapse(queries, hp.n());
  if (!points) return 0;

  const std::uint64_t rmask = hp.r_mask();
  const std::uint64_t jmask = J.mask();
  Rational prob = 1;
  unsigned long free_bits = 0;
  if (hp.variant == Variant::Parity) {
    std::map<std::uint64_t, std::pair<std::uint64_t, bool>> groups;  // cofactor -> (size, xor)
    for (const auto& [x, y] : *points) {
      if ((x & rmask) != 0) {
        prob *= detail::bernoulli_mass(hp.p, y);
        continue;
      }
      auto& g = groups[x & ~jmask];
      ++g.first;
      g.second ^= y;
    }
    const std::uint64_t cube = std::uint64_t{1} << hp.ell;
    for (const auto& [cofactor, g] : groups) {
      if (g.first == cube) {
        if (!g.second) return 0;
        free_bits += static_cast<unsigned long>(cube - 1);
      } else {
        free_bits += static_cast<unsigned long>(g.first);
      }
    }
  } else {
    std::map<std::pair<std::uint64_t, std::uint32_t>, bool> colour_value;
    for (const auto& [x, y] : *points) {
      if ((x & rmask) != 0) {
        prob *= detail::bernoulli_mass(hp.p, y);
        continue;
      }
      const auto key = std::make_pair(x & ~jmask, (*chi)(compress_bits(x, jmask)));
      auto [it, inserted] = colour_value.emplace(key, y);
      if (!inserted && it->second != y) return 0;
    }
    free_bits = static_cast<unsigned long>(colour_value.size());
  }
  return prob * pow2_inv(free_bits);
}

/// The lemma's conditioning event for a fixed J.
inline bool admissible(const std::vector<PointQuery>& queries, const HardInstanceParams& hp, const VarSet& J) {
  const std::uint64_t jmask = J.mask();
  for (std::size_t i = 0; i < queries.size(); ++i)
    for (std::size_t j = 0; j < queries.size(); ++j) {
      const std::uint64_t a = queries[i].point, b = queries[j].point;
      if (hp.variant == Variant::Parity) {
        if (a == (b ^ jmask)) return false;
      } else if ((a & ~jmask) == (b & ~jmask) && hamming(a, b) > hp.d) {
        return false;
      }
    }
  return true;
}

struct IndistinguishabilityReport {
  Rational yes_conditional;  // Pr_YES[values | admissible J]
  Rational no_product;       // Pr_NO[values]
  bool equal = false;
  std::uint64_t admissible_sets = 0;
  std::uint64_t total_sets = 0;
};

/// Conditional D_YES probability by enumerating every J (all equally likely)
/// and averaging over the admissible ones; compared against the D_NO product.
inline IndistinguishabilityReport verify_indistinguishability(const std::vector<PointQuery>& queries,
                                                              const HardInstanceParams& hp,
                                                              const Coloring* chi = nullptr) {
  hp.validate();
  IndistinguishabilityReport report;
  Rational sum = 0;
  for_each_k_subset(hp.r + 1, hp.n(), hp.ell, [&](const std::vector<int>& idx) {
    ++report.total_sets;
    const VarSet J(idx);
    if (!admissible(queries, hp, J)) return;
    ++report.admissible_sets;
    sum += joint_prob_yes_given_J(queries, hp, J, chi);
  });
  if (report.admissible_sets == 0)
    throw std::domain_error("verify_indistinguishability: no admissible J (conditioning on a null event)");
  report.yes_conditional = sum / Rational(static_cast<unsigned long>(report.admissible_sets));
  report.no_product = joint_prob_no(queries, hp);
  report.equal = report.yes_conditional == report.no_product;
  return report;
}

}  // namespace junta
