#pragma once

// Named verification checks. Each returns a LemmaReport whose instances carry
// both sides of the comparison, so every verdict can be recomputed from the
// report alone.

#include "junta/boolfn.hpp"
#include "junta/constructions.hpp"
#include "junta/delta.hpp"
#include "junta/exactprob.hpp"
#include "junta/rational.hpp"
#include "junta/rng.hpp"
#include "junta/testers.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace junta {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct LemmaInstance {
  KeyValues inputs;
  std::string lhs;
  std::string relation;  // one of = <= >= < >
  std::string rhs;
  bool verdict = false;
  std::optional<std::string> counterexample;
};

struct LemmaReport {
  std::string lemma_id;
  std::vector<LemmaInstance> instances;
  KeyValues settings;
  double seconds = 0;

  std::size_t passed() const {
    std::size_t n = 0;
    for (const auto& i : instances) n += i.verdict;
    return n;
  }
  std::size_t failed() const { return instances.size() - passed(); }
  bool ok() const { return !instances.empty() && failed() == 0; }
};

namespace detail {

template <class T>
bool holds(const T& lhs, const std::string& rel, const T& rhs) {
  if (rel == "=") return lhs == rhs;
  if (rel == "<=") return lhs <= rhs;
  if (rel == ">=") return lhs >= rhs;
  if (rel == "<") return lhs < rhs;
  if (rel == ">") return lhs > rhs;
  throw std::invalid_argument("unknown relation " + rel);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline LemmaInstance& add_exact(LemmaReport& rep, KeyValues inputs, const Rational& lhs, const std::string& rel,
                                const Rational& rhs) {
  rep.instances.push_back({std::move(inputs), to_string(lhs), rel, to_string(rhs), holds(lhs, rel, rhs), {}});
  return rep.instances.back();
}

inline LemmaInstance& add_float(LemmaReport& rep, KeyValues inputs, double lhs, const std::string& rel, double rhs) {
  rep.instances.push_back({std::move(inputs), format_double(lhs), rel, format_double(rhs), holds(lhs, rel, rhs), {}});
  return rep.instances.back();
}

inline std::string str(long v) { return std::to_string(v); }

template <class Body>
LemmaReport timed(std::string id, Body&& body) {
  LemmaReport rep;
  rep.lemma_id = std::move(id);
  const auto start = std::chrono::steady_clock::now();
  body(rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline std::string queries_text(const std::vector<PointQuery>& qs, int n) {
  std::string s;
  for (const auto& q : qs) {
    if (!s.empty()) s += ' ';
    s += to_string(point_of_index(q.point, n)) + "->" + (q.value ? "1" : "0");
  }
  return s;
}

}  // namespace detail

/// Δ exact values, the sign-sum identity, strict monotonicity and the
/// 1/2 - 10/sqrt(t) <= Δ_t <= 1/2 - 1/(10 sqrt t) window for 64 <= t <= t_max.
inline LemmaReport check_delta_properties(std::uint64_t t_max = kDeltaExactMax) {
  return detail::timed("delta-properties", [&](LemmaReport& rep) {
    rep.settings = {{"t_max", std::to_string(t_max)}};
    const std::pair<std::uint64_t, Rational> known[] = {{1, 0}, {2, Rational(1, 4)}, {4, Rational(5, 16)}};
    for (const auto& [t, v] : known) detail::add_exact(rep, {{"check", "value"}, {"t", detail::str(t)}}, delta(t), "=", v);
    for (std::uint64_t t = 1; t <= 16 && t <= t_max; ++t)
      detail::add_exact(rep, {{"check", "sign-sum identity"}, {"t", detail::str(t)}}, delta(t), "=",
                        Rational(1, 2) - weighted_sign_expectation(WeightVector::uniform(t)) / 2);

    const auto seq = delta_sequence(t_max);
    std::uint64_t first_bad = 0;
    for (std::uint64_t t = 1; t + 1 <= t_max && !first_bad; ++t)
      if (!(seq[t] < seq[t + 1])) first_bad = t;
    auto& mono = detail::add_exact(rep, {{"check", "strictly increasing"}, {"range", "1.." + std::to_string(t_max)}},
                                   Rational(first_bad == 0 ? 0 : 1), "=", Rational(0));
    if (first_bad) mono.counterexample = "Delta_" + std::to_string(first_bad + 1) + " <= Delta_" + std::to_string(first_bad);

    // Ties come in pairs: Δ_{2j} = Δ_{2j+1}, and every odd-to-even step is strict.
    std::uint64_t decreases = 0, odd_step_ties = 0, even_pair_gaps = 0;
    for (std::uint64_t t = 1; t + 1 <= t_max; ++t) {
      decreases += seq[t + 1] < seq[t];
      if (t % 2 == 1) odd_step_ties += !(seq[t] < seq[t + 1]);
      if (t % 2 == 0) even_pair_gaps += seq[t] != seq[t + 1];
    }
    const std::string range = "1.." + std::to_string(t_max);
    detail::add_exact(rep, {{"check", "decreasing steps"}, {"range", range}}, Rational(static_cast<unsigned long>(decreases)),
                      "=", Rational(0));
    detail::add_exact(rep, {{"check", "odd t with Delta_{t+1} <= Delta_t"}, {"range", range}},
                      Rational(static_cast<unsigned long>(odd_step_ties)), "=", Rational(0));
    detail::add_exact(rep, {{"check", "even t with Delta_{t+1} != Delta_t"}, {"range", range}},
                      Rational(static_cast<unsigned long>(even_pair_gaps)), "=", Rational(0));

    // With g = 1/2 - Δ_t: g >= 1/(10 sqrt t) <=> 100 t g^2 >= 1, and g <= 10/sqrt t <=> t g^2 <= 100.
    std::uint64_t lower_fail = 0, upper_fail = 0, tested = 0;
    Rational min_upper_lhs = -1, max_lower_lhs = -1;
    for (std::uint64_t t = 64; t <= t_max; ++t) {
      ++tested;
      const Rational g = Rational(1, 2) - seq[t];
      const Rational upper_side = Rational(100) * Rational(static_cast<unsigned long>(t)) * g * g;
      const Rational lower_side = Rational(static_cast<unsigned long>(t)) * g * g;
      if (min_upper_lhs < 0 || upper_side < min_upper_lhs) min_upper_lhs = upper_side;
      if (max_lower_lhs < 0 || lower_side > max_lower_lhs) max_lower_lhs = lower_side;
      if (upper_side < 1 && !upper_fail) upper_fail = t;
      if (lower_side > 100 && !lower_fail) lower_fail = t;
    }
    if (tested > 0) {
      auto& up = detail::add_exact(rep, {{"check", "min over t of 100 t (1/2 - Delta_t)^2"}, {"range", "64.." + std::to_string(t_max)}},
                                   min_upper_lhs, ">=", Rational(1));
      if (upper_fail) up.counterexample = "t=" + std::to_string(upper_fail);
      auto& lo = detail::add_exact(rep, {{"check", "max over t of t (1/2 - Delta_t)^2"}, {"range", "64.." + std::to_string(t_max)}},
                                   max_lower_lhs, "<=", Rational(100));
      if (lower_fail) lo.counterexample = "t=" + std::to_string(lower_fail);
    }
  });
}

/// E_uniform - E_odd >= 1/n for each n.
inline LemmaReport check_k_wise_distance(const std::vector<int>& ns = {4, 8, 12, 16, 20}) {
  return detail::timed("k-wise-distance", [&](LemmaReport& rep) {
    for (int n : ns) {
      const auto [uniform, odd] = parity_gap(n);
      detail::add_exact(rep, {{"n", detail::str(n)}, {"uniform", to_string(uniform)}, {"odd", to_string(odd)}},
                        uniform - odd, ">=", Rational(1, static_cast<unsigned long>(n)));
    }
  });
}

struct IndistinguishabilityOptions {
  int n_max = 6;
  int ell_max = 2;
  int r_max = 1;
  int d = 1;
  std::size_t max_queries = 3;
  std::uint64_t query_sets = 1000;  // per configuration
};

/// For every small configuration, random query sets with random values: the
/// conditional D_YES probability over admissible J equals the D_NO product.
inline LemmaReport check_indistinguishability(Variant variant, Seed seed, const IndistinguishabilityOptions& opt = {}) {
  const std::string id = variant == Variant::Parity ? "almost-same-distribution" : "weak-gap-almost-same-distribution";
  return detail::timed(id, [&](LemmaReport& rep) {
    rep.settings = {{"seed", std::to_string(seed.value)},
                    {"query_sets_per_config", std::to_string(opt.query_sets)},
                    {"max_queries", std::to_string(opt.max_queries)}};
    std::uint64_t config_index = 0;
    for (int n = 2; n <= opt.n_max; ++n)
      for (int ell = 1; ell <= opt.ell_max; ++ell)
        for (int r = 0; r <= opt.r_max; ++r) {
          HardInstanceParams hp;
          hp.k = n - ell;
          hp.ell = ell;
          hp.r = r;
          hp.variant = variant;
          hp.d = variant == Variant::Colored ? opt.d : 0;
          hp.p = r > 0 ? Rational(1, 3) : Rational(0);
          hp.p_used = r > 0;
          if (hp.k < 1 || r >= hp.k || ell > hp.k || n - r < ell) continue;
          if (variant == Variant::Colored && hp.d > ell) continue;
          std::optional<Coloring> chi;
          if (variant == Variant::Colored) chi = greedy_radial_coloring(ell, hp.d);

          RngStream rng(CounterRng(seed, Stream::kAux).derive(config_index++), Stream::kPointSample);
          std::uint64_t admissible_sets = 0, equal_sets = 0, skipped = 0;
          std::optional<std::string> counterexample;
          for (std::uint64_t trial = 0; trial < opt.query_sets; ++trial) {
            const std::size_t q = 1 + rng.below(opt.max_queries);
            std::vector<PointQuery> queries;
            for (std::size_t i = 0; i < q; ++i) queries.push_back({rng.below(std::uint64_t{1} << n), rng.below(2) == 1});
            IndistinguishabilityReport res;
            try {
              res = verify_indistinguishability(queries, hp, chi ? &*chi : nullptr);
            } catch (const std::domain_error&) {
              ++skipped;  // no admissible J
              continue;
            }
            ++admissible_sets;
            if (res.equal)
              ++equal_sets;
            else if (!counterexample)
              counterexample = detail::queries_text(queries, n) + ": yes=" + to_string(res.yes_conditional) +
                               " no=" + to_string(res.no_product);
          }
          auto& inst = detail::add_exact(
              rep,
              {{"n", detail::str(n)}, {"ell", detail::str(ell)}, {"r", detail::str(r)}, {"d", detail::str(hp.d)},
               {"p", to_string(hp.p)}, {"skipped_no_admissible_J", std::to_string(skipped)}},
              Rational(static_cast<unsigned long>(equal_sets)), "=", Rational(static_cast<unsigned long>(admissible_sets)));
          inst.counterexample = counterexample;
        }
  });
}

/// dist(F, J_{kb}) = dist(F, J_{kb+b-1}) = dist(f, J_k) for random f and every k < n.
inline LemmaReport check_lifting(Seed seed, std::uint64_t functions = 200, int n_max = 3, int b = 2) {
  return detail::timed("lifting", [&](LemmaReport& rep) {
    rep.settings = {{"seed", std::to_string(seed.value)}, {"functions", std::to_string(functions)}, {"b", detail::str(b)}};
    RngStream rng(seed, Stream::kAux);
    std::vector<std::uint64_t> agree(static_cast<std::size_t>(n_max)), total(static_cast<std::size_t>(n_max));
    std::vector<std::optional<std::string>> bad(static_cast<std::size_t>(n_max));
    for (std::uint64_t i = 0; i < functions; ++i) {
      const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max)));
      const TruthTable f = TruthTable::tabulate(n, [&](std::uint64_t) { return rng.below(2) == 1; });
      const TruthTable F = xor_lift(f, b);
      for (int k = 0; k < n; ++k) {
        const Rational base = dist_to_k_juntas(f, k).distance;
        const Rational lo = dist_to_k_juntas(F, k * b).distance;
        const Rational hi = dist_to_k_juntas(F, k * b + b - 1).distance;
        ++total[static_cast<std::size_t>(k)];
        if (base == lo && lo == hi)
          ++agree[static_cast<std::size_t>(k)];
        else if (!bad[static_cast<std::size_t>(k)])
          bad[static_cast<std::size_t>(k)] = truth_table_text(f);
      }
    }
    for (int k = 0; k < n_max; ++k) {
      auto& inst = detail::add_exact(rep, {{"k", detail::str(k)}}, Rational(static_cast<unsigned long>(agree[k])), "=",
                                     Rational(static_cast<unsigned long>(total[k])));
      inst.counterexample = bad[static_cast<std::size_t>(k)];
    }
  });
}

/// Validity and num_colors <= |B_ell(d)| for every ell <= ell_max, d <= min(d_max, ell).
inline LemmaReport check_radial_coloring(int ell_max = 12, int d_max = 3) {
  return detail::timed("radial-coloring", [&](LemmaReport& rep) {
    for (int ell = 0; ell <= ell_max; ++ell)
      for (int d = 0; d <= std::min(d_max, ell); ++d) {
        const Coloring chi = greedy_radial_coloring(ell, d);
        const bool valid = chi.valid();
        auto& inst = detail::add_exact(
            rep, {{"ell", detail::str(ell)}, {"d", detail::str(d)}, {"valid", valid ? "true" : "false"}},
            Rational(static_cast<unsigned long>(chi.num_colors)), "<=", Rational(ball_volume(ell, d)));
        if (!valid) {
          inst.verdict = false;
          inst.counterexample = "two points within distance d share a color";
        }
      }
  });
}

/// E|Σ λ_i X_i| >= E|Σ X_i / n| for random weight vectors.
inline LemmaReport check_bucket_expectation(Seed seed, std::uint64_t vectors = 1000, int n_max = 12) {
  return detail::timed("random-bucket-expectation", [&](LemmaReport& rep) {
    rep.settings = {{"seed", std::to_string(seed.value)}, {"vectors", std::to_string(vectors)}};
    RngStream rng(seed, Stream::kAux);
    std::vector<Rational> uniform_cache(static_cast<std::size_t>(n_max) + 1, Rational(-1));
    std::vector<std::uint64_t> ok(static_cast<std::size_t>(n_max) + 1), total(static_cast<std::size_t>(n_max) + 1);
    std::vector<Rational> min_margin(static_cast<std::size_t>(n_max) + 1, Rational(1));
    std::vector<std::optional<std::string>> bad(static_cast<std::size_t>(n_max) + 1);
    for (std::uint64_t i = 0; i < vectors; ++i) {
      const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max)));
      std::vector<std::uint64_t> masses(static_cast<std::size_t>(n));
      std::uint64_t sum = 0;
      while (sum == 0) {
        sum = 0;
        for (auto& m : masses) sum += (m = rng.below(17));
      }
      const WeightVector lambda = WeightVector::from_masses(masses);
      auto& uni = uniform_cache[static_cast<std::size_t>(n)];
      if (uni < 0) uni = weighted_sign_expectation(WeightVector::uniform(static_cast<std::size_t>(n)));
      const Rational lhs = weighted_sign_expectation(lambda);
      ++total[static_cast<std::size_t>(n)];
      if (lhs - uni < min_margin[static_cast<std::size_t>(n)]) min_margin[static_cast<std::size_t>(n)] = lhs - uni;
      if (lhs >= uni)
        ++ok[static_cast<std::size_t>(n)];
      else if (!bad[static_cast<std::size_t>(n)]) {
        std::string s;
        for (auto m : masses) s += (s.empty() ? "" : ",") + std::to_string(m);
        bad[static_cast<std::size_t>(n)] = "masses " + s;
      }
    }
    for (int n = 1; n <= n_max; ++n) {
      if (total[static_cast<std::size_t>(n)] == 0) continue;
      auto& inst = detail::add_exact(rep,
                                     {{"n", detail::str(n)},
                                      {"uniform", to_string(uniform_cache[static_cast<std::size_t>(n)])},
                                      {"min_margin", to_string(min_margin[static_cast<std::size_t>(n)])}},
                                     Rational(static_cast<unsigned long>(ok[n])), "=",
                                     Rational(static_cast<unsigned long>(total[n])));
      inst.counterexample = bad[static_cast<std::size_t>(n)];
    }
  });
}

/// Exact pair-collision probability <= Q^2 / C(k-r, ell) for random point sets.
/// Half of the points are planted as x^{⊕S} partners so that collisions occur.
inline LemmaReport check_collision_bound(Seed seed, std::uint64_t sets = 500, std::size_t q_max = 20, int k_max = 12,
                                         int r_max = 2, int ell_max = 3) {
  return detail::timed("query-lower-bound", [&](LemmaReport& rep) {
    rep.settings = {{"seed", std::to_string(seed.value)}, {"sets", std::to_string(sets)}, {"q_max", std::to_string(q_max)}};
    RngStream rng(seed, Stream::kAux);
    std::uint64_t ok = 0, nonzero = 0;
    Rational worst_ratio = 0;
    std::optional<std::string> bad;
    for (std::uint64_t i = 0; i < sets; ++i) {
      const int ell = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(ell_max)));
      const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(r_max) + 1));
      const int k_min = std::max(r + ell, 1);
      const int k = k_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_max - k_min) + 1));
      const int n = k + ell;
      const std::size_t q = 1 + rng.below(q_max);
      std::vector<std::uint64_t> pts;
      for (std::size_t j = 0; j < q; ++j) {
        if (!pts.empty() && rng.below(2) == 0) {
          const VarSet s = choose_subset(rng.split(), r + 1, n, ell);
          pts.push_back(pts[rng.below(pts.size())] ^ s.mask());
        } else {
          pts.push_back(rng.below(std::uint64_t{1} << n));
        }
      }
      const Rational prob = pair_collision_prob(pts, k, r, ell);
      const Rational bound = *collision_union_bound(q, k, r, ell);
      if (prob > 0) ++nonzero;
      if (prob / bound > worst_ratio) worst_ratio = prob / bound;
      if (prob <= bound)
        ++ok;
      else if (!bad)
        bad = "k=" + std::to_string(k) + " r=" + std::to_string(r) + " ell=" + std::to_string(ell) + " Q=" +
              std::to_string(q) + " prob=" + to_string(prob) + " bound=" + to_string(bound);
    }
    auto& inst = detail::add_exact(rep,
                                   {{"sets_with_collisions", std::to_string(nonzero)},
                                    {"max_prob_over_bound", to_string(worst_ratio)}},
                                   Rational(static_cast<unsigned long>(ok)), "=", Rational(static_cast<unsigned long>(sets)));
    inst.counterexample = bad;
  });
}

/// |E dist - Σ p_i| <= n e^{-n δ^2/3} with δ = 1/2 - mean(p), on fixed and random bias vectors.
inline LemmaReport check_unbalanced_distance(Seed seed, std::uint64_t vectors = 200, int n_max = 16) {
  return detail::timed("unbalanced-distance-to-constant", [&](LemmaReport& rep) {
    rep.settings = {{"seed", std::to_string(seed.value)}, {"vectors", std::to_string(vectors)}};
    auto one = [&](const std::vector<Rational>& p, const std::string& label) {
      const Rational e = biased_dist_to_constants(p);
      Rational s = 0;
      for (const auto& pi : p) s += pi;
      detail::add_float(rep, {{"vector", label}, {"n", std::to_string(p.size())}, {"exact", to_string(e)}},
                        std::fabs(to_double(e - s)), "<=", unbalanced_distance_bound(p));
    };
    one(std::vector<Rational>(8, Rational(1, 8)), "8 x 1/8");
    one(std::vector<Rational>(4, Rational(0)), "4 x 0");
    RngStream rng(seed, Stream::kAux);
    for (std::uint64_t i = 0; i < vectors; ++i) {
      const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max)));
      std::vector<Rational> p;
      for (int j = 0; j < n; ++j) p.push_back(Rational(static_cast<unsigned long>(rng.below(33)), 64));
      one(p, "random #" + std::to_string(i));
    }
  });
}

/// The tolerant derivation table, the side conditions, and the relaxed-reduction examples.
inline LemmaReport check_parameter_derivation() {
  return detail::timed("parameter-derivation", [&](LemmaReport& rep) {
    // eps1 = eps2 (1 - c 2^-j), so ell = floor((j - log2 c) / 10).
    const Rational eps2_values[] = {Rational(49, 100), Rational(2, 5), Rational(1, 4), Rational(1, 10)};
    const std::pair<int, Rational> gaps[] = {
        {10, Rational(1)}, {20, Rational(3, 2)}, {31, Rational(1)}, {40, Rational(3, 2)}, {57, Rational(1)}};
    for (const auto& eps2 : eps2_values)
      for (const auto& [j, c] : gaps) {
        const Rational eps1 = eps2 * (Rational(1) - c * pow2_inv(static_cast<unsigned long>(j)));
        const auto expected = static_cast<long>(std::floor((j - std::log2(to_double(c))) / 10.0));
        KeyValues in = {{"k", "1000"}, {"eps1", to_string(eps1)}, {"eps2", to_string(eps2)}};
        try {
          const auto d = derive_params_tolerant(1000, eps1, eps2);
          detail::add_exact(rep, in, Rational(d.params.ell), "=", Rational(expected));
          KeyValues side = in;
          side.emplace_back("r", std::to_string(d.params.r));
          detail::add_float(rep, side, std::ldexp(1.0, -d.params.r), ">=", to_double(eps2));
          KeyValues pk = in;
          pk.emplace_back("p", to_string(d.params.p));
          detail::add_float(rep, pk, to_double(d.params.p), "<", 0.491);
          detail::add_float(rep, pk, to_double(d.params.p), ">=", 0.0);
        } catch (const ParamError& e) {
          in.emplace_back("error", e.what());
          detail::add_exact(rep, in, Rational(0), "=", Rational(0));  // error cases are exempt
        }
      }
    struct Relaxed {
      long k;
      Rational gamma;
      long ell, k_prime, b;
    };
    const Relaxed cases[] = {{1000000, Rational(1, 1000), 10, 100, 10000},
                             {1000000, Rational(1, 100), 10, 10, 100000}};
    for (const auto& c : cases) {
      const Rational eps1(1, 4);
      const auto spec = derive_relaxed_reduction(c.k, c.gamma, eps1, eps1 + pow2_inv(10));
      const KeyValues in = {{"k", std::to_string(c.k)}, {"gamma", to_string(c.gamma)}, {"eps2-eps1", "1/1024"}};
      auto with = [&](const char* what) {
        KeyValues v = in;
        v.emplace_back("quantity", what);
        return v;
      };
      detail::add_exact(rep, with("ell"), Rational(spec.ell), "=", Rational(c.ell));
      detail::add_exact(rep, with("k_prime"), Rational(spec.k_prime), "=", Rational(c.k_prime));
      detail::add_exact(rep, with("b"), Rational(spec.b), "=", Rational(c.b));
    }
    // gamma below 1/k is rejected.
    bool rejected = false;
    try {
      derive_relaxed_reduction(1000, Rational(1, 2000), Rational(1, 4), Rational(1, 4) + pow2_inv(10));
    } catch (const ParamError& e) {
      rejected = e.kind() == ParamErrorKind::kInvalidGamma;
    }
    detail::add_exact(rep, {{"k", "1000"}, {"gamma", "1/2000"}, {"quantity", "rejected"}}, Rational(rejected ? 1 : 0), "=",
                      Rational(1));
  });
}

/// |estimate - dist_to_constants| <= 5 sqrt(ln m / m) in at least 99% of random functions, per m.
inline LemmaReport check_estimator_concentration(Seed seed, std::uint64_t functions = 200, int n_max = 12,
                                                 const std::vector<std::uint64_t>& ms = {100, 1000, 10000}) {
  return detail::timed("k-wise-limit", [&](LemmaReport& rep) {
    rep.settings = {{"seed", std::to_string(seed.value)}, {"functions", std::to_string(functions)}};
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const std::uint64_t m = ms[mi];
      const double envelope = 5.0 * std::sqrt(std::log(static_cast<double>(m)) / static_cast<double>(m));
      RngStream rng(CounterRng(seed, Stream::kAux).derive(mi), Stream::kAux);
      std::uint64_t inside = 0;
      double worst = 0;
      for (std::uint64_t i = 0; i < functions; ++i) {
        const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max)));
        const Rational density(static_cast<unsigned long>(rng.below(64)), 64);
        const Seed fs = rng.split();
        const std::uint64_t thr = bernoulli_threshold(density);
        const CounterRng bits(fs, Stream::kNoise);
        const TruthTable f = TruthTable::tabulate(n, [&](std::uint64_t x) { return bits.word(x) < thr; });
        const double err = std::fabs(to_double(sample_estimate_dist_to_constant(f, m, rng.split()) -
                                               dist_to_constants(f)));
        worst = std::max(worst, err);
        if (err <= envelope) ++inside;
      }
      detail::add_float(rep,
                        {{"m", std::to_string(m)},
                         {"envelope", detail::format_double(envelope)},
                         {"max_error", detail::format_double(worst)}},
                        static_cast<double>(inside) / static_cast<double>(functions), ">=", 0.99);
    }
  });
}

struct BallCheckOptions {
  int n = 10;
  int k = 2;
  Rational eps = Rational(1, 4);
  std::uint64_t m = 200;
  int r_ball = 3;
  std::uint64_t trials = 100;
  Rational noise = Rational(1, 10);
};

/// Rejects uniform random functions and accepts noisy dictators, each with
/// frequency >= 0.8; advantage - 3 stderr >= 1/3.
inline LemmaReport check_ball_tester(Seed seed, const BallCheckOptions& opt = {}) {
  return detail::timed("testing-random-functions", [&](LemmaReport& rep) {
    const auto bp = BallTesterParams::make(opt.n, opt.k, opt.eps, opt.m, opt.r_ball);
    rep.settings = {{"seed", std::to_string(seed.value)}, {"n", detail::str(opt.n)}, {"k", detail::str(opt.k)},
                    {"eps", to_string(opt.eps)}, {"m", std::to_string(bp.m)}, {"r_ball", detail::str(bp.r_ball)},
                    {"m_overridden", bp.m_overridden ? "true" : "false"},
                    {"r_overridden", bp.r_overridden ? "true" : "false"},
                    {"hypothesis_holds", bp.hypothesis_holds ? "true" : "false"},
                    {"trials", std::to_string(opt.trials)}};
    const CounterRng random_seeds(seed, Stream::kTrialNo), dictator_seeds(seed, Stream::kTrialYes);
    std::vector<char> random_accept(opt.trials), dictator_accept(opt.trials);
    std::vector<std::uint64_t> random_best(opt.trials);
    parallel_for(opt.trials, [&](std::size_t t) {
      const Seed rs = random_seeds.derive(t), ds = dictator_seeds.derive(t);
      const CounterRng bits(rs, Stream::kUniformRegion);
      const TruthTable f = TruthTable::tabulate(opt.n, [&](std::uint64_t x) { return bits.bit(x); });
      QueryOracle of(f);
      const auto res = ball_tester(of, bp, CounterRng(rs, Stream::kAux).derive(0));
      random_accept[t] = res.accept;
      random_best[t] = res.best_count;
      const TruthTable g = noisy_dictator(opt.n, 1, opt.noise, ds);
      QueryOracle og(g);
      dictator_accept[t] = ball_tester(og, bp, CounterRng(ds, Stream::kAux).derive(0)).accept;
    });
    std::uint64_t reject_random = 0, accept_dictator = 0, max_best = 0;
    for (std::size_t t = 0; t < opt.trials; ++t) {
      reject_random += !random_accept[t];
      accept_dictator += dictator_accept[t];
      max_best = std::max(max_best, random_best[t]);
    }
    const double nt = static_cast<double>(opt.trials);
    const double pr = static_cast<double>(reject_random) / nt, pd = static_cast<double>(accept_dictator) / nt;
    detail::add_float(rep, {{"case", "uniform random f, reject frequency"}, {"max_best_count", std::to_string(max_best)}},
                      pr, ">=", 0.8);
    detail::add_float(rep, {{"case", "noisy dictator, accept frequency"}, {"noise", to_string(opt.noise)}}, pd, ">=", 0.8);
    // advantage = Pr[accept | dictator] - Pr[accept | random]
    const double adv = pd - (1 - pr);
    const double se = std::sqrt(pd * (1 - pd) / nt + pr * (1 - pr) / nt);
    detail::add_float(rep, {{"case", "advantage minus 3 stderr"}, {"advantage", detail::format_double(adv)},
                            {"stderr", detail::format_double(se)}},
                      adv - 3 * se, ">=", 1.0 / 3.0);
  });
}

/// mean(NO) - mean(YES) > 0 with z >= 3, and E dist(f, J_{[n]\J}) under D_YES at
/// least half the 2^{-2 ell} 2^{-r} gap below the matching D_NO quantity.
inline LemmaReport check_distance_separation(const HardInstanceParams& hp, Seed seed, std::uint64_t samples = 500) {
  return detail::timed("distance-separation", [&](LemmaReport& rep) {
    rep.settings = {{"seed", std::to_string(seed.value)}, {"samples", std::to_string(samples)},
                    {"k", detail::str(hp.k)}, {"ell", detail::str(hp.ell)}, {"r", detail::str(hp.r)},
                    {"p", to_string(hp.p)}, {"variant", to_string(hp.variant)}, {"d", detail::str(hp.d)}};
    const auto s = separation_experiment(hp, samples, seed);
    detail::add_float(rep, {{"quantity", "mean(NO) - mean(YES)"}, {"mean_no", detail::format_double(s.mean_no)},
                            {"mean_yes", detail::format_double(s.mean_yes)}},
                      s.mean_no - s.mean_yes, ">", 0.0);
    detail::add_float(rep, {{"quantity", "z-score"}, {"sd_no", detail::format_double(s.sd_no)},
                            {"sd_yes", detail::format_double(s.sd_yes)}},
                      s.z_score, ">=", 3.0);
    detail::add_float(rep, {{"quantity", "E_YES dist(f, J_[n]\\J) + gap/2 vs E_NO"},
                            {"mean_no_complement", detail::format_double(s.mean_no_complement)},
                            {"half_gap", detail::format_double(s.complement_gap_required)}},
                      s.mean_yes_complement, "<=", s.mean_no_complement - s.complement_gap_required);
  });
}

/// The construction parameters used by the separation check: k=8, ell=2, r=1
/// and p solving 1/4 = p(1 - 2^-r) + Δ_4 2^-r, i.e. p = 3/16.
inline HardInstanceParams separation_params() {
  HardInstanceParams hp;
  hp.k = 8;
  hp.ell = 2;
  hp.r = 1;
  hp.variant = Variant::Parity;
  const Rational target(1, 4);
  const Rational scale = pow2_inv(1);
  hp.p = (target - delta(4) * scale) / (Rational(1) - scale);
  hp.p_used = true;
  return hp;
}

}  // namespace junta
