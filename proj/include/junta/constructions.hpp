#pragma once

// Hard-instance distributions for tolerant junta testing, their parameter
// derivation, the radial colouring of the cube and the XOR lift.
//
// Both distributions live on n = k + ell variables. Points with x|[r] != 0^r
// form the Bernoulli(p) region; the remaining points form the constrained
// region, where D_NO is uniform and D_YES hides structure on a random set J
// of ell coordinates drawn from {r+1, ..., n}.

#include "junta/boolfn.hpp"
#include "junta/delta.hpp"
#include "junta/rational.hpp"
#include "junta/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace junta {

enum class Variant { Parity, Colored };

inline std::string to_string(Variant v) { return v == Variant::Parity ? "parity" : "colored"; }

inline Variant parse_variant(const std::string& s) {
  if (s == "parity") return Variant::Parity;
  if (s == "colored") return Variant::Colored;
  throw std::invalid_argument("unknown variant '" + s + "' (expected parity or colored)");
}

enum class ParamErrorKind {
  kInvalidEpsilon,
  kInvalidGamma,
  kEllZero,
  kPOutOfRange,
  kRNotBelowK,
  kColoringInfeasible,  // d = 0: the ball bound leaves no room for a radius
  kKPrimeZero,
  kBZero,
  kInvalidParams,
};

class ParamError : public std::domain_error {
 public:
  ParamError(ParamErrorKind kind, const std::string& what) : std::domain_error(what), kind_(kind) {}
  ParamErrorKind kind() const { return kind_; }

 private:
  ParamErrorKind kind_;
};

struct HardInstanceParams {
  int k = 1;
  int ell = 0;
  int r = 0;
  Rational p = 0;
  int d = 0;
  Variant variant = Variant::Parity;
  /// False when r = 0 forced p to be irrelevant (the Bernoulli region is empty).
  bool p_used = true;

  int n() const { return k + ell; }
  std::uint64_t r_mask() const { return low_mask(r); }

  void validate() const {
    auto fail = [](const std::string& msg) { throw ParamError(ParamErrorKind::kInvalidParams, msg); };
    if (k < 1) fail("k must be at least 1");
    if (ell < 0 || r < 0 || d < 0) fail("ell, r and d must be non-negative");
    if (r >= k) fail("r must be smaller than k");
    if (ell > k) fail("ell must not exceed k");
    if (p < 0 || p >= Rational(1, 2)) fail("p must lie in [0, 1/2)");
    if (variant == Variant::Colored && d < 1) fail("colored variant needs d >= 1");
    if (n() > kIndexBits) fail("k + ell too large");
  }
};

/// Flat key=value record: k, ell, r, p_num, p_den, d, variant.
inline std::string params_record(const HardInstanceParams& hp) {
  std::ostringstream os;
  os << "k=" << hp.k << "\nell=" << hp.ell << "\nr=" << hp.r << "\np_num=" << hp.p.get_num().get_str()
     << "\np_den=" << hp.p.get_den().get_str() << "\nd=" << hp.d << "\nvariant=" << to_string(hp.variant)
     << "\n";
  return os.str();
}

inline HardInstanceParams parse_params_record(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("params record: line without '='");
    const std::string key = line.substr(0, eq);
    if (!kv.emplace(key, line.substr(eq + 1)).second)
      throw std::invalid_argument("params record: duplicate key " + key);
  }
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("params record: missing key " + key);
    return it->second;
  };
  auto get_int = [&](const std::string& key) {
    const std::string v = get(key);
    std::size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("params record: malformed " + key);
    return out;
  };
  if (kv.size() != 7) throw std::invalid_argument("params record: unexpected keys");
  HardInstanceParams hp;
  hp.k = get_int("k");
  hp.ell = get_int("ell");
  hp.r = get_int("r");
  hp.p = parse_rational(get("p_num") + "/" + get("p_den"));
  hp.d = get_int("d");
  hp.variant = parse_variant(get("variant"));
  hp.p_used = hp.r > 0;
  hp.validate();
  return hp;
}

// ---------------------------------------------------------------------------
// Hamming balls and the radial colouring

/// |B_n(radius)| = Σ_{i <= radius} C(n, i).
inline Integer ball_volume(int n, int radius) {
  if (n < 0 || radius < 0 || radius > n) throw std::out_of_range("ball_volume: need 0 <= radius <= n");
  Integer total(0);
  for (int i = 0; i <= radius; ++i) total += binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(i));
  return total;
}

/// All masks of n bits with popcount in [1, radius], ordered by weight then value.
inline std::vector<std::uint64_t> ball_offsets(int n, int radius) {
  std::vector<std::uint64_t> out;
  for (int w = 1; w <= radius && w <= n; ++w)
    for_each_k_subset(1, n, w, [&](const std::vector<int>& idx) {
      std::uint64_t m = 0;
      for (int j : idx) m |= std::uint64_t{1} << (j - 1);
      out.push_back(m);
    });
  return out;
}

inline constexpr int kColoringMaxEll = 14;

struct Coloring {
  int ell = 0;
  int d = 0;
  std::vector<std::uint32_t> colors;  // indexed by point of {0,1}^ell
  std::uint32_t num_colors = 0;

  std::uint32_t operator()(std::uint64_t point) const { return colors.at(point); }

  /// Exhaustive check: points at distance 1..d receive distinct colours.
  bool valid() const {
    const auto offsets = ball_offsets(ell, d);
    for (std::uint64_t x = 0; x < colors.size(); ++x)
      for (auto off : offsets)
        if (colors[x] == colors[x ^ off]) return false;
    return true;
  }
};

/// Greedy colouring in increasing index order: each point takes the smallest
/// colour not used within distance d among already coloured points.
inline Coloring greedy_radial_coloring(int ell, int d) {
  if (ell < 0 || ell > kColoringMaxEll) throw std::out_of_range("greedy_radial_coloring: ell must be in [0, 14]");
  if (d < 0 || d > ell) throw std::out_of_range("greedy_radial_coloring: need 0 <= d <= ell");
  Coloring chi;
  chi.ell = ell;
  chi.d = d;
  const std::uint64_t size = std::uint64_t{1} << ell;
  chi.colors.assign(size, 0);
  const auto offsets = ball_offsets(ell, d);
  std::vector<std::uint64_t> seen_at(offsets.size() + 2, ~std::uint64_t{0});
  for (std::uint64_t x = 0; x < size; ++x) {
    for (auto off : offsets) {
      const std::uint64_t y = x ^ off;
      if (y < x && chi.colors[y] < seen_at.size()) seen_at[chi.colors[y]] = x;
    }
    std::uint32_t c = 0;
    while (seen_at[c] == x) ++c;
    chi.colors[x] = c;
    chi.num_colors = std::max(chi.num_colors, c + 1);
  }
  return chi;
}

/// "n=<ell>\nd=<d>\nwidth=<w>\n<hex>\n": colour of point i occupies bits
/// [i*w, (i+1)*w) of the packed payload, least significant bit first.
inline void write_coloring(std::ostream& out, const Coloring& chi) {
  const int width = std::max(1, static_cast<int>(std::bit_width(chi.num_colors > 0 ? chi.num_colors - 1 : 0U)));
  const std::uint64_t bits = chi.colors.size() * static_cast<std::uint64_t>(width);
  out << "n=" << chi.ell << "\nd=" << chi.d << "\nwidth=" << width << "\n"
      << detail::encode_hex(bits, [&](std::uint64_t i) { return ((chi.colors[i / width] >> (i % width)) & 1U) != 0; })
      << "\n";
}

inline Coloring read_coloring(std::istream& in) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw std::invalid_argument(std::string("coloring: missing ") + what);
    return detail::trim(line);
  };
  Coloring chi;
  chi.ell = static_cast<int>(detail::parse_header(next("header"), "n"));
  chi.d = static_cast<int>(detail::parse_header(next("d"), "d"));
  const long width = detail::parse_header(next("width"), "width");
  if (chi.ell < 0 || chi.ell > kColoringMaxEll) throw std::invalid_argument("coloring: ell out of range");
  if (width < 1 || width > 32) throw std::invalid_argument("coloring: width out of range");
  const std::uint64_t size = std::uint64_t{1} << chi.ell;
  const auto words = detail::decode_hex(next("payload"), size * static_cast<std::uint64_t>(width));
  chi.colors.assign(size, 0);
  for (std::uint64_t i = 0; i < size * static_cast<std::uint64_t>(width); ++i)
    if ((words[i >> 6] >> (i & 63)) & 1U) chi.colors[i / width] |= 1U << (i % width);
  for (auto c : chi.colors) chi.num_colors = std::max(chi.num_colors, c + 1);
  return chi;
}

// ---------------------------------------------------------------------------
// Parameter derivation

namespace detail {

/// Largest integer L with q * 2^L <= 1, for q in (0, 1].
inline long floor_neg_log2(const Rational& q) {
  if (q <= 0 || q > 1) throw std::invalid_argument("floor_neg_log2: q must lie in (0, 1]");
  const Integer& a = q.get_num();
  const Integer& b = q.get_den();
  long l = static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 2)) - static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
  auto fits = [&](long e) { return e < 0 || Integer(a * pow2(static_cast<unsigned long>(e))) <= b; };
  while (!fits(l)) --l;
  while (fits(l + 1)) ++l;
  return l;
}

inline void check_eps(const Rational& eps1, const Rational& eps2, const Rational& eps1_min, bool eps1_inclusive) {
  const bool low_ok = eps1_inclusive ? eps1 >= eps1_min : eps1 > eps1_min;
  if (!low_ok || !(eps1 < eps2) || eps2 > Rational(49, 100))
    throw ParamError(ParamErrorKind::kInvalidEpsilon,
                     "need " + to_string(eps1_min) + (eps1_inclusive ? " <= " : " < ") +
                         "eps1 < eps2 <= 49/100, got eps1=" + to_string(eps1) + ", eps2=" + to_string(eps2));
}

/// Smallest r with delta * 2^-r <= target; p from target = p(1-2^-r) + delta 2^-r.
inline void solve_r_and_p(HardInstanceParams& hp, double delta_value, double target) {
  int r = 0;
  while (std::ldexp(delta_value, -r) > target) ++r;
  if (r >= hp.k)
    throw ParamError(ParamErrorKind::kRNotBelowK,
                     "derived r=" + std::to_string(r) + " is not below k=" + std::to_string(hp.k));
  hp.r = r;
  if (r == 0) {
    hp.p = 0;
    hp.p_used = false;
    return;
  }
  const double scale = std::ldexp(1.0, -r);
  const double p = (target - delta_value * scale) / (1.0 - scale);
  if (!(p >= 0.0 && p < 0.5))
    throw ParamError(ParamErrorKind::kPOutOfRange, "derived p=" + std::to_string(p) + " outside [0, 1/2)");
  hp.p = Rational(p);
  hp.p_used = true;
}

}  // namespace detail

/// Parameters plus the quantities used to derive them.
struct ParamDerivation {
  HardInstanceParams params;
  double target = 0;       // eps2 + 2^{-k/3} + e^{-t (0.009)^2 / 12}
  double delta_value = 0;  // Δ_t at the table size t used
  std::uint64_t table_log2 = 0;  // t = 2^table_log2
  /// 2^{-r} >= eps2, which minimality of r guarantees whenever r >= 1.
  bool r_side_condition = false;
};

/// ell = floor(-log2(1 - eps1/eps2) / 10), r minimal, p solved; Parity variant.
inline ParamDerivation derive_params_tolerant(int k, const Rational& eps1, const Rational& eps2) {
  detail::check_eps(eps1, eps2, Rational(0), false);
  if (k < 1) throw ParamError(ParamErrorKind::kInvalidParams, "k must be positive");
  const Rational gap_ratio = Rational(1) - eps1 / eps2;
  const long ell = detail::floor_neg_log2(gap_ratio) / 10;
  if (ell < 1) throw ParamError(ParamErrorKind::kEllZero, "derived ell = 0: eps1/eps2 too far from 1");

  ParamDerivation out;
  out.params.k = k;
  out.params.ell = static_cast<int>(ell);
  out.params.variant = Variant::Parity;
  out.params.d = 0;
  out.table_log2 = static_cast<std::uint64_t>(ell);
  out.delta_value = delta_pow2(static_cast<unsigned>(ell));
  const double eps2_d = to_double(eps2);
  out.target = eps2_d + std::exp2(-static_cast<double>(k) / 3.0) +
               std::exp(-std::ldexp(1.0, static_cast<int>(ell)) * 0.009 * 0.009 / 12.0);
  detail::solve_r_and_p(out.params, out.delta_value, out.target);
  out.r_side_condition = std::ldexp(1.0, -out.params.r) >= eps2_d;
  return out;
}

/// ell = 10 floor(-log2(1 - eps1/eps2)); table size 2^{0.9 ell}; d the largest
/// radius with |B_ell(d)| <= 2^{0.1 ell}; Colored variant.
inline ParamDerivation derive_params_weak_gap(int k, const Rational& eps1, const Rational& eps2) {
  detail::check_eps(eps1, eps2, Rational(1, 100), true);
  if (k < 1) throw ParamError(ParamErrorKind::kInvalidParams, "k must be positive");
  const long steps = detail::floor_neg_log2(Rational(1) - eps1 / eps2);
  const long ell = 10 * steps;
  if (ell < 1) throw ParamError(ParamErrorKind::kEllZero, "derived ell = 0: eps1/eps2 too far from 1");
  // ell is a multiple of 10, so 0.9 ell and 0.1 ell are integers already.
  const long big = (9 * ell) / 10;
  const long small = ell / 10;

  ParamDerivation out;
  out.params.k = k;
  out.params.ell = static_cast<int>(ell);
  out.params.variant = Variant::Colored;
  out.table_log2 = static_cast<std::uint64_t>(big);
  out.delta_value = delta_pow2(static_cast<unsigned>(big));
  const double eps2_d = to_double(eps2);
  out.target = eps2_d + std::exp2(-static_cast<double>(k + small) / 3.0) +
               std::exp(-std::ldexp(1.0, static_cast<int>(big)) * 0.009 * 0.009 / 12.0);

  const Integer budget = pow2(static_cast<unsigned long>(small));
  int d = 0;
  while (d + 1 <= ell && ball_volume(static_cast<int>(ell), d + 1) <= budget) ++d;
  if (d == 0)
    throw ParamError(ParamErrorKind::kColoringInfeasible,
                     "no radius d >= 1 with |B_ell(d)| <= 2^{ell/10} at ell=" + std::to_string(ell));
  out.params.d = d;
  detail::solve_r_and_p(out.params, out.delta_value, out.target);
  out.r_side_condition = std::ldexp(1.0, -out.params.r) >= eps2_d;
  return out;
}

struct RelaxedReductionSpec {
  Rational gamma;
  long k = 0;
  long ell = 0;
  long k_prime = 0;
  long b = 0;
  /// k'b + b floor(ell/20) + b - 1 >= (1 + gamma) k at these finite values.
  bool inequality_holds = false;
  long inequality_lhs = 0;
  Rational inequality_rhs;
};

/// Largest gamma accepted; the reduction needs gamma below an absolute constant.
inline const Rational kRelaxedGammaMax(1, 10);

inline RelaxedReductionSpec derive_relaxed_reduction(long k, const Rational& gamma, const Rational& eps1,
                                                     const Rational& eps2) {
  if (k < 1) throw ParamError(ParamErrorKind::kInvalidParams, "k must be positive");
  if (gamma < Rational(1, k) || gamma > kRelaxedGammaMax)
    throw ParamError(ParamErrorKind::kInvalidGamma, "need 1/k <= gamma <= 1/10, got " + to_string(gamma));
  detail::check_eps(eps1, eps2, Rational(1, 100), true);
  RelaxedReductionSpec spec;
  spec.gamma = gamma;
  spec.k = k;
  spec.ell = detail::floor_neg_log2(eps2 - eps1);
  spec.k_prime = floor_of(Rational(spec.ell) / (Rational(100) * gamma));
  if (spec.k_prime <= 0) throw ParamError(ParamErrorKind::kKPrimeZero, "k' = floor(ell / (100 gamma)) is zero");
  spec.b = k / spec.k_prime;
  if (spec.b <= 0) throw ParamError(ParamErrorKind::kBZero, "b = floor(k / k') is zero");
  spec.inequality_lhs = spec.k_prime * spec.b + spec.b * (spec.ell / 20) + spec.b - 1;
  spec.inequality_rhs = (Rational(1) + gamma) * Rational(k);
  spec.inequality_holds = Rational(spec.inequality_lhs) >= spec.inequality_rhs;
  return spec;
}

// ---------------------------------------------------------------------------
// Samplers

struct YesSample {
  TruthTable f;
  VarSet J;
};

/// Uniform size-`count` subset of {first, ..., last} by partial Fisher-Yates; sorted.
inline VarSet choose_subset(Seed seed, int first, int last, int count) {
  const int pool_size = last - first + 1;
  if (count < 0 || count > pool_size) throw std::invalid_argument("choose_subset: subset larger than pool");
  std::vector<int> pool;
  for (int j = first; j <= last; ++j) pool.push_back(j);
  RngStream rng(seed, Stream::kSubsetChoice);
  for (int i = 0; i < count; ++i) {
    const auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(pool_size - i)));
    std::swap(pool[i], pool[i + pick]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return VarSet(std::move(pool));
}

namespace detail {

inline void check_sampler_arity(const HardInstanceParams& hp, int arity_cap) {
  hp.validate();
  if (hp.n() > arity_cap)
    throw std::length_error("sampler: n=" + std::to_string(hp.n()) + " exceeds arity cap " + std::to_string(arity_cap));
}

/// Bernoulli(p) bits outside the constrained region, `fill` inside it.
template <class Fill>
std::vector<std::uint64_t> fill_regions(const HardInstanceParams& hp, Seed seed, Fill&& fill) {
  const int n = hp.n();
  const std::uint64_t size = std::uint64_t{1} << n;
  const std::uint64_t rmask = hp.r_mask();
  const CounterRng bern(seed, Stream::kBernoulliRegion);
  const std::uint64_t threshold = bernoulli_threshold(hp.p);
  std::vector<std::uint64_t> words(TruthTable::word_count(n), 0);
  for (std::uint64_t x = 0; x < size; ++x) {
    const bool value = (x & rmask) != 0 ? bern.word(x) < threshold : fill(x);
    if (value) words[x >> 6] |= std::uint64_t{1} << (x & 63);
  }
  return words;
}

}  // namespace detail

/// D_NO: Bernoulli(p) where x|[r] != 0^r, uniform elsewhere.
inline TruthTable sample_no(const HardInstanceParams& hp, Seed seed, int arity_cap = kDefaultArityCap) {
  detail::check_sampler_arity(hp, arity_cap);
  const CounterRng uniform(seed, Stream::kUniformRegion);
  return TruthTable(hp.n(), detail::fill_regions(hp, seed, [&](std::uint64_t x) { return uniform.bit(x); }),
                    arity_cap);
}

/// D_YES, parity variant: every constrained J-subcube XORs to 1.
inline YesSample sample_yes_parity(const HardInstanceParams& hp, Seed seed, int arity_cap = kDefaultArityCap) {
  detail::check_sampler_arity(hp, arity_cap);
  if (hp.variant != Variant::Parity) throw std::invalid_argument("sample_yes_parity: params are not the parity variant");
  if (hp.ell < 1) throw std::invalid_argument("sample_yes_parity: ell must be at least 1");
  if (hp.n() - hp.r < hp.ell) throw std::invalid_argument("sample_yes_parity: no room for J");
  VarSet J = choose_subset(seed, hp.r + 1, hp.n(), hp.ell);
  const std::uint64_t jmask = J.mask();
  const CounterRng uniform(seed, Stream::kUniformRegion);
  auto words = detail::fill_regions(hp, seed, [&](std::uint64_t x) {
    return (x & jmask) != jmask && uniform.bit(x);
  });

  const std::uint64_t size = std::uint64_t{1} << hp.n();
  const std::uint64_t rmask = hp.r_mask();
  for (std::uint64_t x = 0; x < size; ++x) {
    if ((x & rmask) != 0 || (x & jmask) != jmask) continue;
    const std::uint64_t base = x & ~jmask;
    bool acc = true;  // target XOR over the subcube
    for (std::uint64_t s = 0; s != jmask; s = (s - jmask) & jmask) {
      const std::uint64_t y = base | s;
      acc ^= ((words[y >> 6] >> (y & 63)) & 1U) != 0;
    }
    if (acc) words[x >> 6] |= std::uint64_t{1} << (x & 63);
  }
  return {TruthTable(hp.n(), std::move(words), arity_cap), std::move(J)};
}

/// D_YES, coloured variant: inside each constrained J-subcube, points of the
/// same colour share one uniform bit.
inline YesSample sample_yes_colored(const HardInstanceParams& hp, const Coloring& chi, Seed seed,
                                    int arity_cap = kDefaultArityCap) {
  detail::check_sampler_arity(hp, arity_cap);
  if (hp.variant != Variant::Colored) throw std::invalid_argument("sample_yes_colored: params are not the colored variant");
  if (chi.ell != hp.ell || chi.d != hp.d || chi.colors.size() != (std::uint64_t{1} << hp.ell))
    throw std::invalid_argument("sample_yes_colored: coloring does not match (ell, d)");
  if (hp.n() - hp.r < hp.ell) throw std::invalid_argument("sample_yes_colored: no room for J");
  VarSet J = choose_subset(seed, hp.r + 1, hp.n(), hp.ell);
  const std::uint64_t jmask = J.mask();
  const CounterRng colour_bits(seed, Stream::kColorBits);
  auto words = detail::fill_regions(hp, seed, [&](std::uint64_t x) {
    const std::uint64_t cofactor = x & ~jmask;
    const std::uint64_t colour = chi.colors[compress_bits(x, jmask)];
    return colour_bits.bit((cofactor << 32) | colour);
  });
  return {TruthTable(hp.n(), std::move(words), arity_cap), std::move(J)};
}

/// F(x) = f(XOR of block 1, ..., XOR of block n) with blocks of b consecutive coordinates.
inline TruthTable xor_lift(const TruthTable& f, int b, int arity_cap = kDefaultArityCap) {
  if (b < 1) throw std::invalid_argument("xor_lift: b must be at least 1");
  const int n = f.arity();
  if (static_cast<long>(n) * b > arity_cap) throw std::length_error("xor_lift: n*b exceeds arity cap");
  const std::uint64_t block = low_mask(b);
  return TruthTable::tabulate(
      n * b,
      [&](std::uint64_t x) {
        std::uint64_t y = 0;
        for (int j = 0; j < n; ++j)
          y |= static_cast<std::uint64_t>(std::popcount((x >> (j * b)) & block) & 1) << j;
        return f[y];
      },
      arity_cap);
}

}  // namespace junta
