#pragma once

// Bit-packed Boolean functions and exact distances to juntas.
//
// Points of {0,1}^n are identified with integers: coordinate j (1-based) of a
// point is bit j-1 of its index. A TruthTable stores f(x) at bit `index(x)`.

#include "junta/rational.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace junta {

inline constexpr int kDefaultArityCap = 22;
/// Largest arity representable by a 64-bit point index.
inline constexpr int kIndexBits = 62;

using BitString = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Bit helpers

inline std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

/// Gathers the bits of x selected by mask into the low bits (pext).
inline std::uint64_t compress_bits(std::uint64_t x, std::uint64_t mask) {
#if defined(__BMI2__)
  return _pext_u64(x, mask);
#else
  std::uint64_t out = 0;
  for (std::uint64_t bit = 1; mask != 0; bit <<= 1) {
    const std::uint64_t lowest = mask & -mask;
    if (x & lowest) out |= bit;
    mask ^= lowest;
  }
  return out;
#endif
}

/// Scatters the low bits of x into the positions selected by mask (pdep).
inline std::uint64_t deposit_bits(std::uint64_t x, std::uint64_t mask) {
#if defined(__BMI2__)
  return _pdep_u64(x, mask);
#else
  std::uint64_t out = 0;
  for (std::uint64_t bit = 1; mask != 0; bit <<= 1) {
    const std::uint64_t lowest = mask & -mask;
    if (x & bit) out |= lowest;
    mask ^= lowest;
  }
  return out;
#endif
}

inline int hamming(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

// ---------------------------------------------------------------------------
// Points

inline BitString point_of_index(std::uint64_t index, int n) {
  if (n < 0 || n > kIndexBits) throw std::out_of_range("point_of_index: arity out of range");
  if (index > low_mask(n)) throw std::out_of_range("point_of_index: index out of range");
  BitString x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) x[j] = static_cast<std::uint8_t>((index >> j) & 1U);
  return x;
}

inline std::uint64_t index_of_point(std::span<const std::uint8_t> x) {
  if (x.size() > static_cast<std::size_t>(kIndexBits))
    throw std::out_of_range("index_of_point: point too long");
  std::uint64_t index = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] > 1) throw std::invalid_argument("index_of_point: entries must be 0 or 1");
    index |= static_cast<std::uint64_t>(x[j]) << j;
  }
  return index;
}

/// "x1 x2 ... xn" without separators, x1 first.
inline std::string to_string(const BitString& x) {
  std::string s;
  s.reserve(x.size());
  for (auto b : x) s.push_back(b ? '1' : '0');
  return s;
}

inline BitString parse_bits(std::string_view s) {
  BitString x;
  x.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("parse_bits: expected 0/1 characters");
    x.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return x;
}

// ---------------------------------------------------------------------------
// VarSet

/// Strictly increasing set of 1-based coordinates.
class VarSet {
 public:
  VarSet() = default;

  explicit VarSet(std::vector<int> indices) : indices_(std::move(indices)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] < 1 || indices_[i] > kIndexBits)
        throw std::out_of_range("VarSet: coordinate out of range");
      if (i > 0 && indices_[i] <= indices_[i - 1])
        throw std::invalid_argument("VarSet: coordinates must be strictly increasing");
    }
  }

  static VarSet from_mask(std::uint64_t mask) {
    std::vector<int> idx;
    for (int j = 0; mask != 0; ++j, mask >>= 1)
      if (mask & 1U) idx.push_back(j + 1);
    return VarSet(std::move(idx));
  }

  /// {first, ..., last}; empty when last < first.
  static VarSet range(int first, int last) {
    std::vector<int> idx;
    for (int j = first; j <= last; ++j) idx.push_back(j);
    return VarSet(std::move(idx));
  }

  const std::vector<int>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int j : indices_) m |= std::uint64_t{1} << (j - 1);
    return m;
  }

  bool contains(int j) const { return std::binary_search(indices_.begin(), indices_.end(), j); }

  void check_within(int n) const {
    if (!indices_.empty() && indices_.back() > n)
      throw std::out_of_range("VarSet: coordinate exceeds arity");
  }

  friend bool operator==(const VarSet&, const VarSet&) = default;

 private:
  std::vector<int> indices_;
};

inline std::string to_string(const VarSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.indices()[i]);
  }
  return out + "}";
}

/// x^{⊕S}: flips the coordinates in S.
inline std::uint64_t flip_on(std::uint64_t x, const VarSet& s) { return x ^ s.mask(); }

inline BitString flip_on(const BitString& x, const VarSet& s) {
  s.check_within(static_cast<int>(x.size()));
  BitString y = x;
  for (int j : s.indices()) y[j - 1] ^= 1U;
  return y;
}

/// Calls fn(indices) for every size-k subset of {first, ..., last} in
/// lexicographic order. Stops early when fn returns false.
template <class Fn>
void for_each_k_subset(int first, int last, int k, Fn&& fn) {
  const int pool = last - first + 1;
  if (k < 0 || k > std::max(pool, 0)) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = first + i;
  while (true) {
    if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const std::vector<int>&>, bool>) {
      if (!fn(static_cast<const std::vector<int>&>(idx))) return;
    } else {
      fn(static_cast<const std::vector<int>&>(idx));
    }
    int i = k - 1;
    while (i >= 0 && idx[i] == last - (k - 1 - i)) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// ---------------------------------------------------------------------------
// TruthTable

class TruthTable {
 public:
  /// Takes ownership of a packed table; bits past 2^arity must be zero.
  TruthTable(int arity, std::vector<std::uint64_t> words, int arity_cap = kDefaultArityCap)
      : arity_(arity), words_(std::move(words)) {
    if (arity < 1) throw std::invalid_argument("TruthTable: arity must be positive");
    if (arity > arity_cap || arity > kIndexBits)
      throw std::length_error("TruthTable: arity " + std::to_string(arity) +
                              " exceeds cap " + std::to_string(arity_cap));
    if (words_.size() != word_count(arity))
      throw std::invalid_argument("TruthTable: wrong payload length");
    if (arity < 6 && (words_[0] & ~low_mask(1 << arity)) != 0)
      throw std::invalid_argument("TruthTable: padding bits set");
  }

  static std::size_t word_count(int arity) {
    return arity <= 6 ? 1 : std::size_t{1} << (arity - 6);
  }

  static TruthTable constant(int arity, bool value, int arity_cap = kDefaultArityCap) {
    std::vector<std::uint64_t> words(word_count(arity), value ? ~std::uint64_t{0} : 0);
    if (arity < 6) words[0] &= low_mask(1 << arity);
    return TruthTable(arity, std::move(words), arity_cap);
  }

  /// Builds f from a predicate on point indices.
  template <class Fn>
  static TruthTable tabulate(int arity, Fn&& fn, int arity_cap = kDefaultArityCap) {
    if (arity < 1 || arity > arity_cap || arity > kIndexBits)
      throw std::length_error("TruthTable: arity out of range");
    std::vector<std::uint64_t> words(word_count(arity), 0);
    const std::uint64_t size = std::uint64_t{1} << arity;
    for (std::uint64_t i = 0; i < size; ++i)
      if (fn(i)) words[i >> 6] |= std::uint64_t{1} << (i & 63);
    return TruthTable(arity, std::move(words), arity_cap);
  }

  int arity() const { return arity_; }
  std::uint64_t size() const { return std::uint64_t{1} << arity_; }
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator[](std::uint64_t index) const { return (words_[index >> 6] >> (index & 63)) & 1U; }

  bool at(std::uint64_t index) const {
    if (index >= size()) throw std::out_of_range("TruthTable::at: index out of range");
    return (*this)[index];
  }

  bool at(const BitString& x) const {
    if (x.size() != static_cast<std::size_t>(arity_))
      throw std::invalid_argument("TruthTable::at: point length mismatch");
    return (*this)[index_of_point(x)];
  }

  std::uint64_t count_ones() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  int arity_;
  std::vector<std::uint64_t> words_;
};

// ---------------------------------------------------------------------------
// Distances

/// Number of ones of f inside each cofactor over S. Entry ρ is indexed by the
/// compressed assignment to S (bit t of ρ is coordinate S[t]).
inline std::vector<std::uint64_t> cofactor_ones(const TruthTable& f, const VarSet& s) {
  s.check_within(f.arity());
  const std::uint64_t smask = s.mask();
  const std::uint64_t low_s = smask & 63U;
  const std::uint64_t high_s = smask & ~std::uint64_t{63};
  const int low_count = std::popcount(low_s);
  std::vector<std::uint64_t> ones(std::size_t{1} << s.size(), 0);

  // Within one word the in-word index supplies coordinates 1..6; split the
  // word into one bit-mask per assignment to the low part of S.
  const int in_word_bits = std::min(f.arity(), 6);
  const std::uint64_t valid = low_mask(1 << in_word_bits);
  std::vector<std::uint64_t> group(std::size_t{1} << low_count, 0);
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << in_word_bits); ++i)
    group[compress_bits(i, low_s)] |= std::uint64_t{1} << i;
  for (auto& g : group) g &= valid;

  const auto words = f.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::uint64_t word = words[w];
    if (word == 0) continue;
    const std::uint64_t high = compress_bits(static_cast<std::uint64_t>(w) << 6, high_s) << low_count;
    for (std::size_t g = 0; g < group.size(); ++g)
      ones[high | g] += static_cast<std::uint64_t>(std::popcount(word & group[g]));
  }
  return ones;
}

/// Minority count per cofactor: min(#ones, #zeros). Tie-break free.
inline std::vector<std::uint64_t> cofactor_minorities(const TruthTable& f, const VarSet& s) {
  auto counts = cofactor_ones(f, s);
  const std::uint64_t cell = std::uint64_t{1} << (f.arity() - static_cast<int>(s.size()));
  for (auto& c : counts) c = std::min(c, cell - c);
  return counts;
}

struct DistanceReport {
  Rational distance;
  std::optional<VarSet> witness;
  std::vector<std::uint64_t> per_cofactor_minorities;
};

inline Rational dist_to_constants(const TruthTable& f) {
  const std::uint64_t ones = f.count_ones();
  return ratio(std::min(ones, f.size() - ones), f.size());
}

inline DistanceReport junta_distance_report(const TruthTable& f, const VarSet& s) {
  DistanceReport report;
  report.per_cofactor_minorities = cofactor_minorities(f, s);
  std::uint64_t total = 0;
  for (auto m : report.per_cofactor_minorities) total += m;
  report.distance = ratio(total, f.size());
  report.witness = s;
  return report;
}

/// dist(f, J_S): fraction of points that must change to make f depend only on S.
inline Rational dist_to_junta_on(const TruthTable& f, const VarSet& s) {
  std::uint64_t total = 0;
  for (auto m : cofactor_minorities(f, s)) total += m;
  return ratio(total, f.size());
}

/// dist(f, J_k), minimised over all size-k sets in lexicographic order; the
/// first minimiser found is reported as the witness.
inline DistanceReport dist_to_k_juntas(const TruthTable& f, int k) {
  const int n = f.arity();
  if (k < 0 || k > n) throw std::out_of_range("dist_to_k_juntas: k out of range");
  std::uint64_t best = ~std::uint64_t{0};
  std::vector<int> best_set;
  for_each_k_subset(1, n, k, [&](const std::vector<int>& idx) {
    std::uint64_t total = 0;
    for (auto m : cofactor_minorities(f, VarSet(idx))) total += m;
    if (total < best) {
      best = total;
      best_set = idx;
    }
    return best != 0;
  });
  return junta_distance_report(f, VarSet(best_set));
}

// ---------------------------------------------------------------------------
// Common functions

inline TruthTable parity_function(int n, std::uint64_t on_mask) {
  return TruthTable::tabulate(n, [&](std::uint64_t x) { return (std::popcount(x & on_mask) & 1) != 0; });
}

inline TruthTable dictator(int n, int coordinate) {
  if (coordinate < 1 || coordinate > n) throw std::out_of_range("dictator: coordinate out of range");
  return TruthTable::tabulate(n, [&](std::uint64_t x) { return ((x >> (coordinate - 1)) & 1U) != 0; });
}

inline TruthTable and_function(int n) {
  return TruthTable::tabulate(n, [&](std::uint64_t x) { return x == low_mask(n); });
}

/// g(x) = f(y) with y_{perm[j]} = x_j (coordinates 1-based, perm a bijection of [n]).
inline TruthTable permute_coordinates(const TruthTable& f, const std::vector<int>& perm) {
  const int n = f.arity();
  if (perm.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("permute: size mismatch");
  return TruthTable::tabulate(n, [&](std::uint64_t x) {
    std::uint64_t y = 0;
    for (int j = 0; j < n; ++j)
      if ((x >> j) & 1U) y |= std::uint64_t{1} << (perm[j] - 1);
    return f[y];
  });
}

// ---------------------------------------------------------------------------
// Text format: "n=<arity>\n<hex>\n", ceil(2^n/4) hex digits, bit 4j+b of the
// table is bit b of digit j.

namespace detail {

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

inline std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
  return s.substr(start);
}

/// Hex-encodes `bit_count` bits supplied by get(i).
template <class Get>
std::string encode_hex(std::uint64_t bit_count, Get&& get) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out((bit_count + 3) / 4, '0');
  for (std::uint64_t i = 0; i < bit_count; ++i)
    if (get(i)) out[i / 4] = kDigits[hex_value(out[i / 4]) | (1 << (i % 4))];
  return out;
}

/// Decodes hex into a bit vector of exactly `bit_count` bits; rejects wrong
/// lengths and set padding bits.
inline std::vector<std::uint64_t> decode_hex(const std::string& hex, std::uint64_t bit_count) {
  if (hex.size() != (bit_count + 3) / 4)
    throw std::invalid_argument("hex payload has " + std::to_string(hex.size()) + " digits, expected " +
                                std::to_string((bit_count + 3) / 4));
  std::vector<std::uint64_t> words((bit_count + 63) / 64, 0);
  for (std::size_t j = 0; j < hex.size(); ++j) {
    const int v = hex_value(hex[j]);
    if (v < 0) throw std::invalid_argument("hex payload has a non-hex character");
    for (int b = 0; b < 4; ++b) {
      if (!((v >> b) & 1)) continue;
      const std::uint64_t i = 4 * j + static_cast<std::uint64_t>(b);
      if (i >= bit_count) throw std::invalid_argument("hex payload has padding bits set");
      words[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
  }
  return words;
}

inline long parse_header(const std::string& line, const std::string& key) {
  const std::string prefix = key + "=";
  if (line.rfind(prefix, 0) != 0) throw std::invalid_argument("expected '" + prefix + "' header");
  const std::string value = line.substr(prefix.size());
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed '" + key + "' header");
  }
  if (used != value.size()) throw std::invalid_argument("malformed '" + key + "' header");
  return v;
}

}  // namespace detail

inline void write_truth_table(std::ostream& out, const TruthTable& f) {
  out << "n=" << f.arity() << "\n" << detail::encode_hex(f.size(), [&](std::uint64_t i) { return f[i]; })
      << "\n";
}

inline TruthTable read_truth_table(std::istream& in, int arity_cap = kDefaultArityCap) {
  std::string header, payload;
  if (!std::getline(in, header)) throw std::invalid_argument("truth table: missing header");
  const long n = detail::parse_header(detail::trim(header), "n");
  if (n < 1 || n > arity_cap) throw std::length_error("truth table: arity out of range");
  if (!std::getline(in, payload)) throw std::invalid_argument("truth table: missing payload");
  const int arity = static_cast<int>(n);
  auto words = detail::decode_hex(detail::trim(payload), std::uint64_t{1} << arity);
  words.resize(TruthTable::word_count(arity), 0);
  return TruthTable(arity, std::move(words), arity_cap);
}

inline std::string truth_table_text(const TruthTable& f) {
  std::ostringstream os;
  write_truth_table(os, f);
  return os.str();
}

inline TruthTable parse_truth_table(const std::string& text, int arity_cap = kDefaultArityCap) {
  std::istringstream is(text);
  return read_truth_table(is, arity_cap);
}

}  // namespace junta
