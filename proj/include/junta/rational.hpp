#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace junta {

/// Exact arbitrary-precision rational; always kept in canonical form.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, unsigned long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Integer pow2(unsigned long e) {
  Integer z;
  mpz_ui_pow_ui(z.get_mpz_t(), 2, e);
  return z;
}

/// 2^-e as an exact rational.
inline Rational pow2_inv(unsigned long e) {
  Rational q(Integer(1), pow2(e));
  return q;
}

inline Rational ratio(const Integer& num, const Integer& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational ratio(std::uint64_t num, std::uint64_t den) {
  return ratio(Integer(static_cast<unsigned long>(num)), Integer(static_cast<unsigned long>(den)));
}

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer z;
  if (k > n) return z;
  mpz_bin_uiui(z.get_mpz_t(), n, k);
  return z;
}

/// Serialized form "num/den"; integers keep the "/1".
inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Floor of a rational as a signed 64-bit value.
inline long floor_of(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (!f.fits_slong_p()) throw std::overflow_error("floor_of: value out of range");
  return f.get_si();
}

/// Parses "a/b", an integer, or a finite decimal such as "0.49" or "1e-3"
/// into the exact rational it denotes.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
      throw std::invalid_argument("malformed rational: " + s);
    if (den == 0) throw std::invalid_argument("zero denominator: " + s);
    return ratio(num, den);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(e + 1), &used);
      if (used != s.size() - e - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed exponent: " + s);
    }
    s = s.substr(0, e);
  }
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s = s.substr(1);
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("malformed decimal: " + std::string(text));
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw std::invalid_argument("malformed decimal: " + std::string(text));
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed decimal: " + std::string(text));
  Integer num(digits, 10);
  if (negative) num = -num;
  long scale = exponent - frac_digits;
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  return scale >= 0 ? ratio(num * ten_pow, Integer(1)) : ratio(num, ten_pow);
}

}  // namespace junta
