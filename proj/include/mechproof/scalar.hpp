#pragma once

// Numeric policy shared by every mechproof component. All model code is
// templated on a scalar type T; two instantiations are supported:
//
//   double            fast mode; every comparison uses the global tolerance
//                     kEpsilon below
//   mechproof::Rational  exact mode (arbitrary-precision rationals); algebraic
//                     comparisons are exact, verdict thresholds still use
//                     kEpsilon so both modes share one pass/fail policy

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mechproof {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Global comparison tolerance. Float-mode comparisons treat |a-b| <= kEpsilon
/// as equal; exact mode uses true signs for algebra and this threshold only
/// for pass/fail verdicts.
inline constexpr double kEpsilon = 1e-9;

template <class T>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static constexpr bool is_exact = false;
  static double from_double(double v) { return v; }
  static double from_int(long v) { return static_cast<double>(v); }
  static double to_double(double v) { return v; }
  /// Sign of v with the global tolerance collapsed to zero.
  static int sign(double v) {
    if (v > kEpsilon) return 1;
    if (v < -kEpsilon) return -1;
    return 0;
  }
  static long floor_to_long(double v) { return static_cast<long>(std::floor(v)); }
};

template <>
struct ScalarOps<Rational> {
  static constexpr bool is_exact = true;
  static Rational from_double(double v) { return Rational(v); }  // exact dyadic value
  static Rational from_int(long v) { return Rational(v); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static int sign(const Rational& v) { return v.sign(); }
  static long floor_to_long(const Rational& v) {
    BigInt num = boost::multiprecision::numerator(v);
    BigInt den = boost::multiprecision::denominator(v);
    BigInt q = num / den;
    if (num < 0 && q * den != num) --q;
    return q.convert_to<long>();
  }
};

template <class T>
T scalar_epsilon() {
  return ScalarOps<T>::from_double(kEpsilon);
}

/// a <= b up to the verdict tolerance.
template <class T>
bool tol_leq(const T& a, const T& b) {
  return a <= b + scalar_epsilon<T>();
}

template <class T>
bool tol_nonneg(const T& a) {
  return a >= -scalar_epsilon<T>();
}

template <class T>
T pow_int(T base, unsigned long exp) {
  T result = ScalarOps<T>::from_int(1);
  while (exp > 0) {
    if (exp & 1u) result *= base;
    base *= base;
    exp >>= 1u;
  }
  return result;
}

/// Binomial coefficient as a scalar. Arguments stay tiny (worker counts), so
/// 64-bit intermediate arithmetic is plenty.
template <class T>
T binomial(int n, int k) {
  if (k < 0 || k > n) return ScalarOps<T>::from_int(0);
  if (k > n - k) k = n - k;
  unsigned long long acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
  }
  return ScalarOps<T>::from_int(static_cast<long>(acc));
}

/// Shortest round-trip decimal form; keeps CSV/JSON output byte-deterministic.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

}  // namespace mechproof
