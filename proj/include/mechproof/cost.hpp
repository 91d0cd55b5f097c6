#pragma once

// Task-count cost families. Total working cost is F(n, x) = f(n) * x with f
// non-negative, non-decreasing and midpoint-convex on the non-negative reals.
// Collusion analysis evaluates f at fractional points (equal task splits), so
// besides value() there is an exact comparison primitive that decides
// sign(f(x) - q) even where the value itself is irrational in exact mode
// (2^x - 1 at fractional x).

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mechproof/scalar.hpp"

namespace mechproof {

enum class CostFamily { exp2_minus_one, power, table };

template <class T>
class CostModel {
 public:
  /// f(x) = 2^x - 1.
  static CostModel exp2_minus_one() { return CostModel(CostFamily::exp2_minus_one, 0, {}); }

  /// f(x) = x^e with integer exponent e >= 1 (e = 1 is weakly convex).
  static CostModel power(int exponent) {
    if (exponent < 1) throw std::invalid_argument("power cost exponent must be >= 1");
    return CostModel(CostFamily::power, exponent, {});
  }

  /// Piecewise-linear interpolation of values at integer points 0..N.
  /// The table must be non-negative, non-decreasing and discretely convex.
  static CostModel table(std::vector<T> values) {
    if (values.size() < 2) throw std::invalid_argument("cost table needs at least two points");
    if (values[0] < T(0)) throw std::invalid_argument("cost table must start non-negative");
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] < values[i - 1]) {
        throw std::invalid_argument("cost table must be non-decreasing");
      }
    }
    for (std::size_t i = 2; i < values.size(); ++i) {
      if (values[i] - values[i - 1] < values[i - 1] - values[i - 2]) {
        throw std::invalid_argument("cost table must be convex (non-decreasing increments)");
      }
    }
    return CostModel(CostFamily::table, 0, std::move(values));
  }

  CostFamily family() const { return family_; }
  int exponent() const { return exponent_; }
  const std::vector<T>& table_values() const { return table_; }

  /// Largest argument the model can evaluate (unbounded families report a
  /// generous cap used only for input validation).
  long max_argument() const {
    if (family_ == CostFamily::table) return static_cast<long>(table_.size()) - 1;
    return 1 << 20;
  }

  T value(const T& x) const {
    require_domain(x);
    switch (family_) {
      case CostFamily::exp2_minus_one:
        return exp2_value(x);
      case CostFamily::power:
        return pow_int(x, static_cast<unsigned long>(exponent_));
      case CostFamily::table:
        return table_value(x);
    }
    throw std::logic_error("unknown cost family");
  }

  T value_at(long n) const { return value(ScalarOps<T>::from_int(n)); }

  /// sign(f(x) - rhs); exact in rational mode even at fractional x where the
  /// value itself cannot be represented.
  int compare_value(const T& x, const T& rhs) const {
    require_domain(x);
    if (family_ == CostFamily::exp2_minus_one) return exp2_compare(x, rhs);
    return ScalarOps<T>::sign(value(x) - rhs);
  }

 private:
  CostModel(CostFamily family, int exponent, std::vector<T> table)
      : family_(family), exponent_(exponent), table_(std::move(table)) {}

  void require_domain(const T& x) const {
    if (x < T(0)) throw std::domain_error("cost function argument must be non-negative");
    if (family_ == CostFamily::table && x > T(static_cast<long>(table_.size()) - 1)) {
      throw std::domain_error("cost table does not cover argument " +
                              std::to_string(ScalarOps<T>::to_double(x)));
    }
  }

  T exp2_value(const T& x) const {
    if constexpr (ScalarOps<T>::is_exact) {
      const BigInt num = boost::multiprecision::numerator(x);
      const BigInt den = boost::multiprecision::denominator(x);
      if (den != 1) {
        throw std::domain_error(
            "exp2_minus_one is irrational at fractional arguments; use compare_value");
      }
      if (num > (1 << 20)) throw std::domain_error("exp2_minus_one argument too large");
      BigInt v = BigInt(1) << num.convert_to<unsigned>();
      return T(v - 1);
    } else {
      return std::exp2(x) - 1.0;
    }
  }

  // Decide sign(2^(a/b) - (rhs+1)) by raising both sides to the b-th power.
  int exp2_compare(const T& x, const T& rhs) const {
    if constexpr (ScalarOps<T>::is_exact) {
      const T s = rhs + T(1);
      if (s <= T(0)) return 1;  // 2^x > 0 >= s
      const BigInt a = boost::multiprecision::numerator(x);
      const BigInt b = boost::multiprecision::denominator(x);
      if (a > (1 << 20)) throw std::domain_error("exp2_minus_one argument too large");
      if (b > 1000) {
        throw std::domain_error("exp2_minus_one comparison needs a small-denominator argument");
      }
      const unsigned ia = a.convert_to<unsigned>();
      const unsigned ib = b.convert_to<unsigned>();
      const BigInt lhs_num = BigInt(1) << ia;  // 2^a
      const BigInt s_num = boost::multiprecision::numerator(s);
      const BigInt s_den = boost::multiprecision::denominator(s);
      // 2^a * s_den^b  vs  s_num^b
      const BigInt lhs = lhs_num * boost::multiprecision::pow(s_den, ib);
      const BigInt rhs_pow = boost::multiprecision::pow(s_num, ib);
      if (lhs > rhs_pow) return 1;
      if (lhs < rhs_pow) return -1;
      return 0;
    } else {
      return ScalarOps<T>::sign(std::exp2(x) - 1.0 - rhs);
    }
  }

  T table_value(const T& x) const {
    const long k = ScalarOps<T>::floor_to_long(x);
    const T frac = x - ScalarOps<T>::from_int(k);
    const auto idx = static_cast<std::size_t>(k);
    if (idx + 1 >= table_.size()) return table_.back();
    return table_[idx] + frac * (table_[idx + 1] - table_[idx]);
  }

  CostFamily family_;
  int exponent_;
  std::vector<T> table_;
};

}  // namespace mechproof
