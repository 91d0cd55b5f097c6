#pragma once

// Requestor revenue per case. The stock family weighs the squared task count
// by the total quality delivered in the case; the custom family is a per-case
// polynomial in the task count with non-negative coefficients.

#include <stdexcept>
#include <utility>
#include <vector>

#include "mechproof/model.hpp"
#include "mechproof/scalar.hpp"

namespace mechproof {

enum class RevenueFamily { quadratic_quality_weighted, custom };

template <class T>
class RevenueModel {
 public:
  /// R_j = ((m+1-j) x_high + (j-1) x_low) * n_j^2.
  static RevenueModel quadratic_quality_weighted() {
    return RevenueModel(RevenueFamily::quadratic_quality_weighted, {});
  }

  /// R_j = sum_k coeffs[j-1][k] * n_j^k, one coefficient row per case.
  /// Coefficients must be non-negative so R_j >= 0 on the whole domain.
  static RevenueModel custom(std::vector<std::vector<T>> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("custom revenue needs coefficient rows");
    for (const auto& row : coeffs) {
      for (const auto& c : row) {
        if (c < T(0)) {
          throw std::invalid_argument("custom revenue coefficients must be non-negative");
        }
      }
    }
    return RevenueModel(RevenueFamily::custom, std::move(coeffs));
  }

  RevenueFamily family() const { return family_; }
  const std::vector<std::vector<T>>& coefficients() const { return coeffs_; }

  void validate_for(const QualityProfile<T>& profile) const {
    if (family_ == RevenueFamily::custom &&
        coeffs_.size() != static_cast<std::size_t>(profile.case_count())) {
      throw std::invalid_argument("custom revenue needs exactly m+1 coefficient rows");
    }
  }

  T value(const QualityProfile<T>& profile, int case_j, long n_j) const {
    if (case_j < 1 || case_j > profile.case_count()) {
      throw std::out_of_range("case index out of range");
    }
    const T n = ScalarOps<T>::from_int(n_j);
    if (family_ == RevenueFamily::quadratic_quality_weighted) {
      const T mix = ScalarOps<T>::from_int(profile.m + 1 - case_j) * profile.x_high +
                    ScalarOps<T>::from_int(case_j - 1) * profile.x_low;
      return mix * n * n;
    }
    validate_for(profile);
    const auto& row = coeffs_[static_cast<std::size_t>(case_j - 1)];
    T acc = T(0);
    T power = T(1);
    for (const auto& c : row) {
      acc += c * power;
      power *= n;
    }
    return acc;
  }

 private:
  RevenueModel(RevenueFamily family, std::vector<std::vector<T>> coeffs)
      : family_(family), coeffs_(std::move(coeffs)) {}

  RevenueFamily family_;
  std::vector<std::vector<T>> coeffs_;
};

}  // namespace mechproof
