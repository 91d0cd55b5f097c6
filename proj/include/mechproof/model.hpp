#pragma once

// Worker-type model: the two-point quality distribution, the induced case
// probabilities, and the per-type case weights that drive every constraint.

#include <stdexcept>
#include <vector>

#include "mechproof/scalar.hpp"

namespace mechproof {

enum class Quality { high, low };

/// Two-type worker population. Case X_j (j in 1..m+1) is the outcome where
/// exactly m+1-j of the m workers are high-quality.
template <class T>
struct QualityProfile {
  int m = 2;   ///< worker count, 2..15
  T p{};       ///< probability a worker is high-quality, open interval (0,1)
  T x_high{};  ///< high task quality
  T x_low{};   ///< low task quality, 0 < x_low < x_high

  int case_count() const { return m + 1; }

  void validate() const {
    if (m < 2 || m > 15) {
      throw std::invalid_argument("worker count m must be in [2, 15]");
    }
    if (!(p > T(0) && p < T(1))) {
      throw std::invalid_argument("p must lie in the open interval (0, 1)");
    }
    if (!(x_low > T(0))) {
      throw std::invalid_argument("x_low must be positive");
    }
    if (!(x_high > x_low)) {
      throw std::invalid_argument("x_high must be strictly greater than x_low");
    }
  }

  const T& quality(Quality q) const { return q == Quality::high ? x_high : x_low; }
};

/// Probabilities of the m+1 cases; probs[j-1] belongs to case X_j.
template <class T>
struct CaseDistribution {
  std::vector<T> probs;
  int m = 0;
};

/// probs[j-1] = C(m, m+1-j) * p^(m+1-j) * (1-p)^(j-1).
template <class T>
CaseDistribution<T> case_probabilities(const QualityProfile<T>& profile) {
  profile.validate();
  const int m = profile.m;
  const T q = T(1) - profile.p;
  CaseDistribution<T> dist;
  dist.m = m;
  dist.probs.reserve(m + 1);
  for (int j = 1; j <= m + 1; ++j) {
    const int highs = m + 1 - j;
    dist.probs.push_back(binomial<T>(m, highs) * pow_int(profile.p, highs) *
                         pow_int(q, m - highs));
  }
  return dist;
}

/// Joint probabilities P(worker has the given type AND case X_i occurs).
/// Both vectors are full length m+1; high[m] and low[0] are structurally
/// zero because a high worker never sees the all-low case and vice versa.
template <class T>
struct TypeWeights {
  std::vector<T> high;
  std::vector<T> low;
};

template <class T>
TypeWeights<T> type_weights(const QualityProfile<T>& profile) {
  profile.validate();
  const int m = profile.m;
  const T q = T(1) - profile.p;
  TypeWeights<T> w;
  w.high.assign(m + 1, T(0));
  w.low.assign(m + 1, T(0));
  for (int i = 1; i <= m; ++i) {
    // m-i of the other m-1 workers high, plus this worker high.
    w.high[i - 1] =
        binomial<T>(m - 1, m - i) * pow_int(profile.p, m + 1 - i) * pow_int(q, i - 1);
  }
  for (int i = 2; i <= m + 1; ++i) {
    // m+1-i of the other m-1 workers high, this worker low.
    w.low[i - 1] =
        binomial<T>(m - 1, m + 1 - i) * pow_int(profile.p, m + 1 - i) * pow_int(q, i - 1);
  }
  return w;
}

}  // namespace mechproof
