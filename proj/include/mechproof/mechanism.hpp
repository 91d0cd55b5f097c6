#pragma once

// A designed contract (task counts + extra rewards per case) together with
// the expected-utility arithmetic shared by the constraint builder, the
// optimizer and the experiment harness.

#include <stdexcept>
#include <vector>

#include "mechproof/cost.hpp"
#include "mechproof/model.hpp"
#include "mechproof/revenue.hpp"
#include "mechproof/scalar.hpp"

namespace mechproof {

/// Cost charged to a low-quality worker who claims to be high-quality:
/// either the cost of his own quality level or of the claimed one.
enum class LowDeviationCost { own_type, claimed_type };

template <class T>
struct Mechanism {
  std::vector<long> n;  ///< task counts per case, all >= 1
  std::vector<T> t;     ///< extra rewards per case, sign-unrestricted
  QualityProfile<T> profile;
  CostModel<T> cost = CostModel<T>::exp2_minus_one();
  RevenueModel<T> revenue = RevenueModel<T>::quadratic_quality_weighted();

  void validate() const {
    profile.validate();
    const auto cases = static_cast<std::size_t>(profile.case_count());
    if (n.size() != cases || t.size() != cases) {
      throw std::invalid_argument("mechanism needs exactly m+1 task counts and rewards");
    }
    for (long v : n) {
      if (v < 1) throw std::invalid_argument("task counts must be positive integers");
    }
  }
};

/// Payment to one worker in case X_j when his claimed quality is q.
template <class T>
T payment(const Mechanism<T>& mech, int case_j, Quality q) {
  if (case_j < 1 || case_j > mech.profile.case_count()) {
    throw std::out_of_range("case index out of range");
  }
  const std::size_t idx = static_cast<std::size_t>(case_j - 1);
  return ScalarOps<T>::from_int(mech.n[idx]) * mech.profile.quality(q) + mech.t[idx];
}

/// Expected requestor utility under honest reporting:
/// sum_j p_j (R_j - n_j ((m+1-j) x_high + (j-1) x_low) - m t_j).
template <class T>
T requestor_expected_utility(const Mechanism<T>& mech) {
  mech.validate();
  const auto& prof = mech.profile;
  const auto dist = case_probabilities(prof);
  T total = T(0);
  for (int j = 1; j <= prof.case_count(); ++j) {
    const std::size_t idx = static_cast<std::size_t>(j - 1);
    const T task_pay = ScalarOps<T>::from_int(mech.n[idx]) *
                       (ScalarOps<T>::from_int(prof.m + 1 - j) * prof.x_high +
                        ScalarOps<T>::from_int(j - 1) * prof.x_low);
    const T pay = task_pay + ScalarOps<T>::from_int(prof.m) * mech.t[idx];
    total += dist.probs[idx] * (mech.revenue.value(prof, j, mech.n[idx]) - pay);
  }
  return total;
}

/// Expected utility of one worker of the given type under the given report,
/// evaluated against an explicit profile (which may differ from the one the
/// mechanism was designed for, e.g. when sweeping p).
template <class T>
T worker_expected_utility(const QualityProfile<T>& profile, const Mechanism<T>& mech,
                          Quality own, Quality report,
                          LowDeviationCost low_dev = LowDeviationCost::own_type) {
  profile.validate();
  const int m = profile.m;
  if (mech.n.size() != static_cast<std::size_t>(m + 1)) {
    throw std::invalid_argument("mechanism dimensions do not match profile");
  }
  const auto w = type_weights(profile);
  T total = T(0);
  if (own == Quality::high) {
    for (int i = 1; i <= m; ++i) {
      // Reporting low shifts the requestor's view of case X_i to X_{i+1}.
      const int j = report == Quality::high ? i : i + 1;
      const std::size_t idx = static_cast<std::size_t>(j - 1);
      const T pay = ScalarOps<T>::from_int(mech.n[idx]) * profile.quality(report) + mech.t[idx];
      const T work = mech.cost.value_at(mech.n[idx]) * profile.x_high;
      total += w.high[static_cast<std::size_t>(i - 1)] * (pay - work);
    }
  } else {
    for (int i = 2; i <= m + 1; ++i) {
      const int j = report == Quality::low ? i : i - 1;
      const std::size_t idx = static_cast<std::size_t>(j - 1);
      const T pay = ScalarOps<T>::from_int(mech.n[idx]) * profile.quality(report) + mech.t[idx];
      const T cost_quality = (report == Quality::low || low_dev == LowDeviationCost::own_type)
                                 ? profile.x_low
                                 : profile.x_high;
      const T work = mech.cost.value_at(mech.n[idx]) * cost_quality;
      total += w.low[static_cast<std::size_t>(i - 1)] * (pay - work);
    }
  }
  return total;
}

}  // namespace mechproof
