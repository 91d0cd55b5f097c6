#pragma once

// Brute-force verifier. Deliberately re-derives every quantity from first
// principles - misreport gains by enumerating the other workers' type
// vectors, collusion gains by enumerating task splits - so a bug in the
// closed-form weights or constraint rows cannot certify itself.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechproof/constraints.hpp"
#include "mechproof/lp.hpp"
#include "mechproof/mechanism.hpp"
#include "mechproof/scalar.hpp"

namespace mechproof {

enum class CollusionCoverage { exhaustive, bounded_sampled, full_offload_only };

inline const char* to_string(CollusionCoverage c) {
  switch (c) {
    case CollusionCoverage::exhaustive: return "exhaustive";
    case CollusionCoverage::bounded_sampled: return "bounded+sampled";
    case CollusionCoverage::full_offload_only: return "full_offload_only";
  }
  return "?";
}

template <class T>
struct CollusionFinding {
  int case_index = 0;       ///< mixed case X_{case_index}
  std::vector<long> split;  ///< offloads per high worker, then extra loads per low worker
  T gain{};                 ///< coalition utility gain; > 0 means collusion profits
};

template <class T>
struct DeviationReport {
  T misreport_high{};       ///< gain of the high->low lie
  T misreport_low{};        ///< gain of the low->high lie
  T participation_high{};   ///< honest expected utility, high type
  T participation_low{};    ///< honest expected utility, low type
  std::vector<CollusionFinding<T>> collusion;  ///< best split per mixed case
  CollusionCoverage coverage = CollusionCoverage::exhaustive;
  bool bound_ok = true;     ///< full-offload bound verdict (sampled coverage)
  bool pass = false;
  T worst_gain{};
};

template <class T>
struct VerifyOptions {
  LowDeviationCost low_deviation_cost = LowDeviationCost::own_type;
  CollusionCheck collusion_check = CollusionCheck::exhaustive;
  std::uint64_t sample_seed = 20240915;  ///< split sampling for m > 3
  int samples = 10000;
};

namespace detail {

/// Expected utility of one worker of the given type sending the given
/// report, by direct enumeration of the other m-1 workers' types.
template <class T>
T enumerated_worker_utility(const QualityProfile<T>& profile, const Mechanism<T>& mech,
                            Quality own, Quality report, LowDeviationCost low_dev) {
  const int others = profile.m - 1;
  const T own_weight = own == Quality::high ? profile.p : T(1) - profile.p;
  T total = T(0);
  for (unsigned mask = 0; mask < (1u << others); ++mask) {
    int low_others = 0;
    T weight = own_weight;
    for (int b = 0; b < others; ++b) {
      if (mask & (1u << b)) {
        ++low_others;
        weight *= T(1) - profile.p;
      } else {
        weight *= profile.p;
      }
    }
    const int case_j = 1 + low_others + (report == Quality::low ? 1 : 0);
    const std::size_t idx = static_cast<std::size_t>(case_j - 1);
    const T pay =
        ScalarOps<T>::from_int(mech.n[idx]) * profile.quality(report) + mech.t[idx];
    T cost_quality = profile.quality(own);
    if (own == Quality::low && report == Quality::high &&
        low_dev == LowDeviationCost::claimed_type) {
      cost_quality = profile.x_high;
    }
    total += weight * (pay - mech.cost.value_at(mech.n[idx]) * cost_quality);
  }
  return total;
}

template <class T>
T split_cost(const QualityProfile<T>& profile, const CostModel<T>& cost, long v,
             const std::vector<long>& offloads, const std::vector<long>& extras) {
  T acc = T(0);
  for (long k : offloads) acc += cost.value_at(v - k) * profile.x_high;
  for (long a : extras) acc += cost.value_at(v + a) * profile.x_low;
  return acc;
}

}  // namespace detail

/// Requestor utility re-derived by enumerating all 2^m type vectors.
template <class T>
T enumerated_requestor_utility(const Mechanism<T>& mech) {
  mech.validate();
  const auto& prof = mech.profile;
  T total = T(0);
  for (unsigned mask = 0; mask < (1u << prof.m); ++mask) {
    int lows = 0;
    T weight = T(1);
    for (int b = 0; b < prof.m; ++b) {
      if (mask & (1u << b)) {
        ++lows;
        weight *= T(1) - prof.p;
      } else {
        weight *= prof.p;
      }
    }
    const int case_j = 1 + lows;
    const std::size_t idx = static_cast<std::size_t>(case_j - 1);
    T pay = T(0);
    for (int b = 0; b < prof.m; ++b) {
      const Quality q = (mask & (1u << b)) ? Quality::low : Quality::high;
      pay += ScalarOps<T>::from_int(mech.n[idx]) * prof.quality(q) + mech.t[idx];
    }
    total += weight * (mech.revenue.value(prof, case_j, mech.n[idx]) - pay);
  }
  return total;
}

template <class T>
DeviationReport<T> verify(const QualityProfile<T>& profile, const CostModel<T>& cost,
                          const Mechanism<T>& mech, const VerifyOptions<T>& options = {}) {
  profile.validate();
  if (mech.n.size() != static_cast<std::size_t>(profile.case_count()) ||
      mech.t.size() != mech.n.size()) {
    throw std::invalid_argument("mechanism dimensions do not match profile");
  }
  for (long v : mech.n) {
    if (v < 1) throw std::invalid_argument("task counts must be positive integers");
  }
  Mechanism<T> local = mech;
  local.profile = profile;
  local.cost = cost;

  DeviationReport<T> report;
  const T honest_high = detail::enumerated_worker_utility(profile, local, Quality::high,
                                                          Quality::high,
                                                          options.low_deviation_cost);
  const T lying_high = detail::enumerated_worker_utility(profile, local, Quality::high,
                                                         Quality::low,
                                                         options.low_deviation_cost);
  const T honest_low = detail::enumerated_worker_utility(profile, local, Quality::low,
                                                         Quality::low,
                                                         options.low_deviation_cost);
  const T lying_low = detail::enumerated_worker_utility(profile, local, Quality::low,
                                                        Quality::high,
                                                        options.low_deviation_cost);
  report.participation_high = honest_high;
  report.participation_low = honest_low;
  report.misreport_high = lying_high - honest_high;
  report.misreport_low = lying_low - honest_low;

  const bool sampled = profile.m > 3 && options.collusion_check == CollusionCheck::exhaustive;
  if (options.collusion_check == CollusionCheck::closed_form) {
    report.coverage = CollusionCoverage::full_offload_only;
  } else {
    report.coverage =
        sampled ? CollusionCoverage::bounded_sampled : CollusionCoverage::exhaustive;
  }

  std::mt19937_64 rng(options.sample_seed);
  for (int i = 1; i < profile.m; ++i) {
    const int h = profile.m - i;
    const int l = i;
    const long v = mech.n[static_cast<std::size_t>(i)];
    const T honest_cost = ScalarOps<T>::from_int(h) * cost.value_at(v) * profile.x_high +
                          ScalarOps<T>::from_int(l) * cost.value_at(v) * profile.x_low;
    CollusionFinding<T> finding;
    finding.case_index = i + 1;
    finding.split.assign(static_cast<std::size_t>(h + l), 0);
    finding.gain = T(0);
    auto consider = [&](const std::vector<long>& offloads, const std::vector<long>& extras) {
      const T gain = honest_cost - detail::split_cost(profile, cost, v, offloads, extras);
      if (gain > finding.gain) {
        finding.gain = gain;
        finding.split = offloads;
        finding.split.insert(finding.split.end(), extras.begin(), extras.end());
      }
    };
    if (options.collusion_check == CollusionCheck::closed_form) {
      const auto split = full_offload_split(profile.m, i, v);
      consider(std::vector<long>(split.begin(), split.begin() + h),
               std::vector<long>(split.begin() + h, split.end()));
    } else if (!sampled) {
      // Full enumeration: every offload vector, every ordered distribution of
      // the pooled tasks among the low workers (l is 1 or 2 when m <= 3).
      std::vector<long> offloads(static_cast<std::size_t>(h), 0);
      while (true) {
        long pool = 0;
        for (long k : offloads) pool += k;
        if (l == 1) {
          consider(offloads, {pool});
        } else {
          for (long a = 0; a <= pool; ++a) consider(offloads, {a, pool - a});
        }
        int pos = h - 1;
        while (pos >= 0 && offloads[static_cast<std::size_t>(pos)] == v) {
          offloads[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
        ++offloads[static_cast<std::size_t>(pos)];
      }
    } else {
      // Conservative bound plus random integer splits.
      if (!detail::full_offload_bound_holds(profile, cost, i, v)) report.bound_ok = false;
      std::uniform_int_distribution<long> offload_dist(0, v);
      std::uniform_int_distribution<int> low_pick(0, l - 1);
      std::vector<long> offloads(static_cast<std::size_t>(h));
      std::vector<long> extras(static_cast<std::size_t>(l));
      for (int s = 0; s < options.samples; ++s) {
        long pool = 0;
        for (auto& k : offloads) {
          k = offload_dist(rng);
          pool += k;
        }
        extras.assign(static_cast<std::size_t>(l), 0);
        for (long u = 0; u < pool; ++u) ++extras[static_cast<std::size_t>(low_pick(rng))];
        consider(offloads, extras);
      }
    }
    report.collusion.push_back(std::move(finding));
  }

  report.worst_gain = report.misreport_high;
  if (report.misreport_low > report.worst_gain) report.worst_gain = report.misreport_low;
  for (const auto& finding : report.collusion) {
    if (finding.gain > report.worst_gain) report.worst_gain = finding.gain;
  }
  report.pass = tol_leq(report.worst_gain, T(0)) && tol_nonneg(report.participation_high) &&
                tol_nonneg(report.participation_low) && report.bound_ok;
  return report;
}

template <class T>
struct RegretPoint {
  T p{};
  std::vector<T> t;
  bool feasible = false;
  T ic_high_gain{};  ///< positive = the high->low lie profits
};

/// Sweeps p with the allocation held fixed, re-deriving the rewards at each
/// point from the reduced LP (participation rows and the low-type
/// truthfulness row only), then reports the high-type lying gain.
template <class T>
std::vector<RegretPoint<T>> regret_curve(const QualityProfile<T>& base,
                                         const CostModel<T>& cost,
                                         const std::vector<long>& n,
                                         const std::vector<T>& p_values,
                                         LowDeviationCost low_dev = LowDeviationCost::own_type) {
  std::vector<RegretPoint<T>> points;
  points.reserve(p_values.size());
  for (const auto& p : p_values) {
    QualityProfile<T> profile = base;
    profile.p = p;
    profile.validate();
    auto sys = build_rows(profile, cost, n, low_dev, CollusionCheck::closed_form);
    std::vector<LinearRow<T>> rows;
    for (const auto& row : sys.rows) {
      if (row.label == RowLabel::ic_high) continue;
      rows.push_back(row);
    }
    RegretPoint<T> point;
    point.p = p;
    const auto probs = case_probabilities(profile).probs;
    auto lp = solve_lp(rows, probs);
    if (lp.status == LpStatus::optimal) {
      point.feasible = true;
      point.t = lp.t;
      const auto slack = residuals(sys.rows, lp.t);
      point.ic_high_gain = -slack.at(RowLabel::ic_high);
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace mechproof
