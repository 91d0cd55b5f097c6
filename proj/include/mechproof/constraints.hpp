#pragma once

// Linear participation/truthfulness constraint rows over the reward vector t,
// plus the reward-independent collusion-proof predicate over task counts.
// Rows are pure t-inequalities (coeffs . t >= rhs); every task-count and
// quality dependent term is folded into the right-hand side.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechproof/cost.hpp"
#include "mechproof/model.hpp"
#include "mechproof/mechanism.hpp"
#include "mechproof/scalar.hpp"

namespace mechproof {

enum class RowLabel { ir_high, ir_low, ic_high, ic_low };

inline const char* to_string(RowLabel label) {
  switch (label) {
    case RowLabel::ir_high: return "ir_high";
    case RowLabel::ir_low: return "ir_low";
    case RowLabel::ic_high: return "ic_high";
    case RowLabel::ic_low: return "ic_low";
  }
  return "?";
}

template <class T>
struct LinearRow {
  std::vector<T> coeffs;  ///< length m+1, applied to t
  T rhs{};
  RowLabel label;
};

/// How candidate allocations are screened against task-offloading coalitions.
///  - exhaustive: every integer split is enumerated (m <= 3; larger m falls
///    back to the full-offload bound), plus the full-offload equal-split
///    bound itself.
///  - closed_form: only the full-offload equal-split bound. This mirrors the
///    published design rule; partial offloads are not screened, which admits
///    wide quality gaps at the price of weaker guarantees.
enum class CollusionCheck { exhaustive, closed_form };

struct CollusionWitness {
  int case_index = 0;             ///< the violated mixed case X_{case_index}
  std::vector<long> split;        ///< offloads per high worker, then extra loads per low worker
};

struct CollusionResult {
  bool ok = true;
  std::optional<CollusionWitness> witness;
};

template <class T>
struct ConstraintSystem {
  std::vector<LinearRow<T>> rows;  ///< ir_high, ir_low, ic_high, ic_low
  bool collusion_ok = false;
  std::optional<CollusionWitness> collusion_witness;
  std::vector<long> n;
};

namespace detail {

/// Full-offload equal-split bound for mixed case i (m-i high, i low workers,
/// allocation v): honest cost must not exceed the cost of offloading all
/// high-side tasks and splitting them equally (fractionally) among the lows.
template <class T>
bool full_offload_bound_holds(const QualityProfile<T>& profile, const CostModel<T>& cost,
                              int i, long v) {
  const int h = profile.m - i;
  const T fh = ScalarOps<T>::from_int(h);
  const T fl = ScalarOps<T>::from_int(i);
  const T fv = cost.value_at(v);
  const T f0 = cost.value_at(0);
  // h f(v) xh + i f(v) xl <= h f(0) xh + i f(v m / i) xl
  //   <=>  f(v m / i) >= (h (f(v) - f(0)) xh + i f(v) xl) / (i xl)
  const T threshold =
      (fh * (fv - f0) * profile.x_high + fl * fv * profile.x_low) / (fl * profile.x_low);
  const T arg = ScalarOps<T>::from_int(v) * ScalarOps<T>::from_int(profile.m) / fl;
  return cost.compare_value(arg, threshold) >= 0;
}

/// Cheapest way the coalition can execute case i's work for a fixed vector of
/// per-high-worker offloads; low workers receive the pooled tasks in every
/// ordered composition. Returns the best (lowest-cost) extra-load vector.
template <class T>
void enumerate_low_compositions(const CostModel<T>& cost, const QualityProfile<T>& profile,
                                long v, int lows, long pool, T high_cost,
                                const std::vector<long>& offloads, const T& honest,
                                T& best_gain, std::vector<long>& best_split) {
  // lows is 1 or 2 for the exhaustively screened worker counts.
  auto consider = [&](const std::vector<long>& extra) {
    T low_cost = T(0);
    for (long a : extra) low_cost += cost.value_at(v + a) * profile.x_low;
    const T gain = honest - (high_cost + low_cost);
    if (gain > best_gain) {
      best_gain = gain;
      best_split = offloads;
      best_split.insert(best_split.end(), extra.begin(), extra.end());
    }
  };
  if (lows == 1) {
    consider({pool});
    return;
  }
  for (long a = 0; a <= pool; ++a) consider({a, pool - a});
}

/// Best achievable coalition gain in mixed case i by exhaustive integer
/// enumeration (valid for m <= 3). Gain > 0 means collusion profits.
template <class T>
std::pair<T, std::vector<long>> best_integer_collusion(const QualityProfile<T>& profile,
                                                       const CostModel<T>& cost, int i,
                                                       long v) {
  const int h = profile.m - i;
  const int l = i;
  const T honest = ScalarOps<T>::from_int(h) * cost.value_at(v) * profile.x_high +
                   ScalarOps<T>::from_int(l) * cost.value_at(v) * profile.x_low;
  T best_gain = T(0);
  std::vector<long> best_split(static_cast<std::size_t>(h + l), 0);
  std::vector<long> offloads(static_cast<std::size_t>(h), 0);
  while (true) {
    long pool = 0;
    T high_cost = T(0);
    for (long k : offloads) {
      pool += k;
      high_cost += cost.value_at(v - k) * profile.x_high;
    }
    enumerate_low_compositions(cost, profile, v, l, pool, high_cost, offloads, honest,
                               best_gain, best_split);
    // odometer over offload vectors in {0..v}^h
    int pos = h - 1;
    while (pos >= 0 && offloads[static_cast<std::size_t>(pos)] == v) {
      offloads[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++offloads[static_cast<std::size_t>(pos)];
  }
  return {best_gain, best_split};
}

}  // namespace detail

/// The full-offload strategy as a concrete integer split (equal division of
/// the pooled tasks with any remainder spread one-by-one).
inline std::vector<long> full_offload_split(int m, int i, long v) {
  std::vector<long> split;
  const int h = m - i;
  split.assign(static_cast<std::size_t>(h), v);
  const long pool = static_cast<long>(h) * v;
  for (int w = 0; w < i; ++w) {
    split.push_back(pool / i + (w < pool % i ? 1 : 0));
  }
  return split;
}

/// Screens a single mixed case: case i (1..m-1) has m-i high and i low
/// workers working at allocation v. Exposed so the optimizer can memoize the
/// verdict per (case, allocation) pair.
template <class T>
CollusionResult collusion_case_ok(const QualityProfile<T>& profile, const CostModel<T>& cost,
                                  int i, long v, CollusionCheck check) {
  if (i < 1 || i >= profile.m) throw std::out_of_range("mixed case index out of range");
  if (v < 1) throw std::invalid_argument("task counts must be positive integers");
  CollusionResult res;
  if (!detail::full_offload_bound_holds(profile, cost, i, v)) {
    res.ok = false;
    res.witness = CollusionWitness{i + 1, full_offload_split(profile.m, i, v)};
    return res;
  }
  if (check == CollusionCheck::exhaustive && profile.m <= 3) {
    auto [gain, split] = detail::best_integer_collusion(profile, cost, i, v);
    if (gain > scalar_epsilon<T>()) {
      res.ok = false;
      res.witness = CollusionWitness{i + 1, split};
    }
  }
  return res;
}

/// Reward-independent collusion screen over the whole allocation vector.
template <class T>
CollusionResult collusion_proof(const QualityProfile<T>& profile, const CostModel<T>& cost,
                                const std::vector<long>& n,
                                CollusionCheck check = CollusionCheck::exhaustive) {
  profile.validate();
  if (n.size() != static_cast<std::size_t>(profile.case_count())) {
    throw std::invalid_argument("allocation length must be m+1");
  }
  for (long v : n) {
    if (v < 1) throw std::invalid_argument("task counts must be positive integers");
  }
  for (int i = 1; i < profile.m; ++i) {
    auto res = collusion_case_ok(profile, cost, i, n[static_cast<std::size_t>(i)], check);
    if (!res.ok) return res;
  }
  return {};
}

/// Builds the four rows. Constant terms are folded into rhs so each row reads
/// coeffs . t >= rhs.
template <class T>
ConstraintSystem<T> build_rows(const QualityProfile<T>& profile, const CostModel<T>& cost,
                               const std::vector<long>& n,
                               LowDeviationCost low_dev = LowDeviationCost::own_type,
                               CollusionCheck check = CollusionCheck::exhaustive) {
  profile.validate();
  const int m = profile.m;
  if (n.size() != static_cast<std::size_t>(m + 1)) {
    throw std::invalid_argument("allocation length must be m+1");
  }
  for (long v : n) {
    if (v < 1) throw std::invalid_argument("task counts must be positive integers");
  }
  const auto w = type_weights(profile);
  const int cases = m + 1;
  auto zero_row = [&](RowLabel label) {
    LinearRow<T> row;
    row.coeffs.assign(static_cast<std::size_t>(cases), T(0));
    row.rhs = T(0);
    row.label = label;
    return row;
  };
  auto fval = [&](int j) { return cost.value_at(n[static_cast<std::size_t>(j - 1)]); };
  auto tasks = [&](int j) { return ScalarOps<T>::from_int(n[static_cast<std::size_t>(j - 1)]); };

  ConstraintSystem<T> sys;
  sys.n = n;

  LinearRow<T> ir_high = zero_row(RowLabel::ir_high);
  for (int i = 1; i <= m; ++i) {
    const T& wi = w.high[static_cast<std::size_t>(i - 1)];
    ir_high.coeffs[static_cast<std::size_t>(i - 1)] += wi;
    ir_high.rhs -= wi * (tasks(i) * profile.x_high - fval(i) * profile.x_high);
  }

  LinearRow<T> ir_low = zero_row(RowLabel::ir_low);
  for (int i = 2; i <= m + 1; ++i) {
    const T& wi = w.low[static_cast<std::size_t>(i - 1)];
    ir_low.coeffs[static_cast<std::size_t>(i - 1)] += wi;
    ir_low.rhs -= wi * (tasks(i) * profile.x_low - fval(i) * profile.x_low);
  }

  // Honest high minus high-claiming-low: the lie shifts case i to i+1, pays
  // at x_low, still costs at the worker's own high quality.
  LinearRow<T> ic_high = zero_row(RowLabel::ic_high);
  for (int i = 1; i <= m; ++i) {
    const T& wi = w.high[static_cast<std::size_t>(i - 1)];
    ic_high.coeffs[static_cast<std::size_t>(i - 1)] += wi;
    ic_high.coeffs[static_cast<std::size_t>(i)] -= wi;
    ic_high.rhs -= wi * (tasks(i) * profile.x_high - fval(i) * profile.x_high);
    ic_high.rhs += wi * (tasks(i + 1) * profile.x_low - fval(i + 1) * profile.x_high);
  }

  // Honest low minus low-claiming-high: shift i to i-1, paid at x_high, cost
  // per the configured deviation-cost policy.
  LinearRow<T> ic_low = zero_row(RowLabel::ic_low);
  const T& dev_quality =
      low_dev == LowDeviationCost::own_type ? profile.x_low : profile.x_high;
  for (int i = 2; i <= m + 1; ++i) {
    const T& wi = w.low[static_cast<std::size_t>(i - 1)];
    ic_low.coeffs[static_cast<std::size_t>(i - 1)] += wi;
    ic_low.coeffs[static_cast<std::size_t>(i - 2)] -= wi;
    ic_low.rhs -= wi * (tasks(i) * profile.x_low - fval(i) * profile.x_low);
    ic_low.rhs += wi * (tasks(i - 1) * profile.x_high - fval(i - 1) * dev_quality);
  }

  sys.rows = {std::move(ir_high), std::move(ir_low), std::move(ic_high), std::move(ic_low)};
  auto coll = collusion_proof(profile, cost, n, check);
  sys.collusion_ok = coll.ok;
  sys.collusion_witness = coll.witness;
  return sys;
}

/// Signed slack per row at the candidate reward vector; >= 0 means satisfied.
template <class T>
std::map<RowLabel, T> residuals(const std::vector<LinearRow<T>>& rows,
                                const std::vector<T>& t) {
  std::map<RowLabel, T> out;
  for (const auto& row : rows) {
    if (row.coeffs.size() != t.size()) {
      throw std::invalid_argument("reward vector length does not match rows");
    }
    T acc = -row.rhs;
    for (std::size_t j = 0; j < t.size(); ++j) acc += row.coeffs[j] * t[j];
    out[row.label] = acc;
  }
  return out;
}

template <class T>
std::map<RowLabel, T> residuals(const ConstraintSystem<T>& sys, const std::vector<T>& t) {
  return residuals(sys.rows, t);
}

}  // namespace mechproof
