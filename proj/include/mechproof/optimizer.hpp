#pragma once

// Exhaustive search for the requestor-optimal mechanism: enumerate every
// integer allocation in {1..n_max}^(m+1), screen it against the collusion
// predicate, solve the reward LP, and keep the utility argmax. Ties break by
// lexicographically smallest allocation; the winner's rewards then get the
// full LP tie-break, so outputs are reproducible regardless of thread count.

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mechproof/constraints.hpp"
#include "mechproof/lp.hpp"
#include "mechproof/mechanism.hpp"
#include "mechproof/parallel.hpp"
#include "mechproof/scalar.hpp"

namespace mechproof {

struct SearchSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
struct SearchConfig {
  long n_max = 12;
  bool include_ic_high = true;
  LowDeviationCost low_deviation_cost = LowDeviationCost::own_type;
  CollusionCheck collusion_check = CollusionCheck::exhaustive;
  std::optional<T> t_bound;
  int threads = 0;  ///< 0 = MECHPROOF_THREADS or hardware
};

template <class T>
struct SolveReport {
  enum class Status { ok, no_feasible_mechanism };
  Status status = Status::no_feasible_mechanism;
  std::optional<Mechanism<T>> best;
  T utility{};
  long candidates_examined = 0;
  long candidates_collusion_filtered = 0;
  long candidates_lp_infeasible = 0;
  std::map<RowLabel, T> slacks;  ///< all four rows at the winning rewards
  LpOutcome<T> lp;               ///< winning LP outcome (duals, box flag)
};

namespace detail {

inline long checked_search_space(long n_max, int cases) {
  long space = 1;
  for (int j = 0; j < cases; ++j) {
    if (space > 1000000L / n_max + 1) {
      throw SearchSpaceTooLarge("search space exceeds 10^6 candidates");
    }
    space *= n_max;
  }
  if (space > 1000000L) {
    throw SearchSpaceTooLarge("search space exceeds 10^6 candidates");
  }
  return space;
}

/// Index -> allocation in {1..n_max}^cases; ascending index is ascending
/// lexicographic order with n_1 most significant.
inline void decode_candidate(long idx, long n_max, int cases, std::vector<long>& n) {
  n.resize(static_cast<std::size_t>(cases));
  for (int j = cases - 1; j >= 0; --j) {
    n[static_cast<std::size_t>(j)] = 1 + idx % n_max;
    idx /= n_max;
  }
}

}  // namespace detail

template <class T>
SolveReport<T> optimize(const QualityProfile<T>& profile, const CostModel<T>& cost,
                        const RevenueModel<T>& revenue, const SearchConfig<T>& config) {
  profile.validate();
  revenue.validate_for(profile);
  if (config.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const int cases = profile.case_count();
  const long space = detail::checked_search_space(config.n_max, cases);
  const auto probs = case_probabilities(profile).probs;

  // The collusion screen only looks at one allocation entry per mixed case.
  std::vector<std::vector<char>> case_ok(static_cast<std::size_t>(profile.m));
  for (int i = 1; i < profile.m; ++i) {
    auto& slot = case_ok[static_cast<std::size_t>(i)];
    slot.assign(static_cast<std::size_t>(config.n_max + 1), 0);
    for (long v = 1; v <= config.n_max; ++v) {
      slot[static_cast<std::size_t>(v)] =
          collusion_case_ok(profile, cost, i, v, config.collusion_check).ok ? 1 : 0;
    }
  }

  // Case-j mix of delivered qualities, and the reward-free utility part.
  std::vector<T> mix(static_cast<std::size_t>(cases));
  for (int j = 1; j <= cases; ++j) {
    mix[static_cast<std::size_t>(j - 1)] =
        ScalarOps<T>::from_int(profile.m + 1 - j) * profile.x_high +
        ScalarOps<T>::from_int(j - 1) * profile.x_low;
  }

  struct ChunkBest {
    bool found = false;
    T utility{};
    long idx = 0;
    long examined = 0;
    long collusion_filtered = 0;
    long lp_infeasible = 0;
  };
  const int threads = resolve_thread_count(config.threads);
  std::vector<ChunkBest> chunk_best(static_cast<std::size_t>(std::min<long>(space, threads)));

  LpOptions<T> scan_options;
  scan_options.box_bound = config.t_bound;
  scan_options.full_tie_break = false;

  parallel_chunks(space, threads, [&](long chunk, long begin, long end) {
    ChunkBest local;
    std::vector<long> n;
    for (long idx = begin; idx < end; ++idx) {
      detail::decode_candidate(idx, config.n_max, cases, n);
      ++local.examined;
      bool colludes = false;
      for (int i = 1; i < profile.m; ++i) {
        if (!case_ok[static_cast<std::size_t>(i)][static_cast<std::size_t>(
                n[static_cast<std::size_t>(i)])]) {
          colludes = true;
          break;
        }
      }
      if (colludes) {
        ++local.collusion_filtered;
        continue;
      }
      auto sys = build_rows(profile, cost, n, config.low_deviation_cost,
                            CollusionCheck::closed_form);
      std::vector<LinearRow<T>> rows;
      rows.reserve(sys.rows.size());
      for (auto& row : sys.rows) {
        if (!config.include_ic_high && row.label == RowLabel::ic_high) continue;
        rows.push_back(std::move(row));
      }
      const auto lp = solve_lp(rows, probs, scan_options);
      if (lp.status != LpStatus::optimal) {
        ++local.lp_infeasible;
        continue;
      }
      T utility = -ScalarOps<T>::from_int(profile.m) * lp.objective;
      for (int j = 1; j <= cases; ++j) {
        const std::size_t idx_j = static_cast<std::size_t>(j - 1);
        utility += probs[idx_j] * (revenue.value(profile, j, n[idx_j]) -
                                   ScalarOps<T>::from_int(n[idx_j]) * mix[idx_j]);
      }
      if (!local.found || utility > local.utility) {
        local.found = true;
        local.utility = utility;
        local.idx = idx;
      }
    }
    chunk_best[static_cast<std::size_t>(chunk)] = std::move(local);
  });

  SolveReport<T> report;
  bool found = false;
  T best_utility{};
  long best_idx = 0;
  for (const auto& local : chunk_best) {
    report.candidates_examined += local.examined;
    report.candidates_collusion_filtered += local.collusion_filtered;
    report.candidates_lp_infeasible += local.lp_infeasible;
    if (!local.found) continue;
    if (!found || local.utility > best_utility) {
      found = true;
      best_utility = local.utility;
      best_idx = local.idx;
    }
    // Equal utility resolves to the smaller index, i.e. lexicographically
    // smaller allocation; chunks are scanned in ascending index order.
  }
  if (!found) {
    report.status = SolveReport<T>::Status::no_feasible_mechanism;
    return report;
  }

  std::vector<long> n;
  detail::decode_candidate(best_idx, config.n_max, cases, n);
  auto sys = build_rows(profile, cost, n, config.low_deviation_cost, config.collusion_check);
  std::vector<LinearRow<T>> rows;
  for (const auto& row : sys.rows) {
    if (!config.include_ic_high && row.label == RowLabel::ic_high) continue;
    rows.push_back(row);
  }
  LpOptions<T> final_options;
  final_options.box_bound = config.t_bound;
  final_options.full_tie_break = true;
  auto lp = solve_lp(rows, probs, final_options);
  if (lp.status != LpStatus::optimal) {
    throw std::logic_error("winning candidate must stay solvable");
  }

  Mechanism<T> mech{n, lp.t, profile, cost, revenue};
  report.status = SolveReport<T>::Status::ok;
  report.slacks = residuals(sys.rows, lp.t);
  report.utility = requestor_expected_utility(mech);
  report.best = std::move(mech);
  report.lp = std::move(lp);
  return report;
}

/// True at index j when the winning allocation sits on the search boundary.
template <class T>
std::vector<bool> boundary_flags(const SolveReport<T>& report, const SearchConfig<T>& config) {
  std::vector<bool> flags;
  if (!report.best) return flags;
  flags.reserve(report.best->n.size());
  for (long v : report.best->n) flags.push_back(v == config.n_max);
  return flags;
}

template <class T>
bool hits_boundary(const SolveReport<T>& report, const SearchConfig<T>& config) {
  for (bool f : boundary_flags(report, config)) {
    if (f) return true;
  }
  return false;
}

}  // namespace mechproof
