#pragma once

// Small dense linear-programming solver for the reward problem
//
//   minimize  probs . t   subject to  row.coeffs . t >= row.rhs  (t free)
//
// solved by a two-phase primal simplex with Bland's rule on the split
// formulation t = u - v, u, v >= 0. Exact over Rational; the double
// instantiation uses the global tolerance for pivot decisions and reproduces
// exact-mode outcomes on well-scaled inputs.
//
// Among multiple optima the solver applies a fixed tie-break so results are
// reproducible: first minimize sum_j |t_j|, then pick the lexicographically
// smallest t.

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mechproof/constraints.hpp"
#include "mechproof/scalar.hpp"

namespace mechproof {

enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpOutcome {
  LpStatus status = LpStatus::infeasible;
  std::vector<T> t;       ///< present iff optimal
  T objective{};          ///< probs . t at the reported point
  std::vector<T> duals;   ///< first-stage duals, one per input row (optimal only)
  bool box_bound_active = false;
};

template <class T>
struct LpOptions {
  std::optional<T> box_bound;  ///< adds |t_j| <= box_bound when set
  bool full_tie_break = true;  ///< false: stop after the objective stage
};

namespace detail {

/// Dense tableau simplex on  min c.z  s.t.  E z = d, z >= 0.
template <class T>
class Simplex {
 public:
  enum class Result { optimal, infeasible, unbounded };

  Result run(std::vector<std::vector<T>> eq, std::vector<T> rhs, std::vector<T> cost) {
    cols_ = cost.size();
    for (std::size_t r = 0; r < eq.size(); ++r) {
      if (ScalarOps<T>::sign(rhs[r]) < 0) {
        for (auto& v : eq[r]) v = -v;
        rhs[r] = -rhs[r];
      }
    }
    const std::size_t rows = eq.size();
    tab_.assign(rows, std::vector<T>(cols_ + rows + 1, T(0)));
    basis_.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < cols_; ++j) tab_[r][j] = eq[r][j];
      tab_[r][cols_ + r] = T(1);  // artificial
      tab_[r].back() = rhs[r];
      basis_[r] = cols_ + r;
    }
    // Phase 1: minimize the artificial total.
    z_.assign(cols_ + rows + 1, T(0));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < z_.size(); ++j) z_[j] -= tab_[r][j];
      z_[cols_ + r] += T(1);
    }
    if (!iterate(cols_ + rows)) {
      throw std::logic_error("phase-1 objective cannot be unbounded");
    }
    if (ScalarOps<T>::sign(-z_.back()) > 0) return Result::infeasible;
    purge_artificials();
    // Phase 2: the real objective, artificials barred from entering.
    z_.assign(cols_ + rows + 1, T(0));
    for (std::size_t j = 0; j < cols_; ++j) z_[j] = cost[j];
    for (std::size_t r = 0; r < tab_.size(); ++r) {
      if (basis_[r] >= cols_) continue;
      const T factor = cost[basis_[r]];
      if (ScalarOps<T>::sign(factor) == 0) continue;
      for (std::size_t j = 0; j < z_.size(); ++j) z_[j] -= factor * tab_[r][j];
    }
    if (!iterate(cols_)) return Result::unbounded;
    return Result::optimal;
  }

  std::vector<T> solution() const {
    std::vector<T> z(cols_, T(0));
    for (std::size_t r = 0; r < tab_.size(); ++r) {
      if (basis_[r] < cols_) z[basis_[r]] = tab_[r].back();
    }
    return z;
  }

  /// Final reduced cost of column j (>= 0 at optimality).
  const T& reduced_cost(std::size_t j) const { return z_[j]; }

 private:
  // Bland's rule: smallest improving column, smallest basis variable on ties.
  bool iterate(std::size_t enterable_cols) {
    const std::size_t max_iter = 1000 + 200 * (cols_ + tab_.size());
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      std::size_t enter = enterable_cols;
      for (std::size_t j = 0; j < enterable_cols; ++j) {
        if (ScalarOps<T>::sign(z_[j]) < 0) {
          enter = j;
          break;
        }
      }
      if (enter == enterable_cols) return true;  // optimal
      std::size_t leave = tab_.size();
      for (std::size_t r = 0; r < tab_.size(); ++r) {
        if (ScalarOps<T>::sign(tab_[r][enter]) <= 0) continue;
        if (leave == tab_.size()) {
          leave = r;
          continue;
        }
        const T lhs = tab_[r].back() * tab_[leave][enter];
        const T rhs = tab_[leave].back() * tab_[r][enter];
        const int cmp = ScalarOps<T>::sign(lhs - rhs);
        if (cmp < 0 || (cmp == 0 && basis_[r] < basis_[leave])) leave = r;
      }
      if (leave == tab_.size()) return false;  // unbounded direction
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit exceeded");
  }

  void pivot(std::size_t r, std::size_t c) {
    const T inv = T(1) / tab_[r][c];
    for (auto& v : tab_[r]) v *= inv;
    tab_[r][c] = T(1);
    for (std::size_t r2 = 0; r2 < tab_.size(); ++r2) {
      if (r2 == r) continue;
      eliminate(tab_[r2], tab_[r], c);
    }
    eliminate(z_, tab_[r], c);
    basis_[r] = c;
  }

  static void eliminate(std::vector<T>& row, const std::vector<T>& pivot_row, std::size_t c) {
    const T factor = row[c];
    if (ScalarOps<T>::sign(factor) == 0) {
      row[c] = T(0);
      return;
    }
    for (std::size_t j = 0; j < row.size(); ++j) row[j] -= factor * pivot_row[j];
    row[c] = T(0);
  }

  // Swap leftover zero-level artificials for real columns; drop rows that
  // turn out redundant.
  void purge_artificials() {
    for (std::size_t r = 0; r < tab_.size();) {
      if (basis_[r] < cols_) {
        ++r;
        continue;
      }
      std::size_t c = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (ScalarOps<T>::sign(tab_[r][j]) != 0) {
          c = j;
          break;
        }
      }
      if (c == cols_) {
        tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        continue;
      }
      pivot(r, c);
      ++r;
    }
  }

  std::size_t cols_ = 0;
  std::vector<std::vector<T>> tab_;
  std::vector<T> z_;
  std::vector<std::size_t> basis_;
};

/// The reward problem over split variables z = (u, v, s): inequalities get a
/// surplus column each, pinned equalities none. abs_sum_pin, when set, pins
/// sum_j (u_j + v_j); with non-negative padding this restricts t exactly to
/// { sum |t_j| <= pin } inside the other constraints.
template <class T>
struct RewardLp {
  std::size_t nvar = 0;
  std::vector<std::vector<T>> ineq_coeffs;
  std::vector<T> ineq_rhs;
  std::vector<std::vector<T>> eq_coeffs;  // over t
  std::vector<T> eq_rhs;
  std::optional<T> abs_sum_pin;

  struct Solved {
    typename Simplex<T>::Result result;
    std::vector<T> t;
    std::vector<T> ineq_duals;
  };

  /// minimize obj_t . t + obj_split * sum(u + v)
  Solved minimize(const std::vector<T>& obj_t, const T& obj_split) const {
    const std::size_t pin_rows = abs_sum_pin ? 1 : 0;
    const std::size_t rows = ineq_coeffs.size() + eq_coeffs.size() + pin_rows;
    const std::size_t slack0 = 2 * nvar;
    const std::size_t cols = slack0 + ineq_coeffs.size();
    std::vector<std::vector<T>> eq(rows, std::vector<T>(cols, T(0)));
    std::vector<T> rhs(rows, T(0));
    for (std::size_t r = 0; r < ineq_coeffs.size(); ++r) {
      for (std::size_t j = 0; j < nvar; ++j) {
        eq[r][j] = ineq_coeffs[r][j];
        eq[r][nvar + j] = -ineq_coeffs[r][j];
      }
      eq[r][slack0 + r] = T(-1);
      rhs[r] = ineq_rhs[r];
    }
    for (std::size_t e = 0; e < eq_coeffs.size(); ++e) {
      const std::size_t r = ineq_coeffs.size() + e;
      for (std::size_t j = 0; j < nvar; ++j) {
        eq[r][j] = eq_coeffs[e][j];
        eq[r][nvar + j] = -eq_coeffs[e][j];
      }
      rhs[r] = eq_rhs[e];
    }
    if (abs_sum_pin) {
      const std::size_t r = rows - 1;
      for (std::size_t j = 0; j < slack0; ++j) eq[r][j] = T(1);
      rhs[r] = *abs_sum_pin;
    }
    std::vector<T> cost(cols, T(0));
    for (std::size_t j = 0; j < nvar; ++j) {
      cost[j] = obj_t[j] + obj_split;
      cost[nvar + j] = -obj_t[j] + obj_split;
    }
    Simplex<T> simplex;
    Solved out;
    out.result = simplex.run(std::move(eq), std::move(rhs), std::move(cost));
    if (out.result != Simplex<T>::Result::optimal) return out;
    const auto z = simplex.solution();
    out.t.resize(nvar);
    for (std::size_t j = 0; j < nvar; ++j) out.t[j] = z[j] - z[nvar + j];
    out.ineq_duals.resize(ineq_coeffs.size());
    for (std::size_t r = 0; r < ineq_coeffs.size(); ++r) {
      out.ineq_duals[r] = simplex.reduced_cost(slack0 + r);
    }
    return out;
  }
};

}  // namespace detail

/// Solves the reward LP with the normative tie-break. `probs` supplies the
/// objective coefficients (case probabilities); rows come from build_rows,
/// with any excluded constraints already filtered out by the caller.
template <class T>
LpOutcome<T> solve_lp(const std::vector<LinearRow<T>>& rows, const std::vector<T>& probs,
                      const LpOptions<T>& options = {}) {
  const std::size_t nvar = probs.size();
  if (nvar == 0 || nvar > 16) throw std::invalid_argument("reward LP supports 1..16 variables");
  detail::RewardLp<T> lp;
  lp.nvar = nvar;
  for (const auto& row : rows) {
    if (row.coeffs.size() != nvar) {
      throw std::invalid_argument("row arity does not match the objective");
    }
    lp.ineq_coeffs.push_back(row.coeffs);
    lp.ineq_rhs.push_back(row.rhs);
  }
  if (options.box_bound) {
    const T& bound = *options.box_bound;
    if (!(bound > T(0))) throw std::invalid_argument("box bound must be positive");
    for (std::size_t j = 0; j < nvar; ++j) {
      std::vector<T> lo(nvar, T(0)), hi(nvar, T(0));
      lo[j] = T(1);
      hi[j] = T(-1);
      lp.ineq_coeffs.push_back(lo);
      lp.ineq_rhs.push_back(-bound);
      lp.ineq_coeffs.push_back(hi);
      lp.ineq_rhs.push_back(-bound);
    }
  }

  LpOutcome<T> out;
  auto stage1 = lp.minimize(probs, T(0));
  if (stage1.result == detail::Simplex<T>::Result::infeasible) {
    out.status = LpStatus::infeasible;
    return out;
  }
  if (stage1.result == detail::Simplex<T>::Result::unbounded) {
    out.status = LpStatus::unbounded;
    return out;
  }
  out.status = LpStatus::optimal;
  out.duals.assign(stage1.ineq_duals.begin(),
                   stage1.ineq_duals.begin() + static_cast<std::ptrdiff_t>(rows.size()));
  T z1 = T(0);
  for (std::size_t j = 0; j < nvar; ++j) z1 += probs[j] * stage1.t[j];
  out.t = stage1.t;

  if (options.full_tie_break) {
    lp.eq_coeffs.push_back(probs);
    lp.eq_rhs.push_back(z1);
    auto stage2 = lp.minimize(std::vector<T>(nvar, T(0)), T(1));
    if (stage2.result != detail::Simplex<T>::Result::optimal) {
      throw std::logic_error("tie-break stage lost feasibility");
    }
    T z2 = T(0);
    for (std::size_t j = 0; j < nvar; ++j) {
      z2 += stage2.t[j] < T(0) ? -stage2.t[j] : stage2.t[j];
    }
    lp.abs_sum_pin = z2;
    std::vector<T> t_final = stage2.t;
    for (std::size_t j = 0; j < nvar; ++j) {
      std::vector<T> obj(nvar, T(0));
      obj[j] = T(1);
      auto stage3 = lp.minimize(obj, T(0));
      if (stage3.result != detail::Simplex<T>::Result::optimal) {
        throw std::logic_error("lexicographic stage lost feasibility");
      }
      t_final = stage3.t;
      std::vector<T> pin(nvar, T(0));
      pin[j] = T(1);
      lp.eq_coeffs.push_back(pin);
      lp.eq_rhs.push_back(t_final[j]);
    }
    out.t = t_final;
  }

  out.objective = T(0);
  for (std::size_t j = 0; j < nvar; ++j) out.objective += probs[j] * out.t[j];
  if (options.box_bound) {
    for (std::size_t j = 0; j < nvar; ++j) {
      const T mag = out.t[j] < T(0) ? -out.t[j] : out.t[j];
      if (ScalarOps<T>::sign(mag - *options.box_bound) == 0) {
        out.box_bound_active = true;
      }
    }
  }
  return out;
}

}  // namespace mechproof
