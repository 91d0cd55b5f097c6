#pragma once

// Sweep and reproduction harness. Grid points are dispatched to a worker
// pool, but results are buffered and emitted in deterministic axis order so
// identical configs always produce byte-identical CSVs.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mechproof/adversary.hpp"
#include "mechproof/config.hpp"
#include "mechproof/optimizer.hpp"
#include "mechproof/parallel.hpp"

namespace mechproof {

inline constexpr long kEscalationStep = 4;
inline constexpr long kEscalationCap = 20;
inline constexpr long kMaxGridPoints = 100000;

struct GridPoint {
  int m;
  double p;
  double x_high;
  double x_low;
};

struct PointOutcome {
  GridPoint at{};
  bool feasible = false;
  std::vector<long> n;
  std::vector<double> t;
  double utility = 0.0;
  bool boundary = false;
  long n_max_used = 0;
};

/// Re-runs the search with a widened bound while the winner sits on the
/// search boundary, up to the hard cap.
inline SolveReport<double> solve_with_escalation(const QualityProfile<double>& profile,
                                                 const CostModel<double>& cost,
                                                 const RevenueModel<double>& revenue,
                                                 SearchConfig<double> cfg, bool auto_escalate,
                                                 long* n_max_used = nullptr) {
  while (true) {
    auto report = optimize(profile, cost, revenue, cfg);
    const bool escalate = auto_escalate &&
                          report.status == SolveReport<double>::Status::ok &&
                          hits_boundary(report, cfg) && cfg.n_max < kEscalationCap;
    if (!escalate) {
      if (n_max_used) *n_max_used = cfg.n_max;
      return report;
    }
    cfg.n_max = std::min(cfg.n_max + kEscalationStep, kEscalationCap);
  }
}

namespace detail {

inline PointOutcome solve_point(const GridPoint& at, const RunConfig& cfg) {
  PointOutcome out;
  out.at = at;
  QualityProfile<double> profile{at.m, at.p, at.x_high, at.x_low};
  auto search = cfg.search_config();
  search.threads = 1;  // the sweep pool already owns the parallelism
  long n_max_used = search.n_max;
  const auto report = solve_with_escalation(profile, cfg.cost_model(), cfg.revenue_model(),
                                            search, cfg.search.auto_escalate, &n_max_used);
  out.n_max_used = n_max_used;
  if (report.status == SolveReport<double>::Status::ok) {
    out.feasible = true;
    out.n = report.best->n;
    out.t = report.best->t;
    out.utility = report.utility;
    auto flagged = search;
    flagged.n_max = n_max_used;
    out.boundary = hits_boundary(report, flagged);
  }
  return out;
}

inline void append_csv_row(std::string& csv, const PointOutcome& out, int max_cases,
                           bool with_regime = false, const std::string& regime = {}) {
  std::string row;
  if (with_regime) {
    row += regime;
    row += ',';
  }
  row += std::to_string(out.at.m);
  row += ',';
  row += format_double(out.at.p);
  row += ',';
  row += format_double(out.at.x_high);
  row += ',';
  row += format_double(out.at.x_low);
  for (int j = 0; j < max_cases; ++j) {
    row += ',';
    if (out.feasible && j < static_cast<int>(out.n.size())) {
      row += std::to_string(out.n[static_cast<std::size_t>(j)]);
    }
  }
  for (int j = 0; j < max_cases; ++j) {
    row += ',';
    if (out.feasible && j < static_cast<int>(out.t.size())) {
      row += format_double(out.t[static_cast<std::size_t>(j)]);
    }
  }
  row += ',';
  if (out.feasible) row += format_double(out.utility);
  row += ',';
  row += out.feasible ? "true" : "false";
  row += ',';
  row += out.boundary ? "1" : "0";
  row += '\n';
  csv += row;
}

inline std::string csv_header(int max_cases, bool with_regime = false) {
  std::string header = with_regime ? "regime,m,p,x_high,x_low" : "m,p,x_high,x_low";
  for (int j = 1; j <= max_cases; ++j) header += ",n_" + std::to_string(j);
  for (int j = 1; j <= max_cases; ++j) header += ",t_" + std::to_string(j);
  header += ",utility,feasible,boundary_flag\n";
  return header;
}

inline std::vector<PointOutcome> solve_grid(const std::vector<GridPoint>& grid,
                                            const RunConfig& cfg, int threads = 0) {
  std::vector<PointOutcome> results(grid.size());
  std::atomic<std::size_t> next{0};
  const int pool = resolve_thread_count(threads);
  parallel_chunks(static_cast<long>(grid.size()), pool, [&](long, long, long) {
    // Work stealing keeps uneven points balanced; output order is via index.
    for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      results[i] = solve_point(grid[i], cfg);
    }
  });
  return results;
}

}  // namespace detail

struct SweepResult {
  std::string csv;
  std::vector<PointOutcome> rows;
};

/// Expands the config's sweep axes (absent axes pin to the scalar fields) in
/// lexicographic order m, p, x_high, x_low and solves every grid point.
inline SweepResult run_sweep(const RunConfig& cfg) {
  cfg.validate();
  if (!cfg.sweep) throw ConfigError("sweep: at least one axis is required");
  std::vector<long> ms = cfg.sweep->m;
  std::vector<double> ps = cfg.sweep->p;
  std::vector<double> xhs = cfg.sweep->x_high;
  std::vector<double> xls = cfg.sweep->x_low;
  if (ms.empty()) ms = {cfg.m};
  if (ps.empty()) ps = {cfg.p};
  if (xhs.empty()) xhs = {cfg.x_high};
  if (xls.empty()) xls = {cfg.x_low};

  const long total = static_cast<long>(ms.size()) * static_cast<long>(ps.size()) *
                     static_cast<long>(xhs.size()) * static_cast<long>(xls.size());
  if (total > kMaxGridPoints) {
    throw ConfigError("sweep: grid has " + std::to_string(total) + " points, limit is " +
                      std::to_string(kMaxGridPoints));
  }

  std::vector<GridPoint> grid;
  grid.reserve(static_cast<std::size_t>(total));
  int max_m = 0;
  for (long m : ms) {
    for (double p : ps) {
      for (double xh : xhs) {
        for (double xl : xls) {
          GridPoint at{static_cast<int>(m), p, xh, xl};
          QualityProfile<double> probe{at.m, at.p, at.x_high, at.x_low};
          probe.validate();  // rejects bad combos before any compute
          max_m = std::max(max_m, at.m);
          grid.push_back(at);
        }
      }
    }
  }

  SweepResult result;
  result.rows = detail::solve_grid(grid, cfg);
  result.csv = detail::csv_header(max_m + 1);
  for (const auto& row : result.rows) {
    detail::append_csv_row(result.csv, row, max_m + 1);
  }
  return result;
}

struct TrendCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReproResult {
  std::string suite;
  std::vector<std::pair<std::string, std::string>> files;  // (name, contents)
  std::vector<TrendCheck> checks;
};

namespace detail {

inline std::vector<double> tenth_grid() {
  std::vector<double> ps;
  for (int i = 1; i <= 9; ++i) ps.push_back(i / 10.0);
  return ps;
}

inline RunConfig repro_base() {
  RunConfig cfg;
  cfg.cost.family = "exp2minus1";
  cfg.revenue.family = "quadratic_quality_weighted";
  cfg.search.n_max = 12;
  // The published experiments screen collusion with the full-offload rule
  // only; the exhaustive screen rejects every allocation once
  // x_high/x_low outgrows the cost curvature, emptying these grids.
  cfg.search.collusion_check = "closed_form";
  cfg.search.auto_escalate = true;
  return cfg;
}

inline bool non_decreasing(const std::vector<double>& v, double tol = kEpsilon) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - tol) return false;
  }
  return true;
}

inline bool non_increasing(const std::vector<double>& v, double tol = kEpsilon) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + tol) return false;
  }
  return true;
}

inline bool non_decreasing(const std::vector<long>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

inline bool non_increasing(const std::vector<long>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

inline ReproResult repro_fig2(bool sweep_high) {
  // fig2a sweeps x_high at pinned x_low=1; fig2b sweeps x_low at x_high=21.
  RunConfig cfg = repro_base();
  cfg.m = 2;
  SweepAxes axes;
  axes.p = tenth_grid();
  if (sweep_high) {
    axes.x_high = {5, 13, 21};
    cfg.x_low = 1;
  } else {
    axes.x_low = {1, 6, 11};
    cfg.x_high = 21;
  }
  cfg.sweep = axes;
  auto sweep = run_sweep(cfg);

  ReproResult out;
  out.suite = sweep_high ? "fig2a" : "fig2b";
  out.files.emplace_back(out.suite + ".csv", sweep.csv);

  const auto& series = sweep_high ? axes.x_high : axes.x_low;
  const auto& ps = axes.p;
  // rows are ordered p-major, series-minor
  auto utility_at = [&](std::size_t pi, std::size_t si) {
    return sweep.rows[pi * series.size() + si];
  };
  bool all_feasible = true;
  for (const auto& row : sweep.rows) all_feasible &= row.feasible;
  out.checks.push_back({"all grid points admit a mechanism", all_feasible, ""});
  if (!all_feasible) return out;

  if (sweep_high) {
    // Monotone growth in p is asserted for the pinned-x_low grid only; at
    // intermediate x_low levels the exact optimum genuinely dips first (see
    // the emitted data), so the x_low-series suite does not claim it.
    for (std::size_t si = 0; si < series.size(); ++si) {
      std::vector<double> curve;
      for (std::size_t pi = 0; pi < ps.size(); ++pi) curve.push_back(utility_at(pi, si).utility);
      out.checks.push_back({"utility non-decreasing in p at x_high=" + format_double(series[si]),
                            non_decreasing(curve), ""});
    }
  }
  if (sweep_high) {
    std::vector<double> increments;
    for (std::size_t si = 0; si < series.size(); ++si) {
      increments.push_back(utility_at(ps.size() - 1, si).utility - utility_at(0, si).utility);
    }
    out.checks.push_back({"utility increment over p grows with x_high",
                          non_decreasing(increments), ""});
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      std::vector<double> curve;
      for (std::size_t si = 0; si < series.size(); ++si) curve.push_back(utility_at(pi, si).utility);
      if (!non_increasing(curve)) {
        std::string values;
        for (double u : curve) values += (values.empty() ? "" : " -> ") + format_double(u);
        out.checks.push_back({"utility non-increasing in x_high at fixed p", false,
                              "violated at p=" + format_double(ps[pi]) + ": " + values});
        return out;
      }
    }
    out.checks.push_back({"utility non-increasing in x_high at fixed p", true, ""});
  } else {
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      std::vector<double> curve;
      for (std::size_t si = 0; si < series.size(); ++si) curve.push_back(utility_at(pi, si).utility);
      if (!non_decreasing(curve)) {
        out.checks.push_back({"utility non-decreasing in x_low at fixed p", false,
                              "violated at p=" + format_double(ps[pi])});
        return out;
      }
    }
    out.checks.push_back({"utility non-decreasing in x_low at fixed p", true, ""});
  }
  return out;
}

inline ReproResult repro_footnote() {
  ReproResult out;
  out.suite = "footnote_lying";
  QualityProfile<double> base{2, 0.5, 9.0, 1.0};
  const std::vector<long> n = {1, 4, 3};
  std::vector<double> ps;
  for (int i = 5; i <= 95; ++i) ps.push_back(i / 100.0);
  const auto curve =
      regret_curve(base, CostModel<double>::exp2_minus_one(), n, ps);

  std::string csv = "p,t_1,t_2,t_3,ic_high_gain\n";
  for (const auto& pt : curve) {
    csv += format_double(pt.p);
    for (int j = 0; j < 3; ++j) {
      csv += ',';
      if (pt.feasible) csv += format_double(pt.t[static_cast<std::size_t>(j)]);
    }
    csv += ',';
    if (pt.feasible) csv += format_double(pt.ic_high_gain);
    csv += '\n';
  }
  out.files.emplace_back("footnote_lying.csv", std::move(csv));

  auto gain_at = [&](double p) {
    for (const auto& pt : curve) {
      if (std::abs(pt.p - p) < 1e-12) return pt.ic_high_gain;
    }
    throw std::logic_error("probe point missing from the grid");
  };
  bool all_feasible = true;
  for (const auto& pt : curve) all_feasible &= pt.feasible;
  out.checks.push_back({"reduced reward problem solvable on the whole grid", all_feasible, ""});
  if (!all_feasible) return out;
  out.checks.push_back({"lying gain positive at p=0.1", gain_at(0.1) > 0,
                        "gain=" + format_double(gain_at(0.1))});
  out.checks.push_back({"lying gain negative at p=0.9", gain_at(0.9) < 0,
                        "gain=" + format_double(gain_at(0.9))});
  bool crossings_inside = true;
  std::string where;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const bool was_pos = curve[i - 1].ic_high_gain > 0;
    const bool is_pos = curve[i].ic_high_gain > 0;
    if (was_pos != is_pos) {
      where += (where.empty() ? "" : ", ") + format_double(curve[i - 1].p) + ".." +
               format_double(curve[i].p);
      if (curve[i - 1].p < 0.25 || curve[i].p > 0.55) crossings_inside = false;
    }
  }
  out.checks.push_back({"lying-gain sign crossing inside p in [0.25, 0.55]",
                        crossings_inside && !where.empty(), "crossing at " + where});
  return out;
}

inline ReproResult repro_fig3(bool first) {
  RunConfig cfg = repro_base();
  SweepAxes axes;
  axes.m = {2, 3};
  axes.p = tenth_grid();
  if (first) {
    cfg.x_high = 80;
    cfg.x_low = 20;
  } else {
    cfg.x_high = 50;
    cfg.x_low = 10;
  }
  cfg.sweep = axes;
  auto sweep = run_sweep(cfg);

  ReproResult out;
  out.suite = first ? "fig3a" : "fig3b";
  out.files.emplace_back(out.suite + ".csv", sweep.csv);

  // rows ordered m-major, p-minor
  auto utility_of = [&](std::size_t mi, std::size_t pi) {
    return sweep.rows[mi * axes.p.size() + pi];
  };
  bool all_feasible = true;
  for (const auto& row : sweep.rows) all_feasible &= row.feasible;
  out.checks.push_back({"all grid points admit a mechanism", all_feasible, ""});
  if (!all_feasible) return out;

  for (std::size_t mi = 0; mi < axes.m.size(); ++mi) {
    std::vector<double> curve;
    for (std::size_t pi = 0; pi < axes.p.size(); ++pi) curve.push_back(utility_of(mi, pi).utility);
    out.checks.push_back({"utility non-decreasing in p with m=" + std::to_string(axes.m[mi]),
                          non_decreasing(curve), ""});
  }
  if (first) {
    const double gap_04 = utility_of(1, 3).utility - utility_of(0, 3).utility;
    const double gap_09 = utility_of(1, 8).utility - utility_of(0, 8).utility;
    out.checks.push_back({"three workers no better than two at p=0.4", gap_04 <= kEpsilon,
                          "difference=" + format_double(gap_04)});
    out.checks.push_back({"three workers beat two at p=0.9", gap_09 > 0,
                          "difference=" + format_double(gap_09)});
  }
  return out;
}

inline ReproResult repro_ntable() {
  ReproResult out;
  out.suite = "ntable";
  RunConfig base = repro_base();
  base.m = 2;

  struct Regime {
    std::string name;
    std::vector<GridPoint> grid;
    bool p_axis;
    std::size_t series;  // inner series length
  };
  std::vector<Regime> regimes;
  const auto ps = tenth_grid();

  auto push_p_regime = [&](const std::string& name, const std::vector<double>& xls,
                           double dx, double fixed_xh) {
    Regime reg{name, {}, true, xls.size()};
    for (double p : ps) {
      for (double xl : xls) {
        const double xh = fixed_xh > 0 ? fixed_xh : xl + dx;
        reg.grid.push_back({2, p, xh, xl});
      }
    }
    regimes.push_back(std::move(reg));
  };
  push_p_regime("dx4", {1, 3, 5}, 4, 0);
  push_p_regime("dx18", {1, 3, 5}, 18, 0);
  {
    Regime reg{"p02", {}, false, 1};
    for (double dx = 2; dx <= 16; dx += 2) reg.grid.push_back({2, 0.2, 18, 18 - dx});
    regimes.push_back(std::move(reg));
    Regime reg9{"p09", {}, false, 1};
    for (double dx = 2; dx <= 16; dx += 2) reg9.grid.push_back({2, 0.9, 18, 18 - dx});
    regimes.push_back(std::move(reg9));
  }
  push_p_regime("xh4", {1, 2, 3}, 0, 4);
  push_p_regime("xh18", {2, 6, 10, 14}, 0, 18);

  std::string csv = detail::csv_header(3, true);
  bool all_feasible = true;
  for (auto& reg : regimes) {
    auto rows = detail::solve_grid(reg.grid, base);
    bool regime_feasible = true;
    for (const auto& row : rows) {
      detail::append_csv_row(csv, row, 3, true, reg.name);
      regime_feasible &= row.feasible;
    }
    all_feasible &= regime_feasible;
    if (reg.p_axis && regime_feasible) {
      for (std::size_t si = 0; si < reg.series; ++si) {
        std::vector<long> n1, n2, n3;
        for (std::size_t pi = 0; pi < ps.size(); ++pi) {
          const auto& row = rows[pi * reg.series + si];
          n1.push_back(row.n[0]);
          n2.push_back(row.n[1]);
          n3.push_back(row.n[2]);
        }
        const std::string label = reg.name + " series " + std::to_string(si);
        out.checks.push_back({"n_1 non-decreasing in p (" + label + ")", non_decreasing(n1), ""});
        out.checks.push_back({"n_2 non-decreasing in p (" + label + ")", non_decreasing(n2), ""});
        out.checks.push_back({"n_3 non-increasing in p (" + label + ")", non_increasing(n3), ""});
      }
    }
  }
  out.checks.insert(out.checks.begin(),
                    {"all regime points admit a mechanism", all_feasible, ""});
  out.files.emplace_back("ntable.csv", std::move(csv));
  return out;
}

}  // namespace detail

inline std::vector<std::string> repro_suite_names() {
  return {"fig2a", "fig2b", "footnote_lying", "fig3a", "fig3b", "ntable"};
}

inline ReproResult run_repro(const std::string& suite) {
  if (suite == "fig2a") return detail::repro_fig2(true);
  if (suite == "fig2b") return detail::repro_fig2(false);
  if (suite == "footnote_lying") return detail::repro_footnote();
  if (suite == "fig3a") return detail::repro_fig3(true);
  if (suite == "fig3b") return detail::repro_fig3(false);
  if (suite == "ntable") return detail::repro_ntable();
  throw ConfigError("unknown repro suite \"" + suite + "\"");
}

}  // namespace mechproof
