#pragma once

// JSON run configuration for the command-line front end. Parsing is strict:
// unknown keys are rejected and every diagnostic names the offending field.
// The CLI computes in double mode; exact-rational evaluation is a library
// concern exercised by the test suite.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechproof/adversary.hpp"
#include "mechproof/cost.hpp"
#include "mechproof/mechanism.hpp"
#include "mechproof/model.hpp"
#include "mechproof/optimizer.hpp"
#include "mechproof/revenue.hpp"

namespace mechproof {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(path + ": unknown key \"" + it.key() + "\"");
    }
  }
}

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + ": missing required key \"" + key + "\"");
  return *it;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

inline long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<long>();
}

inline bool as_boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
  return v.get<bool>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

template <class Fn>
std::vector<double> as_number_list(const json& v, const std::string& path, Fn&& check) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = as_number(v[i], path + "[" + std::to_string(i) + "]");
    check(x, path + "[" + std::to_string(i) + "]");
    out.push_back(x);
  }
  return out;
}

}  // namespace detail

struct CostSpec {
  std::string family = "exp2minus1";
  int exponent = 2;
  std::vector<double> values;
};

struct RevenueSpec {
  std::string family = "quadratic_quality_weighted";
  std::vector<std::vector<double>> coefficients;
};

struct SearchSpec {
  long n_max = 12;
  bool include_ic_high = true;
  std::string low_deviation_cost = "own_type";
  std::optional<double> t_bound;
  std::string collusion_check = "exhaustive";
  bool auto_escalate = true;
};

struct SweepAxes {
  std::vector<long> m;
  std::vector<double> p;
  std::vector<double> x_high;
  std::vector<double> x_low;
};

struct RunConfig {
  int m = 2;
  double p = 0.5;
  double x_high = 2.0;
  double x_low = 1.0;
  CostSpec cost;
  RevenueSpec revenue;
  SearchSpec search;
  std::optional<SweepAxes> sweep;

  QualityProfile<double> profile() const { return {m, p, x_high, x_low}; }

  CostModel<double> cost_model() const {
    if (cost.family == "exp2minus1") return CostModel<double>::exp2_minus_one();
    if (cost.family == "power") return CostModel<double>::power(cost.exponent);
    if (cost.family == "table") return CostModel<double>::table(cost.values);
    throw ConfigError("cost.family: unknown family \"" + cost.family + "\"");
  }

  RevenueModel<double> revenue_model() const {
    if (revenue.family == "quadratic_quality_weighted") {
      return RevenueModel<double>::quadratic_quality_weighted();
    }
    if (revenue.family == "custom") return RevenueModel<double>::custom(revenue.coefficients);
    throw ConfigError("revenue.family: unknown family \"" + revenue.family + "\"");
  }

  LowDeviationCost low_deviation_cost() const {
    if (search.low_deviation_cost == "own_type") return LowDeviationCost::own_type;
    if (search.low_deviation_cost == "claimed_type") return LowDeviationCost::claimed_type;
    throw ConfigError("search.low_deviation_cost: expected \"own_type\" or \"claimed_type\"");
  }

  CollusionCheck collusion_check() const {
    if (search.collusion_check == "exhaustive") return CollusionCheck::exhaustive;
    if (search.collusion_check == "closed_form") return CollusionCheck::closed_form;
    throw ConfigError("search.collusion_check: expected \"exhaustive\" or \"closed_form\"");
  }

  SearchConfig<double> search_config() const {
    SearchConfig<double> cfg;
    cfg.n_max = search.n_max;
    cfg.include_ic_high = search.include_ic_high;
    cfg.low_deviation_cost = low_deviation_cost();
    cfg.collusion_check = collusion_check();
    if (search.t_bound) cfg.t_bound = *search.t_bound;
    return cfg;
  }

  VerifyOptions<double> verify_options() const {
    VerifyOptions<double> opts;
    opts.low_deviation_cost = low_deviation_cost();
    opts.collusion_check = collusion_check();
    return opts;
  }

  /// Structural + semantic validation beyond what parsing already enforced.
  void validate() const {
    profile().validate();
    const auto model = cost_model();
    if (revenue.family == "custom") {
      // one coefficient row per case, for every worker count the run touches
      std::vector<long> ms = sweep && !sweep->m.empty() ? sweep->m
                                                        : std::vector<long>{m};
      for (long mm : ms) {
        if (revenue.coefficients.size() != static_cast<std::size_t>(mm + 1)) {
          throw ConfigError("revenue.coefficients: need exactly m+1 rows (m=" +
                            std::to_string(mm) + " requires " + std::to_string(mm + 1) + ")");
        }
      }
    }
    revenue_model();  // family/coefficient validation
    if (search.n_max < 1) throw ConfigError("search.n_max: must be >= 1");
    if (search.t_bound && !(*search.t_bound > 0)) {
      throw ConfigError("search.t_bound: must be positive when present");
    }
    const long escalated = search.auto_escalate ? std::max(search.n_max, 20L) : search.n_max;
    long max_m = m;
    if (sweep && !sweep->m.empty()) {
      for (long mm : sweep->m) max_m = std::max(max_m, mm);
    }
    if (model.max_argument() < escalated * max_m) {
      throw ConfigError("cost.values: table must cover arguments up to n_max*m (" +
                        std::to_string(escalated * max_m) + ")");
    }
  }

  static RunConfig from_json(const json& j);
  json to_json() const;
};

inline RunConfig RunConfig::from_json(const json& j) {
  detail::check_keys(j, {"m", "p", "x_high", "x_low", "cost", "revenue", "search", "sweep"},
                     "config");
  RunConfig cfg;
  cfg.m = static_cast<int>(detail::as_integer(detail::require(j, "m", "config"), "m"));
  cfg.p = detail::as_number(detail::require(j, "p", "config"), "p");
  cfg.x_high = detail::as_number(detail::require(j, "x_high", "config"), "x_high");
  cfg.x_low = detail::as_number(detail::require(j, "x_low", "config"), "x_low");

  if (auto it = j.find("cost"); it != j.end()) {
    detail::check_keys(*it, {"family", "exponent", "values"}, "cost");
    cfg.cost.family = detail::as_string(detail::require(*it, "family", "cost"), "cost.family");
    if (cfg.cost.family == "power") {
      cfg.cost.exponent = static_cast<int>(
          detail::as_integer(detail::require(*it, "exponent", "cost"), "cost.exponent"));
    } else if (it->contains("exponent")) {
      throw ConfigError("cost.exponent: only valid for the power family");
    }
    if (cfg.cost.family == "table") {
      cfg.cost.values = detail::as_number_list(
          detail::require(*it, "values", "cost"), "cost.values",
          [](double, const std::string&) {});
    } else if (it->contains("values")) {
      throw ConfigError("cost.values: only valid for the table family");
    }
  }

  if (auto it = j.find("revenue"); it != j.end()) {
    detail::check_keys(*it, {"family", "coefficients"}, "revenue");
    cfg.revenue.family =
        detail::as_string(detail::require(*it, "family", "revenue"), "revenue.family");
    if (cfg.revenue.family == "custom") {
      const json& rows = detail::require(*it, "coefficients", "revenue");
      if (!rows.is_array() || rows.empty()) {
        throw ConfigError("revenue.coefficients: expected a non-empty array of arrays");
      }
      for (std::size_t r = 0; r < rows.size(); ++r) {
        cfg.revenue.coefficients.push_back(detail::as_number_list(
            rows[r], "revenue.coefficients[" + std::to_string(r) + "]",
            [](double, const std::string&) {}));
      }
    } else if (it->contains("coefficients")) {
      throw ConfigError("revenue.coefficients: only valid for the custom family");
    }
  }

  if (auto it = j.find("search"); it != j.end()) {
    detail::check_keys(*it,
                       {"n_max", "include_ic_high", "low_deviation_cost", "t_bound",
                        "collusion_check", "auto_escalate"},
                       "search");
    if (it->contains("n_max")) {
      cfg.search.n_max = detail::as_integer((*it)["n_max"], "search.n_max");
    }
    if (it->contains("include_ic_high")) {
      cfg.search.include_ic_high =
          detail::as_boolean((*it)["include_ic_high"], "search.include_ic_high");
    }
    if (it->contains("low_deviation_cost")) {
      cfg.search.low_deviation_cost =
          detail::as_string((*it)["low_deviation_cost"], "search.low_deviation_cost");
    }
    if (it->contains("t_bound") && !(*it)["t_bound"].is_null()) {
      cfg.search.t_bound = detail::as_number((*it)["t_bound"], "search.t_bound");
    }
    if (it->contains("collusion_check")) {
      cfg.search.collusion_check =
          detail::as_string((*it)["collusion_check"], "search.collusion_check");
    }
    if (it->contains("auto_escalate")) {
      cfg.search.auto_escalate = detail::as_boolean((*it)["auto_escalate"], "search.auto_escalate");
    }
  }

  if (auto it = j.find("sweep"); it != j.end()) {
    detail::check_keys(*it, {"m", "p", "x_high", "x_low"}, "sweep");
    SweepAxes axes;
    if (it->contains("m")) {
      const json& arr = (*it)["m"];
      if (!arr.is_array() || arr.empty()) throw ConfigError("sweep.m: expected a non-empty array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        axes.m.push_back(detail::as_integer(arr[i], "sweep.m[" + std::to_string(i) + "]"));
      }
    }
    auto passthrough = [](double, const std::string&) {};
    if (it->contains("p")) axes.p = detail::as_number_list((*it)["p"], "sweep.p", passthrough);
    if (it->contains("x_high")) {
      axes.x_high = detail::as_number_list((*it)["x_high"], "sweep.x_high", passthrough);
    }
    if (it->contains("x_low")) {
      axes.x_low = detail::as_number_list((*it)["x_low"], "sweep.x_low", passthrough);
    }
    if (axes.m.empty() && axes.p.empty() && axes.x_high.empty() && axes.x_low.empty()) {
      throw ConfigError("sweep: at least one axis is required");
    }
    cfg.sweep = std::move(axes);
  }

  // Lexical pass done; trip semantic validation with field-level diagnostics.
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline json RunConfig::to_json() const {
  json j;
  j["m"] = m;
  j["p"] = p;
  j["x_high"] = x_high;
  j["x_low"] = x_low;
  j["cost"]["family"] = cost.family;
  if (cost.family == "power") j["cost"]["exponent"] = cost.exponent;
  if (cost.family == "table") j["cost"]["values"] = cost.values;
  j["revenue"]["family"] = revenue.family;
  if (revenue.family == "custom") j["revenue"]["coefficients"] = revenue.coefficients;
  j["search"]["n_max"] = search.n_max;
  j["search"]["include_ic_high"] = search.include_ic_high;
  j["search"]["low_deviation_cost"] = search.low_deviation_cost;
  if (search.t_bound) {
    j["search"]["t_bound"] = *search.t_bound;
  }
  j["search"]["collusion_check"] = search.collusion_check;
  j["search"]["auto_escalate"] = search.auto_escalate;
  if (sweep) {
    if (!sweep->m.empty()) j["sweep"]["m"] = sweep->m;
    if (!sweep->p.empty()) j["sweep"]["p"] = sweep->p;
    if (!sweep->x_high.empty()) j["sweep"]["x_high"] = sweep->x_high;
    if (!sweep->x_low.empty()) j["sweep"]["x_low"] = sweep->x_low;
  }
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return RunConfig::from_json(j);
}

/// Mechanism JSON. Accepts the solve-command output as-is, so solve | verify
/// pipelines work without editing.
inline Mechanism<double> mechanism_from_json(const json& j, const RunConfig& cfg) {
  detail::check_keys(j,
                     {"m", "n", "t", "utility", "objective", "slacks", "search_stats", "status"},
                     "mechanism");
  if (j.contains("m") &&
      detail::as_integer(j["m"], "mechanism.m") != static_cast<long>(cfg.m)) {
    throw ConfigError("mechanism.m: does not match the config worker count");
  }
  const json& narr = detail::require(j, "n", "mechanism");
  const json& tarr = detail::require(j, "t", "mechanism");
  if (!narr.is_array() || !tarr.is_array()) {
    throw ConfigError("mechanism: n and t must be arrays");
  }
  Mechanism<double> mech;
  mech.profile = cfg.profile();
  mech.cost = cfg.cost_model();
  mech.revenue = cfg.revenue_model();
  for (std::size_t i = 0; i < narr.size(); ++i) {
    const long v = detail::as_integer(narr[i], "mechanism.n[" + std::to_string(i) + "]");
    if (v < 1) throw ConfigError("mechanism.n[" + std::to_string(i) + "]: must be >= 1");
    mech.n.push_back(v);
  }
  for (std::size_t i = 0; i < tarr.size(); ++i) {
    mech.t.push_back(detail::as_number(tarr[i], "mechanism.t[" + std::to_string(i) + "]"));
  }
  try {
    mech.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("mechanism: ") + e.what());
  }
  return mech;
}

inline json mechanism_to_json(const SolveReport<double>& report,
                              const SearchConfig<double>& cfg_used) {
  json j;
  if (report.status != SolveReport<double>::Status::ok) {
    j["status"] = "no_feasible_mechanism";
  } else {
    j["status"] = "ok";
    j["m"] = report.best->profile.m;
    j["n"] = report.best->n;
    j["t"] = report.best->t;
    j["utility"] = report.utility;
    j["objective"] = report.lp.objective;
    for (const auto& [label, slack] : report.slacks) {
      j["slacks"][to_string(label)] = slack;
    }
  }
  j["search_stats"]["candidates_examined"] = report.candidates_examined;
  j["search_stats"]["collusion_filtered"] = report.candidates_collusion_filtered;
  j["search_stats"]["lp_infeasible"] = report.candidates_lp_infeasible;
  if (report.best) {
    j["search_stats"]["boundary_flags"] = boundary_flags(report, cfg_used);
    j["search_stats"]["n_max_used"] = cfg_used.n_max;
    if (report.lp.box_bound_active) j["search_stats"]["t_bound_active"] = true;
  }
  return j;
}

inline json report_to_json(const DeviationReport<double>& report) {
  json j;
  j["verdict"] = report.pass ? "pass" : "fail";
  j["worst_gain"] = report.worst_gain;
  j["misreport_high"] = report.misreport_high;
  j["misreport_low"] = report.misreport_low;
  j["participation_high"] = report.participation_high;
  j["participation_low"] = report.participation_low;
  j["collusion"] = json::array();
  for (const auto& finding : report.collusion) {
    json f;
    f["case"] = finding.case_index;
    f["split"] = finding.split;
    f["gain"] = finding.gain;
    j["collusion"].push_back(std::move(f));
  }
  j["collusion_coverage"] = to_string(report.coverage);
  if (report.coverage == CollusionCoverage::bounded_sampled) {
    j["collusion_bound_ok"] = report.bound_ok;
  }
  return j;
}

}  // namespace mechproof
