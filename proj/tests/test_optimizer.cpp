#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mechproof/adversary.hpp"
#include "mechproof/optimizer.hpp"
#include "support/grid_oracle.hpp"

using namespace mechproof;

namespace {

/// Brute-force reference: per allocation, an inline collusion re-check plus
/// the grid-refinement reward oracle, scanning the whole space.
struct BruteBest {
  bool found = false;
  double utility = 0.0;
  std::vector<long> n;
};

BruteBest brute_force_two_worker(const QualityProfile<double>& prof,
                                 const CostModel<double>& cost,
                                 const RevenueModel<double>& revenue, long n_max) {
  BruteBest best;
  const auto probs = case_probabilities(prof).probs;
  for (long n1 = 1; n1 <= n_max; ++n1) {
    for (long n2 = 1; n2 <= n_max; ++n2) {
      for (long n3 = 1; n3 <= n_max; ++n3) {
        // inline exhaustive collusion screen on the mixed case; the
        // fractional full-offload relaxation coincides with k = n2 here
        bool ok = true;
        const double honest =
            cost.value_at(n2) * prof.x_high + cost.value_at(n2) * prof.x_low;
        for (long k = 0; k <= n2 && ok; ++k) {
          ok = cost.value_at(n2 - k) * prof.x_high + cost.value_at(n2 + k) * prof.x_low >=
               honest - 1e-9;
        }
        if (!ok) continue;
        std::vector<long> n = {n1, n2, n3};
        auto rows = build_rows(prof, cost, n).rows;
        auto grid = grid_oracle::minimize(rows, probs);
        if (!grid.feasible) continue;
        double utility = -prof.m * grid.objective;
        for (int j = 1; j <= 3; ++j) {
          const std::size_t idx = static_cast<std::size_t>(j - 1);
          const double mix = (prof.m + 1 - j) * prof.x_high + (j - 1) * prof.x_low;
          utility += probs[idx] * (revenue.value(prof, j, n[idx]) - n[idx] * mix);
        }
        if (!best.found || utility > best.utility + 1e-9) {
          best.found = true;
          best.utility = utility;
          best.n = n;
        }
      }
    }
  }
  return best;
}

SearchConfig<double> default_config(long n_max) {
  SearchConfig<double> cfg;
  cfg.n_max = n_max;
  return cfg;
}

}  // namespace

TEST_CASE("optimizer matches the brute-force scan on the worked family") {
  QualityProfile<double> prof{2, 0.5, 2.0, 1.0};
  auto cost = CostModel<double>::exp2_minus_one();
  auto revenue = RevenueModel<double>::quadratic_quality_weighted();
  auto report = optimize(prof, cost, revenue, default_config(6));
  REQUIRE(report.status == SolveReport<double>::Status::ok);
  auto brute = brute_force_two_worker(prof, cost, revenue, 6);
  REQUIRE(brute.found);
  CHECK(report.utility == Catch::Approx(brute.utility).margin(1e-6));
  CHECK(report.best->n == brute.n);
  CHECK(report.candidates_examined == 216);
}

TEST_CASE("exact-mode pipeline anchor on the worked family") {
  QualityProfile<Rational> prof{2, Rational(1, 2), Rational(2), Rational(1)};
  SearchConfig<Rational> cfg;
  cfg.n_max = 6;
  auto report = optimize(prof, CostModel<Rational>::exp2_minus_one(),
                         RevenueModel<Rational>::quadratic_quality_weighted(), cfg);
  REQUIRE(report.status == SolveReport<Rational>::Status::ok);
  CHECK(report.best->n == std::vector<long>{1, 2, 3});
  CHECK(report.best->t == std::vector<Rational>{Rational(0), Rational(2), Rational(7)});
  CHECK(report.utility == Rational(1, 2));
  CHECK(report.candidates_examined == 216);
  CHECK(report.candidates_collusion_filtered == 0);
  CHECK(report.candidates_lp_infeasible == 90);
  CHECK(report.slacks.at(RowLabel::ir_high) == Rational(0));
  CHECK(report.slacks.at(RowLabel::ic_low) == Rational(0));
  // the double instantiation lands on the same mechanism
  QualityProfile<double> dprof{2, 0.5, 2.0, 1.0};
  SearchConfig<double> dcfg;
  dcfg.n_max = 6;
  auto dreport = optimize(dprof, CostModel<double>::exp2_minus_one(),
                          RevenueModel<double>::quadratic_quality_weighted(), dcfg);
  REQUIRE(dreport.status == SolveReport<double>::Status::ok);
  CHECK(dreport.best->n == report.best->n);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(dreport.best->t[j] ==
          Catch::Approx(ScalarOps<Rational>::to_double(report.best->t[j])).margin(1e-9));
  }
}

TEST_CASE("three-worker optimum agrees with the enumerated utility route") {
  QualityProfile<double> prof{3, 0.5, 80.0, 20.0};
  SearchConfig<double> cfg;
  cfg.n_max = 12;
  cfg.collusion_check = CollusionCheck::closed_form;
  auto report = optimize(prof, CostModel<double>::exp2_minus_one(),
                         RevenueModel<double>::quadratic_quality_weighted(), cfg);
  REQUIRE(report.status == SolveReport<double>::Status::ok);
  CHECK(report.utility ==
        Catch::Approx(enumerated_requestor_utility(*report.best)).margin(1e-9));
  CHECK(report.utility == Catch::Approx(-142.5).margin(1e-9));
  CHECK(report.best->n == std::vector<long>{1, 2, 3, 3});
}

TEST_CASE("beyond three workers the screened optimum still verifies") {
  QualityProfile<double> prof{4, 0.5, 1.5, 1.0};
  SearchConfig<double> cfg;
  cfg.n_max = 3;
  auto report = optimize(prof, CostModel<double>::exp2_minus_one(),
                         RevenueModel<double>::quadratic_quality_weighted(), cfg);
  REQUIRE(report.status == SolveReport<double>::Status::ok);
  auto deviations = verify(prof, CostModel<double>::exp2_minus_one(), *report.best);
  CHECK(deviations.coverage == CollusionCoverage::bounded_sampled);
  CHECK(deviations.bound_ok);
  CHECK(deviations.pass);
}

TEST_CASE("singleton search space returns the all-ones allocation when valid") {
  QualityProfile<double> prof{2, 0.5, 2.0, 1.0};
  auto cost = CostModel<double>::exp2_minus_one();
  auto revenue = RevenueModel<double>::quadratic_quality_weighted();
  auto report = optimize(prof, cost, revenue, default_config(1));
  REQUIRE(report.status == SolveReport<double>::Status::ok);
  CHECK(report.best->n == std::vector<long>{1, 1, 1});
  CHECK(report.best->t[2] == Catch::Approx(2.0));
  CHECK(report.utility == Catch::Approx(-1.0));
}

TEST_CASE("singleton search space can have no feasible mechanism") {
  // wide quality gap: the n_2 = 1 allocation already admits collusion
  QualityProfile<double> prof{2, 0.5, 21.0, 1.0};
  auto report = optimize(prof, CostModel<double>::exp2_minus_one(),
                         RevenueModel<double>::quadratic_quality_weighted(),
                         default_config(1));
  CHECK(report.status == SolveReport<double>::Status::no_feasible_mechanism);
  CHECK(report.candidates_collusion_filtered == 1);
}

TEST_CASE("oversized search spaces are rejected up front") {
  QualityProfile<double> prof{5, 0.5, 2.0, 1.0};
  CHECK_THROWS_AS(optimize(prof, CostModel<double>::exp2_minus_one(),
                           RevenueModel<double>::quadratic_quality_weighted(),
                           default_config(12)),
                  SearchSpaceTooLarge);
}

TEST_CASE("utility grows with the share of high-quality workers") {
  QualityProfile<double> prof{2, 0.5, 21.0, 1.0};
  auto cost = CostModel<double>::exp2_minus_one();
  auto revenue = RevenueModel<double>::quadratic_quality_weighted();
  SearchConfig<double> cfg = default_config(12);
  cfg.collusion_check = CollusionCheck::closed_form;
  double previous = 0.0;
  bool first = true;
  for (int i = 1; i <= 9; ++i) {
    prof.p = i / 10.0;
    auto report = optimize(prof, cost, revenue, cfg);
    REQUIRE(report.status == SolveReport<double>::Status::ok);
    if (!first) CHECK(report.utility >= previous - 1e-9);
    previous = report.utility;
    first = false;
  }
}

TEST_CASE("dropping the high-type truthfulness row never hurts the requestor") {
  std::mt19937 rng(73);
  std::uniform_real_distribution<double> punif(0.1, 0.9);
  std::uniform_real_distribution<double> xunif(1.0, 8.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double xl = xunif(rng);
    QualityProfile<double> prof{2, punif(rng), xl + xunif(rng), xl};
    auto cost = trial % 2 == 0 ? CostModel<double>::exp2_minus_one()
                               : CostModel<double>::power(2);
    auto revenue = RevenueModel<double>::quadratic_quality_weighted();
    SearchConfig<double> with_ic = default_config(6);
    SearchConfig<double> without_ic = default_config(6);
    without_ic.include_ic_high = false;
    auto full = optimize(prof, cost, revenue, with_ic);
    auto relaxed = optimize(prof, cost, revenue, without_ic);
    if (full.status != SolveReport<double>::Status::ok) continue;
    REQUIRE(relaxed.status == SolveReport<double>::Status::ok);
    CHECK(relaxed.utility >= full.utility - 1e-9);
  }
}

TEST_CASE("collusion-rejected allocations lose for every reward vector") {
  // the screen is reward-independent: whatever t is attached, the adversary
  // still finds the profitable split
  QualityProfile<double> prof{2, 0.5, 9.0, 1.0};
  auto cost = CostModel<double>::exp2_minus_one();
  auto res = collusion_proof(prof, cost, {1, 4, 3});
  REQUIRE_FALSE(res.ok);
  std::mt19937 rng(79);
  std::uniform_real_distribution<double> tunif(-50.0, 50.0);
  for (int trial = 0; trial < 10; ++trial) {
    Mechanism<double> mech{{1, 4, 3},
                           {tunif(rng), tunif(rng), tunif(rng)},
                           prof,
                           cost,
                           RevenueModel<double>::quadratic_quality_weighted()};
    auto report = verify(prof, cost, mech);
    CHECK_FALSE(report.pass);
    bool collusion_found = false;
    for (const auto& finding : report.collusion) collusion_found |= finding.gain > kEpsilon;
    CHECK(collusion_found);
  }
}

TEST_CASE("argmax allocation is invariant under common quality scaling") {
  for (const long lambda : {2L, 5L}) {
    QualityProfile<Rational> prof{2, Rational(2, 5), Rational(3), Rational(2)};
    QualityProfile<Rational> scaled = prof;
    scaled.x_high *= lambda;
    scaled.x_low *= lambda;
    auto cost = CostModel<Rational>::power(2);
    auto revenue = RevenueModel<Rational>::quadratic_quality_weighted();
    SearchConfig<Rational> cfg;
    cfg.n_max = 4;
    auto base = optimize(prof, cost, revenue, cfg);
    auto big = optimize(scaled, cost, revenue, cfg);
    REQUIRE(base.status == SolveReport<Rational>::Status::ok);
    REQUIRE(big.status == SolveReport<Rational>::Status::ok);
    CHECK(base.best->n == big.best->n);
    CHECK(big.utility == base.utility * lambda);
  }
}

TEST_CASE("boundary flags mark allocations that hit the search cap") {
  QualityProfile<double> prof{2, 0.5, 2.0, 1.0};
  SolveReport<double> report;
  report.best = Mechanism<double>{{12, 3, 2}, {0, 0, 0}, prof,
                                  CostModel<double>::exp2_minus_one(),
                                  RevenueModel<double>::quadratic_quality_weighted()};
  auto cfg = default_config(12);
  auto flags = boundary_flags(report, cfg);
  CHECK(flags == std::vector<bool>{true, false, false});
  CHECK(hits_boundary(report, cfg));
  report.best->n = {3, 4, 2};
  CHECK_FALSE(hits_boundary(report, cfg));
}

TEST_CASE("thread count does not change the reported optimum") {
  QualityProfile<double> prof{2, 0.35, 6.0, 4.0};
  auto cost = CostModel<double>::exp2_minus_one();
  auto revenue = RevenueModel<double>::quadratic_quality_weighted();
  SearchConfig<double> serial = default_config(8);
  serial.threads = 1;
  SearchConfig<double> wide = default_config(8);
  wide.threads = 7;
  auto a = optimize(prof, cost, revenue, serial);
  auto b = optimize(prof, cost, revenue, wide);
  REQUIRE(a.status == b.status);
  REQUIRE(a.status == SolveReport<double>::Status::ok);
  CHECK(a.best->n == b.best->n);
  CHECK(a.best->t == b.best->t);
  CHECK(a.utility == b.utility);
  CHECK(a.candidates_examined == b.candidates_examined);
  CHECK(a.candidates_collusion_filtered == b.candidates_collusion_filtered);
  CHECK(a.candidates_lp_infeasible == b.candidates_lp_infeasible);
}

TEST_CASE("float-mode search reproduces exact-mode outcomes") {
  struct Point {
    int m;
    int p_num;  // p = p_num / 10
    long xh, xl;
  };
  for (const Point& pt : {Point{2, 3, 19, 1}, Point{2, 7, 9, 5}, Point{3, 5, 80, 20}}) {
    QualityProfile<Rational> exact_prof{pt.m, Rational(pt.p_num, 10), Rational(pt.xh),
                                        Rational(pt.xl)};
    QualityProfile<double> float_prof{pt.m, pt.p_num / 10.0, double(pt.xh), double(pt.xl)};
    SearchConfig<Rational> exact_cfg;
    exact_cfg.n_max = 8;
    exact_cfg.collusion_check = CollusionCheck::closed_form;
    SearchConfig<double> float_cfg;
    float_cfg.n_max = 8;
    float_cfg.collusion_check = CollusionCheck::closed_form;
    auto exact = optimize(exact_prof, CostModel<Rational>::exp2_minus_one(),
                          RevenueModel<Rational>::quadratic_quality_weighted(), exact_cfg);
    auto approx = optimize(float_prof, CostModel<double>::exp2_minus_one(),
                           RevenueModel<double>::quadratic_quality_weighted(), float_cfg);
    REQUIRE(exact.status == SolveReport<Rational>::Status::ok);
    REQUIRE(approx.status == SolveReport<double>::Status::ok);
    CHECK(approx.best->n == exact.best->n);
    CHECK(approx.utility ==
          Catch::Approx(ScalarOps<Rational>::to_double(exact.utility)).margin(1e-9));
    for (std::size_t j = 0; j < approx.best->t.size(); ++j) {
      CHECK(approx.best->t[j] ==
            Catch::Approx(ScalarOps<Rational>::to_double(exact.best->t[j])).margin(1e-7));
    }
  }
}

TEST_CASE("reported utility is consistent with the reward objective") {
  QualityProfile<double> prof{3, 0.45, 5.0, 3.0};
  auto cost = CostModel<double>::exp2_minus_one();
  auto revenue = RevenueModel<double>::quadratic_quality_weighted();
  auto report = optimize(prof, cost, revenue, default_config(4));
  REQUIRE(report.status == SolveReport<double>::Status::ok);
  const auto probs = case_probabilities(prof).probs;
  double tfree = -prof.m * report.lp.objective;
  for (int j = 1; j <= 4; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j - 1);
    const double mix = (prof.m + 1 - j) * prof.x_high + (j - 1) * prof.x_low;
    tfree += probs[idx] *
             (revenue.value(prof, j, report.best->n[idx]) - report.best->n[idx] * mix);
  }
  CHECK(report.utility == Catch::Approx(tfree).margin(1e-9));
  CHECK(report.utility ==
        Catch::Approx(enumerated_requestor_utility(*report.best)).margin(1e-9));
}
