#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mechproof/adversary.hpp"
#include "mechproof/optimizer.hpp"

using namespace mechproof;

namespace {

Mechanism<double> worked_mechanism(std::vector<double> t) {
  QualityProfile<double> prof{2, 0.5, 2.0, 1.0};
  return Mechanism<double>{{1, 1, 1}, std::move(t), prof,
                           CostModel<double>::exp2_minus_one(),
                           RevenueModel<double>::quadratic_quality_weighted()};
}

}  // namespace

TEST_CASE("zero rewards fail verification through the low-type lie") {
  auto mech = worked_mechanism({0.0, 0.0, 0.0});
  auto report = verify(mech.profile, mech.cost, mech);
  CHECK_FALSE(report.pass);
  CHECK(report.misreport_low == Catch::Approx(0.5));
  CHECK(report.worst_gain >= 0.5 - 1e-12);
}

TEST_CASE("the worked mechanism passes with zero worst gain") {
  auto mech = worked_mechanism({0.0, 0.0, 2.0});
  auto report = verify(mech.profile, mech.cost, mech);
  CHECK(report.pass);
  CHECK(report.worst_gain == Catch::Approx(0.0).margin(1e-12));
  CHECK(report.coverage == CollusionCoverage::exhaustive);
  CHECK(report.participation_high >= -kEpsilon);
  CHECK(report.participation_low >= -kEpsilon);
}

TEST_CASE("linear cost yields the documented collusion counterexample") {
  QualityProfile<double> prof{2, 0.5, 2.0, 1.0};
  Mechanism<double> mech{{1, 2, 1},
                         {0.0, 0.0, 0.0},
                         prof,
                         CostModel<double>::power(1),
                         RevenueModel<double>::quadratic_quality_weighted()};
  auto report = verify(prof, mech.cost, mech);
  CHECK_FALSE(report.pass);
  REQUIRE(report.collusion.size() == 1);
  CHECK(report.collusion[0].case_index == 2);
  CHECK(report.collusion[0].split == std::vector<long>{2, 2});
  CHECK(report.collusion[0].gain == Catch::Approx(2.0));
}

TEST_CASE("misreport gains equal the negated truthfulness slacks") {
  std::mt19937 rng(83);
  std::uniform_real_distribution<double> punif(0.1, 0.9);
  std::uniform_real_distribution<double> xunif(1.0, 9.0);
  std::uniform_real_distribution<double> tunif(-20.0, 20.0);
  std::uniform_int_distribution<long> nunif(1, 5);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 3;
    const double xl = xunif(rng);
    QualityProfile<double> prof{m, punif(rng), xl + xunif(rng), xl};
    auto cost = trial % 2 == 0 ? CostModel<double>::exp2_minus_one()
                               : CostModel<double>::power(2);
    const auto policy =
        trial % 4 == 0 ? LowDeviationCost::claimed_type : LowDeviationCost::own_type;
    std::vector<long> n;
    std::vector<double> t;
    for (int j = 0; j <= m; ++j) {
      n.push_back(nunif(rng));
      t.push_back(tunif(rng));
    }
    Mechanism<double> mech{n, t, prof, cost,
                           RevenueModel<double>::quadratic_quality_weighted()};
    VerifyOptions<double> opts;
    opts.low_deviation_cost = policy;
    auto report = verify(prof, cost, mech, opts);
    auto slacks = residuals(build_rows(prof, cost, n, policy).rows, t);
    CHECK(report.misreport_high ==
          Catch::Approx(-slacks[RowLabel::ic_high]).margin(1e-9));
    CHECK(report.misreport_low ==
          Catch::Approx(-slacks[RowLabel::ic_low]).margin(1e-9));
    CHECK(report.participation_high ==
          Catch::Approx(slacks[RowLabel::ir_high]).margin(1e-9));
    CHECK(report.participation_low ==
          Catch::Approx(slacks[RowLabel::ir_low]).margin(1e-9));
    // the engine-route worker utilities agree with the enumeration route
    CHECK(worker_expected_utility(prof, mech, Quality::high, Quality::high) ==
          Catch::Approx(report.participation_high).margin(1e-9));
    CHECK(worker_expected_utility(prof, mech, Quality::low, Quality::low) ==
          Catch::Approx(report.participation_low).margin(1e-9));
  }
}

TEST_CASE("collusion findings never lose to the idle split") {
  // the all-zero split is always available, so the best gain is >= 0
  std::mt19937 rng(89);
  std::uniform_real_distribution<double> xunif(1.0, 5.0);
  std::uniform_int_distribution<long> nunif(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 2;
    const double xl = xunif(rng);
    QualityProfile<double> prof{m, 0.5, xl + xunif(rng), xl};
    std::vector<long> n;
    for (int j = 0; j <= m; ++j) n.push_back(nunif(rng));
    Mechanism<double> mech{n, std::vector<double>(n.size(), 0.0), prof,
                           CostModel<double>::exp2_minus_one(),
                           RevenueModel<double>::quadratic_quality_weighted()};
    auto report = verify(prof, mech.cost, mech);
    for (const auto& finding : report.collusion) CHECK(finding.gain >= 0.0);
  }
}

TEST_CASE("collusion witness gains recompute from raw split costs") {
  QualityProfile<double> prof{3, 0.4, 9.0, 1.0};
  auto cost = CostModel<double>::exp2_minus_one();
  Mechanism<double> mech{{1, 2, 2, 1},
                         {0.0, 0.0, 0.0, 0.0},
                         prof,
                         cost,
                         RevenueModel<double>::quadratic_quality_weighted()};
  auto report = verify(prof, cost, mech);
  for (const auto& finding : report.collusion) {
    const int i = finding.case_index - 1;
    const int h = prof.m - i;
    const long v = mech.n[static_cast<std::size_t>(i)];
    double honest = h * cost.value_at(v) * prof.x_high + i * cost.value_at(v) * prof.x_low;
    double split = 0.0;
    for (int g = 0; g < h; ++g) {
      split += cost.value_at(v - finding.split[static_cast<std::size_t>(g)]) * prof.x_high;
    }
    for (int w = 0; w < i; ++w) {
      split +=
          cost.value_at(v + finding.split[static_cast<std::size_t>(h + w)]) * prof.x_low;
    }
    CHECK(finding.gain == Catch::Approx(honest - split).margin(1e-12));
  }
}

TEST_CASE("full-offload-only coverage mirrors the published screen") {
  QualityProfile<double> prof{2, 0.5, 9.0, 1.0};
  auto cost = CostModel<double>::exp2_minus_one();
  Mechanism<double> mech{{1, 4, 3},
                         {0.0, 99.0, 104.0},
                         prof,
                         cost,
                         RevenueModel<double>::quadratic_quality_weighted()};
  VerifyOptions<double> closed;
  closed.collusion_check = CollusionCheck::closed_form;
  auto closed_report = verify(prof, cost, mech, closed);
  CHECK(closed_report.coverage == CollusionCoverage::full_offload_only);
  // the full offload itself does not profit here...
  REQUIRE(closed_report.collusion.size() == 1);
  CHECK(closed_report.collusion[0].gain <= 0.0);
  // ...but the exhaustive scan still finds the partial-offload deviation
  auto full_report = verify(prof, cost, mech);
  bool collusion_found = false;
  for (const auto& finding : full_report.collusion) {
    collusion_found |= finding.gain > kEpsilon;
  }
  CHECK(collusion_found);
  CHECK_FALSE(full_report.pass);
}

TEST_CASE("larger worker counts fall back to bound plus sampling") {
  QualityProfile<double> prof{4, 0.5, 2.0, 1.0};
  auto cost = CostModel<double>::exp2_minus_one();
  Mechanism<double> mech{{1, 2, 2, 2, 1},
                         {10.0, 10.0, 10.0, 10.0, 10.0},
                         prof,
                         cost,
                         RevenueModel<double>::quadratic_quality_weighted()};
  auto a = verify(prof, cost, mech);
  auto b = verify(prof, cost, mech);
  CHECK(a.coverage == CollusionCoverage::bounded_sampled);
  // deterministic sampling: identical reports across runs
  CHECK(a.worst_gain == b.worst_gain);
  REQUIRE(a.collusion.size() == b.collusion.size());
  for (std::size_t i = 0; i < a.collusion.size(); ++i) {
    CHECK(a.collusion[i].split == b.collusion[i].split);
    CHECK(a.collusion[i].gain == b.collusion[i].gain);
  }
}

TEST_CASE("requestor utility from type-vector enumeration matches the model") {
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> punif(0.1, 0.9);
  std::uniform_real_distribution<double> xunif(1.0, 9.0);
  std::uniform_real_distribution<double> tunif(-5.0, 5.0);
  std::uniform_int_distribution<long> nunif(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 3;
    const double xl = xunif(rng);
    QualityProfile<double> prof{m, punif(rng), xl + xunif(rng), xl};
    std::vector<long> n;
    std::vector<double> t;
    for (int j = 0; j <= m; ++j) {
      n.push_back(nunif(rng));
      t.push_back(tunif(rng));
    }
    Mechanism<double> mech{n, t, prof, CostModel<double>::power(2),
                           RevenueModel<double>::quadratic_quality_weighted()};
    CHECK(enumerated_requestor_utility(mech) ==
          Catch::Approx(requestor_expected_utility(mech)).margin(1e-9));
  }
}

TEST_CASE("regret curve locates the lying threshold") {
  QualityProfile<double> base{2, 0.5, 9.0, 1.0};
  std::vector<double> ps;
  for (int i = 1; i <= 9; ++i) ps.push_back(i / 10.0);
  auto curve = regret_curve(base, CostModel<double>::exp2_minus_one(), {1, 4, 3}, ps);
  REQUIRE(curve.size() == 9);
  for (const auto& pt : curve) REQUIRE(pt.feasible);
  CHECK(curve.front().ic_high_gain > 0.0);
  CHECK(curve.back().ic_high_gain < 0.0);

  // cross-implementation identity at each grid point
  for (const auto& pt : curve) {
    QualityProfile<double> prof = base;
    prof.p = pt.p;
    auto slacks =
        residuals(build_rows(prof, CostModel<double>::exp2_minus_one(), {1, 4, 3}).rows, pt.t);
    CHECK(pt.ic_high_gain == Catch::Approx(-slacks[RowLabel::ic_high]).margin(1e-9));
    Mechanism<double> mech{{1, 4, 3}, pt.t, prof, CostModel<double>::exp2_minus_one(),
                           RevenueModel<double>::quadratic_quality_weighted()};
    auto report = verify(prof, mech.cost, mech);
    CHECK(report.misreport_high == Catch::Approx(pt.ic_high_gain).margin(1e-9));
  }
}

TEST_CASE("mechanisms designed with the full constraint set never reward lying") {
  QualityProfile<double> prof{2, 0.3, 4.0, 2.0};
  SearchConfig<double> cfg;
  cfg.n_max = 6;
  auto report = optimize(prof, CostModel<double>::exp2_minus_one(),
                         RevenueModel<double>::quadratic_quality_weighted(), cfg);
  REQUIRE(report.status == SolveReport<double>::Status::ok);
  auto deviations = verify(prof, CostModel<double>::exp2_minus_one(), *report.best);
  CHECK(deviations.pass);
  CHECK(deviations.misreport_high <= kEpsilon);
  CHECK(deviations.misreport_low <= kEpsilon);
}
