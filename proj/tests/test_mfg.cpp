#include <doctest.h>

#include <cmath>

#include "ergo/mfg.hpp"

using namespace ergo;

namespace {
const DiffusionModel kOuWide = DiffusionModel::ou(0.4, 2.0);
const DiffusionModel kOuTight = DiffusionModel::ou(3.0, 2.0);
const DiffusionModel kBm = DiffusionModel::bm_drift(-0.89, 1.0);
const CostModel kMult = CostModel::mult_maxlin(1.0, 1.0, 0.1, 0.1);
const CostModel kAbs01 = CostModel::abs_diff(0.1, 0.1);
const CostModel kAbs005 = CostModel::abs_diff(0.05, 0.05);
}  // namespace

TEST_CASE("stationary mean basics") {
    const auto bm0 = DiffusionModel::bm_drift(0.0, 1.0);
    CHECK(stationary_mean(bm0, MarketStatistic{}, ThresholdPair{0.0, 2.0}) ==
          doctest::Approx(1.0).epsilon(1e-10));
    // f = identity keeps R inside [a, b]
    const double r = stationary_mean(kBm, MarketStatistic{}, ThresholdPair{-1.0, 3.0});
    CHECK(r > -1.0);
    CHECK(r < 3.0);
}

TEST_CASE("closed-form R against quadrature") {
    for (const ThresholdPair pair :
         {ThresholdPair{-0.7, 1.3}, ThresholdPair{-2.0, -0.5}, ThresholdPair{0.3, 2.4}}) {
        CHECK(closed_form_R(kOuTight, pair) ==
              doctest::Approx(stationary_mean(kOuTight, MarketStatistic{}, pair))
                  .epsilon(1e-8));
        CHECK(closed_form_R(kBm, pair) ==
              doctest::Approx(stationary_mean(kBm, MarketStatistic{}, pair)).epsilon(1e-8));
    }
    Eigen::ArrayXd mu(2), sig(1);
    mu << 0.1, -1.0;
    sig << 1.0;
    CHECK_THROWS_AS(closed_form_R(DiffusionModel::custom_poly(mu, sig),
                                  ThresholdPair{0.0, 1.0}),
                    UnknownFamily);
}

TEST_CASE("equilibrium residuals vanish at the published point") {
    const auto res = equilibrium_residuals(kOuWide, kMult, ThresholdPair{-0.646, 0.646});
    CHECK(std::abs(res.first) < 5e-3);
    CHECK(std::abs(res.second) < 5e-3);
    // symmetry forces residual_i to vanish exactly on symmetric pairs
    const auto sym = equilibrium_residuals(kOuWide, kMult, ThresholdPair{-1.1, 1.1});
    CHECK(std::abs(sym.first) < 1e-13);
}

TEST_CASE("condition-(ii) residual is translation invariant for bm") {
    const double C = 0.5520830;
    const auto at0 = equilibrium_residuals(kBm, kAbs005, ThresholdPair{0.0, C});
    for (double a : {-5.0, -2.0, 3.0, 5.0}) {
        const auto res = equilibrium_residuals(kBm, kAbs005, ThresholdPair{a, a + C});
        CHECK(std::abs(res.second - at0.second) < 1e-9);
    }
}

TEST_CASE("residuals are invariant under the scale anchor") {
    auto shifted = kOuTight;
    shifted.reference_point = 2.2;
    const ThresholdPair pair{-1.2, 0.4};
    const auto base = equilibrium_residuals(kOuTight, kAbs01, pair);
    const auto moved = equilibrium_residuals(shifted, kAbs01, pair);
    CHECK(base.first == doctest::Approx(moved.first).epsilon(1e-9));
    CHECK(base.second == doctest::Approx(moved.second).epsilon(1e-9));
}

TEST_CASE("rho on the symmetric branch") {
    // lambda = 1 and even g force the mirror barrier
    CHECK(rho(kOuWide, kMult, -0.5, Window{-3.0, 3.0, 121}) ==
          doctest::Approx(0.5).epsilon(1e-9));
    // q_u = lambda q_d reduces condition (i) to b = -lambda a
    const auto mult2 = CostModel::mult_maxlin(2.0, 1.0, 0.2, 0.1);
    CHECK(rho(kOuWide, mult2, -0.5, Window{-6.0, 6.0, 241}) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rho translation for bm is a constant width") {
    for (double a : {-2.0, -1.0, 0.5}) {
        CHECK(rho(kBm, kAbs005, a, Window{-3.0, 3.0, 121}) - a ==
              doctest::Approx(0.5520830).epsilon(1e-6));
    }
}

TEST_CASE("rho throws EmptyCa when no admissible barrier exists") {
    CHECK_THROWS_AS(rho(kOuWide, kMult, 2.5, Window{-6.0, 3.0, 181}), EmptyCa);
}

TEST_CASE("rho_branches finds both branches of the tight setup") {
    // near a = -4.26 the condition-(i) zero set has the main branch and, for
    // some a, further admissible roots
    const RootSet branches = rho_branches(kOuTight, kAbs01, -4.0, Window{-6.0, 6.0, 241});
    CHECK(!branches.empty());
    for (std::size_t i = 1; i < branches.roots.size(); ++i)
        CHECK(branches.roots[i] > branches.roots[i - 1]);
}

TEST_CASE("find_equilibria reproduces the single wide-well equilibrium") {
    const auto points = find_equilibria(kOuWide, kMult, Window{-3.0, 3.0, 121});
    REQUIRE(points.size() == 1);
    CHECK(points[0].thresholds.a == doctest::Approx(-0.6477470955533).epsilon(1e-7));
    CHECK(points[0].thresholds.b == doctest::Approx(0.6477470955533).epsilon(1e-7));
    CHECK(points[0].value == doctest::Approx(0.6218372117312).epsilon(1e-8));
    CHECK(points[0].R_value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(points[0].classification == EquilibriumClass::Interior);
}

TEST_CASE("find_equilibria reproduces all three tight-well equilibria") {
    const auto points = find_equilibria(kOuTight, kAbs01, Window{-6.0, 6.0, 241});
    REQUIRE(points.size() == 3);
    CHECK(points[0].thresholds.a == doctest::Approx(-4.2630121170).epsilon(1e-6));
    CHECK(points[0].thresholds.b == doctest::Approx(-1.8645770750).epsilon(1e-6));
    CHECK(points[1].thresholds.a == doctest::Approx(-0.7839837767).epsilon(1e-6));
    CHECK(points[1].thresholds.b == doctest::Approx(0.7839837767).epsilon(1e-6));
    CHECK(points[2].thresholds.a == doctest::Approx(1.8645770750).epsilon(1e-6));
    CHECK(points[2].thresholds.b == doctest::Approx(4.2630121170).epsilon(1e-6));
    CHECK(points[0].value == doctest::Approx(0.8394522647).epsilon(1e-7));
    CHECK(points[1].value == doctest::Approx(0.5487886437).epsilon(1e-7));
    CHECK(points[2].value == doctest::Approx(0.8394522647).epsilon(1e-7));
    // the off-diagonal pair is the mirror image of its partner
    CHECK(points[0].thresholds.a == doctest::Approx(-points[2].thresholds.b).epsilon(1e-6));
    CHECK(points[0].thresholds.b == doctest::Approx(-points[2].thresholds.a).epsilon(1e-6));
}

TEST_CASE("find_equilibria returns empty for the heavy-cost drift setup") {
    const auto bm1 = DiffusionModel::bm_drift(-1.0, 1.0);
    const auto points = find_equilibria(bm1, CostModel::abs_diff(1.0, 1.0),
                                        Window{-4.0, 4.0, 161});
    CHECK(points.empty());
}

TEST_CASE("bm condition roots at the published drift") {
    const auto [r1, r2] = bm_condition_roots(-0.89, 0.1);
    REQUIRE(r1.roots.size() == 1);
    REQUIRE(r2.roots.size() == 1);
    CHECK(r1.roots[0] == doctest::Approx(0.5520830).epsilon(1e-6));
    CHECK(r2.roots[0] == doctest::Approx(0.8805935).epsilon(1e-6));
    CHECK_THROWS_AS(bm_condition_roots(0.5, 0.1), NumericError);
    CHECK_THROWS_AS(bm_condition_roots(-1.0, 0.0), NumericError);
}

TEST_CASE("bm closed form requires a common root of both equations") {
    // the two printed equations never share a root at these parameters
    CHECK_FALSE(bm_closed_form(-0.89, 0.1).has_value());
    CHECK_FALSE(bm_closed_form(-1.0, 2.0).has_value());
}

TEST_CASE("multiplicative analysis verdicts") {
    const auto report = multiplicative_analysis(kOuWide, kMult, 0.0, Window{-6.0, 6.0, 241});
    CHECK(report.c1_holds);
    CHECK(report.c1_left == doctest::Approx(0.2));  // (q_d+q_u)/S'(0)
    CHECK(report.c2_monotone);
    CHECK(report.verdict == MultiplicativeVerdict::ExistsUnique);
    CHECK(report.c2_samples.size() >= 3);

    const auto at_anchor =
        multiplicative_analysis(kOuWide, kMult, -0.3, Window{-6.0, 6.0, 241});
    CHECK(at_anchor.verdict == MultiplicativeVerdict::ExistsUnique);

    // q_d theta above the product-cost threshold: evidence must not certify
    const auto heavy = CostModel::mult_maxlin(1.0, 1.0, 3.0, 3.0);
    const auto bad = multiplicative_analysis(kOuWide, heavy, -0.3, Window{-6.0, 6.0, 241});
    CHECK(bad.verdict == MultiplicativeVerdict::Inconclusive);

    CHECK_THROWS_AS(multiplicative_analysis(kOuWide, kAbs01, -0.3, Window{-6.0, 6.0, 241}),
                    NumericError);
    CHECK_THROWS_AS(multiplicative_analysis(kOuWide, kMult, 0.5, Window{-6.0, 6.0, 241}),
                    NumericError);
}

TEST_CASE("fixed-point consistency of found equilibria") {
    const auto points = find_equilibria(kOuWide, kMult, Window{-3.0, 3.0, 121});
    REQUIRE(points.size() == 1);
    const ControlSolution best =
        solve_control(kOuWide, kMult, points[0].R_value, Window{-3.0, 3.0, 121});
    CHECK(std::abs(best.thresholds.a - points[0].thresholds.a) < 1e-5);
    CHECK(std::abs(best.thresholds.b - points[0].thresholds.b) < 1e-5);
}
