#include <doctest.h>

#include <cmath>

#include "ergo/control.hpp"

using namespace ergo;

namespace {
const DiffusionModel kOuWide = DiffusionModel::ou(0.4, 2.0);
const DiffusionModel kOuTight = DiffusionModel::ou(3.0, 2.0);
const DiffusionModel kBm = DiffusionModel::bm_drift(-0.89, 1.0);
const CostModel kMult = CostModel::mult_maxlin(1.0, 1.0, 0.1, 0.1);
const CostModel kAbs01 = CostModel::abs_diff(0.1, 0.1);
const CostModel kAbs005 = CostModel::abs_diff(0.05, 0.05);
}  // namespace

TEST_CASE("pi1 and pi2 definitions") {
    CHECK(pi1(kOuWide, kAbs01, 1.0, 0.0) == doctest::Approx(1.0 + 0.1 * (-0.4)));
    CHECK(pi2(kOuWide, kAbs01, 1.0, 0.0) == doctest::Approx(1.0 - 0.1 * (-0.4)));
    CHECK(pi1(kBm, kAbs005, 0.5, 0.2) == doctest::Approx(0.3 + 0.05 * (-0.89)));
}

TEST_CASE("drift integrates to the scale density boundary terms") {
    // int_a^b mu m'(du) = 1/S'(b) - 1/S'(a) for both closed-form families
    for (const DiffusionModel* m : {&kOuTight, &kBm}) {
        const double a = -1.3, b = 0.8;
        const double lhs = integrate(
            [&](double t) { return m->drift(t) * m->speed_density(t); }, a, b);
        const double rhs = 1.0 / m->scale_density(b) - 1.0 / m->scale_density(a);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("ergodic cost at the known frozen-market optimum") {
    const ThresholdPair pair{-0.6477470955533267, 0.6477470955533267};
    CHECK(ergodic_cost(kOuWide, kMult, pair, 0.0) ==
          doctest::Approx(0.6218372117311971).epsilon(1e-10));
}

TEST_CASE("ergodic cost is invariant under the scale anchor") {
    auto shifted = kOuWide;
    shifted.reference_point = 1.3;
    const ThresholdPair pair{-0.9, 0.4};
    CHECK(ergodic_cost(kOuWide, kMult, pair, 0.2) ==
          doctest::Approx(ergodic_cost(shifted, kMult, pair, 0.2)).epsilon(1e-9));
}

TEST_CASE("matched upper barrier respects the straddle filter") {
    // at the optimum the matched barrier is the mirror point
    const double b = match_upper_barrier(kOuWide, kMult, -0.6477470955533267, 0.0, 3.0, 121);
    CHECK(b == doctest::Approx(0.6477470955533267).epsilon(1e-9));
    // a on the increasing side of pi2 is rejected
    CHECK(std::isnan(match_upper_barrier(kOuWide, kMult, 0.5, 0.0, 3.0, 121)));
}

TEST_CASE("stationarity residual brackets the optimum") {
    const double lo = stationarity_residual(kOuWide, kMult, -0.8, 0.0, 3.0, 121);
    const double hi = stationarity_residual(kOuWide, kMult, -0.5, 0.0, 3.0, 121);
    CHECK(lo * hi < 0.0);
}

TEST_CASE("stationarity residual is invariant under the scale anchor") {
    auto shifted = kOuWide;
    shifted.reference_point = -0.7;
    CHECK(stationarity_residual(kOuWide, kMult, -0.8, 0.0, 3.0, 121) ==
          doctest::Approx(stationarity_residual(shifted, kMult, -0.8, 0.0, 3.0, 121))
              .epsilon(1e-9));
}

TEST_CASE("solve_control reproduces the frozen-market thresholds") {
    const ControlSolution sol = solve_control(kOuWide, kMult, 0.0, Window{-3.0, 3.0, 121});
    CHECK(sol.thresholds.a == doctest::Approx(-0.6477470955533267).epsilon(1e-8));
    CHECK(sol.thresholds.b == doctest::Approx(0.6477470955533267).epsilon(1e-8));
    CHECK(sol.value == doctest::Approx(0.6218372117311971).epsilon(1e-10));
    CHECK(std::abs(sol.residual_i) < 1e-9);
    CHECK(std::abs(sol.residual_ii) < 1e-9);
    CHECK(sol.assumptions.all_pass());
}

TEST_CASE("solve_control symmetry for symmetric data") {
    const auto bm0 = DiffusionModel::bm_drift(0.0, 1.0);
    const ControlSolution sol = solve_control(bm0, kAbs01, 0.0, Window{-3.0, 3.0, 121});
    CHECK(sol.thresholds.a == doctest::Approx(-sol.thresholds.b).epsilon(1e-9));
}

TEST_CASE("solve_control window auto-expands to reach the root") {
    // optimum near +-0.65 is outside the initial window
    const ControlSolution sol = solve_control(kOuWide, kMult, 0.0, Window{-0.2, 0.2, 21});
    CHECK(sol.thresholds.a == doctest::Approx(-0.6477470955533267).epsilon(1e-7));
}

TEST_CASE("solve_control reports NoBracket when expansion is capped") {
    SolveOptions opt;
    opt.max_expansions = 0;
    const auto cost = CostModel::quadratic(100.0, 1.0, 0.1, 0.1);
    const auto bm0 = DiffusionModel::bm_drift(0.0, 1.0);
    CHECK_THROWS_AS(solve_control(bm0, cost, 0.0, Window{-1.0, 1.0, 21}, opt), NoBracket);
}

TEST_CASE("solve_control fixed-point consistency at the second equilibrium") {
    // at the symmetric equilibrium of the tight mean-reverting setup, the best
    // response to y = 0 is the equilibrium pair itself
    const ControlSolution sol = solve_control(kOuTight, kAbs01, 0.0, Window{-2.0, 2.0, 81});
    CHECK(sol.thresholds.a == doctest::Approx(-0.7839837767088735).epsilon(1e-6));
    CHECK(sol.thresholds.b == doctest::Approx(0.7839837767088735).epsilon(1e-6));
}

TEST_CASE("solve_control fixed-point consistency off the symmetric branch") {
    const ControlSolution sol =
        solve_control(kOuTight, kAbs01, -2.1446562172068924, Window{-6.0, 0.0, 121});
    CHECK(sol.thresholds.a == doctest::Approx(-4.263012117029031).epsilon(1e-5));
    CHECK(sol.thresholds.b == doctest::Approx(-1.8645770749906632).epsilon(1e-5));
}

TEST_CASE("threshold pair validation") {
    CHECK_THROWS_AS((ThresholdPair{1.0, 1.0}.validate()), DegenerateInterval);
    CHECK((ThresholdPair{-1.0, 2.0}.width()) == doctest::Approx(3.0));
}
