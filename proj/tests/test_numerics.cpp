#include <doctest.h>

#include <cmath>

#include "ergo/numerics.hpp"

using namespace ergo;

TEST_CASE("adaptive quadrature on smooth integrands") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("quadrature endpoint conventions") {
    const ScalarFn f = [](double x) { return x; };
    CHECK(integrate(f, 2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(integrate(f, 1.0, 0.0), NumericError);
}

TEST_CASE("quadrature handles a sharp but integrable peak") {
    // int exp(-x^2/eps)/sqrt(pi eps) ~ 1 for eps small
    const double eps = 1e-4;
    const double v = integrate(
        [&](double x) { return std::exp(-x * x / eps) / std::sqrt(M_PI * eps); }, -1.0, 1.0);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("root finding locates every bracketed root") {
    const RootSet roots = find_roots([](double x) { return std::cos(x); },
                                     Window{0.0, 7.0, 71});
    REQUIRE(roots.roots.size() == 2);
    CHECK(roots.roots[0] == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(roots.roots[1] == doctest::Approx(3 * M_PI / 2).epsilon(1e-12));
    CHECK(roots.brackets.size() == 2);
    CHECK(roots.brackets[0].first <= roots.roots[0]);
    CHECK(roots.brackets[0].second >= roots.roots[0]);
}

TEST_CASE("root finding with a node landing exactly on zero") {
    const RootSet roots = find_roots([](double x) { return x; }, Window{-1.0, 1.0, 3});
    REQUIRE(roots.roots.size() == 1);
    CHECK(roots.roots[0] == doctest::Approx(0.0));
}

TEST_CASE("root finding returns empty without a sign change") {
    CHECK(find_roots([](double x) { return 1.0 + x * x; }, Window{-2.0, 2.0, 41}).empty());
}

TEST_CASE("root finding skips non-finite grid values") {
    const RootSet roots = find_roots(
        [](double x) { return x < 0.0 ? std::nan("") : x - 0.5; }, Window{-1.0, 1.0, 21});
    REQUIRE(roots.roots.size() == 1);
    CHECK(roots.roots[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("implicit tracing recovers a circle") {
    const auto points = trace_implicit(
        [](double a, double b) { return a * a + b * b - 1.0; }, Window{-0.9, 0.9, 19},
        Window{-2.0, 2.0, 41});
    REQUIRE(!points.empty());
    for (const auto& [a, b] : points)
        CHECK(a * a + b * b == doctest::Approx(1.0).epsilon(1e-9));
    // interior columns cross the circle twice
    std::size_t on_zero = 0;
    for (const auto& [a, b] : points)
        if (a == doctest::Approx(0.0)) ++on_zero;
    CHECK(on_zero == 2);
}

TEST_CASE("rk4 shooting against exponential growth") {
    const OdeRhs rhs = [](double, const Eigen::VectorXd& s) { return s; };
    Eigen::VectorXd s0(1);
    s0 << 1.0;
    const Eigen::VectorXd end = shoot_ode(rhs, 0.0, 1.0, s0, 256);
    CHECK(end[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("rk4 observer sees every grid point") {
    const OdeRhs rhs = [](double, const Eigen::VectorXd& s) { return s; };
    Eigen::VectorXd s0(1);
    s0 << 1.0;
    int count = 0;
    double last_x = -1.0;
    shoot_ode_observed(rhs, 0.0, 1.0, s0, 32, [&](double x, const Eigen::VectorXd&) {
        ++count;
        last_x = x;
    });
    CHECK(count == 33);
    CHECK(last_x == doctest::Approx(1.0));
}

TEST_CASE("rk4 rejects a blowing-up state") {
    // u' = u^2 from u(0)=1 blows up at x=1
    const OdeRhs rhs = [](double, const Eigen::VectorXd& s) {
        Eigen::VectorXd d(1);
        d[0] = s[0] * s[0];
        return d;
    };
    Eigen::VectorXd s0(1);
    s0 << 1.0;
    CHECK_THROWS_AS(shoot_ode(rhs, 0.0, 2.0, s0, 64), NonFiniteState);
}

TEST_CASE("window validation") {
    CHECK_THROWS_AS((Window{1.0, 0.0, 11}.validate()), NumericError);
    CHECK_THROWS_AS((Window{0.0, 1.0, 1}.validate()), NumericError);
    CHECK((Window{0.0, 1.0, 5}.step()) == doctest::Approx(0.25));
}
