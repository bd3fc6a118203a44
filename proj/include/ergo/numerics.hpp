#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "ergo/errors.hpp"

namespace ergo {

using ScalarFn = std::function<double(double)>;
using Scalar2Fn = std::function<double(double, double)>;

/// Accuracy knobs for quadrature and root refinement.
struct Tolerance {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_depth = 50;
};

/// Scan/evaluation range with a grid resolution.
struct Window {
    double lo = 0.0;
    double hi = 0.0;
    int grid_n = 2;

    double span() const { return hi - lo; }
    double step() const { return span() / (grid_n - 1); }
    Eigen::ArrayXd grid() const { return Eigen::ArrayXd::LinSpaced(grid_n, lo, hi); }
    void validate() const;
};

/// Roots found by grid scanning, sorted increasing, with their sign-change brackets.
struct RootSet {
    std::vector<double> roots;
    std::vector<std::pair<double, double>> brackets;

    bool empty() const { return roots.empty(); }
};

/// Adaptive-Simpson integral of fn over [lo, hi].
/// Returns 0 when lo == hi; throws QuadratureFailure when max_depth is
/// exhausted before the error estimate falls below max(abs_tol, rel_tol*|I|).
double integrate(const ScalarFn& fn, double lo, double hi, const Tolerance& tol = {});

/// All sign-change roots of fn on the window grid, refined by a
/// bisection/secant hybrid. Tangential roots without a sign change are not
/// detected. A node landing exactly on zero is assigned to the left bracket.
RootSet find_roots(const ScalarFn& fn, const Window& window, const Tolerance& tol = {});

/// Point cloud of the zero set of fn(a,b): for each grid column a, every
/// b-root of fn(a, .). Ordered by a, then b.
std::vector<std::pair<double, double>> trace_implicit(const Scalar2Fn& fn,
                                                      const Window& window_a,
                                                      const Window& window_b,
                                                      const Tolerance& tol = {});

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Fixed-step classical Runge-Kutta integration of state' = rhs(x, state)
/// from x0 to x1. Throws NonFiniteState if the state leaves the finite range.
Eigen::VectorXd shoot_ode(const OdeRhs& rhs, double x0, double x1,
                          const Eigen::VectorXd& state0, int steps);

/// As shoot_ode, invoking observer(x, state) after every accepted step
/// (and once at x0).
Eigen::VectorXd shoot_ode_observed(
    const OdeRhs& rhs, double x0, double x1, const Eigen::VectorXd& state0, int steps,
    const std::function<void(double, const Eigen::VectorXd&)>& observer);

}  // namespace ergo
