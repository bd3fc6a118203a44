#pragma once

#include "ergo/control.hpp"

namespace ergo {

/// Solution of the free-boundary ODE on [a, b] with linear extensions of
/// slope q_d above b and -q_u below a. u is normalized by u(a) = 0.
struct HjbSolution {
    double lambda = 0.0;
    Eigen::ArrayXd x;   // grid on [a, b]
    Eigen::ArrayXd u;
    Eigen::ArrayXd du;
    ThresholdPair interval{};
    double y = 0.0;
    double q_u = 0.0;
    double q_d = 0.0;

    /// Piecewise-linear lookup of u' with the linear extensions outside [a,b].
    double slope_at(double xq) const;
};

struct VerificationReport {
    bool pass = false;
    double min_slope = 0.0;
    double max_slope = 0.0;
    double min_generator_slack = 0.0;  // inf over window of L_X u + c - lambda
    double slack_tol = -1e-7;
    std::vector<double> slack_violations;  // locations
    std::vector<double> slope_violations;  // locations
    Window window{};
};

/// Shooting solution of: (sigma^2/2) u'' + mu u' + c(., y) = lambda on (a,b),
/// u'(a) = -q_u, u'(b) = q_d. lambda is located by scalar root finding on the
/// terminal-slope mismatch.
HjbSolution solve_fbp(const DiffusionModel& model, const CostModel& cost,
                      const ThresholdPair& interval, double y, int steps = 4096,
                      const Tolerance& tol = {});

/// Checks the global inequalities L_X u + c >= lambda and -q_u <= u' <= q_d
/// on the window. Outside [a,b] the linear extensions reduce the generator
/// slack to pi1(x,y) - lambda (x > b) and pi2(x,y) - lambda (x < a).
VerificationReport verify_hjb(const DiffusionModel& model, const CostModel& cost,
                              const HjbSolution& solution, const Window& check_window,
                              double slack_tol = -1e-7);

}  // namespace ergo
