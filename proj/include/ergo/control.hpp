#pragma once

#include <vector>

#include "ergo/models.hpp"

namespace ergo {

/// Reflecting barriers a < b.
struct ThresholdPair {
    double a = 0.0;
    double b = 0.0;

    double width() const { return b - a; }
    void validate(double delta_min = 1e-6) const {
        if (!(b - a >= delta_min))
            throw DegenerateInterval("threshold pair requires b - a >= delta_min");
    }
};

struct SolveOptions {
    double delta_min = 1e-6;
    int max_expansions = 4;   // scan window doublings before NoBracket
    Tolerance tol{};
};

/// Optimal thresholds for the frozen-market problem, with the ergodic value
/// and the residuals of the two optimality conditions.
struct ControlSolution {
    ThresholdPair thresholds{};
    double value = 0.0;
    double residual_i = 0.0;
    double residual_ii = 0.0;
    AssumptionReport assumptions{};
    std::vector<ThresholdPair> other_candidates;  // larger-cost stationary pairs
};

/// pi1(x,y) = c(x,y) + q_d mu(x); pi2(x,y) = c(x,y) - q_u mu(x).
double pi1(const DiffusionModel& model, const CostModel& cost, double x, double y);
double pi2(const DiffusionModel& model, const CostModel& cost, double x, double y);

/// Long-run average cost of reflecting at (a, b) against market level y:
/// [ int_a^b c(u,y) m(du) + q_u/S'(a) + q_d/S'(b) ] / m(a,b).
double ergodic_cost(const DiffusionModel& model, const CostModel& cost,
                    const ThresholdPair& interval, double y, const Tolerance& tol = {});

/// Smallest admissible b > a with pi1(b,y) = pi2(a,y), where admissible means
/// b sits on the non-decreasing side of pi1(.,y) and a on the non-increasing
/// side of pi2(.,y) (the barrier pair must straddle the pi minima).
/// Returns NaN when no such root exists on (a, scan_hi].
double match_upper_barrier(const DiffusionModel& model, const CostModel& cost, double a,
                           double y, double scan_hi, int grid_n, const SolveOptions& opt = {});

/// Residual of the integral optimality condition at a, with b = matched upper
/// barrier: int_a^b (pi1(t,y) - pi1(b,y)) m(dt) + (q_d+q_u)/S'(a).
/// NaN when no matched barrier exists.
double stationarity_residual(const DiffusionModel& model, const CostModel& cost, double a,
                             double y, double scan_hi, int grid_n, const SolveOptions& opt = {});

/// Optimal threshold pair for the frozen-market ergodic problem. When several
/// stationary pairs exist, returns the one with smallest ergodic cost and
/// lists the rest. The scan window auto-expands (doubling) until the integral
/// residual brackets a sign change or the expansion cap is hit.
ControlSolution solve_control(const DiffusionModel& model, const CostModel& cost, double y,
                              const Window& scan, const SolveOptions& opt = {});

}  // namespace ergo
