#include "ergo/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergo {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double slope(const ScalarFn& fn, double x) {
    const double h = 1e-6 * (1.0 + std::abs(x));
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}
}  // namespace

double pi1(const DiffusionModel& model, const CostModel& cost, double x, double y) {
    return cost.eval(x, y) + cost.q_d * model.drift(x);
}

double pi2(const DiffusionModel& model, const CostModel& cost, double x, double y) {
    return cost.eval(x, y) - cost.q_u * model.drift(x);
}

double ergodic_cost(const DiffusionModel& model, const CostModel& cost,
                    const ThresholdPair& interval, double y, const Tolerance& tol) {
    interval.validate(0.0);
    const double mass = model.speed_measure(interval.a, interval.b, tol);
    const double running = integrate(
        [&](double u) { return cost.eval(u, y) * model.speed_density(u); }, interval.a,
        interval.b, tol);
    return (running + cost.q_u / model.scale_density(interval.a) +
            cost.q_d / model.scale_density(interval.b)) /
           mass;
}

double match_upper_barrier(const DiffusionModel& model, const CostModel& cost, double a,
                           double y, double scan_hi, int grid_n, const SolveOptions& opt) {
    const auto pi2_of = [&](double x) { return pi2(model, cost, x, y); };
    // a must sit on the non-increasing side of pi2.
    if (slope(pi2_of, a) > 1e-7) return kNaN;

    const double lo = a + std::max(opt.delta_min, 1e-12 * (1.0 + std::abs(a)));
    if (!(lo < scan_hi)) return kNaN;
    const double target = pi2_of(a);
    const auto pi1_of = [&](double x) { return pi1(model, cost, x, y); };
    const RootSet roots = find_roots([&](double b) { return pi1_of(b) - target; },
                                     Window{lo, scan_hi, grid_n}, opt.tol);
    for (double b : roots.roots)
        if (slope(pi1_of, b) >= -1e-7) return b;
    return kNaN;
}

double stationarity_residual(const DiffusionModel& model, const CostModel& cost, double a,
                             double y, double scan_hi, int grid_n, const SolveOptions& opt) {
    const double b = match_upper_barrier(model, cost, a, y, scan_hi, grid_n, opt);
    if (!std::isfinite(b)) return kNaN;
    const double pi1_b = pi1(model, cost, b, y);
    // Re-anchoring the scale density at a makes the residual invariant under
    // renormalization and, for translation-invariant models, independent of a.
    const double anchor = model.scale_density(a);
    const double integral = integrate(
        [&](double t) {
            return (pi1(model, cost, t, y) - pi1_b) * model.speed_density(t) * anchor;
        },
        a, b, opt.tol);
    return integral + (cost.q_d + cost.q_u);
}

ControlSolution solve_control(const DiffusionModel& model, const CostModel& cost, double y,
                              const Window& scan, const SolveOptions& opt) {
    scan.validate();
    Window window = scan;
    RootSet found;
    for (int expansion = 0;; ++expansion) {
        const auto residual = [&](double a) {
            return stationarity_residual(model, cost, a, y, window.hi, window.grid_n, opt);
        };
        found = find_roots(residual, window, opt.tol);
        if (!found.empty()) break;
        if (expansion >= opt.max_expansions)
            throw NoBracket("stationarity residual has no sign change on the scan window");
        const double mid = 0.5 * (window.lo + window.hi);
        const double half = window.span();  // doubled span
        window = Window{mid - half, mid + half, 2 * window.grid_n - 1};
    }

    struct Candidate {
        ThresholdPair pair;
        double cost_value;
    };
    std::vector<Candidate> candidates;
    for (double a : found.roots) {
        const double b = match_upper_barrier(model, cost, a, y, window.hi, window.grid_n, opt);
        if (!std::isfinite(b)) continue;
        if (b - a < opt.delta_min)
            throw DegenerateInterval("solved pair collapsed below delta_min");
        const ThresholdPair pair{a, b};
        candidates.push_back({pair, ergodic_cost(model, cost, pair, y, opt.tol)});
    }
    if (candidates.empty())
        throw NoBracket("no admissible stationary pair found on the scan window");

    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& l, const Candidate& r) { return l.cost_value < r.cost_value; });

    ControlSolution sol;
    sol.thresholds = candidates.front().pair;
    sol.value = candidates.front().cost_value;
    sol.residual_i = pi1(model, cost, sol.thresholds.b, y) - pi2(model, cost, sol.thresholds.a, y);
    sol.residual_ii = stationarity_residual(model, cost, sol.thresholds.a, y, window.hi,
                                            window.grid_n, opt);
    for (std::size_t i = 1; i < candidates.size(); ++i)
        sol.other_candidates.push_back(candidates[i].pair);

    const double pad = 2.0 + 0.5 * sol.thresholds.width();
    sol.assumptions = check_assumptions(
        model, cost, y,
        Window{sol.thresholds.a - pad, sol.thresholds.b + pad, 257});
    return sol;
}

}  // namespace ergo
