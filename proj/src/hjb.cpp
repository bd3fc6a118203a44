#include "ergo/hjb.hpp"

#include <algorithm>
#include <cmath>

namespace ergo {

double HjbSolution::slope_at(double xq) const {
    if (xq <= interval.a) return -q_u;
    if (xq >= interval.b) return q_d;
    const double h = (interval.b - interval.a) / (x.size() - 1);
    const auto i = static_cast<Eigen::Index>((xq - interval.a) / h);
    const auto lo = std::min<Eigen::Index>(i, x.size() - 2);
    const double w = (xq - x[lo]) / h;
    return (1.0 - w) * du[lo] + w * du[lo + 1];
}

namespace {

// Terminal slope u'(b) of the shooting trajectory for a trial lambda.
double terminal_slope(const DiffusionModel& model, const CostModel& cost,
                      const ThresholdPair& iv, double y, double lambda, int steps) {
    const OdeRhs rhs = [&](double xx, const Eigen::VectorXd& s) {
        const double sig = model.vol(xx);
        Eigen::VectorXd d(2);
        d[0] = s[1];
        d[1] = 2.0 * (lambda - cost.eval(xx, y) - model.drift(xx) * s[1]) / (sig * sig);
        return d;
    };
    Eigen::VectorXd s0(2);
    s0 << 0.0, -cost.q_u;
    return shoot_ode(rhs, iv.a, iv.b, s0, steps)[1];
}

}  // namespace

HjbSolution solve_fbp(const DiffusionModel& model, const CostModel& cost,
                      const ThresholdPair& interval, double y, int steps,
                      const Tolerance& tol) {
    interval.validate();
    if (steps < 16) throw NumericError("solve_fbp requires steps >= 16");

    const auto mismatch = [&](double lambda) {
        return terminal_slope(model, cost, interval, y, lambda, steps) - cost.q_d;
    };

    // u'(b) is increasing in lambda; bracket around the quadrature cost value.
    const double guess = ergodic_cost(model, cost, interval, y, tol);
    double lo = guess - 0.5 * (1.0 + std::abs(guess));
    double hi = guess + 0.5 * (1.0 + std::abs(guess));
    double flo = mismatch(lo);
    double fhi = mismatch(hi);
    for (int i = 0; i < 60 && flo > 0.0; ++i) {
        lo -= (hi - lo);
        flo = mismatch(lo);
    }
    for (int i = 0; i < 60 && fhi < 0.0; ++i) {
        hi += (hi - lo);
        fhi = mismatch(hi);
    }
    if (!(flo <= 0.0 && fhi >= 0.0))
        throw NoBracket("could not bracket lambda in the free-boundary shoot");

    double lambda = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double cand = lo - flo * (hi - lo) / (fhi - flo);
        const double margin = 1e-3 * (hi - lo);
        if (!(cand > lo + margin && cand < hi - margin)) cand = 0.5 * (lo + hi);
        const double f = mismatch(cand);
        lambda = cand;
        if (std::abs(f) <= tol.abs_tol || hi - lo <= 1e-15 * (1.0 + std::abs(lambda))) break;
        if (f < 0.0) {
            lo = cand;
            flo = f;
        } else {
            hi = cand;
            fhi = f;
        }
    }

    HjbSolution sol;
    sol.lambda = lambda;
    sol.interval = interval;
    sol.y = y;
    sol.q_u = cost.q_u;
    sol.q_d = cost.q_d;
    sol.x = Eigen::ArrayXd::LinSpaced(steps + 1, interval.a, interval.b);
    sol.u.resize(steps + 1);
    sol.du.resize(steps + 1);

    Eigen::Index k = 0;
    const OdeRhs rhs = [&](double xx, const Eigen::VectorXd& s) {
        const double sig = model.vol(xx);
        Eigen::VectorXd d(2);
        d[0] = s[1];
        d[1] = 2.0 * (lambda - cost.eval(xx, y) - model.drift(xx) * s[1]) / (sig * sig);
        return d;
    };
    Eigen::VectorXd s0(2);
    s0 << 0.0, -cost.q_u;
    shoot_ode_observed(rhs, interval.a, interval.b, s0, steps,
                       [&](double, const Eigen::VectorXd& s) {
                           sol.u[k] = s[0];
                           sol.du[k] = s[1];
                           ++k;
                       });
    return sol;
}

VerificationReport verify_hjb(const DiffusionModel& model, const CostModel& cost,
                              const HjbSolution& sol, const Window& check_window,
                              double slack_tol) {
    check_window.validate();
    VerificationReport report;
    report.window = check_window;
    report.slack_tol = slack_tol;

    // Slope bounds are binding on [a, b]; the extensions sit exactly on them.
    report.min_slope = sol.du.minCoeff();
    report.max_slope = sol.du.maxCoeff();
    const double slope_slack = 1e-7 * (1.0 + cost.q_u + cost.q_d);
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) {
        if (sol.du[i] < -sol.q_u - slope_slack || sol.du[i] > sol.q_d + slope_slack)
            report.slope_violations.push_back(sol.x[i]);
    }

    // Generator slack: identically zero on (a,b) by construction of the ODE;
    // outside it reduces to pi1 - lambda above b and pi2 - lambda below a.
    report.min_generator_slack = 0.0;
    const Eigen::ArrayXd xs = check_window.grid();
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const double xq = xs[i];
        double slack;
        if (xq > sol.interval.b)
            slack = pi1(model, cost, xq, sol.y) - sol.lambda;
        else if (xq < sol.interval.a)
            slack = pi2(model, cost, xq, sol.y) - sol.lambda;
        else
            continue;
        report.min_generator_slack = std::min(report.min_generator_slack, slack);
        if (slack < slack_tol) report.slack_violations.push_back(xq);
    }

    report.pass = report.slack_violations.empty() && report.slope_violations.empty();
    return report;
}

}  // namespace ergo
