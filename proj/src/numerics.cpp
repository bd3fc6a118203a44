#include "ergo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergo {

void Window::validate() const {
    if (!(hi - lo > 0.0)) throw NumericError("window requires hi > lo");
    if (grid_n < 2) throw NumericError("window requires grid_n >= 2");
}

namespace {

struct SimpsonPanel {
    double fa, fm, fb;
    double estimate;
};

SimpsonPanel simpson(const ScalarFn& fn, double lo, double hi, double fa, double fb) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    return {fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)};
}

double adaptive(const ScalarFn& fn, double lo, double hi, const SimpsonPanel& whole,
                const Tolerance& tol, double target, int depth) {
    const double mid = 0.5 * (lo + hi);
    const SimpsonPanel left = simpson(fn, lo, mid, whole.fa, whole.fm);
    const SimpsonPanel right = simpson(fn, mid, hi, whole.fm, whole.fb);
    const double refined = left.estimate + right.estimate;
    const double err = (refined - whole.estimate) / 15.0;
    if (std::abs(err) <= target) return refined + err;
    if (depth >= tol.max_depth)
        throw QuadratureFailure("adaptive quadrature did not converge at depth " +
                                std::to_string(depth));
    return adaptive(fn, lo, mid, left, tol, 0.5 * target, depth + 1) +
           adaptive(fn, mid, hi, right, tol, 0.5 * target, depth + 1);
}

}  // namespace

double integrate(const ScalarFn& fn, double lo, double hi, const Tolerance& tol) {
    if (lo == hi) return 0.0;
    if (lo > hi) throw NumericError("integrate requires lo <= hi");
    const double fa = fn(lo);
    const double fb = fn(hi);
    if (!std::isfinite(fa) || !std::isfinite(fb))
        throw QuadratureFailure("integrand not finite at interval endpoint");
    const SimpsonPanel whole = simpson(fn, lo, hi, fa, fb);
    const double scale = std::max(std::abs(whole.estimate), 1e-30);
    const double target = std::max(tol.abs_tol, tol.rel_tol * scale);
    return adaptive(fn, lo, hi, whole, tol, target, 0);
}

namespace {

// Bracketed hybrid: secant step when it stays inside the bracket, midpoint
// otherwise. flo/fhi must have opposite signs.
double refine_root(const ScalarFn& fn, double lo, double hi, double flo, double fhi,
                   const Tolerance& tol) {
    double x = lo, fx = flo;
    for (int it = 0; it < 200; ++it) {
        double cand;
        const double denom = fhi - flo;
        if (denom != 0.0) {
            cand = lo - flo * (hi - lo) / denom;
            const double margin = 1e-3 * (hi - lo);
            if (!(cand > lo + margin && cand < hi - margin)) cand = 0.5 * (lo + hi);
        } else {
            cand = 0.5 * (lo + hi);
        }
        x = cand;
        fx = fn(x);
        if (std::abs(fx) <= tol.abs_tol) return x;
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo <= std::numeric_limits<double>::epsilon() *
                           (std::abs(lo) + std::abs(hi) + 1e-300))
            break;
    }
    // Bracket exhausted at machine precision; return the better endpoint.
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

}  // namespace

RootSet find_roots(const ScalarFn& fn, const Window& window, const Tolerance& tol) {
    window.validate();
    RootSet out;
    const Eigen::ArrayXd xs = window.grid();
    Eigen::ArrayXd fs(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) fs[i] = fn(xs[i]);

    for (Eigen::Index i = 0; i + 1 < xs.size(); ++i) {
        const double flo = fs[i], fhi = fs[i + 1];
        if (!std::isfinite(flo) || !std::isfinite(fhi)) continue;
        if (flo == 0.0) {
            // Node-exact zero belongs to the bracket on its left; it was (or
            // will be) reported there, except at the very first node.
            if (i == 0) {
                out.roots.push_back(xs[i]);
                out.brackets.emplace_back(xs[i], xs[i + 1]);
            }
            continue;
        }
        if (fhi == 0.0) {
            out.roots.push_back(xs[i + 1]);
            out.brackets.emplace_back(xs[i], xs[i + 1]);
            continue;
        }
        if ((flo < 0.0) != (fhi < 0.0)) {
            out.roots.push_back(refine_root(fn, xs[i], xs[i + 1], flo, fhi, tol));
            out.brackets.emplace_back(xs[i], xs[i + 1]);
        }
    }
    return out;
}

std::vector<std::pair<double, double>> trace_implicit(const Scalar2Fn& fn,
                                                      const Window& window_a,
                                                      const Window& window_b,
                                                      const Tolerance& tol) {
    window_a.validate();
    window_b.validate();
    std::vector<std::pair<double, double>> points;
    const Eigen::ArrayXd as = window_a.grid();
    for (Eigen::Index i = 0; i < as.size(); ++i) {
        const double a = as[i];
        const RootSet col = find_roots([&](double b) { return fn(a, b); }, window_b, tol);
        for (double b : col.roots) points.emplace_back(a, b);
    }
    return points;
}

Eigen::VectorXd shoot_ode_observed(
    const OdeRhs& rhs, double x0, double x1, const Eigen::VectorXd& state0, int steps,
    const std::function<void(double, const Eigen::VectorXd&)>& observer) {
    if (steps < 1) throw NumericError("shoot_ode requires steps >= 1");
    const double h = (x1 - x0) / steps;
    Eigen::VectorXd y = state0;
    double x = x0;
    if (observer) observer(x, y);
    for (int i = 0; i < steps; ++i) {
        const Eigen::VectorXd k1 = rhs(x, y);
        const Eigen::VectorXd k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
        const Eigen::VectorXd k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
        const Eigen::VectorXd k4 = rhs(x + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x = x0 + (i + 1) * h;
        if (!y.allFinite()) throw NonFiniteState("ODE state diverged at x = " + std::to_string(x));
        if (observer) observer(x, y);
    }
    return y;
}

Eigen::VectorXd shoot_ode(const OdeRhs& rhs, double x0, double x1,
                          const Eigen::VectorXd& state0, int steps) {
    return shoot_ode_observed(rhs, x0, x1, state0, steps, nullptr);
}

}  // namespace ergo
