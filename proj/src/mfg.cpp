#include "ergo/mfg.hpp"

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

double condition_i(const DiffusionModel& model, const CostModel& cost, double a, double b,
                   const Tolerance& tol) {
    const double R = stationary_mean(model, cost.market_statistic, ThresholdPair{a, b}, tol);
    return pi1(model, cost, b, R) - pi2(model, cost, a, R);
}

// The barrier pair must straddle the pi minima: b on the non-decreasing side
// of pi1(., R), a on the non-increasing side of pi2(., R).
bool admissible(const DiffusionModel& model, const CostModel& cost, double a, double b,
                const Tolerance& tol) {
    const double R = stationary_mean(model, cost.market_statistic, ThresholdPair{a, b}, tol);
    const double s1 = slope([&](double x) { return pi1(model, cost, x, R); }, b);
    const double s2 = slope([&](double x) { return pi2(model, cost, x, R); }, a);
    return s1 >= -1e-7 && s2 <= 1e-7;
}

}  // namespace

double stationary_mean(const DiffusionModel& model, const MarketStatistic& f,
                       const ThresholdPair& interval, const Tolerance& tol) {
    interval.validate(0.0);
    const double mass = model.speed_measure(interval.a, interval.b, tol);
    const double num = integrate([&](double u) { return f(u) * model.speed_density(u); },
                                 interval.a, interval.b, tol);
    return num / mass;
}

double closed_form_R(const DiffusionModel& model, const ThresholdPair& interval) {
    interval.validate(0.0);
    const double a = interval.a;
    const double b = interval.b;
    const double s2 = model.sigma * model.sigma;
    switch (model.family) {
        case DiffusionFamily::BmDrift: {
            const double k = 2.0 * model.mu / s2;
            if (k == 0.0) return 0.5 * (a + b);
            // Shift the exponentials by the midpoint to avoid overflow.
            const double m = 0.5 * (a + b);
            const double ea = std::exp(k * (a - m));
            const double eb = std::exp(k * (b - m));
            return (b * eb - a * ea) / (eb - ea) - 1.0 / k;
        }
        case DiffusionFamily::Ou: {
            const double th = model.theta;
            const double r = std::sqrt(th) / model.sigma;
            const double num = (std::exp(-th * a * a / s2) - std::exp(-th * b * b / s2)) /
                               (2.0 * th / s2);
            const double den =
                0.5 * std::sqrt(M_PI) / r * (std::erf(r * b) - std::erf(r * a));
            return num / den;
        }
        default:
            throw UnknownFamily("closed_form_R supports bm_drift and ou only");
    }
}

std::pair<double, double> equilibrium_residuals(const DiffusionModel& model,
                                                const CostModel& cost,
                                                const ThresholdPair& pair,
                                                const Tolerance& tol) {
    pair.validate(0.0);
    const double R = stationary_mean(model, cost.market_statistic, pair, tol);
    const double res_i = pi1(model, cost, pair.b, R) - pi2(model, cost, pair.a, R);
    const double pi1_b = pi1(model, cost, pair.b, R);
    // Scale density re-anchored at a, as in stationarity_residual.
    const double anchor = model.scale_density(pair.a);
    const double integral = integrate(
        [&](double t) {
            return (pi1(model, cost, t, R) - pi1_b) * model.speed_density(t) * anchor;
        },
        pair.a, pair.b, tol);
    const double res_ii = integral + (cost.q_d + cost.q_u);
    return {res_i, res_ii};
}

RootSet rho_branches(const DiffusionModel& model, const CostModel& cost, double a,
                     const Window& scan, const SolveOptions& opt) {
    scan.validate();
    const double lo = std::max(scan.lo, a + std::max(opt.delta_min, 1e-12 * (1.0 + std::abs(a))));
    RootSet out;
    if (!(lo < scan.hi)) return out;
    const int n = std::max(16, static_cast<int>(std::ceil(scan.grid_n * (scan.hi - lo) /
                                                          scan.span())));
    const RootSet raw =
        find_roots([&](double b) { return condition_i(model, cost, a, b, opt.tol); },
                   Window{lo, scan.hi, n}, opt.tol);
    for (std::size_t i = 0; i < raw.roots.size(); ++i) {
        if (admissible(model, cost, a, raw.roots[i], opt.tol)) {
            out.roots.push_back(raw.roots[i]);
            out.brackets.push_back(raw.brackets[i]);
        }
    }
    return out;
}

double rho(const DiffusionModel& model, const CostModel& cost, double a, const Window& scan,
           const SolveOptions& opt) {
    const RootSet branches = rho_branches(model, cost, a, scan, opt);
    if (branches.empty())
        throw EmptyCa("no admissible matching barrier above a on the scan window");
    return branches.roots.front();
}

namespace {

// Admissible condition-(i) root nearest to b_guess, searched in a widening
// local window and falling back to the full scan.
double branch_root(const DiffusionModel& model, const CostModel& cost, double a,
                   double b_guess, double width, const Window& scan,
                   const SolveOptions& opt) {
    const double floor = a + std::max(opt.delta_min, 1e-12 * (1.0 + std::abs(a)));
    for (int attempt = 0; attempt < 3; ++attempt) {
        const double lo = std::max(floor, b_guess - width);
        const double hi = std::min(scan.hi, b_guess + width);
        if (lo < hi) {
            const RootSet raw =
                find_roots([&](double b) { return condition_i(model, cost, a, b, opt.tol); },
                           Window{lo, hi, 33}, opt.tol);
            double best = kNaN;
            for (double r : raw.roots) {
                if (!admissible(model, cost, a, r, opt.tol)) continue;
                if (!std::isfinite(best) || std::abs(r - b_guess) < std::abs(best - b_guess))
                    best = r;
            }
            if (std::isfinite(best)) return best;
        }
        width *= 4.0;
    }
    const RootSet branches = rho_branches(model, cost, a, scan, opt);
    double best = kNaN;
    for (double r : branches.roots)
        if (!std::isfinite(best) || std::abs(r - b_guess) < std::abs(best - b_guess)) best = r;
    return best;
}

struct BranchPoint {
    double b = 0.0;
    double s = 0.0;  // condition-(ii) residual along the branch
};

}  // namespace

std::vector<EquilibriumPoint> find_equilibria(const DiffusionModel& model,
                                              const CostModel& cost, const Window& scan,
                                              const EquilibriumSearchOptions& opt) {
    scan.validate();
    const Eigen::ArrayXd as = scan.grid();
    const double step = scan.step();

    std::vector<std::vector<BranchPoint>> columns(as.size());
    for (Eigen::Index i = 0; i < as.size(); ++i) {
        const RootSet branches = rho_branches(model, cost, as[i], scan, opt.solve);
        for (double b : branches.roots) {
            const auto res = equilibrium_residuals(model, cost, ThresholdPair{as[i], b},
                                                   opt.solve.tol);
            columns[i].push_back({b, res.second});
        }
    }

    const double jump_tol = std::max(0.25, 5.0 * step);
    std::vector<EquilibriumPoint> points;

    for (Eigen::Index i = 0; i + 1 < as.size(); ++i) {
        const auto& left = columns[i];
        const auto& right = columns[i + 1];
        for (std::size_t k = 0; k < left.size(); ++k) {
            // Mutual-nearest pairing between adjacent columns.
            std::size_t j_best = right.size();
            for (std::size_t j = 0; j < right.size(); ++j)
                if (j_best == right.size() ||
                    std::abs(right[j].b - left[k].b) < std::abs(right[j_best].b - left[k].b))
                    j_best = j;
            if (j_best == right.size()) continue;
            if (std::abs(right[j_best].b - left[k].b) > jump_tol) continue;
            std::size_t k_back = left.size();
            for (std::size_t k2 = 0; k2 < left.size(); ++k2)
                if (k_back == left.size() ||
                    std::abs(left[k2].b - right[j_best].b) < std::abs(left[k_back].b - right[j_best].b))
                    k_back = k2;
            if (k_back != k) continue;

            double s1 = left[k].s, s2 = right[j_best].s;
            if (!(s1 * s2 < 0.0)) continue;
            if (std::max(std::abs(s1), std::abs(s2)) < opt.noise_floor) continue;

            // Bisection in a along the branch.
            double a1 = as[i], b1 = left[k].b;
            double a2 = as[i + 1], b2 = right[j_best].b;
            double am = a1, bm = b1;
            bool ok = true;
            for (int it = 0; it < 80; ++it) {
                am = 0.5 * (a1 + a2);
                const double guess = b1 + (b2 - b1) * (am - a1) / (a2 - a1);
                const double width = std::max({4.0 * std::abs(b2 - b1), 0.25 * step, 1e-6});
                bm = branch_root(model, cost, am, guess, width, scan, opt.solve);
                if (!std::isfinite(bm)) {
                    ok = false;
                    break;
                }
                const double sm =
                    equilibrium_residuals(model, cost, ThresholdPair{am, bm}, opt.solve.tol)
                        .second;
                if (sm == 0.0 || a2 - a1 <= 1e-13 * (1.0 + std::abs(am))) break;
                if ((sm < 0.0) == (s1 < 0.0)) {
                    a1 = am;
                    b1 = bm;
                    s1 = sm;
                } else {
                    a2 = am;
                    b2 = bm;
                    s2 = sm;
                }
            }
            if (!ok) continue;

            const ThresholdPair pair{am, bm};
            const auto res = equilibrium_residuals(model, cost, pair, opt.solve.tol);
            const double accept = std::max(1e-8, 10.0 * opt.noise_floor);
            if (!(std::abs(res.first) <= accept && std::abs(res.second) <= accept)) continue;

            EquilibriumPoint point;
            point.thresholds = pair;
            point.R_value = stationary_mean(model, cost.market_statistic, pair, opt.solve.tol);
            point.value = ergodic_cost(model, cost, pair, point.R_value, opt.solve.tol);
            point.residual_i = res.first;
            point.residual_ii = res.second;
            const bool edge = am <= scan.lo + step || am >= scan.hi - step ||
                              bm >= scan.hi - step;
            point.classification =
                edge ? EquilibriumClass::BoundaryOfScan : EquilibriumClass::Interior;
            points.push_back(point);
        }
    }

    std::sort(points.begin(), points.end(), [](const EquilibriumPoint& l,
                                               const EquilibriumPoint& r) {
        return l.thresholds.a < r.thresholds.a;
    });
    std::vector<EquilibriumPoint> unique;
    for (const auto& p : points) {
        bool dup = false;
        for (auto& u : unique) {
            if (std::abs(u.thresholds.a - p.thresholds.a) +
                    std::abs(u.thresholds.b - p.thresholds.b) <
                opt.dedup_eps) {
                dup = true;
                if (std::abs(p.residual_ii) < std::abs(u.residual_ii)) u = p;
                break;
            }
        }
        if (!dup) unique.push_back(p);
    }
    return unique;
}

namespace {

double bm_eq1(double C, double mu, double q_sum) {
    const double E = std::exp(2.0 * mu * C);
    return C * (1.0 + E) / (1.0 - E) + q_sum * mu + 1.0 / mu;
}

double bm_eq2(double C, double mu, double q_sum) {
    const double E = std::exp(2.0 * mu * C);
    return (C / (E - 1.0)) * (2.0 * E / mu) +
           (-2.0 * E + 2.0 * C * mu + 1.0) / (2.0 * mu * mu) + q_sum;
}

}  // namespace

std::pair<RootSet, RootSet> bm_condition_roots(double mu, double q_sum) {
    if (!(mu < 0.0)) throw NumericError("bm closed form requires mu < 0");
    if (!(q_sum > 0.0)) throw NumericError("bm closed form requires q_d + q_u > 0");
    const double c_max = std::max(10.0, 20.0 / std::abs(mu));
    const Window window{1e-8, c_max, 4001};
    const RootSet r1 = find_roots([&](double C) { return bm_eq1(C, mu, q_sum); }, window);
    const RootSet r2 = find_roots([&](double C) { return bm_eq2(C, mu, q_sum); }, window);
    return {r1, r2};
}

std::optional<BmClosedForm> bm_closed_form(double mu, double q_sum) {
    const auto [r1, r2] = bm_condition_roots(mu, q_sum);
    for (double c1 : r1.roots) {
        for (double c2 : r2.roots) {
            if (std::abs(c1 - c2) > 1e-8) continue;
            BmClosedForm out;
            out.width = c1;
            const double E = std::exp(-2.0 * mu * c1);
            out.value = -c1 / (E * (1.0 - 1.0 / E)) - 0.5 / mu + 0.5 * q_sum * mu;
            out.eq1_residual = bm_eq1(c1, mu, q_sum);
            out.eq2_residual = bm_eq2(c1, mu, q_sum);
            return out;
        }
    }
    return std::nullopt;
}

MultiplicativeReport multiplicative_analysis(const DiffusionModel& model,
                                             const CostModel& cost, double a0,
                                             const Window& scan, const SolveOptions& opt) {
    if (cost.family != CostFamily::MultMaxlin)
        throw NumericError("multiplicative analysis requires the product-form cost");
    if (a0 > 0.0) throw NumericError("multiplicative analysis requires a0 <= 0");
    scan.validate();

    MultiplicativeReport report;
    report.a0 = a0;

    const double Q = (cost.q_d + cost.q_u);
    double L = 0.0;
    bool have_L = false;
    if (std::abs(a0) < opt.delta_min) {
        // Degenerate anchor: rho(0) collapses and the running integral vanishes.
        report.c1_left = Q / model.scale_density(a0);
        report.c1_holds = report.c1_left >= -1e-12;
        L = cost.market_statistic(a0);
        have_L = true;
    } else {
        try {
            const double b0 = rho(model, cost, a0, scan, opt);
            report.c1_left =
                equilibrium_residuals(model, cost, ThresholdPair{a0, b0}, opt.tol).second;
            report.c1_holds = report.c1_left >= -1e-12;
            L = stationary_mean(model, cost.market_statistic, ThresholdPair{a0, b0},
                                opt.tol);
            have_L = true;
        } catch (const EmptyCa&) {
            ++report.failed_grid_points;
        }
    }
    if (have_L)
        report.assumptions =
            check_assumptions(model, cost, L, Window{scan.lo, scan.hi, 257});

    // Grid evidence for uniqueness: the condition-(ii) residual along the
    // branch a -> rho(a) should be monotone over the scan.
    const double hi = std::min(a0, -opt.delta_min) - scan.step();
    if (scan.lo < hi) {
        const Eigen::ArrayXd grid =
            Window{scan.lo, hi, std::max(9, scan.grid_n / 4)}.grid();
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            try {
                const double b = rho(model, cost, grid[i], scan, opt);
                const double s =
                    equilibrium_residuals(model, cost, ThresholdPair{grid[i], b}, opt.tol)
                        .second;
                report.c2_samples.emplace_back(grid[i], s);
            } catch (const EmptyCa&) {
                ++report.failed_grid_points;
            }
        }
    }
    if (report.c2_samples.size() >= 3) {
        report.c2_monotone = true;
        for (std::size_t i = 0; i + 1 < report.c2_samples.size(); ++i) {
            const double d = report.c2_samples[i + 1].second - report.c2_samples[i].second;
            if (d < -1e-9 * (1.0 + std::abs(report.c2_samples[i].second)))
                report.c2_monotone = false;
        }
    }

    if (report.failed_grid_points > 0 || !report.c1_holds || !have_L ||
        !report.assumptions.all_pass())
        report.verdict = MultiplicativeVerdict::Inconclusive;
    else if (report.c2_monotone)
        report.verdict = MultiplicativeVerdict::ExistsUnique;
    else
        report.verdict = MultiplicativeVerdict::Exists;
    return report;
}

}  // namespace ergo
