#pragma once

#include <optional>

#include "ergo/control.hpp"

namespace ergo {

enum class EquilibriumClass { Interior, BoundaryOfScan };

/// A threshold pair whose best response to the market it generates is itself.
struct EquilibriumPoint {
    ThresholdPair thresholds{};
    double R_value = 0.0;  // stationary market mean R(a,b)
    double value = 0.0;    // ergodic cost at the equilibrium
    double residual_i = 0.0;
    double residual_ii = 0.0;
    EquilibriumClass classification = EquilibriumClass::Interior;
};

/// Stationary mean of the market statistic under reflection on [a,b]:
/// R(a,b) = int_a^b f(u) m(du) / m(a,b).
double stationary_mean(const DiffusionModel& model, const MarketStatistic& f,
                       const ThresholdPair& interval, const Tolerance& tol = {});

/// Closed-form R for constant-volatility ou (erf formula) and bm_drift;
/// throws UnknownFamily otherwise. Requires f = identity.
double closed_form_R(const DiffusionModel& model, const ThresholdPair& interval);

/// Residuals of the two equilibrium conditions at (a,b) with y = R(a,b):
///  (i)  pi1(b, R) - pi2(a, R)
///  (ii) int_a^b [pi1(t, R) - pi1(b, R)] m(dt) + (q_d + q_u)/S'(a)
std::pair<double, double> equilibrium_residuals(const DiffusionModel& model,
                                                const CostModel& cost,
                                                const ThresholdPair& pair,
                                                const Tolerance& tol = {});

/// All admissible roots b > a of the barrier-matching condition (i), i.e. the
/// set C_a restricted to pairs straddling the pi minima.
RootSet rho_branches(const DiffusionModel& model, const CostModel& cost, double a,
                     const Window& scan, const SolveOptions& opt = {});

/// Smallest admissible element of C_a; throws EmptyCa when none exists.
double rho(const DiffusionModel& model, const CostModel& cost, double a,
           const Window& scan, const SolveOptions& opt = {});

struct EquilibriumSearchOptions {
    SolveOptions solve{};
    /// Sign changes whose bracket values are both below this floor are
    /// treated as quadrature noise and skipped.
    double noise_floor = 1e-10;
    double dedup_eps = 1e-5;
};

/// Enumerates equilibrium points by scanning a over the window, tracking every
/// rho-branch, and refining sign changes of the condition-(ii) residual along
/// each branch. An empty list is a valid outcome.
std::vector<EquilibriumPoint> find_equilibria(const DiffusionModel& model,
                                              const CostModel& cost, const Window& scan,
                                              const EquilibriumSearchOptions& opt = {});

/// Closed-form analysis for Brownian motion with drift mu < 0 and cost
/// |x - y|: the equilibrium width C must solve both scalar equations
///   C(1+E)/(1-E) + (q_d+q_u) mu + 1/mu = 0,               E = e^{2 mu C}
///   (C/(E-1)) (2E/mu) + (-2E + 2C mu + 1)/(2 mu^2) + q_d + q_u = 0.
struct BmClosedForm {
    double width = 0.0;  // C: every (a, a+C) is then an equilibrium
    double value = 0.0;  // -C e^{-2muC}(1 - e^{-2muC})^{-1} - 1/(2mu) + q_d mu
    double eq1_residual = 0.0;
    double eq2_residual = 0.0;
};

/// Returns the common root when the two equations agree within 1e-8,
/// otherwise nullopt. Diagnostic roots of the individual equations are
/// available via bm_condition_roots.
std::optional<BmClosedForm> bm_closed_form(double mu, double q_sum);

/// Roots of the two closed-form equations individually (diagnostics).
std::pair<RootSet, RootSet> bm_condition_roots(double mu, double q_sum);

enum class MultiplicativeVerdict { Exists, ExistsUnique, Inconclusive };

/// Evidence for the existence/uniqueness criteria of the multiplicative case.
struct MultiplicativeReport {
    double a0 = 0.0;
    double c1_left = 0.0;  // evaluated left side of (C1)
    bool c1_holds = false;
    std::vector<std::pair<double, double>> c2_samples;  // (a, condition-(ii) at (a, rho(a)))
    bool c2_monotone = false;
    int failed_grid_points = 0;  // a-values where rho had no admissible root
    AssumptionReport assumptions{};  // standing assumptions screened at y = L(a0)
    MultiplicativeVerdict verdict = MultiplicativeVerdict::Inconclusive;
};

/// Grid-based check of conditions (C1) and (C2) for product-form costs.
/// Uniqueness is certified only as grid evidence at the recorded resolution.
MultiplicativeReport multiplicative_analysis(const DiffusionModel& model,
                                             const CostModel& cost, double a0,
                                             const Window& scan,
                                             const SolveOptions& opt = {});

}  // namespace ergo
