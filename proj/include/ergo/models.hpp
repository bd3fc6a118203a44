#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ergo/numerics.hpp"

namespace ergo {

enum class DiffusionFamily { BmDrift, Ou, CustomPoly };

/// One-dimensional diffusion dX = mu(X) dt + sigma(X) dW with the derived
/// scale density S'(x) = exp(-int_{x0}^x 2 mu/sigma^2) and speed density
/// m'(x) = 2 / (sigma^2 S'). The antiderivative is anchored at
/// reference_point (default 0); every downstream ratio is invariant under
/// this choice.
struct DiffusionModel {
    DiffusionFamily family = DiffusionFamily::BmDrift;
    double mu = 0.0;          // bm_drift
    double theta = 0.0;       // ou (> 0)
    double sigma = 1.0;       // constant volatility families
    Eigen::ArrayXd mu_coeffs;     // custom_poly, ascending powers
    Eigen::ArrayXd sigma_coeffs;  // custom_poly, ascending powers
    double reference_point = 0.0;
    Tolerance quad_tol{};

    static DiffusionModel bm_drift(double mu, double sigma);
    static DiffusionModel ou(double theta, double sigma);
    static DiffusionModel custom_poly(Eigen::ArrayXd mu_coeffs, Eigen::ArrayXd sigma_coeffs);

    double drift(double x) const;
    double vol(double x) const;  // throws NonPositiveVolatility when sigma(x) <= 0
    double scale_density(double x) const;
    double speed_density(double x) const;
    /// m(lo, hi) = int_lo^hi m'(u) du.
    double speed_measure(double lo, double hi, const Tolerance& tol = {}) const;
};

enum class CostFamily { AbsDiff, MultMaxlin, Quadratic, CustomPoly };
enum class MarketStatisticKind { Identity, CustomPoly };

/// The function f whose stationary expectation defines the market level.
struct MarketStatistic {
    MarketStatisticKind kind = MarketStatisticKind::Identity;
    Eigen::ArrayXd coeffs;  // custom_poly, ascending powers

    double operator()(double x) const;
};

enum class EnvelopeFKind { Constant, Maxlin, Poly };
enum class EnvelopeGKind { Identity, OnePlusAbsPow, Poly };

/// Optional Lipschitz-in-the-market envelope:
/// |c(x,y1) - c(x,y2)| <= F(|x|) |g(y1) - g(y2)|.
struct CostEnvelope {
    EnvelopeFKind f_kind = EnvelopeFKind::Constant;
    double f_constant = 1.0;
    double f_lambda = 1.0;       // Maxlin: F(x) = max(lambda*x, x), even extension
    Eigen::ArrayXd f_coeffs;     // Poly in |x|
    EnvelopeGKind g_kind = EnvelopeGKind::Identity;
    double g_beta = 1.0;         // OnePlusAbsPow: g(y) = 1 + |y|^beta
    Eigen::ArrayXd g_coeffs;

    double F(double abs_x) const;
    double g(double y) const;
};

/// Two-variable running cost c(x, y) with control prices q_u, q_d and the
/// market statistic f.
struct CostModel {
    CostFamily family = CostFamily::AbsDiff;
    double lambda = 1.0;  // mult_maxlin (> 0)
    double beta = 1.0;    // mult_maxlin (>= 1)
    double center = 0.0;  // quadratic
    double scale = 1.0;   // quadratic
    Eigen::ArrayXd coeffs;  // custom_poly in x, ascending powers
    double q_u = 1.0;
    double q_d = 1.0;
    MarketStatistic market_statistic{};
    std::optional<CostEnvelope> envelope;

    static CostModel abs_diff(double q_u, double q_d);
    static CostModel mult_maxlin(double lambda, double beta, double q_u, double q_d);
    static CostModel quadratic(double center, double scale, double q_u, double q_d);
    static CostModel custom_poly(Eigen::ArrayXd coeffs, double q_u, double q_d);

    double operator()(double x, double y) const { return eval(x, y); }
    double eval(double x, double y) const;
};

double cost_eval(const CostModel& cost, double x, double y);

/// Numeric screening of the standing assumptions for a frozen market level.
/// Limits at +-infinity are sampled at the window edges, hence heuristic.
struct AssumptionReport {
    double argmin_pi1 = 0.0;  // x_1^y
    double argmin_pi2 = 0.0;  // x_2^y
    bool cost_nonnegative = true;
    bool pi1_unimodal = true;
    bool pi2_unimodal = true;
    bool pi1_diverges_right = true;
    bool pi2_diverges_left = true;
    bool heuristic = true;
    Window window{};
    double y = 0.0;

    bool all_pass() const {
        return cost_nonnegative && pi1_unimodal && pi2_unimodal && pi1_diverges_right &&
               pi2_diverges_left;
    }
};

AssumptionReport check_assumptions(const DiffusionModel& model, const CostModel& cost,
                                   double y, const Window& window);

double poly_eval(const Eigen::ArrayXd& coeffs, double x);

}  // namespace ergo
