#include "ergo/models.hpp"

#include <algorithm>
#include <cmath>

namespace ergo {

double poly_eval(const Eigen::ArrayXd& coeffs, double x) {
    double acc = 0.0;
    for (Eigen::Index i = coeffs.size() - 1; i >= 0; --i) acc = acc * x + coeffs[i];
    return acc;
}

DiffusionModel DiffusionModel::bm_drift(double mu, double sigma) {
    DiffusionModel m;
    m.family = DiffusionFamily::BmDrift;
    m.mu = mu;
    m.sigma = sigma;
    return m;
}

DiffusionModel DiffusionModel::ou(double theta, double sigma) {
    if (theta <= 0.0) throw NumericError("ou requires theta > 0");
    DiffusionModel m;
    m.family = DiffusionFamily::Ou;
    m.theta = theta;
    m.sigma = sigma;
    return m;
}

DiffusionModel DiffusionModel::custom_poly(Eigen::ArrayXd mu_coeffs,
                                           Eigen::ArrayXd sigma_coeffs) {
    DiffusionModel m;
    m.family = DiffusionFamily::CustomPoly;
    m.mu_coeffs = std::move(mu_coeffs);
    m.sigma_coeffs = std::move(sigma_coeffs);
    return m;
}

double DiffusionModel::drift(double x) const {
    switch (family) {
        case DiffusionFamily::BmDrift: return mu;
        case DiffusionFamily::Ou: return -theta * x;
        case DiffusionFamily::CustomPoly: return poly_eval(mu_coeffs, x);
    }
    throw UnknownFamily("diffusion family");
}

double DiffusionModel::vol(double x) const {
    double s;
    switch (family) {
        case DiffusionFamily::BmDrift:
        case DiffusionFamily::Ou: s = sigma; break;
        case DiffusionFamily::CustomPoly: s = poly_eval(sigma_coeffs, x); break;
        default: throw UnknownFamily("diffusion family");
    }
    if (!(s > 0.0))
        throw NonPositiveVolatility("sigma(x) <= 0 at x = " + std::to_string(x));
    return s;
}

double DiffusionModel::scale_density(double x) const {
    const double x0 = reference_point;
    switch (family) {
        case DiffusionFamily::BmDrift: {
            vol(x);
            return std::exp(-2.0 * mu * (x - x0) / (sigma * sigma));
        }
        case DiffusionFamily::Ou: {
            vol(x);
            return std::exp(theta * (x * x - x0 * x0) / (sigma * sigma));
        }
        case DiffusionFamily::CustomPoly: {
            const auto exponent = [this](double u) {
                const double s = vol(u);
                return 2.0 * poly_eval(mu_coeffs, u) / (s * s);
            };
            const double sign = x >= x0 ? 1.0 : -1.0;
            const double integral =
                sign * integrate(exponent, std::min(x0, x), std::max(x0, x), quad_tol);
            return std::exp(-integral);
        }
    }
    throw UnknownFamily("diffusion family");
}

double DiffusionModel::speed_density(double x) const {
    const double s = vol(x);
    return 2.0 / (s * s * scale_density(x));
}

double DiffusionModel::speed_measure(double lo, double hi, const Tolerance& tol) const {
    return integrate([this](double u) { return speed_density(u); }, lo, hi, tol);
}

double MarketStatistic::operator()(double x) const {
    switch (kind) {
        case MarketStatisticKind::Identity: return x;
        case MarketStatisticKind::CustomPoly: return poly_eval(coeffs, x);
    }
    throw UnknownFamily("market statistic");
}

double CostEnvelope::F(double abs_x) const {
    switch (f_kind) {
        case EnvelopeFKind::Constant: return f_constant;
        case EnvelopeFKind::Maxlin: return std::max(f_lambda * abs_x, abs_x);
        case EnvelopeFKind::Poly: return poly_eval(f_coeffs, abs_x);
    }
    throw UnknownFamily("envelope F");
}

double CostEnvelope::g(double y) const {
    switch (g_kind) {
        case EnvelopeGKind::Identity: return y;
        case EnvelopeGKind::OnePlusAbsPow: return 1.0 + std::pow(std::abs(y), g_beta);
        case EnvelopeGKind::Poly: return poly_eval(g_coeffs, y);
    }
    throw UnknownFamily("envelope g");
}

CostModel CostModel::abs_diff(double q_u, double q_d) {
    CostModel c;
    c.family = CostFamily::AbsDiff;
    c.q_u = q_u;
    c.q_d = q_d;
    CostEnvelope env;
    env.f_kind = EnvelopeFKind::Constant;
    env.f_constant = 1.0;
    env.g_kind = EnvelopeGKind::Identity;
    c.envelope = env;
    return c;
}

CostModel CostModel::mult_maxlin(double lambda, double beta, double q_u, double q_d) {
    if (lambda <= 0.0) throw NumericError("mult_maxlin requires lambda > 0");
    if (beta < 1.0) throw NumericError("mult_maxlin requires beta >= 1");
    CostModel c;
    c.family = CostFamily::MultMaxlin;
    c.lambda = lambda;
    c.beta = beta;
    c.q_u = q_u;
    c.q_d = q_d;
    CostEnvelope env;
    env.f_kind = EnvelopeFKind::Maxlin;
    env.f_lambda = lambda;
    env.g_kind = EnvelopeGKind::OnePlusAbsPow;
    env.g_beta = beta;
    c.envelope = env;
    return c;
}

CostModel CostModel::quadratic(double center, double scale, double q_u, double q_d) {
    CostModel c;
    c.family = CostFamily::Quadratic;
    c.center = center;
    c.scale = scale;
    c.q_u = q_u;
    c.q_d = q_d;
    return c;
}

CostModel CostModel::custom_poly(Eigen::ArrayXd coeffs, double q_u, double q_d) {
    CostModel c;
    c.family = CostFamily::CustomPoly;
    c.coeffs = std::move(coeffs);
    c.q_u = q_u;
    c.q_d = q_d;
    return c;
}

double CostModel::eval(double x, double y) const {
    switch (family) {
        case CostFamily::AbsDiff: return std::abs(x - y);
        case CostFamily::MultMaxlin:
            return std::max(-lambda * x, x) * (1.0 + std::pow(std::abs(y), beta));
        case CostFamily::Quadratic: {
            const double d = x - center;
            return scale * d * d;
        }
        case CostFamily::CustomPoly: return poly_eval(coeffs, x);
    }
    throw UnknownFamily("cost family");
}

double cost_eval(const CostModel& cost, double x, double y) { return cost.eval(x, y); }

namespace {

// Index of the minimum and a monotonicity check (non-increasing up to the
// argmin, non-decreasing after), with slack for flat kinks at grid scale.
bool unimodal(const Eigen::ArrayXd& vals, Eigen::Index argmin) {
    const double span = vals.maxCoeff() - vals.minCoeff();
    const double slack = 1e-9 * (1.0 + std::abs(span));
    for (Eigen::Index i = 0; i + 1 <= argmin && i + 1 < vals.size(); ++i)
        if (vals[i + 1] > vals[i] + slack) return false;
    for (Eigen::Index i = argmin; i + 1 < vals.size(); ++i)
        if (vals[i + 1] < vals[i] - slack) return false;
    return true;
}

}  // namespace

AssumptionReport check_assumptions(const DiffusionModel& model, const CostModel& cost,
                                   double y, const Window& window) {
    window.validate();
    if (window.grid_n < 16) throw NumericError("assumption check needs >= 16 grid points");
    AssumptionReport report;
    report.window = window;
    report.y = y;

    const Eigen::ArrayXd xs = window.grid();
    Eigen::ArrayXd pi1(xs.size()), pi2(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const double c = cost.eval(xs[i], y);
        if (c < 0.0) report.cost_nonnegative = false;
        const double m = model.drift(xs[i]);
        pi1[i] = c + cost.q_d * m;
        pi2[i] = c - cost.q_u * m;
    }

    Eigen::Index i1, i2;
    pi1.minCoeff(&i1);
    pi2.minCoeff(&i2);
    report.argmin_pi1 = xs[i1];
    report.argmin_pi2 = xs[i2];
    report.pi1_unimodal = unimodal(pi1, i1);
    report.pi2_unimodal = unimodal(pi2, i2);

    // Divergence trend: the tail decile must rise by a nontrivial margin.
    const Eigen::Index tail = std::max<Eigen::Index>(2, xs.size() / 10);
    const double scale = 1e-6 * (1.0 + pi1.abs().maxCoeff() + pi2.abs().maxCoeff());
    report.pi1_diverges_right =
        pi1[xs.size() - 1] > pi1[xs.size() - 1 - tail] + scale && pi1[xs.size() - 1] > pi1[i1];
    report.pi2_diverges_left = pi2[0] > pi2[tail] + scale && pi2[0] > pi2[i2];
    report.heuristic = true;
    return report;
}

}  // namespace ergo
