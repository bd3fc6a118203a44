#pragma once

#include <cstdint>

#include "ergo/control.hpp"

namespace ergo {

struct SimConfig {
    double dt = 1e-3;
    double t_max = 100.0;
    double burn_in = 0.0;
    int paths = 16;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Time-and-path averages over the reflected Euler paths.
struct PathStats {
    double x_mean = 0.0;
    double x_mean_se = 0.0;
    double U_rate = 0.0;  // average of U_T / T after burn-in
    double D_rate = 0.0;
    double U_rate_se = 0.0;
    double D_rate_se = 0.0;
    int paths_used = 0;
    std::vector<double> first_path;  // recorded on request, post-clip states
};

struct SimResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double U_rate = 0.0;
    double D_rate = 0.0;
    int paths_used = 0;
};

struct NPlayerResult {
    int N = 2;
    double v_equilibrium = 0.0;
    double v_best_deviation = 0.0;
    double epsilon_hat = 0.0;  // max(0, v_equilibrium - v_best_deviation)
    double std_error = 0.0;    // paired SE of the gap at the best deviation
    double v_equilibrium_se = 0.0;
    std::vector<ThresholdPair> deviation_grid;
};

/// True when dt is small against the diffusive crossing scale (b-a)^2/sigma^2.
bool dt_recommended(const DiffusionModel& model, const ThresholdPair& interval, double dt);

/// Projected Euler scheme for the diffusion reflected on [a, b]: the state is
/// clipped to the interval and the clip distances are the control increments.
/// An x0 outside [a, b] jumps to the nearest barrier at t = 0 with the
/// corresponding charge. Deterministic given config.seed.
PathStats simulate_reflected(const DiffusionModel& model, const ThresholdPair& interval,
                             double x0, const SimConfig& config,
                             bool record_first_path = false);

/// Monte Carlo estimate of the ergodic cost: player paths reflected on
/// player_interval run against the cross-path mean of f over independent
/// market paths reflected on market_interval. Control charges priced at
/// q_u, q_d; burn-in discarded.
SimResult estimate_ergodic_cost(const DiffusionModel& model, const CostModel& cost,
                                const MarketStatistic& f, const ThresholdPair& player_interval,
                                const ThresholdPair& market_interval, const SimConfig& config);

/// Finite-player deviation experiment: N - 1 players reflect at the
/// equilibrium pair, the remaining player tries each pair in the deviation
/// grid against their empirical f-mean. Common random numbers across
/// deviations. config.paths counts independent replications.
NPlayerResult nplayer_experiment(const DiffusionModel& model, const CostModel& cost,
                                 const MarketStatistic& f, const ThresholdPair& equilibrium,
                                 int N, const std::vector<ThresholdPair>& deviation_grid,
                                 const SimConfig& config);

struct EnvelopeReport {
    bool pass = false;
    double worst_violation = 0.0;  // max of |c(x,y1)-c(x,y2)| - F(|x|)|g(y1)-g(y2)|
    double x = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
};

/// Grid check of the declared Lipschitz-in-the-market envelope
/// |c(x,y1) - c(x,y2)| <= F(|x|) |g(y1) - g(y2)| over the sample window.
EnvelopeReport check_envelope(const CostModel& cost, const Window& sample_window);

}  // namespace ergo
