#include "ergo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ergo {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent substream per (seed, path, player).
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t path, std::uint64_t player) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ splitmix64(path + 0x517cc1b727220a95ULL));
    h = splitmix64(h ^ splitmix64(player + 0x2545f4914f6cdd1dULL));
    return std::mt19937_64{h};
}

struct Walker {
    double x = 0.0;
    double dU = 0.0;  // increment of the most recent step
    double dD = 0.0;

    void step(const DiffusionModel& model, const ThresholdPair& iv, double dt, double xi) {
        const double z = x + model.drift(x) * dt + model.vol(x) * std::sqrt(dt) * xi;
        dU = std::max(iv.a - z, 0.0);
        dD = std::max(z - iv.b, 0.0);
        x = std::clamp(z, iv.a, iv.b);
    }
};

double sample_se(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double e : v) ss += (e - mean) * (e - mean);
    return std::sqrt(ss / (static_cast<double>(v.size()) * (v.size() - 1)));
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e;
    return s / static_cast<double>(v.size());
}

}  // namespace

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw NumericError("sim config requires dt > 0");
    if (!(t_max > 0.0)) throw NumericError("sim config requires t_max > 0");
    if (!(burn_in >= 0.0 && burn_in < t_max))
        throw NumericError("sim config requires 0 <= burn_in < t_max");
    if (paths < 1) throw NumericError("sim config requires paths >= 1");
}

bool dt_recommended(const DiffusionModel& model, const ThresholdPair& interval, double dt) {
    const double n = 65;
    double sig_max = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = interval.a + (interval.b - interval.a) * i / (n - 1);
        sig_max = std::max(sig_max, model.vol(x));
    }
    if (sig_max == 0.0) return true;
    return dt < interval.width() * interval.width() / (sig_max * sig_max);
}

PathStats simulate_reflected(const DiffusionModel& model, const ThresholdPair& interval,
                             double x0, const SimConfig& config, bool record_first_path) {
    interval.validate(0.0);
    config.validate();

    const auto steps = static_cast<long>(std::llround(config.t_max / config.dt));
    const auto burn = static_cast<long>(std::llround(config.burn_in / config.dt));
    const double horizon = (steps - burn) * config.dt;

    std::vector<double> means, u_rates, d_rates;
    PathStats stats;
    for (int p = 0; p < config.paths; ++p) {
        auto rng = substream(config.seed, static_cast<std::uint64_t>(p), 0);
        std::normal_distribution<double> normal;
        Walker w;
        w.x = std::clamp(x0, interval.a, interval.b);
        double U = burn == 0 ? std::max(interval.a - x0, 0.0) : 0.0;
        double D = burn == 0 ? std::max(x0 - interval.b, 0.0) : 0.0;
        double x_sum = 0.0;
        if (record_first_path && p == 0) stats.first_path.push_back(w.x);
        for (long s = 0; s < steps; ++s) {
            w.step(model, interval, config.dt, normal(rng));
            if (record_first_path && p == 0) stats.first_path.push_back(w.x);
            if (s >= burn) {
                x_sum += w.x * config.dt;
                U += w.dU;
                D += w.dD;
            }
        }
        means.push_back(x_sum / horizon);
        u_rates.push_back(U / horizon);
        d_rates.push_back(D / horizon);
    }

    stats.paths_used = config.paths;
    stats.x_mean = mean_of(means);
    stats.U_rate = mean_of(u_rates);
    stats.D_rate = mean_of(d_rates);
    stats.x_mean_se = sample_se(means, stats.x_mean);
    stats.U_rate_se = sample_se(u_rates, stats.U_rate);
    stats.D_rate_se = sample_se(d_rates, stats.D_rate);
    return stats;
}

SimResult estimate_ergodic_cost(const DiffusionModel& model, const CostModel& cost,
                                const MarketStatistic& f, const ThresholdPair& player_interval,
                                const ThresholdPair& market_interval, const SimConfig& config) {
    player_interval.validate(0.0);
    market_interval.validate(0.0);
    config.validate();
    if (config.paths < 2)
        throw NumericError("ergodic cost estimation requires paths >= 2");

    const auto steps = static_cast<long>(std::llround(config.t_max / config.dt));
    const auto burn = static_cast<long>(std::llround(config.burn_in / config.dt));
    const double horizon = (steps - burn) * config.dt;
    const int P = config.paths;

    std::vector<std::mt19937_64> player_rng, market_rng;
    std::vector<Walker> players(P), markets(P);
    for (int p = 0; p < P; ++p) {
        player_rng.push_back(substream(config.seed, static_cast<std::uint64_t>(p), 0));
        market_rng.push_back(substream(config.seed, static_cast<std::uint64_t>(p), 1));
        players[p].x = 0.5 * (player_interval.a + player_interval.b);
        markets[p].x = 0.5 * (market_interval.a + market_interval.b);
    }
    std::normal_distribution<double> normal;

    std::vector<double> cost_acc(P, 0.0);
    std::vector<double> u_acc(P, 0.0), d_acc(P, 0.0);
    for (long s = 0; s < steps; ++s) {
        double f_sum = 0.0;
        for (int p = 0; p < P; ++p) {
            markets[p].step(model, market_interval, config.dt, normal(market_rng[p]));
            f_sum += f(markets[p].x);
        }
        const double f_bar = f_sum / P;
        for (int p = 0; p < P; ++p) {
            players[p].step(model, player_interval, config.dt, normal(player_rng[p]));
            if (s >= burn) {
                cost_acc[p] += cost.eval(players[p].x, f_bar) * config.dt;
                u_acc[p] += players[p].dU;
                d_acc[p] += players[p].dD;
            }
        }
    }

    std::vector<double> estimates, u_rates, d_rates;
    for (int p = 0; p < P; ++p) {
        estimates.push_back(
            (cost_acc[p] + cost.q_u * u_acc[p] + cost.q_d * d_acc[p]) / horizon);
        u_rates.push_back(u_acc[p] / horizon);
        d_rates.push_back(d_acc[p] / horizon);
    }

    SimResult result;
    result.paths_used = P;
    result.estimate = mean_of(estimates);
    result.std_error = sample_se(estimates, result.estimate);
    result.U_rate = mean_of(u_rates);
    result.D_rate = mean_of(d_rates);
    return result;
}

NPlayerResult nplayer_experiment(const DiffusionModel& model, const CostModel& cost,
                                 const MarketStatistic& f, const ThresholdPair& equilibrium,
                                 int N, const std::vector<ThresholdPair>& deviation_grid,
                                 const SimConfig& config) {
    equilibrium.validate(0.0);
    config.validate();
    if (N < 2) throw NumericError("n-player experiment requires N >= 2");
    if (deviation_grid.empty())
        throw NumericError("n-player experiment requires a nonempty deviation grid");

    const auto steps = static_cast<long>(std::llround(config.t_max / config.dt));
    const auto burn = static_cast<long>(std::llround(config.burn_in / config.dt));
    const double horizon = (steps - burn) * config.dt;
    const int reps = config.paths;
    const std::size_t G = deviation_grid.size();

    // Player 0 deviates; the other N-1 players and their empirical f-mean are
    // simulated once per replication and replayed for every deviation, which
    // realizes common random numbers exactly.
    std::vector<std::vector<double>> v_dev(G);
    std::vector<double> v_eq;
    std::vector<double> f_bar(steps);

    for (int r = 0; r < reps; ++r) {
        std::normal_distribution<double> normal;
        std::vector<Walker> others(N - 1);
        std::vector<std::mt19937_64> rngs;
        for (int j = 1; j < N; ++j)
            rngs.push_back(substream(config.seed, static_cast<std::uint64_t>(r),
                                     static_cast<std::uint64_t>(j)));
        for (auto& w : others) w.x = 0.5 * (equilibrium.a + equilibrium.b);
        for (long s = 0; s < steps; ++s) {
            double f_sum = 0.0;
            for (int j = 0; j < N - 1; ++j) {
                others[j].step(model, equilibrium, config.dt, normal(rngs[j]));
                f_sum += f(others[j].x);
            }
            f_bar[s] = f_sum / (N - 1);
        }

        const auto play = [&](const ThresholdPair& iv) {
            auto rng = substream(config.seed, static_cast<std::uint64_t>(r), 0);
            std::normal_distribution<double> n0;
            Walker w;
            w.x = std::clamp(0.5 * (equilibrium.a + equilibrium.b), iv.a, iv.b);
            double acc = 0.0, U = 0.0, D = 0.0;
            for (long s = 0; s < steps; ++s) {
                w.step(model, iv, config.dt, n0(rng));
                if (s >= burn) {
                    acc += cost.eval(w.x, f_bar[s]) * config.dt;
                    U += w.dU;
                    D += w.dD;
                }
            }
            return (acc + cost.q_u * U + cost.q_d * D) / horizon;
        };

        v_eq.push_back(play(equilibrium));
        for (std::size_t g = 0; g < G; ++g) v_dev[g].push_back(play(deviation_grid[g]));
    }

    NPlayerResult result;
    result.N = N;
    result.deviation_grid = deviation_grid;
    result.v_equilibrium = mean_of(v_eq);
    result.v_equilibrium_se = sample_se(v_eq, result.v_equilibrium);
    std::size_t best = 0;
    double best_mean = mean_of(v_dev[0]);
    for (std::size_t g = 1; g < G; ++g) {
        const double m = mean_of(v_dev[g]);
        if (m < best_mean) {
            best_mean = m;
            best = g;
        }
    }
    result.v_best_deviation = best_mean;
    result.epsilon_hat = std::max(0.0, result.v_equilibrium - result.v_best_deviation);
    std::vector<double> gaps;
    for (int r = 0; r < reps; ++r) gaps.push_back(v_eq[r] - v_dev[best][r]);
    result.std_error = sample_se(gaps, mean_of(gaps));
    return result;
}

EnvelopeReport check_envelope(const CostModel& cost, const Window& sample_window) {
    if (!cost.envelope) throw NumericError("cost model declares no envelope");
    sample_window.validate();
    const CostEnvelope& env = *cost.envelope;
    const Eigen::ArrayXd grid = sample_window.grid();

    EnvelopeReport report;
    report.worst_violation = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        for (Eigen::Index j = 0; j < grid.size(); ++j) {
            for (Eigen::Index k = 0; k < grid.size(); ++k) {
                const double x = grid[i], y1 = grid[j], y2 = grid[k];
                const double lhs = std::abs(cost.eval(x, y1) - cost.eval(x, y2));
                const double rhs = env.F(std::abs(x)) * std::abs(env.g(y1) - env.g(y2));
                const double v = lhs - rhs;
                if (v > report.worst_violation) {
                    report.worst_violation = v;
                    report.x = x;
                    report.y1 = y1;
                    report.y2 = y2;
                }
            }
        }
    }
    report.pass = report.worst_violation <= 1e-12 * (1.0 + std::abs(report.worst_violation));
    return report;
}

}  // namespace ergo
