#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ergo/config.hpp"

namespace {

using ergo::RunConfig;
using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scan;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", args.out_path, "output path (default: stdout)");
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", args.seed, "override the simulation seed");
    cmd->add_option("--scan", args.scan, "override the scan window as lo,hi,n");
}

RunConfig load(const CommonArgs& args) {
    RunConfig config = ergo::load_run_config(args.config_path);
    if (args.scan) {
        ergo::Window w;
        char c1 = 0, c2 = 0;
        std::istringstream in(*args.scan);
        if (!(in >> w.lo >> c1 >> w.hi >> c2 >> w.grid_n) || c1 != ',' || c2 != ',' ||
            !(w.lo < w.hi) || w.grid_n < 2)
            throw ergo::ConfigError("--scan", "expected lo,hi,n with lo < hi and n >= 2");
        config.scan = w;
    }
    if (args.seed) {
        if (!config.sim) config.sim.emplace();
        config.sim->seed = *args.seed;
    }
    return config;
}

void emit(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw ergo::ConfigError("--out", "cannot open output path");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

ergo::SimConfig sim_of(const RunConfig& config) {
    if (!config.sim)
        throw ergo::ConfigError("sim", "missing required object for this command");
    return *config.sim;
}

std::string format_csv(const std::vector<std::pair<double, double>>& cond_i,
                       const std::vector<std::pair<double, double>>& cond_ii) {
    std::ostringstream out;
    out.precision(12);
    out << "curve,a,b\n";
    for (const auto& [a, b] : cond_i) out << "cond_i," << a << "," << b << "\n";
    for (const auto& [a, b] : cond_ii) out << "cond_ii," << a << "," << b << "\n";
    return out.str();
}

int run(int argc, char** argv) {
    CLI::App app{"threshold solvers and simulators for ergodic control and the "
                 "stationary mean-field game of a reflected one-dimensional diffusion"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* solve_control = app.add_subcommand(
        "solve-control", "optimal thresholds for a frozen market level");
    auto* solve_mfg =
        app.add_subcommand("solve-mfg", "enumerate mean-field equilibrium pairs");
    auto* trace = app.add_subcommand(
        "trace-curves", "zero sets of the two equilibrium conditions as CSV");
    auto* verify =
        app.add_subcommand("verify-hjb", "shooting solution and optimality check");
    auto* simulate =
        app.add_subcommand("simulate", "Monte Carlo estimate of the ergodic cost");
    auto* nplayer = app.add_subcommand("nplayer", "finite-player deviation experiment");

    double opt_a = 0.0, opt_b = 0.0, opt_c = 0.0, opt_d = 0.0;
    int opt_n = 0;
    for (auto* cmd : {solve_control, solve_mfg, trace, verify, simulate, nplayer})
        add_common(cmd, args);
    for (auto* cmd : {verify, simulate, nplayer}) {
        cmd->add_option("--a", opt_a, "lower threshold")->required();
        cmd->add_option("--b", opt_b, "upper threshold")->required();
    }
    auto* opt_c_flag = simulate->add_option("--c", opt_c, "market lower threshold");
    auto* opt_d_flag = simulate->add_option("--d", opt_d, "market upper threshold");
    opt_d_flag->needs(opt_c_flag);
    opt_c_flag->needs(opt_d_flag);
    nplayer->add_option("--n", opt_n, "number of players (overrides config)");

    CLI11_PARSE(app, argc, argv);

    const RunConfig config = load(args);
    json out;

    if (solve_control->parsed()) {
        if (!config.y)
            throw ergo::ConfigError("y", "required for the frozen-market problem");
        ergo::SolveOptions opt;
        opt.tol = config.quadrature;
        const ergo::ControlSolution sol =
            ergo::solve_control(config.model, config.cost, *config.y, config.scan, opt);
        out = ergo::to_json(sol);
    } else if (solve_mfg->parsed()) {
        ergo::EquilibriumSearchOptions opt;
        opt.solve.tol = config.quadrature;
        const auto points =
            ergo::find_equilibria(config.model, config.cost, config.scan, opt);
        out = ergo::to_json(points);
    } else if (trace->parsed()) {
        const ergo::Window wb = config.scan_b ? *config.scan_b : config.scan;
        const auto residual = [&](int which) {
            return [&, which](double a, double b) {
                if (!(b > a)) return std::numeric_limits<double>::quiet_NaN();
                const auto res = ergo::equilibrium_residuals(
                    config.model, config.cost, ergo::ThresholdPair{a, b},
                    config.quadrature);
                return which == 0 ? res.first : res.second;
            };
        };
        const auto cond_i = ergo::trace_implicit(residual(0), config.scan, wb,
                                                 config.quadrature);
        const auto cond_ii = ergo::trace_implicit(residual(1), config.scan, wb,
                                                  config.quadrature);
        emit(args, format_csv(cond_i, cond_ii));
        return 0;
    } else if (verify->parsed()) {
        const ergo::ThresholdPair pair{opt_a, opt_b};
        pair.validate();
        const double y = config.y ? *config.y
                                  : ergo::stationary_mean(config.model,
                                                          config.cost.market_statistic,
                                                          pair, config.quadrature);
        const ergo::HjbSolution sol = ergo::solve_fbp(config.model, config.cost, pair, y,
                                                      4096, config.quadrature);
        const ergo::VerificationReport report =
            ergo::verify_hjb(config.model, config.cost, sol, config.scan);
        out = ergo::to_json(report);
        out["lambda"] = sol.lambda;
        out["y"] = y;
    } else if (simulate->parsed()) {
        const ergo::SimConfig sim = sim_of(config);
        const ergo::ThresholdPair player{opt_a, opt_b};
        player.validate();
        ergo::ThresholdPair market = player;
        if (opt_c_flag->count() > 0) {
            market = ergo::ThresholdPair{opt_c, opt_d};
            market.validate();
        }
        const ergo::SimResult result = ergo::estimate_ergodic_cost(
            config.model, config.cost, config.cost.market_statistic, player, market, sim);
        out = ergo::to_json(result);
        out["seed"] = sim.seed;
    } else if (nplayer->parsed()) {
        const ergo::SimConfig sim = sim_of(config);
        if (!config.nplayer)
            throw ergo::ConfigError("nplayer", "missing required object for this command");
        const ergo::ThresholdPair pair{opt_a, opt_b};
        pair.validate();
        const int N = opt_n > 0 ? opt_n : config.nplayer->N;
        const ergo::NPlayerResult result = ergo::nplayer_experiment(
            config.model, config.cost, config.cost.market_statistic, pair, N,
            config.nplayer->deviation_grid, sim);
        out = ergo::to_json(result);
        out["seed"] = sim.seed;
    }

    if (args.format == "csv")
        throw ergo::ConfigError("--format", "csv applies to trace-curves only");
    emit(args, out.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ergo::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ergo::NoBracket& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}
