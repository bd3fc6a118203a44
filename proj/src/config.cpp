#include "ergo/config.hpp"

#include <fstream>

namespace ergo {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) throw ConfigError(join(path, key), "unknown key");
    }
}

double get_number(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing required number");
    if (!j[key].is_number()) throw ConfigError(join(path, key), "expected a number");
    return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& path, const std::string& key,
                     double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(join(path, key), "expected a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing required integer");
    if (!j[key].is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return j[key].get<int>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing required string");
    if (!j[key].is_string()) throw ConfigError(join(path, key), "expected a string");
    return j[key].get<std::string>();
}

Eigen::ArrayXd get_coeffs(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty())
        throw ConfigError(join(path, key), "expected a nonempty array of numbers");
    Eigen::ArrayXd out(j[key].size());
    Eigen::Index i = 0;
    for (const auto& e : j[key]) {
        if (!e.is_number()) throw ConfigError(join(path, key), "expected a number entry");
        out[i++] = e.get<double>();
    }
    return out;
}

DiffusionModel parse_model(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path,
               {"family", "mu", "theta", "sigma", "mu_coeffs", "sigma_coeffs",
                "reference_point"});
    const std::string family = get_string(j, path, "family");
    DiffusionModel model;
    if (family == "bm_drift") {
        model = DiffusionModel::bm_drift(get_number(j, path, "mu"),
                                         get_number(j, path, "sigma"));
    } else if (family == "ou") {
        const double theta = get_number(j, path, "theta");
        if (!(theta > 0.0)) throw ConfigError(join(path, "theta"), "must be > 0");
        model = DiffusionModel::ou(theta, get_number(j, path, "sigma"));
    } else if (family == "custom_poly") {
        model = DiffusionModel::custom_poly(get_coeffs(j, path, "mu_coeffs"),
                                            get_coeffs(j, path, "sigma_coeffs"));
    } else {
        throw ConfigError(join(path, "family"),
                          "expected bm_drift, ou, or custom_poly");
    }
    if (family != "custom_poly" && !(model.sigma > 0.0))
        throw ConfigError(join(path, "sigma"), "must be > 0");
    model.reference_point = get_number_or(j, path, "reference_point", 0.0);
    return model;
}

MarketStatistic parse_statistic(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"kind", "coeffs"});
    const std::string kind = get_string(j, path, "kind");
    MarketStatistic f;
    if (kind == "identity") {
        f.kind = MarketStatisticKind::Identity;
    } else if (kind == "custom_poly") {
        f.kind = MarketStatisticKind::CustomPoly;
        f.coeffs = get_coeffs(j, path, "coeffs");
    } else {
        throw ConfigError(join(path, "kind"), "expected identity or custom_poly");
    }
    return f;
}

CostModel parse_cost(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path,
               {"family", "lambda", "beta", "center", "scale", "coeffs", "q_u", "q_d",
                "market_statistic"});
    const std::string family = get_string(j, path, "family");
    const double q_u = get_number(j, path, "q_u");
    const double q_d = get_number(j, path, "q_d");
    if (!(q_u > 0.0)) throw ConfigError(join(path, "q_u"), "must be > 0");
    if (!(q_d > 0.0)) throw ConfigError(join(path, "q_d"), "must be > 0");
    CostModel cost;
    if (family == "abs_diff") {
        cost = CostModel::abs_diff(q_u, q_d);
    } else if (family == "mult_maxlin") {
        const double lambda = get_number(j, path, "lambda");
        const double beta = get_number(j, path, "beta");
        if (!(lambda > 0.0)) throw ConfigError(join(path, "lambda"), "must be > 0");
        if (!(beta >= 1.0)) throw ConfigError(join(path, "beta"), "must be >= 1");
        cost = CostModel::mult_maxlin(lambda, beta, q_u, q_d);
    } else if (family == "quadratic") {
        cost = CostModel::quadratic(get_number(j, path, "center"),
                                    get_number(j, path, "scale"), q_u, q_d);
    } else if (family == "custom_poly") {
        cost = CostModel::custom_poly(get_coeffs(j, path, "coeffs"), q_u, q_d);
    } else {
        throw ConfigError(join(path, "family"),
                          "expected abs_diff, mult_maxlin, quadratic, or custom_poly");
    }
    if (j.contains("market_statistic"))
        cost.market_statistic = parse_statistic(j["market_statistic"],
                                                join(path, "market_statistic"));
    return cost;
}

Window parse_window(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"lo", "hi", "n"});
    Window w;
    w.lo = get_number(j, path, "lo");
    w.hi = get_number(j, path, "hi");
    w.grid_n = get_int(j, path, "n");
    if (!(w.lo < w.hi)) throw ConfigError(join(path, "hi"), "must exceed lo");
    if (w.grid_n < 2) throw ConfigError(join(path, "n"), "must be >= 2");
    return w;
}

Tolerance parse_tolerance(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"rel_tol", "abs_tol", "max_depth"});
    Tolerance tol;
    tol.rel_tol = get_number_or(j, path, "rel_tol", tol.rel_tol);
    tol.abs_tol = get_number_or(j, path, "abs_tol", tol.abs_tol);
    if (j.contains("max_depth")) tol.max_depth = get_int(j, path, "max_depth");
    if (!(tol.rel_tol > 0.0)) throw ConfigError(join(path, "rel_tol"), "must be > 0");
    if (!(tol.abs_tol > 0.0)) throw ConfigError(join(path, "abs_tol"), "must be > 0");
    return tol;
}

SimConfig parse_sim(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"dt", "t_max", "burn_in", "paths", "seed"});
    SimConfig sim;
    sim.dt = get_number_or(j, path, "dt", sim.dt);
    sim.t_max = get_number(j, path, "t_max");
    sim.burn_in = get_number_or(j, path, "burn_in", 0.0);
    if (j.contains("paths")) sim.paths = get_int(j, path, "paths");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ConfigError(join(path, "seed"), "expected an unsigned integer");
        sim.seed = j["seed"].get<std::uint64_t>();
    }
    if (!(sim.dt > 0.0)) throw ConfigError(join(path, "dt"), "must be > 0");
    if (!(sim.t_max > 0.0)) throw ConfigError(join(path, "t_max"), "must be > 0");
    if (!(sim.burn_in >= 0.0 && sim.burn_in < sim.t_max))
        throw ConfigError(join(path, "burn_in"), "must satisfy 0 <= burn_in < t_max");
    if (sim.paths < 1) throw ConfigError(join(path, "paths"), "must be >= 1");
    return sim;
}

NPlayerSpec parse_nplayer(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"N", "deviation_grid"});
    NPlayerSpec spec;
    spec.N = get_int(j, path, "N");
    if (spec.N < 2) throw ConfigError(join(path, "N"), "must be >= 2");
    const std::string grid_path = join(path, "deviation_grid");
    if (!j.contains("deviation_grid") || !j["deviation_grid"].is_array() ||
        j["deviation_grid"].empty())
        throw ConfigError(grid_path, "expected a nonempty array of [a, b] pairs");
    for (const auto& e : j["deviation_grid"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ConfigError(grid_path, "expected [a, b] number pairs");
        const ThresholdPair pair{e[0].get<double>(), e[1].get<double>()};
        if (!(pair.a < pair.b)) throw ConfigError(grid_path, "pairs require a < b");
        spec.deviation_grid.push_back(pair);
    }
    return spec;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    require_object(doc, "");
    check_keys(doc, "",
               {"model", "cost", "y", "scan", "scan_b", "quadrature", "sim", "nplayer",
                "unverified"});
    if (!doc.contains("model")) throw ConfigError("model", "missing required object");
    if (!doc.contains("cost")) throw ConfigError("cost", "missing required object");

    RunConfig config;
    config.model = parse_model(doc["model"], "model");
    config.cost = parse_cost(doc["cost"], "cost");
    if (doc.contains("y")) {
        if (!doc["y"].is_number()) throw ConfigError("y", "expected a number");
        config.y = doc["y"].get<double>();
    }
    if (doc.contains("scan")) config.scan = parse_window(doc["scan"], "scan");
    if (doc.contains("scan_b")) config.scan_b = parse_window(doc["scan_b"], "scan_b");
    if (doc.contains("quadrature"))
        config.quadrature = parse_tolerance(doc["quadrature"], "quadrature");
    if (doc.contains("sim")) config.sim = parse_sim(doc["sim"], "sim");
    if (doc.contains("nplayer")) config.nplayer = parse_nplayer(doc["nplayer"], "nplayer");
    if (doc.contains("unverified")) {
        if (!doc["unverified"].is_string())
            throw ConfigError("unverified", "expected a string");
        config.unverified = doc["unverified"].get<std::string>();
    }
    config.model.quad_tol = config.quadrature;
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

json to_json(const ThresholdPair& pair) {
    return json{{"a", pair.a}, {"b", pair.b}};
}

json to_json(const AssumptionReport& report) {
    return json{{"argmin_pi1", report.argmin_pi1},
                {"argmin_pi2", report.argmin_pi2},
                {"cost_nonnegative", report.cost_nonnegative},
                {"pi1_unimodal", report.pi1_unimodal},
                {"pi2_unimodal", report.pi2_unimodal},
                {"pi1_diverges_right", report.pi1_diverges_right},
                {"pi2_diverges_left", report.pi2_diverges_left},
                {"heuristic", report.heuristic},
                {"window", {{"lo", report.window.lo},
                            {"hi", report.window.hi},
                            {"n", report.window.grid_n}}},
                {"y", report.y},
                {"all_pass", report.all_pass()}};
}

json to_json(const ControlSolution& solution) {
    json others = json::array();
    for (const auto& pair : solution.other_candidates) others.push_back(to_json(pair));
    return json{{"thresholds", to_json(solution.thresholds)},
                {"value", solution.value},
                {"residual_i", solution.residual_i},
                {"residual_ii", solution.residual_ii},
                {"assumptions", to_json(solution.assumptions)},
                {"other_candidates", others}};
}

json to_json(const EquilibriumPoint& point) {
    return json{{"thresholds", to_json(point.thresholds)},
                {"R", point.R_value},
                {"value", point.value},
                {"residual_i", point.residual_i},
                {"residual_ii", point.residual_ii},
                {"classification", point.classification == EquilibriumClass::Interior
                                       ? "interior"
                                       : "boundary_of_scan"}};
}

json to_json(const std::vector<EquilibriumPoint>& points) {
    json out = json::array();
    for (const auto& p : points) out.push_back(to_json(p));
    return out;
}

json to_json(const VerificationReport& report) {
    return json{{"pass", report.pass},
                {"min_slope", report.min_slope},
                {"max_slope", report.max_slope},
                {"min_generator_slack", report.min_generator_slack},
                {"slack_tol", report.slack_tol},
                {"slack_violations", report.slack_violations},
                {"slope_violations", report.slope_violations},
                {"window", {{"lo", report.window.lo},
                            {"hi", report.window.hi},
                            {"n", report.window.grid_n}}}};
}

json to_json(const SimResult& result) {
    return json{{"estimate", result.estimate},
                {"std_error", result.std_error},
                {"U_rate", result.U_rate},
                {"D_rate", result.D_rate},
                {"paths_used", result.paths_used}};
}

json to_json(const NPlayerResult& result) {
    json grid = json::array();
    for (const auto& pair : result.deviation_grid) grid.push_back(to_json(pair));
    return json{{"N", result.N},
                {"v_equilibrium", result.v_equilibrium},
                {"v_best_deviation", result.v_best_deviation},
                {"epsilon_hat", result.epsilon_hat},
                {"std_error", result.std_error},
                {"v_equilibrium_se", result.v_equilibrium_se},
                {"deviation_grid", grid}};
}

}  // namespace ergo
