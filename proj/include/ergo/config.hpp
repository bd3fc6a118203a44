#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ergo/hjb.hpp"
#include "ergo/mfg.hpp"
#include "ergo/sim.hpp"

namespace ergo {

struct NPlayerSpec {
    int N = 2;
    std::vector<ThresholdPair> deviation_grid;
};

/// Fully parsed run configuration. Schema violations and unknown keys raise
/// ConfigError carrying the offending field path.
struct RunConfig {
    DiffusionModel model{};
    CostModel cost{};
    std::optional<double> y;          // frozen market level (solve-control)
    Window scan{-3.0, 3.0, 121};
    std::optional<Window> scan_b;     // trace-curves b-axis; defaults to scan
    Tolerance quadrature{};
    std::optional<SimConfig> sim;
    std::optional<NPlayerSpec> nplayer;
    std::optional<std::string> unverified;  // shipped-but-unreproducible marker
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const ThresholdPair& pair);
nlohmann::json to_json(const AssumptionReport& report);
nlohmann::json to_json(const ControlSolution& solution);
nlohmann::json to_json(const EquilibriumPoint& point);
nlohmann::json to_json(const std::vector<EquilibriumPoint>& points);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const SimResult& result);
nlohmann::json to_json(const NPlayerResult& result);

}  // namespace ergo
