#pragma once

#include <map>
#include <optional>
#include <string>

#include "tqd/dynamics.hpp"
#include "tqd/scenarios.hpp"

namespace tqd {

// Fully resolved run settings: defaults, then config file, then flags.
struct RunConfig {
    std::string scenario = "rotating"; // rotating | bell | closed
    CorrectionMode correction = CorrectionMode::none;
    std::string out_dir = "out";
    IntegrationMethod method = IntegrationMethod::rk45_adaptive;
    double dt = 1e-3;
    double rtol = 1e-9;
    double atol = 1e-12;
    std::optional<double> t_final;
    int grid_points = 401;
    unsigned long seed = 12345;
    RotatingDissipationParams rotating;
    BellDraggingParams bell;
    ClosedSpinParams closed;

    // Applies config-file pairs; unknown keys are rejected.
    void apply(const std::map<std::string, std::string>& kv);
    void validate() const;
    // String form of every setting, for embedding into summary.json.
    std::map<std::string, std::string> resolved() const;
};

CorrectionMode parse_correction_mode(const std::string& name);
const char* correction_mode_name(CorrectionMode mode);

std::pair<DrivingProtocol, HermitianBasis> build_scenario(const RunConfig& config);

// Entry point: subcommands run, compare, inspect-spectrum, check.
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

} // namespace tqd
