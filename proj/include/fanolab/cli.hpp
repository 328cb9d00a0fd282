// cli.hpp — Scenario runner: JSON configs in, CSV/JSON reports out

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fanolab/spectral.hpp"
#include "fanolab/stability.hpp"

namespace fanolab::cli {

// Configuration problems map to exit code 2; domain/solver failures to 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioConfig {
    spectral::SpectralDensity density;
    double omega_s{1.0};
    spectral::QuadratureSpec quadrature;

    double dt{0.005};
    double t_max{50.0};
    int stride{10};

    stability::CouplingForm coupling_form{stability::CouplingForm::PositionPosition};
    std::vector<double> scale_grid;

    double solver_tol{1e-12};
    std::uint64_t seed{0};
    std::string output_dir{"out"};

    // Fully resolved config document, echoed into every report.
    nlohmann::json echo;

    static ScenarioConfig load(const std::string& path);
    static ScenarioConfig from_json(const nlohmann::json& j, const std::string& base_dir);
};

int run_bound_state(const ScenarioConfig& cfg, const std::string& out_dir);
int run_evolve(const ScenarioConfig& cfg, const std::string& out_dir);
int run_conserve(const ScenarioConfig& cfg, const std::string& out_dir);
int run_spectrum(const ScenarioConfig& cfg, const std::string& out_dir);
int run_stability_scan(const ScenarioConfig& cfg, const std::string& out_dir, int jobs);

// Full command-line entry point (subcommands bound-state, evolve, conserve,
// spectrum, stability-scan; flags --config, --out, --jobs).  Returns the
// process exit code: 0 success, 1 domain errors, 2 config errors.
int dispatch(int argc, const char* const* argv);

} // namespace fanolab::cli
