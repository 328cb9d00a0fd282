#include "fanolab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fanolab/boundstate.hpp"
#include "fanolab/discrete.hpp"
#include "fanolab/dynamics.hpp"
#include "fanolab/io.hpp"

namespace fanolab::cli {

namespace {

using nlohmann::json;

double get_num(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw config_error("config: '" + key + "' must be a number");
    return j.at(key).get<double>();
}

json object_or_empty(const json& j, const std::string& key) {
    if (!j.contains(key)) return json::object();
    if (!j.at(key).is_object()) throw config_error("config: '" + key + "' must be an object");
    return j.at(key);
}

std::vector<double> parse_scale_grid(const json& block) {
    if (!block.contains("scale_grid")) {
        std::vector<double> grid;
        for (int i = 0; i <= 40; ++i) grid.push_back(i * 0.05);
        return grid;
    }
    const json& sg = block.at("scale_grid");
    std::vector<double> grid;
    if (sg.is_array()) {
        for (const auto& v : sg) {
            if (!v.is_number()) throw config_error("config: scale_grid entries must be numbers");
            grid.push_back(v.get<double>());
        }
    } else if (sg.is_object()) {
        const double lo = get_num(sg, "min", 0.0);
        const double hi = get_num(sg, "max", 2.0);
        const int count = static_cast<int>(get_num(sg, "count", 41));
        if (count < 2) throw config_error("config: scale_grid.count must be >= 2");
        grid = io::linspace(lo, hi, count);
    } else {
        throw config_error("config: scale_grid must be an array or {min,max,count}");
    }
    if (grid.size() < 2) throw config_error("config: scale_grid needs at least two points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw config_error("config: scale_grid must be strictly ascending");
    return grid;
}

std::vector<double> sample_times(const ScenarioConfig& cfg) {
    std::vector<double> times;
    const double step = cfg.dt * cfg.stride;
    const auto count = static_cast<std::size_t>(std::floor(cfg.t_max / step + 1e-9));
    times.reserve(count + 1);
    for (std::size_t i = 0; i <= count; ++i) times.push_back(i * step);
    return times;
}

void write_report(const std::string& path, const json& body) {
    io::write_text_file(path, body.dump(2) + "\n");
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

} // namespace

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    return from_json(j, std::filesystem::path(path).parent_path().string());
}

ScenarioConfig ScenarioConfig::from_json(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw config_error("config: top level must be an object");
    ScenarioConfig cfg;

    const json sd = object_or_empty(j, "spectral_density");
    const std::string family = sd.value("family", std::string("OhmicFamily"));
    std::string table_path;
    if (family == "OhmicFamily") {
        const double s = get_num(sd, "s", 1.0);
        const double eta = get_num(sd, "eta", 0.1);
        const double omega_c = get_num(sd, "omega_c", 5.0);
        try {
            cfg.density = spectral::SpectralDensity::ohmic(s, eta, omega_c);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("config: ") + e.what());
        }
    } else if (family == "Tabulated") {
        if (!sd.contains("table_path") || !sd.at("table_path").is_string())
            throw config_error("config: Tabulated density needs a 'table_path' string");
        std::filesystem::path p = sd.at("table_path").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        table_path = p.string();
        if (!std::filesystem::exists(p))
            throw config_error("config: table_path does not exist: " + table_path);
        try {
            cfg.density = spectral::SpectralDensity::from_csv(table_path);
        } catch (const std::exception& e) {
            throw config_error(std::string("config: ") + e.what());
        }
    } else {
        throw config_error("config: family must be 'OhmicFamily' or 'Tabulated'");
    }

    cfg.omega_s = get_num(j, "omega_s", 1.0);

    const json quad = object_or_empty(j, "quadrature");
    const std::string scheme = quad.value("scheme", std::string("UniformTrapezoid"));
    if (scheme == "UniformTrapezoid") {
        cfg.quadrature.scheme = spectral::Scheme::UniformTrapezoid;
    } else if (scheme == "GaussLegendrePanels") {
        cfg.quadrature.scheme = spectral::Scheme::GaussLegendrePanels;
    } else {
        throw config_error("config: scheme must be 'UniformTrapezoid' or 'GaussLegendrePanels'");
    }
    cfg.quadrature.n_points = static_cast<int>(get_num(quad, "n_points", 4096));
    const double default_omega_max = (cfg.density.family == spectral::Family::OhmicFamily)
                                         ? 10.0 * cfg.density.omega_c
                                         : cfg.density.support_hi;
    cfg.quadrature.omega_max = get_num(quad, "omega_max", default_omega_max);
    try {
        cfg.quadrature.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }

    const json dyn = object_or_empty(j, "dynamics");
    cfg.dt = get_num(dyn, "dt", 0.005);
    cfg.t_max = get_num(dyn, "t_max", 50.0);
    cfg.stride = static_cast<int>(get_num(dyn, "stride", 10));
    if (!(cfg.dt > 0.0)) throw config_error("config: dynamics.dt must be > 0");
    if (!(cfg.t_max >= cfg.dt)) throw config_error("config: dynamics.t_max must be >= dt");
    if (cfg.stride < 1) throw config_error("config: dynamics.stride must be >= 1");

    const json stab = object_or_empty(j, "stability");
    const std::string form = stab.value("coupling_form", std::string("PositionPosition"));
    if (form == "RotatingWave") {
        cfg.coupling_form = stability::CouplingForm::RotatingWave;
    } else if (form == "PositionPosition") {
        cfg.coupling_form = stability::CouplingForm::PositionPosition;
    } else {
        throw config_error("config: coupling_form must be 'RotatingWave' or 'PositionPosition'");
    }
    cfg.scale_grid = parse_scale_grid(stab);

    cfg.solver_tol = get_num(object_or_empty(j, "solver"), "tol", 1e-12);
    if (!(cfg.solver_tol > 0.0)) throw config_error("config: solver.tol must be > 0");
    cfg.seed = static_cast<std::uint64_t>(get_num(j, "seed", 0.0));
    cfg.output_dir = j.value("output_dir", std::string("out"));

    // Fully resolved document for provenance.
    cfg.echo = json::object();
    if (cfg.density.family == spectral::Family::OhmicFamily) {
        cfg.echo["spectral_density"] = {{"family", "OhmicFamily"},
                                        {"s", cfg.density.s_exponent},
                                        {"eta", cfg.density.eta},
                                        {"omega_c", cfg.density.omega_c}};
    } else {
        cfg.echo["spectral_density"] = {{"family", "Tabulated"}, {"table_path", table_path}};
    }
    cfg.echo["omega_s"] = cfg.omega_s;
    cfg.echo["quadrature"] = {{"scheme", scheme},
                              {"n_points", cfg.quadrature.n_points},
                              {"omega_max", cfg.quadrature.omega_max}};
    cfg.echo["dynamics"] = {{"dt", cfg.dt}, {"t_max", cfg.t_max}, {"stride", cfg.stride}};
    cfg.echo["stability"] = {{"coupling_form", form}, {"scale_grid", cfg.scale_grid}};
    cfg.echo["solver"] = {{"tol", cfg.solver_tol}};
    cfg.echo["seed"] = cfg.seed;
    cfg.echo["output_dir"] = cfg.output_dir;
    return cfg;
}

int run_bound_state(const ScenarioConfig& cfg, const std::string& out_dir) {
    const auto bs = boundstate::solve_pole(cfg.density, cfg.omega_s, cfg.quadrature,
                                           cfg.solver_tol);
    json report;
    report["exists"] = bs.exists;
    report["omega_b"] = bs.exists ? json(bs.omega_b) : json(nullptr);
    report["Z"] = bs.exists ? json(bs.residue_Z) : json(nullptr);
    report["threshold_margin"] = bs.threshold_margin;
    report["residual"] = bs.pole_residual;
    report["config"] = cfg.echo;
    write_report(join(out_dir, "bound_state.json"), report);
    return 0;
}

int run_evolve(const ScenarioConfig& cfg, const std::string& out_dir) {
    const auto bath = discrete::discretize(cfg.density, cfg.quadrature);
    const auto spec = discrete::diagonalize(discrete::arrowhead(cfg.omega_s, bath));
    const auto times = sample_times(cfg);

    auto eigen_trace = dynamics::evolve_eigen(spec, times);
    auto volterra_full = dynamics::evolve_volterra(cfg.density, cfg.omega_s, cfg.quadrature,
                                                   cfg.dt, cfg.t_max);
    dynamics::PropagatorTrace volterra_sampled;
    volterra_sampled.engine = dynamics::Engine::VolterraKernel;
    volterra_sampled.recurrence_time = volterra_full.recurrence_time;
    for (std::size_t i = 0; i < volterra_full.times.size();
         i += static_cast<std::size_t>(cfg.stride)) {
        volterra_sampled.times.push_back(volterra_full.times[i]);
        volterra_sampled.amplitudes.push_back(volterra_full.amplitudes[i]);
    }

    double max_dev = 0.0;
    const std::size_t common = std::min(eigen_trace.times.size(), volterra_sampled.times.size());
    for (std::size_t i = 0; i < common; ++i)
        max_dev = std::max(max_dev,
                           std::abs(eigen_trace.amplitudes[i] - volterra_sampled.amplitudes[i]));

    std::ostringstream eigen_csv, volterra_csv;
    dynamics::write_trace_csv(eigen_trace, eigen_csv);
    dynamics::write_trace_csv(volterra_sampled, volterra_csv);
    io::write_text_file(join(out_dir, "u_eigen.csv"), eigen_csv.str());
    io::write_text_file(join(out_dir, "u_volterra.csv"), volterra_csv.str());

    json agreement;
    agreement["max_dev"] = max_dev;
    agreement["samples_compared"] = common;
    agreement["recurrence_time"] = eigen_trace.recurrence_time;
    agreement["recurrence_exceeded"] = eigen_trace.recurrence_exceeded;
    agreement["config"] = cfg.echo;
    write_report(join(out_dir, "agreement.json"), agreement);
    return 0;
}

int run_conserve(const ScenarioConfig& cfg, const std::string& out_dir) {
    const auto bath = discrete::discretize(cfg.density, cfg.quadrature);
    const auto spec = discrete::diagonalize(discrete::arrowhead(cfg.omega_s, bath));
    const auto report = dynamics::conservation_audit(spec, cfg.omega_s, sample_times(cfg));

    std::ostringstream csv;
    dynamics::write_conservation_csv(report, csv);
    io::write_text_file(join(out_dir, "conservation.csv"), csv.str());

    json summary;
    summary["max_drift_N"] = report.max_drift_N;
    summary["max_drift_E"] = report.max_drift_E;
    summary["E_ref"] = cfg.omega_s;
    summary["N_ref"] = 1.0;
    summary["config"] = cfg.echo;
    write_report(join(out_dir, "conserve_summary.json"), summary);
    return 0;
}

int run_spectrum(const ScenarioConfig& cfg, const std::string& out_dir) {
    const auto bath = discrete::discretize(cfg.density, cfg.quadrature);
    const auto spec = discrete::diagonalize(discrete::arrowhead(cfg.omega_s, bath));

    std::ostringstream csv;
    discrete::write_spectrum_csv(spec, csv);
    io::write_text_file(join(out_dir, "spectrum.csv"), csv.str());

    json summary;
    summary["n_modes"] = spec.eigenvalues().size();
    summary["lambda_min"] = spec.eigenvalues().front();
    summary["lambda_max"] = spec.eigenvalues().back();
    summary["config"] = cfg.echo;
    write_report(join(out_dir, "spectrum_summary.json"), summary);
    return 0;
}

int run_stability_scan(const ScenarioConfig& cfg, const std::string& out_dir, int jobs) {
    stability::QuadraticModel model;
    model.coupling_form = cfg.coupling_form;
    model.omega_s = cfg.omega_s;
    model.bath = discrete::discretize(cfg.density, cfg.quadrature);
    const double freq_ceiling = std::max(cfg.omega_s, model.bath.domain_hi);
    const double tol = 1e-9 * freq_ceiling * freq_ceiling;
    const auto scan = stability::critical_scan(model, cfg.scale_grid, tol, jobs);

    std::ostringstream csv;
    stability::write_scan_csv(scan, csv);
    io::write_text_file(join(out_dir, "stability_scan.csv"), csv.str());

    json summary;
    summary["transition_found"] = scan.transition_found;
    summary["critical_scale"] = scan.transition_found ? json(scan.critical_scale) : json(nullptr);
    summary["bracket_lo"] = scan.transition_found ? json(scan.bracket_lo) : json(nullptr);
    summary["bracket_hi"] = scan.transition_found ? json(scan.bracket_hi) : json(nullptr);
    summary["config"] = cfg.echo;
    write_report(join(out_dir, "stability_summary.json"), summary);
    return 0;
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Fano-Anderson model laboratory: bound modes, exact dynamics, "
                 "conservation audits, and coupling-form stability scans"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int jobs = 1;

    struct Sub {
        CLI::App* cmd;
        int id;
    };
    std::vector<Sub> subs;
    const char* names[] = {"bound-state", "evolve", "conserve", "spectrum", "stability-scan"};
    const char* descs[] = {"solve the renormalized-mode pole equation",
                           "run both survival-amplitude engines",
                           "audit particle-number and energy conservation",
                           "export the normal-mode spectrum",
                           "scan coupling scales for instability"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* c = app.add_subcommand(names[i], descs[i]);
        c->add_option("--config", config_path, "path to the JSON scenario config")->required();
        c->add_option("--out", out_override, "output directory (overrides config)");
        c->add_option("--jobs", jobs, "parallel tasks for parameter scans")
            ->check(CLI::PositiveNumber);
        subs.push_back({c, i});
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto cfg = ScenarioConfig::load(config_path);
        const std::string out = out_override.empty() ? cfg.output_dir : out_override;
        for (const auto& sub : subs) {
            if (!sub.cmd->parsed()) continue;
            switch (sub.id) {
                case 0: return run_bound_state(cfg, out);
                case 1: return run_evolve(cfg, out);
                case 2: return run_conserve(cfg, out);
                case 3: return run_spectrum(cfg, out);
                case 4: return run_stability_scan(cfg, out, jobs);
            }
        }
        return 2; // no subcommand matched; require_subcommand should prevent this
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace fanolab::cli
