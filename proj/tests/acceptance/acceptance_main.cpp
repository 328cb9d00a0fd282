// acceptance_main.cpp — End-to-end acceptance run: one pass/fail line per criterion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "../support/bath_fixtures.hpp"
#include "fanolab/boundstate.hpp"
#include "fanolab/cli.hpp"
#include "fanolab/discrete.hpp"
#include "fanolab/dynamics.hpp"
#include "fanolab/io.hpp"
#include "fanolab/spectral.hpp"
#include "fanolab/stability.hpp"

using namespace fanolab;
using cd = std::complex<double>;
using spectral::Scheme;
using spectral::SpectralDensity;
using spectral::QuadratureSpec;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> run; // empty string = pass, otherwise failure detail
};

struct Fixture {
    SpectralDensity strong = SpectralDensity::ohmic(1.0, 0.1, 5.0);
    SpectralDensity near = SpectralDensity::ohmic(1.0, 0.032, 5.0);
    SpectralDensity weak = SpectralDensity::ohmic(1.0, 0.01, 5.0);
    QuadratureSpec mid4096{Scheme::UniformTrapezoid, 4096, 50.0};
    QuadratureSpec mid8192{Scheme::UniformTrapezoid, 8192, 50.0};
    QuadratureSpec gl4096{Scheme::GaussLegendrePanels, 4096, 50.0};
    QuadratureSpec gl8192{Scheme::GaussLegendrePanels, 8192, 50.0};
    double omega_s = 1.0;

    discrete::DiscretizedBath strong_bath;
    discrete::SingleParticleSpectrum strong_spec;
    boundstate::BoundState strong_bs;

    Fixture() {
        strong_bath = discrete::discretize(strong, mid4096);
        strong_spec = discrete::diagonalize(discrete::arrowhead(omega_s, strong_bath));
        strong_bs = boundstate::solve_pole(strong, omega_s, gl4096, 1e-12);
    }
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> window_times(double lo, double hi, double step) {
    std::vector<double> t{0.0};
    for (double x = lo; x <= hi + 1e-9; x += step) t.push_back(x);
    return t;
}

// ----------------------------------------------------------------------------

std::string criterion_interlacing(const Fixture& fx) {
    std::mt19937 rng(20240809);
    for (int trial = 0; trial < 100; ++trial) {
        const auto bath = testing::random_bath(rng, 512);
        const double omega_s = testing::random_system_frequency(rng);
        const auto spec = discrete::diagonalize(discrete::arrowhead(omega_s, bath));
        if (!testing::interlaces_strictly(spec.eigenvalues(), bath.omegas))
            return fmt("violation in random bath %d (N=%zu)", trial, bath.size());
    }
    if (!testing::interlaces_strictly(fx.strong_spec.eigenvalues(), fx.strong_bath.omegas))
        return "violation in the N=4096 ohmic reference bath";
    return "";
}

std::string criterion_pole_consistency(const Fixture& fx) {
    if (!fx.strong_bs.exists) return "bound state missing in the strong-coupling reference";
    const double err4096 = std::abs(fx.strong_spec.eigenvalues().front() - fx.strong_bs.omega_b);
    const auto bath8 = discrete::discretize(fx.strong, fx.mid8192);
    const auto spec8 = discrete::diagonalize(discrete::arrowhead(fx.omega_s, bath8));
    const double err8192 = std::abs(spec8.eigenvalues().front() - fx.strong_bs.omega_b);
    if (err4096 > 1e-4) return fmt("|omega_b - lambda_min(4096)| = %.3e > 1e-4", err4096);
    if (err8192 > 0.5 * err4096)
        return fmt("error did not halve: %.3e (4096) -> %.3e (8192)", err4096, err8192);
    const double z_err =
        std::abs(fx.strong_spec.system_weights().front() - fx.strong_bs.residue_Z);
    if (z_err > 1e-3)
        return fmt("residue vs bound-mode system weight differ by %.3e > 1e-3", z_err);
    return "";
}

std::string criterion_threshold(const Fixture& fx) {
    // Quadrature oracle: edge integral at unit eta gives eta_c = omega_s / I1.
    const double unit_edge =
        spectral::pole_integral(SpectralDensity::ohmic(1.0, 1.0, 5.0), -1e-14, fx.gl8192);
    const double eta_c = fx.omega_s / unit_edge;

    bool prev = false;
    int flips = 0;
    double flip_lo = 0.0, flip_hi = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double eta = eta_c * (0.52 + 0.05 * i);
        const auto bs = boundstate::solve_pole(SpectralDensity::ohmic(1.0, eta, 5.0),
                                               fx.omega_s, fx.gl4096);
        if (i > 0 && bs.exists != prev) {
            ++flips;
            flip_lo = eta_c * (0.52 + 0.05 * (i - 1));
            flip_hi = eta;
        }
        prev = bs.exists;
    }
    if (flips != 1) return fmt("expected exactly one flip on the 21-point scan, saw %d", flips);

    double a = flip_lo, b = flip_hi;
    while (b - a > 1e-3 * eta_c) {
        const double m = 0.5 * (a + b);
        const auto bs =
            boundstate::solve_pole(SpectralDensity::ohmic(1.0, m, 5.0), fx.omega_s, fx.gl4096);
        (bs.exists ? b : a) = m;
    }
    const double refined = 0.5 * (a + b);
    if (std::abs(refined - eta_c) > 0.01 * eta_c)
        return fmt("flip at %.6f, oracle eta_c %.6f, off by %.2f%%", refined, eta_c,
                   100.0 * std::abs(refined - eta_c) / eta_c);
    return "";
}

std::string criterion_residue_dynamics(const Fixture& fx) {
    const auto trace = dynamics::evolve_eigen(fx.strong_spec, window_times(200.0, 400.0, 0.05));
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i < trace.times.size(); ++i) {
        acc += std::abs(trace.amplitudes[i]);
        ++count;
    }
    const double mean = acc / count;
    const double rel = std::abs(mean - fx.strong_bs.residue_Z) / fx.strong_bs.residue_Z;
    if (rel > 0.01)
        return fmt("time-averaged |u| = %.6f vs Z = %.6f (%.2f%%)", mean,
                   fx.strong_bs.residue_Z, 100.0 * rel);

    const auto weak_bath = discrete::discretize(fx.weak, fx.mid4096);
    const auto weak_spec = discrete::diagonalize(discrete::arrowhead(fx.omega_s, weak_bath));
    const auto weak_trace = dynamics::evolve_eigen(weak_spec, {0.0, 300.0});
    const double survived = std::abs(weak_trace.amplitudes.back());
    if (survived > 0.05) return fmt("weak-coupling |u(300)| = %.3e > 0.05", survived);
    return "";
}

std::string criterion_engine_agreement(const Fixture& fx) {
    const SpectralDensity* densities[] = {&fx.weak, &fx.near, &fx.strong};
    const char* labels[] = {"weak", "near-threshold", "strong"};
    for (int r = 0; r < 3; ++r) {
        const auto bath = discrete::discretize(*densities[r], fx.mid4096);
        const auto spec = discrete::diagonalize(discrete::arrowhead(fx.omega_s, bath));
        const double dt = 0.002;
        const auto vt = dynamics::evolve_volterra(*densities[r], fx.omega_s, fx.mid4096, dt, 50.0);
        std::vector<double> times;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < vt.times.size(); i += 25) {
            times.push_back(vt.times[i]);
            idx.push_back(i);
        }
        const auto et = dynamics::evolve_eigen(spec, times);
        double maxdev = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i)
            maxdev = std::max(maxdev, std::abs(vt.amplitudes[idx[i]] - et.amplitudes[i]));
        if (maxdev > 1e-4)
            return fmt("%s coupling: max|u_eigen - u_volterra| = %.3e > 1e-4", labels[r], maxdev);
    }

    // Endpoint error against the exact finite-model solution, three dt levels.
    const auto ref = dynamics::evolve_eigen(fx.strong_spec, {0.0, 50.0});
    double errs[3];
    const double dts[3] = {0.02, 0.01, 0.005};
    for (int i = 0; i < 3; ++i) {
        const auto vt =
            dynamics::evolve_volterra(fx.strong, fx.omega_s, fx.mid4096, dts[i], 50.0);
        errs[i] = std::abs(vt.amplitudes.back() - ref.amplitudes.back());
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    if (order1 < 1.8 || order2 < 1.8)
        return fmt("observed orders %.2f, %.2f below 1.8 (errors %.2e, %.2e, %.2e)", order1,
                   order2, errs[0], errs[1], errs[2]);
    return "";
}

std::string criterion_conservation(const Fixture& fx) {
    if (!(fx.strong_spec.eigenvalues().front() < 0.0))
        return "expected a negative bound mode in the strong-coupling reference";
    const auto report =
        dynamics::conservation_audit(fx.strong_spec, fx.omega_s, window_times(12.5, 400.0, 12.5));
    if (report.max_drift_N > 1e-10) return fmt("max_drift_N = %.3e > 1e-10", report.max_drift_N);
    const double e_tol = 1e-10 * fx.strong_spec.spectral_width();
    if (report.max_drift_E > e_tol)
        return fmt("max_drift_E = %.3e > %.3e", report.max_drift_E, e_tol);
    return "";
}

std::string criterion_sector_bounds(const Fixture& fx) {
    const double unit_edge =
        spectral::pole_integral(SpectralDensity::ohmic(1.0, 1.0, 5.0), -1e-14, fx.gl8192);
    const double eta_c = fx.omega_s / unit_edge;
    const QuadratureSpec mid2048{Scheme::UniformTrapezoid, 2048, 50.0};
    for (int i = 0; i <= 20; ++i) {
        const double eta = eta_c * (0.52 + 0.05 * i);
        const auto sd = SpectralDensity::ohmic(1.0, eta, 5.0);
        const auto bs = boundstate::solve_pole(sd, fx.omega_s, fx.gl4096);
        const auto spec = discrete::diagonalize(
            discrete::arrowhead(fx.omega_s, discrete::discretize(sd, mid2048)));
        const auto sectors = dynamics::sector_ground_energies(spec, 10);
        for (int n = 0; n <= 10; ++n)
            if (sectors.levels[n].second != n * sectors.lambda_min)
                return fmt("E_min(%d) != n*lambda_min at eta=%.5f", n, eta);
        if (sectors.bounded_overall != !bs.exists)
            return fmt("classification mismatch at eta=%.5f: lambda_min=%.3e, exists=%d", eta,
                       sectors.lambda_min, bs.exists ? 1 : 0);
    }
    return "";
}

std::string criterion_steady_state(const Fixture& fx) {
    const double t = 300.0;
    const auto ssv = dynamics::steady_state(fx.strong_bs, fx.strong, fx.strong_bath, fx.omega_s, t);
    const auto site = dynamics::steady_state_site_vector(ssv, fx.strong_bs, fx.strong_bath);
    const auto psi = fx.strong_spec.propagate_system_excitation(t);
    cd overlap{0.0, 0.0};
    double n1 = 0.0;
    for (std::size_t m = 0; m < site.size(); ++m) {
        overlap += std::conj(site[m]) * psi(static_cast<Eigen::Index>(m));
        n1 += std::norm(site[m]);
    }
    const double fidelity = std::abs(overlap) / std::sqrt(n1 * psi.squaredNorm());
    if (fidelity < 0.99) return fmt("fidelity %.6f < 0.99 (norm %.6f)", fidelity, ssv.norm);
    return "";
}

std::string criterion_qbm_instability(const Fixture& fx) {
    discrete::DiscretizedBath one;
    one.omegas = {1.0};
    one.couplings = {1.0};
    one.weights = {1.0};
    one.domain_lo = 0.5;
    one.domain_hi = 1.5;
    stability::QuadraticModel pp{stability::CouplingForm::PositionPosition, 1.0, one, 1.0};
    std::vector<double> unit_grid;
    for (int i = 0; i <= 20; ++i) unit_grid.push_back(i * 0.05);
    const auto scan = stability::critical_scan(pp, unit_grid, 1e-12);
    if (!scan.transition_found) return "single-mode scan found no transition";
    const double c_star = 0.5; // sqrt(omega_s * omega_1)/2 with both frequencies 1
    const double rel = std::abs(scan.critical_scale - c_star) / c_star;
    if (rel > 1e-6)
        return fmt("single-mode critical scale %.8f off oracle 0.5 by %.2e rel",
                   scan.critical_scale, rel);

    const QuadratureSpec mid256{Scheme::UniformTrapezoid, 256, 50.0};
    const auto bath = discrete::discretize(fx.strong, mid256);
    stability::QuadraticModel rw{stability::CouplingForm::RotatingWave, 1.0, bath, 1.0};
    std::vector<double> wide_grid;
    for (int i = 0; i <= 20; ++i) wide_grid.push_back(i * 0.25);
    const auto rw_scan = stability::critical_scan(rw, wide_grid, 1e-9);
    for (const auto& p : rw_scan.points)
        if (!p.verdict.stable || p.verdict.max_imag_rate != 0.0)
            return fmt("rotating-wave instability reported at scale %.2f", p.scale);

    const double rw_comm = stability::number_commutant_norm(rw);
    stability::QuadraticModel pp_bath{stability::CouplingForm::PositionPosition, 1.0, bath, 1.0};
    const double pp_comm = stability::number_commutant_norm(pp_bath);
    if (rw_comm > 1e-12) return fmt("rotating-wave commutant norm %.3e > 1e-12", rw_comm);
    if (pp_comm <= 0.1) return fmt("position-position commutant norm %.3e <= 0.1", pp_comm);
    return "";
}

std::string criterion_determinism(const Fixture&) {
    const nlohmann::json cfg_json{
        {"spectral_density",
         {{"family", "OhmicFamily"}, {"s", 1.0}, {"eta", 0.1}, {"omega_c", 5.0}}},
        {"omega_s", 1.0},
        {"quadrature", {{"scheme", "UniformTrapezoid"}, {"n_points", 256}, {"omega_max", 50.0}}},
        {"dynamics", {{"dt", 0.01}, {"t_max", 5.0}, {"stride", 10}}},
        {"stability",
         {{"coupling_form", "PositionPosition"},
          {"scale_grid", {{"min", 0.0}, {"max", 1.0}, {"count", 11}}}}},
        {"seed", 42}};
    const auto cfg = cli::ScenarioConfig::from_json(cfg_json, "");
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "fanolab_acceptance_det";
    fs::remove_all(base);
    for (const char* run : {"a", "b"}) {
        const auto dir = (base / run).string();
        cli::run_bound_state(cfg, dir);
        cli::run_evolve(cfg, dir);
        cli::run_conserve(cfg, dir);
        cli::run_spectrum(cfg, dir);
        cli::run_stability_scan(cfg, dir, 1);
    }
    for (const char* name :
         {"bound_state.json", "u_eigen.csv", "u_volterra.csv", "agreement.json",
          "conservation.csv", "conserve_summary.json", "spectrum.csv", "spectrum_summary.json",
          "stability_scan.csv", "stability_summary.json"}) {
        if (io::read_text_file((base / "a" / name).string()) !=
            io::read_text_file((base / "b" / name).string()))
            return fmt("output %s differs between identical runs", name);
    }
    return "";
}

} // namespace

int main() {
    std::printf("acceptance run: Fano-Anderson laboratory\n");
    const Fixture fx; // shared N=4096 strong-coupling reference

    const std::vector<Criterion> criteria = {
        {"1. eigenvalue interlacing (100 random baths + N=4096 reference)",
         [&] { return criterion_interlacing(fx); }},
        {"2. pole equation vs arrowhead minimum (1e-4; error halves at N=8192)",
         [&] { return criterion_pole_consistency(fx); }},
        {"3. bound-state threshold at eta_c within 1% (21-point scan)",
         [&] { return criterion_threshold(fx); }},
        {"4. dissipationless residue: <|u|> = Z within 1%; weak |u(300)| <= 0.05",
         [&] { return criterion_residue_dynamics(fx); }},
        {"5. engine agreement <= 1e-4 and observed order >= 1.8",
         [&] { return criterion_engine_agreement(fx); }},
        {"6. conservation drifts: N within 1e-10, E within 1e-10 * width",
         [&] { return criterion_conservation(fx); }},
        {"7. sector bounds E_min(n) = n*lambda_min; classification tracks the bound state",
         [&] { return criterion_sector_bounds(fx); }},
        {"8. steady-state fidelity >= 0.99 at t = 300, N = 4096",
         [&] { return criterion_steady_state(fx); }},
        {"9. QBM instability: critical scale, stable rotating-wave scan, commutants",
         [&] { return criterion_qbm_instability(fx); }},
        {"10. CLI determinism: byte-identical repeated runs",
         [&] { return criterion_determinism(fx); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            std::printf("[PASS] %s\n", c.name.c_str());
        } else {
            std::printf("[FAIL] %s -- %s\n", c.name.c_str(), detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
