#include "fanolab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace fanolab::dynamics {

using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_times(const std::vector<double>& times) {
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("trace: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("trace: times must be strictly ascending");
}

bool decoupled(const discrete::DiscretizedBath& bath) {
    return std::all_of(bath.couplings.begin(), bath.couplings.end(),
                       [](double v) { return v == 0.0; });
}

} // namespace

void PropagatorTrace::validate() const {
    check_times(times);
    if (amplitudes.size() != times.size())
        throw std::invalid_argument("trace: times and amplitudes must match");
    if (amplitudes.front() != cd{1.0, 0.0})
        throw std::invalid_argument("trace: u(0) must be exactly 1");
    for (const cd& u : amplitudes)
        if (std::abs(u) > 1.0 + 1e-9)
            throw std::invalid_argument("trace: |u| exceeds 1 + 1e-9");
}

PropagatorTrace evolve_eigen(const discrete::SingleParticleSpectrum& spec,
                             std::vector<double> times) {
    check_times(times);
    PropagatorTrace trace;
    trace.engine = Engine::EigenExpansion;

    const auto& omegas = spec.matrix().omegas;
    trace.recurrence_time = std::numeric_limits<double>::infinity();
    if (omegas.size() > 1) {
        const double mean_gap = (omegas.back() - omegas.front()) / (omegas.size() - 1);
        trace.recurrence_time = 2.0 * kPi / mean_gap;
    }
    trace.recurrence_exceeded = times.back() > trace.recurrence_time;

    const auto& evals = spec.eigenvalues();
    const auto& weights = spec.system_weights();
    trace.amplitudes.reserve(times.size());
    for (double t : times) {
        if (t == 0.0) {
            trace.amplitudes.emplace_back(1.0, 0.0);
            continue;
        }
        cd u{0.0, 0.0};
        for (std::size_t j = 0; j < evals.size(); ++j)
            u += std::polar(weights[j], -evals[j] * t);
        trace.amplitudes.push_back(u);
    }
    trace.times = std::move(times);
    return trace;
}

PropagatorTrace evolve_volterra(const spectral::SpectralDensity& sd, double omega_s,
                                const spectral::QuadratureSpec& q, double dt,
                                double t_max) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_volterra: dt must be > 0");
    if (!(t_max >= dt)) throw std::invalid_argument("evolve_volterra: t_max must be >= dt");
    if (t_max > spectral::kernel_time_limit(sd, q))
        throw quadrature_error("evolve_volterra: t_max exceeds the kernel resolution limit; "
                               "use finer quadrature");

    const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));

    // Product-integration weights: with u piecewise linear on the grid, the
    // history integral over the cell sigma in [k dt, (k+1) dt] contributes
    // P_k u_{n+1-k} + Q_k u_{n-k}, where the kernel moments
    //   P_k = int g(sigma) ((k+1)dt - sigma)/dt dsigma,
    //   Q_k = int g(sigma) (sigma - k dt)/dt dsigma
    // are exact per bath mode: g(sigma) = sum_i a_i e^{-i w_i sigma}.
    const auto grid = spectral::quadrature_grid(sd, q);
    const std::size_t m = grid.nodes.size();
    std::vector<cd> amp_c(m), amp_q(m), phase(m, cd{1.0, 0.0}), rot(m);
    cd p0{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
        const double a = grid.weights[i] * spectral::evaluate(sd, grid.nodes[i]);
        const double w = grid.nodes[i];
        rot[i] = std::polar(1.0, -w * dt);
        cd pw, qw;
        if (std::abs(w) * dt < 1e-8) {
            pw = qw = cd{0.5 * dt, 0.0};
        } else {
            const cd iw{0.0, w};
            const cd ea = (1.0 - rot[i]) / iw;            // int e^{-iws} ds
            const cd eb = (ea - dt * rot[i]) / iw;        // int s e^{-iws} ds
            pw = ea - eb / dt;
            qw = eb / dt;
        }
        p0 += a * pw;
        amp_c[i] = a * (rot[i] * pw + qw); // C_j = P_{j+1} + Q_j at phase j
        amp_q[i] = a * qw;
    }
    std::vector<cd> cker(steps + 1), qker(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) {
        cd acc_c{0.0, 0.0}, acc_q{0.0, 0.0};
        for (std::size_t i = 0; i < m; ++i) {
            acc_c += amp_c[i] * phase[i];
            acc_q += amp_q[i] * phase[i];
        }
        cker[j] = acc_c;
        qker[j] = acc_q;
        if (j < steps)
            for (std::size_t i = 0; i < m; ++i) phase[i] *= rot[i];
    }

    PropagatorTrace trace;
    trace.engine = Engine::VolterraKernel;
    trace.recurrence_time = std::numeric_limits<double>::infinity();
    trace.times.resize(steps + 1);
    trace.amplitudes.resize(steps + 1);
    trace.times[0] = 0.0;
    trace.amplitudes[0] = cd{1.0, 0.0};
    std::vector<cd>& u = trace.amplitudes;

    // Split history for a vectorizable inner loop.
    std::vector<double> ur(steps + 1), ui(steps + 1), cr(steps + 1), ci(steps + 1);
    ur[0] = 1.0;
    ui[0] = 0.0;
    for (std::size_t j = 0; j <= steps; ++j) {
        cr[j] = cker[j].real();
        ci[j] = cker[j].imag();
    }

    // Trapezoidal step u_{n+1} = u_n + dt/2 (F_n + F_{n+1}); the corrector is
    // linear in u_{n+1} and solved in closed form.
    const cd iws{0.0, omega_s};
    const cd denom = 1.0 + 0.5 * dt * iws + 0.5 * dt * p0;
    cd r_prev{0.0, 0.0};

    for (std::size_t n = 0; n < steps; ++n) {
        const cd memory_n = (n == 0) ? cd{0.0, 0.0} : p0 * u[n] + r_prev;
        const cd f_n = -iws * u[n] - memory_n;
        // R_n = Q_n u_0 + sum_{j=1..n} C_{n-j} u_j
        double rr = 0.0, ri = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            rr += cr[n - j] * ur[j] - ci[n - j] * ui[j];
            ri += cr[n - j] * ui[j] + ci[n - j] * ur[j];
        }
        const cd r = qker[n] + cd{rr, ri}; // u_0 = 1
        u[n + 1] = (u[n] + 0.5 * dt * f_n - 0.5 * dt * r) / denom;
        ur[n + 1] = u[n + 1].real();
        ui[n + 1] = u[n + 1].imag();
        trace.times[n + 1] = (n + 1) * dt;
        if (std::abs(u[n + 1]) > 1.05)
            throw stability_error("evolve_volterra: |u| exceeded 1.05 at t = " +
                                  std::to_string(trace.times[n + 1]) + "; reduce dt");
        r_prev = r;
    }
    return trace;
}

SteadyStateVector steady_state(const boundstate::BoundState& bs,
                               const spectral::SpectralDensity& sd,
                               const discrete::DiscretizedBath& bath, double omega_s,
                               double t) {
    bath.validate();
    const std::size_t n = bath.size();
    // Provenance: the bath must have been sampled from this density.
    for (std::size_t k : {std::size_t{0}, n / 2, n - 1}) {
        if (k >= n) break;
        const double v2 = bath.couplings[k] * bath.couplings[k];
        const double jw = spectral::evaluate(sd, bath.omegas[k]) * bath.weights[k];
        if (std::abs(v2 - jw) > 1e-10 * std::max({v2, jw, 1e-30}))
            throw consistency_error("steady_state: bath was not discretized from this density");
    }

    SteadyStateVector out;
    out.continuum_amplitudes.assign(n, cd{0.0, 0.0});

    if (decoupled(bath)) {
        // No coupling: the system mode itself is the surviving normal mode.
        out.bound_amplitude = std::polar(1.0, -omega_s * t);
        out.norm = 1.0;
        return out;
    }

    if (bs.exists)
        out.bound_amplitude = std::polar(std::sqrt(bs.residue_Z), -bs.omega_b * t);

    // Continuum part: coefficients V_k e^{-i w_k t} / (w_k - w_s - Delta + i gamma)
    // with Delta, gamma evaluated on the bath's own grid.
    const double lo = bath.domain_lo;
    const double hi = bath.domain_hi;
    const double span = hi - lo;
    std::vector<double> jvals(n);
    for (std::size_t i = 0; i < n; ++i)
        jvals[i] = bath.couplings[i] * bath.couplings[i] / bath.weights[i];
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = bath.omegas[k];
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = wk - bath.omegas[i];
            delta += (std::abs(d) <= 1e-12 * span)
                         ? bath.weights[i] * (-spectral::derivative(sd, wk))
                         : bath.weights[i] * (jvals[i] - jvals[k]) / d;
        }
        delta += jvals[k] * std::log(std::abs((wk - lo) / (hi - wk)));
        const double gamma = kPi * jvals[k];
        const cd denom{wk - omega_s - delta, gamma};
        out.continuum_amplitudes[k] = bath.couplings[k] * std::polar(1.0, -wk * t) / denom;
    }

    const auto site = steady_state_site_vector(out, bs, bath);
    double norm2 = 0.0;
    for (const cd& a : site) norm2 += std::norm(a);
    out.norm = std::sqrt(norm2);
    return out;
}

std::vector<cd> steady_state_site_vector(const SteadyStateVector& v,
                                         const boundstate::BoundState& bs,
                                         const discrete::DiscretizedBath& bath) {
    const std::size_t n = bath.size();
    std::vector<cd> site(n + 1, cd{0.0, 0.0});
    if (bs.exists) {
        const double root_z = std::sqrt(bs.residue_Z);
        site[0] = v.bound_amplitude * root_z;
        for (std::size_t k = 0; k < n; ++k)
            site[k + 1] = v.bound_amplitude * root_z * bath.couplings[k] /
                          (bs.omega_b - bath.omegas[k]);
    } else if (decoupled(bath)) {
        site[0] = v.bound_amplitude;
    }
    for (std::size_t k = 0; k < n && k < v.continuum_amplitudes.size(); ++k)
        site[k + 1] += v.continuum_amplitudes[k];
    return site;
}

ConservationReport conservation_audit(const discrete::SingleParticleSpectrum& spec,
                                      double omega_s, const std::vector<double>& times) {
    check_times(times);
    const auto& m = spec.matrix();
    ConservationReport report;
    report.times = times;
    report.particle_number.reserve(times.size());
    report.total_energy.reserve(times.size());
    for (double t : times) {
        const Eigen::VectorXcd psi = spec.propagate_system_excitation(t);
        const double ntot = psi.squaredNorm();
        double etot = m.omega_s * std::norm(psi(0));
        for (std::size_t k = 0; k < m.omegas.size(); ++k) {
            const auto ki = static_cast<Eigen::Index>(k + 1);
            etot += m.omegas[k] * std::norm(psi(ki));
            etot += 2.0 * m.couplings[k] * std::real(std::conj(psi(0)) * psi(ki));
        }
        report.particle_number.push_back(ntot);
        report.total_energy.push_back(etot);
        report.max_drift_N = std::max(report.max_drift_N, std::abs(ntot - 1.0));
        report.max_drift_E = std::max(report.max_drift_E, std::abs(etot - omega_s));
    }
    return report;
}

SectorEnergies sector_ground_energies(const discrete::SingleParticleSpectrum& spec,
                                      int n_max) {
    if (n_max < 0) throw std::invalid_argument("sector_ground_energies: n_max must be >= 0");
    SectorEnergies out;
    out.lambda_min = spec.eigenvalues().front();
    out.bounded_overall = out.lambda_min >= 0.0;
    out.levels.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) out.levels.emplace_back(n, n * out.lambda_min);
    return out;
}

double initial_state_energy(double omega_s, int n) {
    if (n < 0) throw std::invalid_argument("initial_state_energy: n must be >= 0");
    return n * omega_s;
}

void write_trace_csv(const PropagatorTrace& trace, std::ostream& os) {
    os << "t,re_u,im_u,abs_u\n";
    char buf[128];
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const cd& u = trace.amplitudes[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", trace.times[i],
                      u.real(), u.imag(), std::abs(u));
        os << buf;
    }
}

void write_conservation_csv(const ConservationReport& report, std::ostream& os) {
    os << "t,N_tot,E_tot\n";
    char buf[96];
    for (std::size_t i = 0; i < report.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", report.times[i],
                      report.particle_number[i], report.total_energy[i]);
        os << buf;
    }
}

void write_steady_state_csv(const SteadyStateVector& v,
                            const discrete::DiscretizedBath& bath, std::ostream& os) {
    os << "k,omega_k,re_amp,im_amp\n";
    char buf[128];
    for (std::size_t k = 0; k < v.continuum_amplitudes.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k, bath.omegas[k],
                      v.continuum_amplitudes[k].real(), v.continuum_amplitudes[k].imag());
        os << buf;
    }
}

} // namespace fanolab::dynamics
