// dynamics.hpp — Survival amplitude engines, steady state, conservation audit

#pragma once

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fanolab/boundstate.hpp"
#include "fanolab/discrete.hpp"
#include "fanolab/spectral.hpp"

namespace fanolab::dynamics {

enum class Engine { EigenExpansion, VolterraKernel };

// Time series of the survival amplitude u(t) = <psi(0)|psi(t)> on the
// system mode.
struct PropagatorTrace {
    std::vector<double> times;
    std::vector<std::complex<double>> amplitudes;
    Engine engine{Engine::EigenExpansion};
    double recurrence_time{0.0}; // 2*pi/dw estimate, EigenExpansion only
    bool recurrence_exceeded{false};

    void validate() const; // u(0) = 1 and |u| <= 1 + 1e-9
};

// u(t) = sum_j w_j exp(-i lambda_j t) from the normal-mode expansion; exact
// for the finite model up to roundoff.  Sets recurrence_exceeded instead of
// failing when times run past the finite-bath revival horizon.
PropagatorTrace evolve_eigen(const discrete::SingleParticleSpectrum& spec,
                             std::vector<double> times);

// Second engine: integrates u' = -i omega_s u - int_0^t g(t-s) u(s) ds with
// the continuum memory kernel, trapezoidal in both the history integral and
// the step (corrector solved in closed form); second order in dt.
PropagatorTrace evolve_volterra(const spectral::SpectralDensity& sd, double omega_s,
                                const spectral::QuadratureSpec& q, double dt,
                                double t_max);

// Long-time state on the discrete bath: bound_amplitude multiplies the
// normalized bound normal mode, continuum_amplitudes[k] multiplies b_k^dag.
struct SteadyStateVector {
    std::complex<double> bound_amplitude{0.0, 0.0};
    std::vector<std::complex<double>> continuum_amplitudes;
    double norm{0.0};
};

SteadyStateVector steady_state(const boundstate::BoundState& bs,
                               const spectral::SpectralDensity& sd,
                               const discrete::DiscretizedBath& bath, double omega_s,
                               double t);

// Site-basis amplitudes (index 0 = system mode, then the bath modes).
std::vector<std::complex<double>> steady_state_site_vector(
    const SteadyStateVector& v, const boundstate::BoundState& bs,
    const discrete::DiscretizedBath& bath);

// N_tot(t) and E_tot(t) along the evolution of the single-excitation
// initial state a^dag|0>, with drifts against the exact constants 1 and
// omega_s.
struct ConservationReport {
    std::vector<double> times;
    std::vector<double> particle_number;
    std::vector<double> total_energy;
    double max_drift_N{0.0};
    double max_drift_E{0.0};
};

ConservationReport conservation_audit(const discrete::SingleParticleSpectrum& spec,
                                      double omega_s, const std::vector<double>& times);

// Ground energy per fixed-particle-number sector: E_min(n) = n * lambda_min
// for a number-conserving quadratic Hamiltonian.  bounded_overall records
// whether the full spectrum stays bounded below (lambda_min >= 0).
struct SectorEnergies {
    std::vector<std::pair<int, double>> levels;
    double lambda_min{0.0};
    bool bounded_overall{true};
};

SectorEnergies sector_ground_energies(const discrete::SingleParticleSpectrum& spec,
                                      int n_max);

// Energy n * omega_s of the product initial state (a^dag)^n |0, {0_k}>.
double initial_state_energy(double omega_s, int n);

// CSV: t,re_u,im_u,abs_u
void write_trace_csv(const PropagatorTrace& trace, std::ostream& os);
// CSV: t,N_tot,E_tot
void write_conservation_csv(const ConservationReport& report, std::ostream& os);
// CSV: k,omega_k,re_amp,im_amp (continuum amplitudes)
void write_steady_state_csv(const SteadyStateVector& v,
                            const discrete::DiscretizedBath& bath, std::ostream& os);

} // namespace fanolab::dynamics
