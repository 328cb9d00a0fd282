// boundstate.hpp — Self-consistent pole equation for the renormalized mode

#pragma once

#include "fanolab/spectral.hpp"

namespace fanolab::boundstate {

// Solution of omega_b = omega_s - integral J(omega)/(omega - omega_b), the
// discrete level split off below the continuum at strong coupling.
struct BoundState {
    bool exists{false};
    double omega_b{0.0};        // meaningful iff exists
    double residue_Z{0.0};      // weight of the system mode, in (0, 1]
    double pole_residual{0.0};  // |f(omega_b)| reached by the solver
    double threshold_margin{0.0};
};

// f(x) = x - omega_s + integral J(omega)/(omega - x), strictly increasing for
// x below the support; its unique root there is the bound mode.
double pole_function(const spectral::SpectralDensity& sd, double omega_s, double x,
                     const spectral::QuadratureSpec& q);

// threshold_margin = omega_s - support_lo - integral J/(omega - support_lo);
// the mode exists iff the margin is negative.  For densities starting at
// omega = 0 this is omega_s - integral J/omega.
BoundState solve_pole(const spectral::SpectralDensity& sd, double omega_s,
                      const spectral::QuadratureSpec& q, double tol = 1e-12);

// Residue Z = [1 + integral J/(omega - omega_b)^2]^{-1}; equals the squared
// system overlap of the normalized bound eigenvector.
double residue(const spectral::SpectralDensity& sd, double omega_b,
               const spectral::QuadratureSpec& q);

} // namespace fanolab::boundstate
