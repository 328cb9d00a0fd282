// spectral.hpp — Spectral-density models J(omega) and frequency-domain integrals

#pragma once

#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fanolab/errors.hpp"

namespace fanolab::spectral {

enum class Family { OhmicFamily, Tabulated };

// Coupling-weighted density of bath modes, the continuum limit of
// sum_k V_k^2 delta(omega - omega_k).  The built-in family is
//   J(omega) = 2*pi*eta * omega * (omega/omega_c)^(s-1) * exp(-omega/omega_c)
// on [0, inf); tabulated densities are linearly interpolated on their grid.
struct SpectralDensity {
    Family family{Family::OhmicFamily};
    double s_exponent{1.0};   // s=1 ohmic, s<1 sub-ohmic, s>1 super-ohmic
    double eta{0.0};          // dimensionless coupling strength >= 0
    double omega_c{1.0};      // cutoff frequency > 0
    std::vector<std::pair<double, double>> table; // (omega, J) pairs, Tabulated only
    double support_lo{0.0};
    double support_hi{std::numeric_limits<double>::infinity()};

    static SpectralDensity ohmic(double s, double eta, double omega_c);
    static SpectralDensity tabulated(std::vector<std::pair<double, double>> points);
    static SpectralDensity tabulated(std::vector<std::pair<double, double>> points,
                                     double lo, double hi);
    // Two-column CSV with header "omega,J", strictly increasing omega.
    static SpectralDensity from_csv(const std::string& path);
};

enum class Scheme { UniformTrapezoid, GaussLegendrePanels };

struct QuadratureSpec {
    Scheme scheme{Scheme::GaussLegendrePanels};
    int n_points{2048};
    double omega_max{0.0}; // truncation frequency for unbounded support

    void validate() const;
};

// omega_max = 10*omega_c for the ohmic family, the table end otherwise.
QuadratureSpec default_quadrature(const SpectralDensity& sd,
                                  Scheme scheme = Scheme::GaussLegendrePanels,
                                  int n_points = 2048);

// Nodes and weights covering [support_lo, min(support_hi, omega_max)].
// UniformTrapezoid places nodes at uniform cell centers; GaussLegendrePanels
// tiles the range with 8-point panels (node count rounds up to a multiple
// of 8).
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo{0.0};
    double hi{0.0};
};
QuadratureGrid quadrature_grid(const SpectralDensity& sd, const QuadratureSpec& q);

// Pointwise J(omega); zero outside the support.
double evaluate(const SpectralDensity& sd, double omega);

// dJ/domega inside the support (closed form for the ohmic family, segment
// slope for tables).  Used for the removable point of the principal-value
// integrand.
double derivative(const SpectralDensity& sd, double omega);

// integral of J over the (truncated) support with the given rule.
double integrate_density(const SpectralDensity& sd, const QuadratureSpec& q);

// Estimate of the mass beyond the truncation, integral_{omega_max}^inf J.
double truncation_tail(const SpectralDensity& sd, const QuadratureSpec& q);

// integral of J(omega)/(omega - x) for x strictly below the support.
// Strictly increasing in x; rejects x inside the support (that case is a
// principal value, use lamb_shift_and_decay).
double pole_integral(const SpectralDensity& sd, double x, const QuadratureSpec& q);

// Level shift Delta(omega) = PV integral J(omega')/(omega - omega') domega'
// and decay rate gamma(omega) = pi * J(omega).  Outside the support the
// integral is ordinary and gamma vanishes.
struct LambShift {
    double delta{0.0};
    double gamma{0.0};
};
LambShift lamb_shift_and_decay(const SpectralDensity& sd, double omega,
                               const QuadratureSpec& q);

// Memory kernel g(t) = integral J(omega) e^{-i omega t} domega, normalized so
// a bath with V_k^2 = J(omega_k) dw_k reproduces it as sum_k V_k^2 e^{-i w_k t}.
std::complex<double> memory_kernel(const SpectralDensity& sd, double t,
                                   const QuadratureSpec& q);

// Largest time the grid can resolve, n_points * pi / (range covered).
double kernel_time_limit(const SpectralDensity& sd, const QuadratureSpec& q);

} // namespace fanolab::spectral
