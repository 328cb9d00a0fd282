#include "fanolab/boundstate.hpp"

#include <cmath>
#include <sstream>

namespace fanolab::boundstate {

using spectral::QuadratureSpec;
using spectral::SpectralDensity;

double pole_function(const SpectralDensity& sd, double omega_s, double x,
                     const QuadratureSpec& q) {
    return x - omega_s + spectral::pole_integral(sd, x, q);
}

BoundState solve_pole(const SpectralDensity& sd, double omega_s,
                      const QuadratureSpec& q, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_pole: tol must be > 0");

    // Densities with an interior band gap can bind more than one mode; only
    // the single mode below the support is handled here.
    if (sd.family == spectral::Family::Tabulated) {
        std::size_t first_nz = sd.table.size(), last_nz = 0;
        for (std::size_t i = 0; i < sd.table.size(); ++i) {
            if (sd.table[i].second > 0.0) {
                first_nz = std::min(first_nz, i);
                last_nz = i;
            }
        }
        for (std::size_t i = first_nz; i + 1 < last_nz && i + 1 < sd.table.size(); ++i) {
            if (sd.table[i].second == 0.0 && sd.table[i + 1].second == 0.0)
                throw std::invalid_argument(
                    "solve_pole: tabulated density has an interior gap; such baths may "
                    "host multiple bound modes and are unsupported");
        }
    }

    BoundState bs;
    const double lo = sd.support_lo;

    // Edge limit of the pole equation decides existence; quadrature nodes are
    // interior, so the edge integral is finite even when J does not vanish
    // there (a diverging true integral only drives the margin more negative).
    const auto g = spectral::quadrature_grid(sd, q);
    double edge_integral = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        edge_integral += g.weights[i] * spectral::evaluate(sd, g.nodes[i]) / (g.nodes[i] - lo);
    bs.threshold_margin = omega_s - lo - edge_integral;
    if (bs.threshold_margin >= 0.0) {
        bs.exists = false;
        return bs;
    }

    const double scale = (sd.family == spectral::Family::OhmicFamily)
                             ? sd.omega_c
                             : (g.hi - g.lo);
    const double floor = lo - 10.0 * (std::abs(omega_s) + scale);
    double fa = pole_function(sd, omega_s, floor, q);
    if (fa >= 0.0) {
        std::ostringstream msg;
        msg << "solve_pole: no bracket in [" << floor << ", " << lo << "): f(floor) = " << fa
            << ", threshold_margin = " << bs.threshold_margin;
        throw bracket_error(msg.str());
    }

    // Upper end: approach the edge until f turns positive.
    double hi = 0.0;
    double fb = 0.0;
    bool bracketed = false;
    for (double delta = 1e-3 * scale; delta > 1e-16 * scale; delta *= 0.1) {
        hi = lo - delta;
        if (hi <= floor) continue;
        fb = pole_function(sd, omega_s, hi, q);
        if (fb > 0.0) { bracketed = true; break; }
    }
    if (!bracketed) {
        std::ostringstream msg;
        msg << "solve_pole: f stayed negative up to the support edge although the margin is "
            << bs.threshold_margin << "; the root is closer to the edge than 1e-16*scale";
        throw bracket_error(msg.str());
    }

    // Bisect, then secant-polish on |f| <= tol.
    double a = floor, b = hi;
    double x = 0.5 * (a + b);
    double fx = pole_function(sd, omega_s, x, q);
    for (int iter = 0; iter < 200 && std::abs(fx) > tol; ++iter) {
        if (fx < 0.0) { a = x; fa = fx; } else { b = x; fb = fx; }
        double xn = x - fx * (b - a) / (fb - fa); // secant over the bracket
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (xn == x) break;
        x = xn;
        fx = pole_function(sd, omega_s, x, q);
    }

    bs.exists = true;
    bs.omega_b = x;
    bs.pole_residual = std::abs(fx);
    bs.residue_Z = residue(sd, x, q);
    return bs;
}

double residue(const SpectralDensity& sd, double omega_b, const QuadratureSpec& q) {
    if (!(omega_b < sd.support_lo))
        throw std::domain_error("residue: omega_b must lie strictly below the support");
    const auto g = spectral::quadrature_grid(sd, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double d = g.nodes[i] - omega_b;
        acc += g.weights[i] * spectral::evaluate(sd, g.nodes[i]) / (d * d);
    }
    return 1.0 / (1.0 + acc);
}

} // namespace fanolab::boundstate
