// stability.hpp — Symplectic stability analysis of the two coupling forms

#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "fanolab/discrete.hpp"

namespace fanolab::stability {

// RotatingWave couples through V_k (a^dag b_k + b_k^dag a) and commutes with
// the total particle number; PositionPosition is the quantum-Brownian-motion
// form c'_k (a^dag b_k + a b_k^dag + a^dag b_k^dag + a b_k) with
// c'_k = scale * V_k, which does not.
enum class CouplingForm { RotatingWave, PositionPosition };

struct QuadraticModel {
    CouplingForm coupling_form{CouplingForm::RotatingWave};
    double omega_s{1.0};
    discrete::DiscretizedBath bath;
    double scale{1.0}; // multiplier applied to all V_k

    void validate() const;
};

struct StabilityVerdict {
    bool stable{true};
    double min_normal_frequency_sq{0.0};
    double max_imag_rate{0.0}; // largest growth rate among dynamical eigenvalues
};

// Position-sector frequency-squared matrix K = D^{1/2} W_x D^{1/2}; the
// PositionPosition model is stable iff K is positive semidefinite.
Eigen::MatrixXd frequency_squared_matrix(const QuadraticModel& model);

// Flow generator [[0, W_p], [-W_x, 0]] acting on (x, p).
Eigen::MatrixXd dynamical_matrix(const QuadraticModel& model);

// Frobenius norm of the commutator between the flow generator and the
// particle-number flow; zero exactly for a number-conserving coupling.
double number_commutant_norm(const QuadraticModel& model);

// RotatingWave diagonalizes the Hermitian arrowhead problem, so it is
// dynamically stable at every scale (its min_normal_frequency_sq carries
// sign(lambda_min) * lambda_min^2 for comparison).  PositionPosition is
// judged on the spectrum of K, cross-checkable via dynamical_matrix.
StabilityVerdict analyze(const QuadraticModel& model, double tol);

struct ScanPoint {
    double scale{0.0};
    StabilityVerdict verdict;
};

struct ScanResult {
    std::vector<ScanPoint> points;
    bool transition_found{false};
    double bracket_lo{0.0};  // last stable scale of the first flip
    double bracket_hi{0.0};  // first unstable scale
    double critical_scale{0.0}; // bisection-refined, 1e-6 relative
};

// Verdict per grid scale plus a refined critical scale around the first
// stable -> unstable flip.  jobs > 1 evaluates grid points concurrently.
ScanResult critical_scan(const QuadraticModel& model_template,
                         const std::vector<double>& scale_grid, double tol,
                         int jobs = 1);

// CSV: scale,stable,min_w2,max_imag_rate
void write_scan_csv(const ScanResult& scan, std::ostream& os);

} // namespace fanolab::stability
