// discrete.hpp — Finite baths, the arrowhead single-particle matrix, and its normal modes

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fanolab/spectral.hpp"

namespace fanolab::discrete {

// Sampled environment {omega_k, V_k} with the quadrature weights it was
// built from; V_k^2 = J(omega_k) * dw_k by construction.
struct DiscretizedBath {
    std::vector<double> omegas;
    std::vector<double> couplings;
    std::vector<double> weights;
    double domain_lo{0.0}; // integration range the sampling covered
    double domain_hi{0.0};

    std::size_t size() const { return omegas.size(); }
    void validate() const;
};

DiscretizedBath discretize(const spectral::SpectralDensity& sd,
                           const spectral::QuadratureSpec& q);

// Real symmetric arrowhead: diagonal (omega_s, omega_1..omega_N), border
// (V_1..V_N) in the first row and column.
struct ArrowheadMatrix {
    double omega_s{0.0};
    std::vector<double> omegas;
    std::vector<double> couplings;

    std::size_t dim() const { return omegas.size() + 1; }
    Eigen::MatrixXd dense() const;
};

ArrowheadMatrix arrowhead(double omega_s, const DiscretizedBath& bath);

// Normal modes of the arrowhead problem.  Eigenvalues ascend and strictly
// interlace the bath frequencies; column j of the eigenvector matrix is
// normal mode j in the {a, b_1..b_N} site basis with its system component
// kept nonnegative.
class SingleParticleSpectrum {
  public:
    enum class Path { Secular, Dense, Decoupled };

    const std::vector<double>& eigenvalues() const { return evals_; }
    const std::vector<double>& system_weights() const { return weights_; }
    // Signed system components c_j = <a|mode j> (c_j^2 = system weight).
    const std::vector<double>& system_components() const { return comps_; }
    const ArrowheadMatrix& matrix() const { return m_; }
    Path path() const { return path_; }

    Eigen::VectorXd eigenvector(std::size_t j) const;
    Eigen::MatrixXd eigenvector_matrix() const;

    // Width of the interval certain to contain the spectrum.
    double spectral_width() const { return width_; }

    // Site-basis wavefunction at time t for the initial single excitation
    // on the system site, psi(t) = U exp(-i Lambda t) U^T e_0.
    Eigen::VectorXcd propagate_system_excitation(double t) const;

  private:
    friend SingleParticleSpectrum diagonalize(const ArrowheadMatrix&);
    ArrowheadMatrix m_;
    Path path_{Path::Dense};
    double width_{0.0};
    std::vector<double> evals_;
    std::vector<double> comps_;
    std::vector<double> weights_;
    std::vector<std::size_t> order_;        // Decoupled: site of eigenvalue j
    std::optional<Eigen::MatrixXd> vectors_; // Dense path only
};

SingleParticleSpectrum diagonalize(const ArrowheadMatrix& m);

// Secular function F(lambda) = lambda - omega_s - sum_k V_k^2/(lambda - omega_k);
// its roots are the eigenvalues.  Exposed for property tests.
double secular_function(const ArrowheadMatrix& m, double lambda);

// CSV columns: eigenvalue,system_weight
void write_spectrum_csv(const SingleParticleSpectrum& spec, std::ostream& os);

} // namespace fanolab::discrete
