#include "fanolab/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace fanolab::discrete {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct SecularEval {
    double f;
    double df;
};

SecularEval secular_eval(const ArrowheadMatrix& m, double lambda) {
    double s = 0.0, ds = 0.0;
    for (std::size_t k = 0; k < m.omegas.size(); ++k) {
        const double d = lambda - m.omegas[k];
        const double v2 = m.couplings[k] * m.couplings[k];
        s += v2 / d;
        ds += v2 / (d * d);
    }
    return {lambda - m.omega_s - s, 1.0 + ds};
}

// Root of F in (a, b) with F(a) < 0 < F(b): Newton from the midpoint with a
// bisection safeguard.  F is strictly increasing here, so the bracket only
// tightens.
double solve_bracketed(const ArrowheadMatrix& m, double a, double b,
                       double width, std::size_t interval) {
    double x = 0.5 * (a + b);
    for (int iter = 0; iter < 200; ++iter) {
        const auto [f, df] = secular_eval(m, x);
        if (f == 0.0) return x;
        if (f < 0.0) a = x; else b = x;
        if (b - a <= 4.0 * kEps * std::max(std::abs(a), std::abs(b))) return 0.5 * (a + b);
        const double xn = x - f / df;
        x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
    }
    if (b - a > 1e-12 * width) {
        std::ostringstream msg;
        msg << "diagonalize: secular root in interval " << interval
            << " did not reach 1e-12 of the spectral width (bracket ["
            << a << ", " << b << "])";
        throw convergence_error(msg.str());
    }
    return 0.5 * (a + b);
}

// Walk toward the pole until F has the sign it must carry next to it.
double edge_near_pole(const ArrowheadMatrix& m, double pole, double away,
                      bool want_negative) {
    double eps = 0.25 * std::abs(away - pole);
    const double dir = (away > pole) ? 1.0 : -1.0;
    for (int i = 0; i < 400; ++i) {
        const double x = pole + dir * eps;
        if (x == pole) break;
        const double f = secular_eval(m, x).f;
        if (want_negative ? (f < 0.0) : (f > 0.0)) return x;
        eps *= 0.25;
    }
    throw convergence_error("diagonalize: could not bracket a secular root next to a pole");
}

} // namespace

void DiscretizedBath::validate() const {
    if (couplings.size() != omegas.size() || weights.size() != omegas.size())
        throw std::invalid_argument("bath: omegas, couplings, weights must have equal length");
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        if (k > 0 && !(omegas[k] > omegas[k - 1]))
            throw std::invalid_argument("bath: frequencies must be strictly increasing "
                                        "(degenerate modes are rejected)");
        if (couplings[k] < 0.0)
            throw std::invalid_argument("bath: couplings must be >= 0");
    }
}

DiscretizedBath discretize(const spectral::SpectralDensity& sd,
                           const spectral::QuadratureSpec& q) {
    const auto g = spectral::quadrature_grid(sd, q);
    if (g.nodes.size() < 2)
        throw resolution_error("discretize: grid too coarse to resolve the support");
    DiscretizedBath bath;
    bath.omegas = g.nodes;
    bath.weights = g.weights;
    bath.couplings.resize(g.nodes.size());
    for (std::size_t k = 0; k < g.nodes.size(); ++k)
        bath.couplings[k] = std::sqrt(spectral::evaluate(sd, g.nodes[k]) * g.weights[k]);
    bath.domain_lo = g.lo;
    bath.domain_hi = g.hi;
    bath.validate();
    return bath;
}

ArrowheadMatrix arrowhead(double omega_s, const DiscretizedBath& bath) {
    bath.validate();
    return ArrowheadMatrix{omega_s, bath.omegas, bath.couplings};
}

Eigen::MatrixXd ArrowheadMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    a(0, 0) = omega_s;
    for (Eigen::Index k = 1; k < n; ++k) {
        a(k, k) = omegas[k - 1];
        a(0, k) = a(k, 0) = couplings[k - 1];
    }
    return a;
}

double secular_function(const ArrowheadMatrix& m, double lambda) {
    return secular_eval(m, lambda).f;
}

SingleParticleSpectrum diagonalize(const ArrowheadMatrix& m) {
    SingleParticleSpectrum out;
    out.m_ = m;
    const std::size_t n = m.omegas.size();

    double vnorm2 = 0.0;
    double vmin = std::numeric_limits<double>::infinity();
    for (double v : m.couplings) {
        vnorm2 += v * v;
        vmin = std::min(vmin, v);
    }
    const double vnorm = std::sqrt(vnorm2);
    const double lo_bound = std::min(m.omega_s, n ? m.omegas.front() : m.omega_s) - vnorm;
    const double hi_bound = std::max(m.omega_s, n ? m.omegas.back() : m.omega_s) + vnorm;
    out.width_ = std::max(hi_bound - lo_bound, 1e-300);

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k)
        min_gap = std::min(min_gap, m.omegas[k] - m.omegas[k - 1]);

    if (n == 0 || vnorm == 0.0) {
        // Uncoupled: the site basis is already the eigenbasis.
        out.path_ = SingleParticleSpectrum::Path::Decoupled;
        std::vector<std::pair<double, std::size_t>> ev;
        ev.reserve(n + 1);
        ev.emplace_back(m.omega_s, 0);
        for (std::size_t k = 0; k < n; ++k) ev.emplace_back(m.omegas[k], k + 1);
        std::stable_sort(ev.begin(), ev.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [val, site] : ev) {
            out.evals_.push_back(val);
            out.order_.push_back(site);
            out.comps_.push_back(site == 0 ? 1.0 : 0.0);
            out.weights_.push_back(site == 0 ? 1.0 : 0.0);
        }
        return out;
    }

    const bool secular_ok = (vmin > 0.0) && (n == 1 || min_gap > 1e-10 * out.width_);
    if (!secular_ok) {
        // A vanishing coupling or nearly colliding poles: closed-form
        // eigenvectors are unreliable, use the dense symmetric solver.
        out.path_ = SingleParticleSpectrum::Path::Dense;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense());
        if (es.info() != Eigen::Success)
            throw convergence_error("diagonalize: dense eigensolver did not converge");
        Eigen::MatrixXd vecs = es.eigenvectors();
        for (Eigen::Index j = 0; j < vecs.cols(); ++j) {
            Eigen::Index imax;
            vecs.col(j).cwiseAbs().maxCoeff(&imax);
            const double pivot = (vecs(0, j) != 0.0) ? vecs(0, j) : vecs(imax, j);
            if (pivot < 0.0) vecs.col(j) = -vecs.col(j);
        }
        out.evals_.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        out.comps_.resize(out.evals_.size());
        out.weights_.resize(out.evals_.size());
        for (std::size_t j = 0; j < out.evals_.size(); ++j) {
            out.comps_[j] = vecs(0, static_cast<Eigen::Index>(j));
            out.weights_[j] = out.comps_[j] * out.comps_[j];
        }
        out.vectors_ = std::move(vecs);
        return out;
    }

    // Secular path: one root below omega_1, one in each pole gap, one above
    // omega_N.  F is strictly increasing between consecutive poles.
    out.path_ = SingleParticleSpectrum::Path::Secular;
    out.evals_.resize(n + 1);

    {
        double a = lo_bound - std::max(1.0, 0.01 * out.width_);
        if (secular_eval(m, a).f >= 0.0)
            throw bracket_error("diagonalize: no sign change below the spectrum floor");
        const double b = edge_near_pole(m, m.omegas.front(), a, false);
        out.evals_[0] = solve_bracketed(m, a, b, out.width_, 0);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double mid = 0.5 * (m.omegas[k] + m.omegas[k + 1]);
        const double a = edge_near_pole(m, m.omegas[k], mid, true);
        const double b = edge_near_pole(m, m.omegas[k + 1], mid, false);
        out.evals_[k + 1] = solve_bracketed(m, a, b, out.width_, k + 1);
    }
    {
        double b = hi_bound + std::max(1.0, 0.01 * out.width_);
        if (secular_eval(m, b).f <= 0.0)
            throw bracket_error("diagonalize: no sign change above the spectrum ceiling");
        const double a = edge_near_pole(m, m.omegas.back(), b, true);
        out.evals_[n] = solve_bracketed(m, a, b, out.width_, n);
    }

    out.comps_.resize(n + 1);
    out.weights_.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double w = 1.0 / secular_eval(m, out.evals_[j]).df;
        out.weights_[j] = w;
        out.comps_[j] = std::sqrt(w);
    }
    return out;
}

Eigen::VectorXd SingleParticleSpectrum::eigenvector(std::size_t j) const {
    const auto dim = static_cast<Eigen::Index>(m_.dim());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    switch (path_) {
        case Path::Decoupled:
            v(static_cast<Eigen::Index>(order_[j])) = 1.0;
            break;
        case Path::Dense:
            v = vectors_->col(static_cast<Eigen::Index>(j));
            break;
        case Path::Secular: {
            v(0) = comps_[j];
            for (Eigen::Index k = 1; k < dim; ++k)
                v(k) = comps_[j] * m_.couplings[k - 1] / (evals_[j] - m_.omegas[k - 1]);
            break;
        }
    }
    return v;
}

Eigen::MatrixXd SingleParticleSpectrum::eigenvector_matrix() const {
    if (path_ == Path::Dense) return *vectors_;
    const auto dim = static_cast<Eigen::Index>(m_.dim());
    Eigen::MatrixXd u(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) u.col(j) = eigenvector(static_cast<std::size_t>(j));
    return u;
}

Eigen::VectorXcd SingleParticleSpectrum::propagate_system_excitation(double t) const {
    using cd = std::complex<double>;
    const auto dim = static_cast<Eigen::Index>(m_.dim());
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    switch (path_) {
        case Path::Decoupled:
            psi(0) = std::polar(1.0, -m_.omega_s * t);
            break;
        case Path::Dense: {
            const Eigen::MatrixXd& u = *vectors_;
            Eigen::VectorXcd phases(dim);
            for (Eigen::Index j = 0; j < dim; ++j)
                phases(j) = std::polar(comps_[j], -evals_[j] * t);
            psi = u * phases;
            break;
        }
        case Path::Secular: {
            std::vector<cd> z(evals_.size());
            for (std::size_t j = 0; j < evals_.size(); ++j)
                z[j] = std::polar(weights_[j], -evals_[j] * t);
            cd a0{0.0, 0.0};
            for (const cd& zj : z) a0 += zj;
            psi(0) = a0;
            for (Eigen::Index k = 1; k < dim; ++k) {
                const double wk = m_.omegas[k - 1];
                cd acc{0.0, 0.0};
                for (std::size_t j = 0; j < z.size(); ++j) acc += z[j] / (evals_[j] - wk);
                psi(k) = m_.couplings[k - 1] * acc;
            }
            break;
        }
    }
    return psi;
}

void write_spectrum_csv(const SingleParticleSpectrum& spec, std::ostream& os) {
    os << "eigenvalue,system_weight\n";
    char buf[80];
    for (std::size_t j = 0; j < spec.eigenvalues().size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", spec.eigenvalues()[j],
                      spec.system_weights()[j]);
        os << buf;
    }
}

} // namespace fanolab::discrete
