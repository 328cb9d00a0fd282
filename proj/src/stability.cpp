#include "fanolab/stability.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>

namespace fanolab::stability {

namespace {

// Quadrature blocks of H = (1/2)[x^T W_x x + p^T W_p p] for either coupling.
// Both couplings act in the single-particle space as a border; the rotating
// form carries it in x and p alike, the position form doubles it in x only.
struct QuadBlocks {
    Eigen::MatrixXd wx;
    Eigen::MatrixXd wp;
};

QuadBlocks quadrature_blocks(const QuadraticModel& model) {
    const auto n = static_cast<Eigen::Index>(model.bath.size());
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(n + 1, n + 1);
    diag(0, 0) = model.omega_s;
    for (Eigen::Index k = 0; k < n; ++k) diag(k + 1, k + 1) = model.bath.omegas[k];

    Eigen::MatrixXd border = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double c = model.scale * model.bath.couplings[k];
        border(0, k + 1) = border(k + 1, 0) = c;
    }

    QuadBlocks blocks;
    if (model.coupling_form == CouplingForm::RotatingWave) {
        blocks.wx = diag + border;
        blocks.wp = blocks.wx;
    } else {
        blocks.wx = diag + 2.0 * border;
        blocks.wp = diag;
    }
    return blocks;
}

} // namespace

void QuadraticModel::validate() const {
    bath.validate();
    if (!(scale >= 0.0)) throw std::invalid_argument("stability: scale must be >= 0");
    if (!(omega_s > 0.0)) throw std::invalid_argument("stability: omega_s must be > 0");
    for (double w : bath.omegas)
        if (!(w > 0.0))
            throw std::invalid_argument("stability: bath frequencies must be > 0 "
                                        "for the quadrature representation");
}

Eigen::MatrixXd frequency_squared_matrix(const QuadraticModel& model) {
    model.validate();
    const auto blocks = quadrature_blocks(model);
    const auto n = blocks.wx.rows();
    Eigen::VectorXd sqrt_d(n);
    sqrt_d(0) = std::sqrt(model.omega_s);
    for (Eigen::Index k = 1; k < n; ++k) sqrt_d(k) = std::sqrt(model.bath.omegas[k - 1]);
    return sqrt_d.asDiagonal() * blocks.wx * sqrt_d.asDiagonal();
}

Eigen::MatrixXd dynamical_matrix(const QuadraticModel& model) {
    model.validate();
    const auto blocks = quadrature_blocks(model);
    const auto n = blocks.wx.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n) = blocks.wp;
    a.bottomLeftCorner(n, n) = -blocks.wx;
    return a;
}

double number_commutant_norm(const QuadraticModel& model) {
    model.validate();
    const auto blocks = quadrature_blocks(model);
    const auto n = blocks.wx.rows();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd sh = dynamical_matrix(model);
    return (sh * j - j * sh).norm();
}

StabilityVerdict analyze(const QuadraticModel& model, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("analyze: tol must be > 0");
    model.validate();
    StabilityVerdict verdict;

    if (model.coupling_form == CouplingForm::RotatingWave) {
        discrete::DiscretizedBath scaled = model.bath;
        for (double& v : scaled.couplings) v *= model.scale;
        const auto spec = discrete::diagonalize(discrete::arrowhead(model.omega_s, scaled));
        const double lmin = spec.eigenvalues().front();
        verdict.min_normal_frequency_sq = (lmin < 0.0 ? -1.0 : 1.0) * lmin * lmin;
        verdict.max_imag_rate = 0.0; // Hermitian single-particle problem
        verdict.stable = true;
        return verdict;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(frequency_squared_matrix(model));
    if (es.info() != Eigen::Success) {
        const auto k = frequency_squared_matrix(model);
        throw convergence_error("analyze: eigensolver failed on the frequency-squared "
                                "matrix; |K| = " + std::to_string(k.norm()) +
                                ", dim = " + std::to_string(k.rows()));
    }
    const double mu_min = es.eigenvalues().minCoeff();
    verdict.min_normal_frequency_sq = mu_min;
    verdict.max_imag_rate = mu_min < 0.0 ? std::sqrt(-mu_min) : 0.0;
    verdict.stable = mu_min >= -tol;
    return verdict;
}

ScanResult critical_scan(const QuadraticModel& model_template,
                         const std::vector<double>& scale_grid, double tol, int jobs) {
    if (scale_grid.empty()) throw std::invalid_argument("critical_scan: empty grid");
    for (std::size_t i = 1; i < scale_grid.size(); ++i)
        if (!(scale_grid[i] > scale_grid[i - 1]))
            throw std::invalid_argument("critical_scan: scale grid must be ascending");

    auto at_scale = [&](double scale) {
        QuadraticModel m = model_template;
        m.scale = scale;
        return analyze(m, tol);
    };

    ScanResult result;
    result.points.resize(scale_grid.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < scale_grid.size(); ++i)
            result.points[i] = {scale_grid[i], at_scale(scale_grid[i])};
    } else {
        std::vector<std::future<StabilityVerdict>> futures(scale_grid.size());
        std::size_t next = 0;
        while (next < scale_grid.size()) {
            const std::size_t batch = std::min<std::size_t>(jobs, scale_grid.size() - next);
            for (std::size_t i = 0; i < batch; ++i)
                futures[next + i] = std::async(std::launch::async, at_scale,
                                               scale_grid[next + i]);
            for (std::size_t i = 0; i < batch; ++i)
                result.points[next + i] = {scale_grid[next + i], futures[next + i].get()};
            next += batch;
        }
    }

    for (std::size_t i = 1; i < result.points.size(); ++i) {
        if (result.points[i - 1].verdict.stable && !result.points[i].verdict.stable) {
            result.transition_found = true;
            result.bracket_lo = result.points[i - 1].scale;
            result.bracket_hi = result.points[i].scale;
            double a = result.bracket_lo, b = result.bracket_hi;
            while (b - a > 1e-6 * std::max(std::abs(b), 1e-30)) {
                const double mid = 0.5 * (a + b);
                if (at_scale(mid).stable) a = mid; else b = mid;
            }
            result.critical_scale = 0.5 * (a + b);
            break;
        }
    }
    return result;
}

void write_scan_csv(const ScanResult& scan, std::ostream& os) {
    os << "scale,stable,min_w2,max_imag_rate\n";
    char buf[128];
    for (const auto& p : scan.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", p.scale,
                      p.verdict.stable ? 1 : 0, p.verdict.min_normal_frequency_sq,
                      p.verdict.max_imag_rate);
        os << buf;
    }
}

} // namespace fanolab::stability
