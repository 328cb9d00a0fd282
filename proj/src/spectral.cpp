#include "fanolab/spectral.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fanolab::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 8-point Gauss-Legendre rule on [-1, 1], positive half.
constexpr double kGLNode[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
constexpr double kGLWeight[4] = {0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

double effective_hi(const SpectralDensity& sd, const QuadratureSpec& q) {
    return std::min(sd.support_hi, q.omega_max);
}

void check_range(const SpectralDensity& sd, const QuadratureSpec& q) {
    q.validate();
    if (!(effective_hi(sd, q) > sd.support_lo))
        throw std::invalid_argument("quadrature: omega_max must exceed the lower support edge");
}

double ohmic_eval(const SpectralDensity& sd, double omega) {
    if (omega <= 0.0) return 0.0;
    return 2.0 * kPi * sd.eta * omega *
           std::pow(omega / sd.omega_c, sd.s_exponent - 1.0) *
           std::exp(-omega / sd.omega_c);
}

double table_eval(const SpectralDensity& sd, double omega) {
    const auto& t = sd.table;
    if (omega < t.front().first || omega > t.back().first)
        throw interpolation_error("tabulated density queried at omega inside the support "
                                  "but outside the table range");
    auto it = std::lower_bound(t.begin(), t.end(), omega,
                               [](const auto& p, double w) { return p.first < w; });
    if (it->first == omega) return it->second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (omega - lo.first) / (hi.first - lo.first);
    return lo.second + f * (hi.second - lo.second);
}

} // namespace

SpectralDensity SpectralDensity::ohmic(double s, double eta, double omega_c) {
    if (!(s > 0.0)) throw std::invalid_argument("ohmic: s_exponent must be > 0");
    if (!(eta >= 0.0)) throw std::invalid_argument("ohmic: eta must be >= 0");
    if (!(omega_c > 0.0)) throw std::invalid_argument("ohmic: omega_c must be > 0");
    SpectralDensity sd;
    sd.family = Family::OhmicFamily;
    sd.s_exponent = s;
    sd.eta = eta;
    sd.omega_c = omega_c;
    sd.support_lo = 0.0;
    sd.support_hi = std::numeric_limits<double>::infinity();
    return sd;
}

SpectralDensity SpectralDensity::tabulated(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("tabulated: need at least two points");
    const double lo = points.front().first;
    const double hi = points.back().first;
    return tabulated(std::move(points), lo, hi);
}

SpectralDensity SpectralDensity::tabulated(std::vector<std::pair<double, double>> points,
                                           double lo, double hi) {
    if (points.size() < 2) throw std::invalid_argument("tabulated: need at least two points");
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [w, j] : points) {
        if (w < 0.0) throw std::invalid_argument("tabulated: omega values must be >= 0");
        if (!(w > prev)) throw std::invalid_argument("tabulated: omega values must be strictly increasing");
        if (j < 0.0) throw std::invalid_argument("tabulated: J values must be >= 0");
        prev = w;
    }
    if (!(0.0 <= lo && lo < hi))
        throw std::invalid_argument("tabulated: support must satisfy 0 <= lo < hi");
    SpectralDensity sd;
    sd.family = Family::Tabulated;
    sd.table = std::move(points);
    sd.support_lo = lo;
    sd.support_hi = hi;
    return sd;
}

SpectralDensity SpectralDensity::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("from_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("from_csv: empty file " + path);
    auto strip = [](std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                s.end());
        return s;
    };
    if (strip(line) != "omega,J")
        throw std::invalid_argument("from_csv: expected header 'omega,J' in " + path);
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        if (strip(line).empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw std::invalid_argument("from_csv: malformed row '" + line + "'");
        pts.emplace_back(std::stod(a), std::stod(b));
    }
    return tabulated(std::move(pts));
}

void QuadratureSpec::validate() const {
    if (n_points < 2) throw std::invalid_argument("quadrature: n_points must be >= 2");
    if (!(omega_max > 0.0)) throw std::invalid_argument("quadrature: omega_max must be > 0");
}

QuadratureSpec default_quadrature(const SpectralDensity& sd, Scheme scheme, int n_points) {
    QuadratureSpec q;
    q.scheme = scheme;
    q.n_points = n_points;
    q.omega_max = (sd.family == Family::OhmicFamily) ? 10.0 * sd.omega_c : sd.support_hi;
    return q;
}

QuadratureGrid quadrature_grid(const SpectralDensity& sd, const QuadratureSpec& q) {
    check_range(sd, q);
    QuadratureGrid g;
    g.lo = sd.support_lo;
    g.hi = effective_hi(sd, q);
    const double span = g.hi - g.lo;
    if (q.scheme == Scheme::UniformTrapezoid) {
        const int n = q.n_points;
        const double dw = span / n;
        g.nodes.resize(n);
        g.weights.assign(n, dw);
        for (int i = 0; i < n; ++i) g.nodes[i] = g.lo + (i + 0.5) * dw;
    } else {
        const int panels = (q.n_points + 7) / 8;
        const double h = span / panels;
        g.nodes.reserve(static_cast<std::size_t>(panels) * 8);
        g.weights.reserve(static_cast<std::size_t>(panels) * 8);
        for (int p = 0; p < panels; ++p) {
            const double c = g.lo + (p + 0.5) * h;
            for (int i = 3; i >= 0; --i) {
                g.nodes.push_back(c - 0.5 * h * kGLNode[i]);
                g.weights.push_back(0.5 * h * kGLWeight[i]);
            }
            for (int i = 0; i < 4; ++i) {
                g.nodes.push_back(c + 0.5 * h * kGLNode[i]);
                g.weights.push_back(0.5 * h * kGLWeight[i]);
            }
        }
    }
    return g;
}

double evaluate(const SpectralDensity& sd, double omega) {
    if (!std::isfinite(omega)) throw std::invalid_argument("evaluate: omega must be finite");
    if (omega < sd.support_lo || omega > sd.support_hi) return 0.0;
    return (sd.family == Family::OhmicFamily) ? ohmic_eval(sd, omega) : table_eval(sd, omega);
}

double derivative(const SpectralDensity& sd, double omega) {
    if (sd.family == Family::OhmicFamily) {
        if (omega <= 0.0) return sd.s_exponent == 1.0 ? 2.0 * kPi * sd.eta : 0.0;
        return ohmic_eval(sd, omega) * (sd.s_exponent / omega - 1.0 / sd.omega_c);
    }
    const auto& t = sd.table;
    auto it = std::upper_bound(t.begin(), t.end(), omega,
                               [](double w, const auto& p) { return w < p.first; });
    if (it == t.begin()) ++it;
    if (it == t.end()) --it;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return (hi.second - lo.second) / (hi.first - lo.first);
}

double integrate_density(const SpectralDensity& sd, const QuadratureSpec& q) {
    const auto g = quadrature_grid(sd, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        acc += g.weights[i] * evaluate(sd, g.nodes[i]);
    return acc;
}

double truncation_tail(const SpectralDensity& sd, const QuadratureSpec& q) {
    q.validate();
    const double hi = effective_hi(sd, q);
    if (sd.support_hi <= q.omega_max) return 0.0;
    const double far = (sd.family == Family::OhmicFamily)
                           // 30 cutoff lengths past the truncation leave e^{-30} behind
                           ? hi + 30.0 * sd.omega_c
                           : std::min(sd.support_hi, sd.table.back().first);
    if (!(far > hi)) return 0.0;
    const int panels = 8;
    const double h = (far - hi) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = hi + (p + 0.5) * h;
        for (int i = 0; i < 4; ++i) {
            acc += 0.5 * h * kGLWeight[i] * evaluate(sd, c - 0.5 * h * kGLNode[i]);
            acc += 0.5 * h * kGLWeight[i] * evaluate(sd, c + 0.5 * h * kGLNode[i]);
        }
    }
    return acc;
}

double pole_integral(const SpectralDensity& sd, double x, const QuadratureSpec& q) {
    if (!(x < sd.support_lo))
        throw std::invalid_argument("pole_integral: x must lie strictly below the support; "
                                    "inside the support use lamb_shift_and_decay");
    const auto g = quadrature_grid(sd, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        acc += g.weights[i] * evaluate(sd, g.nodes[i]) / (g.nodes[i] - x);
    const double tail = truncation_tail(sd, q) / (g.hi - x);
    if (tail > 1e-2 * std::max(std::abs(acc), 1e-12))
        throw quadrature_error("pole_integral: truncation tail exceeds 1% of the integral; "
                               "increase omega_max");
    return acc;
}

LambShift lamb_shift_and_decay(const SpectralDensity& sd, double omega,
                               const QuadratureSpec& q) {
    const auto g = quadrature_grid(sd, q);
    const double span = g.hi - g.lo;
    LambShift out;
    if (omega >= sd.support_lo && omega <= sd.support_hi)
        out.gamma = kPi * evaluate(sd, omega);

    if (omega < g.lo || omega > g.hi) {
        // Pole outside the integration range: ordinary integral.
        double acc = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            acc += g.weights[i] * evaluate(sd, g.nodes[i]) / (omega - g.nodes[i]);
        out.delta = acc;
        return out;
    }
    if (std::abs(omega - g.lo) <= 1e-12 * span || std::abs(omega - g.hi) <= 1e-12 * span)
        throw endpoint_error("lamb_shift_and_decay: omega coincides with a support endpoint");

    // Principal value by singularity subtraction:
    //   PV int J/(w-w') = int [J(w')-J(w)]/(w-w') + J(w) ln|(w-lo)/(hi-w)|.
    const double jw = evaluate(sd, omega);
    const double jslope = derivative(sd, omega);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double d = omega - g.nodes[i];
        if (std::abs(d) <= 1e-9 * span) {
            acc += g.weights[i] * (-jslope); // removable point, limit -J'(omega)
        } else {
            acc += g.weights[i] * (evaluate(sd, g.nodes[i]) - jw) / d;
        }
    }
    out.delta = acc + jw * std::log(std::abs((omega - g.lo) / (g.hi - omega)));
    return out;
}

double kernel_time_limit(const SpectralDensity& sd, const QuadratureSpec& q) {
    check_range(sd, q);
    return q.n_points * kPi / (effective_hi(sd, q) - sd.support_lo);
}

std::complex<double> memory_kernel(const SpectralDensity& sd, double t,
                                   const QuadratureSpec& q) {
    if (!(t >= 0.0)) throw std::invalid_argument("memory_kernel: t must be >= 0");
    if (t > kernel_time_limit(sd, q))
        throw quadrature_error("memory_kernel: t exceeds the grid resolution limit "
                               "n_points*pi/omega_max; use finer quadrature");
    const auto g = quadrature_grid(sd, q);
    if (t == 0.0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            acc += g.weights[i] * evaluate(sd, g.nodes[i]);
        return {acc, 0.0};
    }
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double a = g.weights[i] * evaluate(sd, g.nodes[i]);
        acc += a * std::complex<double>(std::cos(g.nodes[i] * t), -std::sin(g.nodes[i] * t));
    }
    return acc;
}

} // namespace fanolab::spectral
