#include <doctest.h>

#include <cmath>

#include "fanolab/boundstate.hpp"
#include "fanolab/discrete.hpp"

using namespace fanolab;
using spectral::Scheme;
using spectral::SpectralDensity;
using spectral::QuadratureSpec;

namespace {
constexpr double kPi = 3.14159265358979323846;
const QuadratureSpec kQ{Scheme::GaussLegendrePanels, 2048, 50.0};
} // namespace

TEST_SUITE("boundstate") {

TEST_CASE("no coupling, no bound state") {
    const auto sd = SpectralDensity::ohmic(1.0, 0.0, 5.0);
    const auto bs = boundstate::solve_pole(sd, 1.0, kQ);
    CHECK_FALSE(bs.exists);
    CHECK(bs.threshold_margin == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("existence flips at the coupling threshold") {
    // For s = 1 the edge integral is eta * (2 pi omega_c) up to the truncated
    // tail; the flip must track the quadrature value of that integral.
    const double edge_unit = spectral::pole_integral(
        SpectralDensity::ohmic(1.0, 1.0, 5.0), -1e-14,
        QuadratureSpec{Scheme::GaussLegendrePanels, 8192, 50.0});
    const double eta_c = 1.0 / edge_unit;
    CHECK(eta_c == doctest::Approx(1.0 / (10.0 * kPi)).epsilon(1e-3));

    int flips = 0;
    bool prev = false;
    for (int i = 0; i <= 20; ++i) {
        const double eta = eta_c * (0.52 + 0.05 * i);
        const auto sd = SpectralDensity::ohmic(1.0, eta, 5.0);
        const auto bs = boundstate::solve_pole(sd, 1.0, kQ);
        CHECK(bs.exists == (bs.threshold_margin < 0.0));
        CHECK(bs.exists == (eta > eta_c));
        if (i > 0 && bs.exists != prev) ++flips;
        prev = bs.exists;
    }
    CHECK(flips == 1);
}

TEST_CASE("strong coupling: negative pole below the continuum") {
    const auto sd = SpectralDensity::ohmic(1.0, 0.1, 5.0);
    const auto bs = boundstate::solve_pole(sd, 1.0, kQ, 1e-12);
    REQUIRE(bs.exists);
    CHECK(bs.omega_b < 0.0);
    CHECK(bs.omega_b < sd.support_lo);
    CHECK(bs.pole_residual <= 1e-12);
    CHECK(bs.threshold_margin == doctest::Approx(1.0 - kPi).epsilon(1e-3));
    CHECK(bs.residue_Z > 0.0);
    CHECK(bs.residue_Z <= 1.0);

    // Continuum pole against the discretized spectrum.
    const auto bath = discrete::discretize(sd, {Scheme::UniformTrapezoid, 1024, 50.0});
    const auto spec = discrete::diagonalize(discrete::arrowhead(1.0, bath));
    CHECK(std::abs(spec.eigenvalues().front() - bs.omega_b) < 1e-3);
    CHECK(std::abs(spec.system_weights().front() - bs.residue_Z) < 1e-4);
}

TEST_CASE("pole function is strictly increasing below the support") {
    const auto sd = SpectralDensity::ohmic(1.0, 0.1, 5.0);
    double prev = -1e300;
    for (double x = -15.0; x < -0.1; x += 0.25) {
        const double f = boundstate::pole_function(sd, 1.0, x, kQ);
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("residue tends to one for a feeble gapped bath") {
    // Gapped table far above omega_b = omega_s: the decoupled mode is its own
    // eigenmode.
    for (double eps : {1e-3, 1e-6}) {
        const auto sd = SpectralDensity::tabulated({{2.0, eps}, {6.0, eps}, {10.0, eps}});
        const double z = boundstate::residue(sd, 1.0, {Scheme::GaussLegendrePanels, 512, 10.0});
        CHECK(z > 1.0 - 20.0 * eps);
        CHECK(z <= 1.0);
    }
}

TEST_CASE("residue rejects a pole inside the support") {
    const auto sd = SpectralDensity::ohmic(1.0, 0.1, 5.0);
    CHECK_THROWS_AS(boundstate::residue(sd, 0.5, kQ), std::domain_error);
}

TEST_CASE("bracket failure reports diagnostics") {
    // eta = 100 pushes the pole far below the default search floor.
    const auto sd = SpectralDensity::ohmic(1.0, 100.0, 5.0);
    CHECK_THROWS_AS(boundstate::solve_pole(sd, 1.0, kQ), bracket_error);
}

TEST_CASE("interior band gaps are rejected as unsupported") {
    // Two nonzero bands separated by an identically zero stretch.
    const auto gapped = SpectralDensity::tabulated(
        {{1.0, 0.5}, {2.0, 0.5}, {3.0, 0.0}, {4.0, 0.0}, {5.0, 0.5}, {6.0, 0.5}});
    const QuadratureSpec q{Scheme::GaussLegendrePanels, 256, 6.0};
    CHECK_THROWS_AS(boundstate::solve_pole(gapped, 0.5, q), std::invalid_argument);

    // A single interior zero touches but does not open a gap.
    const auto touching = SpectralDensity::tabulated(
        {{1.0, 0.5}, {2.0, 0.0}, {3.0, 0.5}});
    const QuadratureSpec q2{Scheme::GaussLegendrePanels, 256, 3.0};
    CHECK_NOTHROW(boundstate::solve_pole(touching, 0.5, q2));

    // Zero values at the support edges are soft edges, not gaps.
    const auto soft = SpectralDensity::tabulated(
        {{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.5}, {4.0, 0.0}, {5.0, 0.0}});
    const QuadratureSpec q3{Scheme::GaussLegendrePanels, 256, 5.0};
    CHECK_NOTHROW(boundstate::solve_pole(soft, 0.5, q3));
}

} // TEST_SUITE
