// bath_fixtures.hpp — Shared generators for randomized bath tests

#pragma once

#include <random>
#include <vector>

#include "fanolab/discrete.hpp"

namespace fanolab::testing {

// Random strictly increasing bath with couplings bounded away from zero, so
// the secular path applies and interlacing is strict.
inline discrete::DiscretizedBath random_bath(std::mt19937& rng, std::size_t n_max) {
    std::uniform_int_distribution<std::size_t> size_dist(2, n_max);
    std::uniform_real_distribution<double> gap_dist(0.01, 0.5);
    std::uniform_real_distribution<double> v_dist(0.01, 1.0);
    const std::size_t n = size_dist(rng);

    discrete::DiscretizedBath bath;
    bath.omegas.resize(n);
    bath.couplings.resize(n);
    bath.weights.assign(n, 1.0);
    double w = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
    for (std::size_t k = 0; k < n; ++k) {
        bath.omegas[k] = w;
        bath.couplings[k] = v_dist(rng);
        w += gap_dist(rng);
    }
    bath.domain_lo = bath.omegas.front() - 0.5;
    bath.domain_hi = bath.omegas.back() + 0.5;
    return bath;
}

inline double random_system_frequency(std::mt19937& rng) {
    return std::uniform_real_distribution<double>(-2.0, 12.0)(rng);
}

// Strict interlacing check: at most one eigenvalue below the first bath
// frequency, exactly one inside each gap, at most one above the last.
inline bool interlaces_strictly(const std::vector<double>& evals,
                                const std::vector<double>& omegas) {
    const std::size_t n = omegas.size();
    if (evals.size() != n + 1) return false;
    for (std::size_t j = 1; j < evals.size(); ++j)
        if (!(evals[j] > evals[j - 1])) return false;
    if (!(evals[0] < omegas[0])) return false;
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (!(omegas[k] < evals[k + 1] && evals[k + 1] < omegas[k + 1])) return false;
    if (!(evals[n] > omegas[n - 1])) return false;
    return true;
}

} // namespace fanolab::testing
