// errors.hpp — Exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace fanolab {

// Tabulated density queried inside its support but outside the table range.
struct interpolation_error : std::runtime_error {
    explicit interpolation_error(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature cannot deliver the requested integral (truncation tail too
// large, or oscillation unresolved by the node count).
struct quadrature_error : std::runtime_error {
    explicit quadrature_error(const std::string& what) : std::runtime_error(what) {}
};

// Principal-value evaluation requested exactly at a support endpoint.
struct endpoint_error : std::runtime_error {
    explicit endpoint_error(const std::string& what) : std::runtime_error(what) {}
};

// Root bracketing failed inside the admissible search window.
struct bracket_error : std::runtime_error {
    explicit bracket_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative refinement (secular roots, eigen-iterations) did not converge.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Bath grid too coarse for the requested support.
struct resolution_error : std::runtime_error {
    explicit resolution_error(const std::string& what) : std::runtime_error(what) {}
};

// Time stepper detected norm blow-up.
struct stability_error : std::runtime_error {
    explicit stability_error(const std::string& what) : std::runtime_error(what) {}
};

// Inputs that must share provenance (density and the bath sampled from it)
// do not match.
struct consistency_error : std::runtime_error {
    explicit consistency_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fanolab
