#ifndef FFM_ERRORS_HPP
#define FFM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ffm {

// Malformed arguments: wrong sizes, non-positive lengths, bad ranges.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Well-formed input that has no solution in the requested geometry
// (non-realizable tuple, point outside the hemisphere, absorbed tree, ...).
struct Infeasible : std::runtime_error {
    explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

// Iteration caps, missing brackets, loss of precision.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ffm

#endif
