#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ellax {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline const cplx iu{0.0, 1.0};
inline const cplx two_pi_i{0.0, 2.0 * pi};

/// A series or quadrature failed to reach its accuracy budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation requested too close to a pole or lattice zero.
struct PoleProximityError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Input data violates a documented precondition. `point_index` is the
/// offending marked point where that is meaningful, -1 otherwise.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what, int index = -1)
        : std::invalid_argument(what), point_index(index) {}
    int point_index;
};

}  // namespace ellax
