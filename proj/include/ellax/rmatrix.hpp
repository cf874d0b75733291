#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/contour.hpp"
#include "ellax/linalg.hpp"
#include "ellax/phase_space.hpp"
#include "ellax/theta.hpp"

namespace ellax {

/// Constant holomorphic differentials u_a(w)dw attached to the Tyurin data:
/// on the torus these are the rows of the inverse of alpha, normalized by
/// u_a(q_b) . alpha_b = delta_ab.
struct HoloBasis {
    MatC pi;  // pi(k, a): component k of the differential indexed by point a
};

inline HoloBasis holo_basis(const MatC& alpha, double max_condition = 1e8) {
    double cond;
    try {
        cond = cond_1(alpha);
    } catch (const ValidationError&) {
        throw ValidationError("alpha matrix is singular; no dual holomorphic basis");
    }
    if (!(cond <= max_condition))
        throw ValidationError("alpha matrix ill-conditioned for dual basis: cond_1 = " +
                              std::to_string(cond));
    return HoloBasis{inverse(alpha)};
}

/// Index placement of the second sum in the r-matrix kernel. `primary` is the
/// reading under which the null-vector and vanishing-at-origin identities
/// hold; `transposed` is the alternate reading kept for the automatic retry.
enum class RIndexReading { primary, transposed };

/// Scalar kernel r_jk(z,w) of the exchange r-matrix differential:
///   r_jk(z,w) = delta_jk (E(z-w) + E(w)) - sum_a pi_k^a alpha_a^j (E(z-q_a) + E(q_a)),
/// with E = theta'/theta. In w it has simple poles at w = z (residue -delta)
/// and w = 0 (residue +delta); the second sum is a constant differential in w.
/// In z it has simple poles at z = q_a and z = w, vanishes at z = 0, and
/// annihilates alpha_a when evaluated at w = q_a.
template <class S>
Matrix<S> r_scalar(const Torus& torus, const PhasePointT<S>& x, const S& z, const S& w,
                   RIndexReading reading = RIndexReading::primary) {
    const std::size_t n = x.n;
    const S common = torus.log_derivative_E(z - w) + torus.log_derivative_E(w);
    Matrix<S> r(n, n);
    for (std::size_t j = 0; j < n; ++j) r(j, j) = common;
    const Matrix<S> pi = inverse(x.alpha);
    for (std::size_t a = 0; a < n; ++a) {
        const S ea = torus.log_derivative_E(z - x.q[a]) + torus.log_derivative_E(x.q[a]);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const S coeff = (reading == RIndexReading::primary)
                                    ? pi(k, a) * x.alpha(a, j)
                                    : pi(j, a) * x.alpha(a, k);
                r(j, k) -= coeff * ea;
            }
    }
    return r;
}

/// Full 4-index tensor: component (i,j,k,l) = delta_{li} * r_jk(z,w).
inline Tensor4 r_tensor(const Torus& torus, const ExtendedPhasePoint& x, const cplx& z,
                        const cplx& w, RIndexReading reading = RIndexReading::primary) {
    const std::size_t n = x.n;
    const MatC r = r_scalar(torus, x, z, w, reading);
    Tensor4 t(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) t(i, j, k, i) = r(j, k);
    return t;
}

/// z-Laurent data of r(., w) at the marked point q_a:
///   r(z,w) = res/(z - q_a) + r0 + r1*(z - q_a) + O((z - q_a)^2).
struct RLaurent {
    MatC res;
    MatC r0;
    MatC r1;
};

/// Contour extraction of the z-Laurent data at q_a with w held fixed. The
/// contour must dodge the other z-poles (remaining marked points and the
/// diagonal z = w). radius <= 0 selects a quarter of the isolating distance.
inline RLaurent r_laurent_in_z(const Torus& torus, const ExtendedPhasePoint& x, std::size_t a,
                               const cplx& w, double radius = 0.0,
                               RIndexReading reading = RIndexReading::primary,
                               const QuadratureControl& qctrl = {}) {
    if (a >= x.n) throw ValidationError("marked point index out of range");
    double sep = std::numeric_limits<double>::max();
    for (std::size_t b = 0; b < x.n; ++b)
        if (b != a) sep = std::min(sep, torus.lattice_distance(x.q[a] - x.q[b]));
    sep = std::min(sep, torus.lattice_distance(x.q[a] - w));
    if (radius <= 0.0) radius = 0.25 * sep;
    if (radius >= sep)
        throw ValidationError("contour radius does not isolate the marked point in z");
    if (radius <= torus.control().pole_guard)
        throw ValidationError("contour radius below the theta pole guard");
    auto f = [&](const cplx& z) { return r_scalar(torus, x, z, w, reading); };
    auto c = laurent_coefficients(f, x.q[a], radius, -1, 1, qctrl);
    return RLaurent{c[0], c[1], c[2]};
}

}  // namespace ellax
