#pragma once

#include <cstddef>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/contour.hpp"
#include "ellax/linalg.hpp"
#include "ellax/phase_space.hpp"
#include "ellax/theta.hpp"

namespace ellax {

/// Laurent data of the Lax matrix at a marked point:
///   L(z) = residue/(z - q_a) + L0 + L1*(z - q_a) + O((z - q_a)^2).
struct LaurentData {
    MatC residue;
    MatC L0;
    MatC L1;
};

namespace detail {

/// Smallest reduced distance from `center` to any of `others` on the torus.
inline double min_reduced_separation(const Torus& torus, const cplx& center,
                                     const std::vector<cplx>& others) {
    double best = 1e300;
    for (const cplx& o : others) best = std::min(best, torus.lattice_distance(center - o));
    return best;
}

}  // namespace detail

/// Matrix of the Lax differential L(z)dz in closed form. Simple poles sit at
/// the marked points q_a (residue beta_a (x) alpha_a) and at the distinguished
/// point z = 0 (residue -moment_map). Doubly periodic in z; invariant under
/// per-point rescaling; conjugation-covariant under the group action.
///
/// Structure: L = Pi * Ltilde * A with Pi = A^{-1}, where A has rows alpha_a,
/// Ltilde_aa = p_a, and for a != b
///   Ltilde_ab = (A B^T)_ab * theta(z-q_a) theta(z+q_a-q_b) theta(q_b) theta'(0)
///               / [theta(z) theta(z-q_b) theta(q_b-q_a) theta(q_a)].
template <class S>
Matrix<S> lax(const Torus& torus, const PhasePointT<S>& x, const S& z) {
    const std::size_t n = x.n;
    const double guard = torus.control().pole_guard;
    if (n > 1) {
        if (torus.lattice_distance(value_of(z)) < guard)
            throw PoleProximityError("Lax evaluation at the distinguished point");
        for (std::size_t a = 0; a < n; ++a)
            if (torus.lattice_distance(value_of(z) - value_of(x.q[a])) < guard)
                throw PoleProximityError("Lax evaluation at a marked point");
    }

    Matrix<S> lt(n, n);
    for (std::size_t a = 0; a < n; ++a) lt(a, a) = x.p[a];
    if (n > 1) {
        const S thz = torus.theta(z);
        const cplx thp0 = torus.theta_prime0();
        std::vector<S> th_z_minus_q(n), th_q(n);
        for (std::size_t a = 0; a < n; ++a) {
            th_z_minus_q[a] = torus.theta(z - x.q[a]);
            th_q[a] = torus.theta(x.q[a]);
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) continue;
                S weight{};
                for (std::size_t k = 0; k < n; ++k) weight += x.alpha(a, k) * x.beta(b, k);
                const S num = th_z_minus_q[a] * torus.theta(z + x.q[a] - x.q[b]) * th_q[b] * thp0;
                const S den = thz * th_z_minus_q[b] * torus.theta(x.q[b] - x.q[a]) * th_q[a];
                lt(a, b) = weight * (num / den);
            }
    }
    return inverse(x.alpha) * lt * x.alpha;
}

/// Smallest reduced distance from q_a to the other Lax poles (the remaining
/// marked points and the distinguished point 0).
inline double min_pole_separation(const Torus& torus, const ExtendedPhasePoint& x,
                                  std::size_t a) {
    std::vector<cplx> others;
    for (std::size_t b = 0; b < x.n; ++b)
        if (b != a) others.push_back(x.q[b]);
    others.push_back(cplx{0.0, 0.0});
    return detail::min_reduced_separation(torus, x.q[a], others);
}

/// Default contour radius: a quarter of the minimal reduced pole separation,
/// comfortably above the theta pole guard and inside the isolating annulus.
inline double default_contour_radius(const Torus& torus, const ExtendedPhasePoint& x,
                                     std::size_t a) {
    return 0.25 * min_pole_separation(torus, x, a);
}

/// Residue and first two regular Laurent coefficients of L at q_a, extracted
/// by contour quadrature (no subtractive cancellation near the pole).
/// radius <= 0 selects the default.
inline LaurentData laurent_at(const Torus& torus, const ExtendedPhasePoint& x, std::size_t a,
                              double radius = 0.0, const QuadratureControl& qctrl = {}) {
    if (a >= x.n) throw ValidationError("marked point index out of range");
    const double sep = min_pole_separation(torus, x, a);
    if (radius <= 0.0) radius = 0.25 * sep;
    if (radius >= sep)
        throw ValidationError("contour radius does not isolate the marked point");
    if (radius <= torus.control().pole_guard)
        throw ValidationError("contour radius below the theta pole guard");
    auto f = [&](const cplx& z) { return lax(torus, x, z); };
    auto c = laurent_coefficients(f, x.q[a], radius, -1, 1, qctrl);
    return LaurentData{c[0], c[1], c[2]};
}

/// Contour residue of L at the distinguished point z = 0; equals
/// -moment_map(x) by the elliptic residue theorem, and vanishes on the
/// moment surface (L regular there).
inline MatC residue_at_origin(const Torus& torus, const ExtendedPhasePoint& x,
                              double radius = 0.0, const QuadratureControl& qctrl = {}) {
    if (x.n == 1) return MatC(1, 1);  // L is constant
    std::vector<cplx> others(x.q.begin(), x.q.end());
    const double sep = detail::min_reduced_separation(torus, cplx{0.0, 0.0}, others);
    if (radius <= 0.0) radius = 0.25 * sep;
    if (radius >= sep)
        throw ValidationError("contour radius does not isolate the distinguished point");
    auto f = [&](const cplx& z) { return lax(torus, x, z); };
    return laurent_coefficients(f, cplx{0.0, 0.0}, radius, -1, -1, qctrl)[0];
}

}  // namespace ellax
