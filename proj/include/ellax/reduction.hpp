#pragma once

#include <cstddef>
#include <numeric>
#include <type_traits>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/lax.hpp"
#include "ellax/linalg.hpp"
#include "ellax/phase_space.hpp"
#include "ellax/poisson.hpp"
#include "ellax/rmatrix.hpp"

namespace ellax {

/// Gauge-fixing slice: the rows entering the diagonal-minor conditions. On
/// the torus (where the number of marked points equals the rank) the minor is
/// the whole matrix and the compensator normalizes it to a multiple of the
/// identity.
struct GaugeSlice {
    std::vector<std::size_t> rows;

    static GaugeSlice full(std::size_t n) {
        GaugeSlice s;
        s.rows.resize(n);
        std::iota(s.rows.begin(), s.rows.end(), std::size_t{0});
        return s;
    }
};

/// Orbit coordinates entering the constraint sum_a beta_a (x) alpha_a + eta = 0;
/// feasible eta are traceless.
struct OrbitPoint {
    MatC eta;
};

inline OrbitPoint make_orbit(MatC eta, double trace_tol = 1e-12) {
    if (eta.rows() != eta.cols()) throw ValidationError("orbit matrix must be square");
    double scale = 1.0;
    for (std::size_t i = 0; i < eta.rows(); ++i)
        for (std::size_t j = 0; j < eta.cols(); ++j) scale = std::max(scale, std::abs(eta(i, j)));
    if (std::abs(eta.trace()) > trace_tol * scale)
        throw ValidationError("orbit matrix must be traceless");
    return OrbitPoint{std::move(eta)};
}

/// Group compensator G(alpha) = det(A)^{-1/n} A (principal branch), the
/// element carrying alpha to the slice: A G^{-1} = det(A)^{1/n} id, and
/// det G = 1 exactly up to rounding. Scalar-generic so derivative payloads
/// flow through the root and the determinant.
template <class S>
Matrix<S> compensator(const Matrix<S>& alpha) {
    const std::size_t n = alpha.rows();
    if (alpha.cols() != n) throw ValidationError("compensator requires a square alpha");
    const S det = determinant(alpha);
    if (abs_of(det) == 0.0) throw ValidationError("compensator undefined for singular alpha");
    const S scale = exp(log(det) * (-1.0 / double(n)));
    Matrix<S> g = alpha;
    g *= scale;
    return g;
}

/// The torus construction pins the minor to the full row set; anything else
/// belongs to the higher-genus regime and is rejected.
inline void require_full_slice(const GaugeSlice& slice, std::size_t n) {
    const GaugeSlice full = GaugeSlice::full(n);
    if (slice.rows != full.rows)
        throw ValidationError("only the full diagonal-minor gauge slice is supported on the torus");
}

template <class S>
Matrix<S> compensator(const Matrix<S>& alpha, const GaugeSlice& slice) {
    require_full_slice(slice, alpha.rows());
    return compensator(alpha);
}

/// Distance of x from the gauge slice, max |G(alpha) - id|.
inline double slice_distance(const ExtendedPhasePoint& x) {
    return max_abs(compensator(x.alpha) - MatC::identity(x.n));
}

inline bool on_gauge_slice(const ExtendedPhasePoint& x, double tol = 1e-10) {
    return slice_distance(x) <= tol;
}

/// Gauge-invariant dressed Lax matrix l(z) = G(alpha) L(z) G(alpha)^{-1};
/// invariant under the group action because G(alpha g^{-1}) = G(alpha) g^{-1}
/// up to an n-th root of unity that cancels under conjugation.
template <class S>
Matrix<S> dressed_lax(const Torus& torus, const PhasePointT<S>& x, const S& z) {
    const Matrix<S> g = compensator(x.alpha);
    return g * lax(torus, x, z) * inverse(g);
}

/// Chart with pivot_a = a: admissible in a neighbourhood of the slice
/// (alpha = id has unit diagonal), which the library-default uniform pivot is
/// not. All slice-point bracket computations use it.
inline Chart slice_chart(std::size_t n) {
    Chart c;
    c.pivot.resize(n);
    std::iota(c.pivot.begin(), c.pivot.end(), std::size_t{0});
    return c;
}

/// Reduced-structure kernel at a slice point:
///   r^H(z,w) = r(z,w) + {G_1(alpha), L_2(w)}
/// with the bracket term sum over alpha/beta conjugate pairs of
/// dG/dalpha (x) dL(w)/dbeta (G depends only on alpha, so no other canonical
/// pair contributes). Depends only on (q, alpha).
inline Tensor4 r_hitchin(const Torus& torus, const ExtendedPhasePoint& x, const cplx& z,
                         const cplx& w, const BracketConvention& conv = {},
                         const DiffControl& ctrl = {},
                         RIndexReading reading = RIndexReading::primary,
                         double slice_tol = 1e-10) {
    if (!on_gauge_slice(x, slice_tol))
        throw ValidationError("reduced kernel requested off the gauge slice");
    const std::size_t n = x.n;
    const Chart chart = slice_chart(n);

    auto comp = [](const auto& pt) { return compensator(pt.alpha); };
    auto lax_w = [&torus, w](const auto& pt) {
        using S = std::decay_t<decltype(pt.q[0])>;
        return lax(torus, pt, S(w));
    };
    const DerivativeBundle dg = differentiate(comp, x, chart, ctrl);
    const DerivativeBundle dl = differentiate(lax_w, x, chart, ctrl);

    Tensor4 out = r_tensor(torus, x, z, w, reading);
    for (std::size_t t = 0; t + 1 < dg.partials.size(); t += 2) {
        if (dg.layout.ids[t].kind != CoordId::Kind::Alpha) continue;
        const MatC& g_a = dg.partials[t];      // dG / dalpha coordinate
        const MatC& l_b = dl.partials[t + 1];  // dL(w) / conjugate beta coordinate
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l)
                        out(i, j, k, l) += conv.alpha_beta_sign * g_a(i, j) * l_b(k, l);
    }
    return out;
}

/// Bracket table of the dressed Lax matrix and the dressed exchange
/// right-hand side [r^H(z,w), l_1(z)] - [swap(r^H(w,z)), l_2(w)], both in the
/// slice chart. Their equality at slice points is the reduced-structure
/// certification.
inline BracketTensor dressed_bracket_tensor(const Torus& torus, const ExtendedPhasePoint& x,
                                            const cplx& z, const cplx& w,
                                            const BracketConvention& conv = {},
                                            const DiffControl& ctrl = {},
                                            RIndexReading reading = RIndexReading::primary,
                                            double slice_tol = 1e-10) {
    if (!on_gauge_slice(x, slice_tol))
        throw ValidationError("dressed bracket requested off the gauge slice");
    const std::size_t n = x.n;
    const Chart chart = slice_chart(n);

    auto dressed_at = [&torus](const cplx& point) {
        return [&torus, point](const auto& pt) {
            using S = std::decay_t<decltype(pt.q[0])>;
            return dressed_lax(torus, pt, S(point));
        };
    };
    const DerivativeBundle dz = differentiate(dressed_at(z), x, chart, ctrl);
    const DerivativeBundle dw = differentiate(dressed_at(w), x, chart, ctrl);

    BracketTensor out{Tensor4(n), Tensor4(n)};
    for (std::size_t t = 0; t + 1 < dz.partials.size(); t += 2) {
        const double s = (dz.layout.ids[t].kind == CoordId::Kind::Q) ? 1.0 : conv.alpha_beta_sign;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l)
                        out.D(i, j, k, l) += s * (dz.partials[t](i, j) * dw.partials[t + 1](k, l) -
                                                  dz.partials[t + 1](i, j) * dw.partials[t](k, l));
    }

    const MatC lz = dressed_lax(torus, x, z);
    const MatC lw = dressed_lax(torus, x, w);
    out.R = exchange_rhs(r_hitchin(torus, x, z, w, conv, ctrl, reading, slice_tol),
                         r_hitchin(torus, x, w, z, conv, ctrl, reading, slice_tol), lz, lw);
    return out;
}

/// Max-norm distance of x from the spin-system constraint surface
/// sum_a beta_a (x) alpha_a + eta = 0.
inline double spin_cm_residual(const ExtendedPhasePoint& x, const OrbitPoint& orbit) {
    if (orbit.eta.rows() != x.n || orbit.eta.cols() != x.n)
        throw ValidationError("orbit matrix dimension mismatch");
    return max_abs(moment_map(x) + orbit.eta);
}

}  // namespace ellax
