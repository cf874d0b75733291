#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/dual.hpp"
#include "ellax/linalg.hpp"
#include "ellax/rng.hpp"
#include "ellax/theta.hpp"

namespace ellax {

/// Thresholds that operationalize "generic" data: how orthogonal the
/// per-point pairing must be, how separated the marked points, and how
/// well-conditioned the vector matrix.
struct ValidationLimits {
    double orthogonality_tol = 1e-12;
    double min_separation = 1e-3;
    double max_condition = 1e8;
    double det_tol = 1e-10;  // |det G - 1| bound for group elements
};

/// A point of the extended phase space: marked points q_a on the torus,
/// conjugate momenta p_a, and per-point vector pairs (alpha_a, beta_a) with
/// alpha_a . beta_a = 0. Rows of `alpha`/`beta` are indexed by the marked
/// point a; columns by the vector component. Templated on the scalar so
/// derivative payloads can ride through every downstream evaluation.
template <class S>
struct PhasePointT {
    std::size_t n = 0;
    std::vector<S> q;
    std::vector<S> p;
    Matrix<S> alpha;
    Matrix<S> beta;
};

using ExtendedPhasePoint = PhasePointT<cplx>;
using DualPhasePoint = PhasePointT<DualC>;

/// Moment matrix T_ij = sum_a beta_a^i alpha_a^j generating the group action;
/// traceless by the per-point orthogonality.
template <class S>
Matrix<S> moment_map(const PhasePointT<S>& x) {
    Matrix<S> t(x.n, x.n);
    for (std::size_t a = 0; a < x.n; ++a)
        for (std::size_t i = 0; i < x.n; ++i)
            for (std::size_t j = 0; j < x.n; ++j) t(i, j) += x.beta(a, i) * x.alpha(a, j);
    return t;
}

/// Throws ValidationError (with the offending point index where meaningful)
/// unless all structural invariants hold: per-point orthogonality, pairwise
/// separation of the q_a modulo the lattice, and a well-conditioned alpha.
inline void validate(const ExtendedPhasePoint& x, const Torus& torus,
                     const ValidationLimits& lim = {}) {
    const std::size_t n = x.n;
    if (n < 1 || x.q.size() != n || x.p.size() != n || x.alpha.rows() != n ||
        x.alpha.cols() != n || x.beta.rows() != n || x.beta.cols() != n)
        throw ValidationError("phase point has inconsistent dimensions");

    for (std::size_t a = 0; a < n; ++a) {
        cplx dot{};
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += x.beta(a, i) * x.alpha(a, i);
            scale = std::max(scale, std::abs(x.beta(a, i) * x.alpha(a, i)));
        }
        if (std::abs(dot) > lim.orthogonality_tol * std::max(1.0, scale))
            throw ValidationError("per-point orthogonality violated at marked point " +
                                      std::to_string(a),
                                  int(a));
    }

    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (torus.lattice_distance(x.q[a] - x.q[b]) <= lim.min_separation)
                throw ValidationError("marked points " + std::to_string(a) + " and " +
                                          std::to_string(b) + " coincide modulo the lattice",
                                      int(b));

    double cond;
    try {
        cond = cond_1(x.alpha);
    } catch (const ValidationError&) {
        throw ValidationError("alpha matrix is singular");
    }
    if (!(cond <= lim.max_condition))
        throw ValidationError("alpha matrix ill-conditioned: cond_1 = " + std::to_string(cond));
}

/// Validated constructor.
inline ExtendedPhasePoint make_point(const Torus& torus, std::vector<cplx> q,
                                     std::vector<cplx> p, MatC alpha, MatC beta,
                                     const ValidationLimits& lim = {}) {
    ExtendedPhasePoint x;
    x.n = q.size();
    x.q = std::move(q);
    x.p = std::move(p);
    x.alpha = std::move(alpha);
    x.beta = std::move(beta);
    validate(x, torus, lim);
    return x;
}

/// Group action alpha_a -> alpha_a G^{-1} (row action), beta_a -> G beta_a;
/// q, p untouched. Requires det G = 1 within the configured tolerance.
inline ExtendedPhasePoint gauge_act(const ExtendedPhasePoint& x, const MatC& g,
                                    const ValidationLimits& lim = {}) {
    if (g.rows() != x.n || g.cols() != x.n)
        throw ValidationError("group element has wrong dimension");
    if (std::abs(determinant(g) - cplx(1.0)) > lim.det_tol)
        throw ValidationError("group element determinant deviates from 1 beyond tolerance");
    ExtendedPhasePoint y = x;
    y.alpha = x.alpha * inverse(g);
    y.beta = x.beta * g.transposed();
    return y;
}

/// Equivalence rescaling alpha_a -> lambda alpha_a, beta_a -> beta_a/lambda;
/// all Lax and r-matrix evaluations are unchanged under it.
inline ExtendedPhasePoint rescale(const ExtendedPhasePoint& x, std::size_t a,
                                  const cplx& lambda) {
    if (lambda == cplx(0.0)) throw ValidationError("rescale factor must be nonzero");
    if (a >= x.n) throw ValidationError("rescale index out of range");
    ExtendedPhasePoint y = x;
    for (std::size_t i = 0; i < x.n; ++i) {
        y.alpha(a, i) = lambda * x.alpha(a, i);
        y.beta(a, i) = x.beta(a, i) / lambda;
    }
    return y;
}

/// Local chart choice: per marked point, the vector component normalized to 1
/// (its conjugate beta component is eliminated through the orthogonality).
struct Chart {
    std::vector<std::size_t> pivot;

    static Chart uniform(std::size_t n, std::size_t piv = 0) {
        Chart c;
        c.pivot.assign(n, piv);
        return c;
    }
};

/// True when every pivot component of alpha is usable at x.
inline bool chart_admissible(const ExtendedPhasePoint& x, const Chart& c,
                             double floor_abs = 1e-8) {
    for (std::size_t a = 0; a < x.n; ++a)
        if (std::abs(x.alpha(a, c.pivot[a])) < floor_abs) return false;
    return true;
}

/// Identity of one canonical chart coordinate.
struct CoordId {
    enum class Kind { Q, P, Alpha, Beta } kind;
    std::size_t a;   // marked point
    std::size_t mu;  // vector component (Alpha/Beta only)
};

/// Flat layout of the 2n^2 chart coordinates. Conjugate canonical pairs sit
/// at adjacent slots (2t, 2t+1): (q_a, p_a) first, then per point the
/// non-pivot pairs (alpha_a^mu, beta_a^mu).
struct CoordLayout {
    std::vector<CoordId> ids;

    static CoordLayout build(std::size_t n, const Chart& c) {
        CoordLayout lay;
        lay.ids.reserve(2 * n * n);
        for (std::size_t a = 0; a < n; ++a) {
            lay.ids.push_back({CoordId::Kind::Q, a, 0});
            lay.ids.push_back({CoordId::Kind::P, a, 0});
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t mu = 0; mu < n; ++mu) {
                if (mu == c.pivot[a]) continue;
                lay.ids.push_back({CoordId::Kind::Alpha, a, mu});
                lay.ids.push_back({CoordId::Kind::Beta, a, mu});
            }
        return lay;
    }

    std::size_t size() const { return ids.size(); }
    std::size_t pair_count() const { return ids.size() / 2; }
};

/// Canonical coordinates of x in chart c. Each row is first rescaled so the
/// pivot component of alpha is exactly 1; the pivot beta component is then
/// determined by orthogonality and not stored.
inline std::vector<cplx> chart_coordinates(const ExtendedPhasePoint& x, const Chart& c) {
    if (!chart_admissible(x, c))
        throw ValidationError("chart pivot component vanishes at this point");
    const CoordLayout lay = CoordLayout::build(x.n, c);
    std::vector<cplx> out(lay.size());
    for (std::size_t t = 0; t < lay.size(); ++t) {
        const CoordId& id = lay.ids[t];
        const cplx piv = x.alpha(id.a, c.pivot[id.a]);
        switch (id.kind) {
            case CoordId::Kind::Q: out[t] = x.q[id.a]; break;
            case CoordId::Kind::P: out[t] = x.p[id.a]; break;
            case CoordId::Kind::Alpha: out[t] = x.alpha(id.a, id.mu) / piv; break;
            case CoordId::Kind::Beta: out[t] = x.beta(id.a, id.mu) * piv; break;
        }
    }
    return out;
}

/// Rebuild a full phase point from chart coordinates: pivot alpha components
/// are 1; pivot beta components come from the orthogonality, so every
/// reconstructed point satisfies the constraint exactly. Scalar-generic so
/// dual-number coordinates yield a dual point.
template <class S>
PhasePointT<S> point_from_chart(std::size_t n, const Chart& c, const std::vector<S>& coords) {
    const CoordLayout lay = CoordLayout::build(n, c);
    if (coords.size() != lay.size())
        throw ValidationError("chart coordinate vector has wrong length");
    PhasePointT<S> x;
    x.n = n;
    x.q.resize(n);
    x.p.resize(n);
    x.alpha = Matrix<S>(n, n);
    x.beta = Matrix<S>(n, n);
    for (std::size_t a = 0; a < n; ++a) x.alpha(a, c.pivot[a]) = S(1.0);
    for (std::size_t t = 0; t < lay.size(); ++t) {
        const CoordId& id = lay.ids[t];
        switch (id.kind) {
            case CoordId::Kind::Q: x.q[id.a] = coords[t]; break;
            case CoordId::Kind::P: x.p[id.a] = coords[t]; break;
            case CoordId::Kind::Alpha: x.alpha(id.a, id.mu) = coords[t]; break;
            case CoordId::Kind::Beta: x.beta(id.a, id.mu) = coords[t]; break;
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        S acc{};
        for (std::size_t mu = 0; mu < n; ++mu) {
            if (mu == c.pivot[a]) continue;
            acc += x.beta(a, mu) * x.alpha(a, mu);
        }
        x.beta(a, c.pivot[a]) = -acc;
    }
    return x;
}

struct SampleOptions {
    bool on_moment_surface = false;
    bool on_gauge_slice = false;
};

/// Deterministic seeded sampler. Marked points are drawn with pairwise
/// reduced separation (and separation from the distinguished point z = 0,
/// where the Lax differential has its extra pole); alpha is redrawn until
/// well-conditioned; beta is drawn inside the per-point orthogonality
/// nullspace. on_gauge_slice pins alpha to the identity. on_moment_surface
/// additionally demands sum_a beta_a (x) alpha_a = 0, which for invertible
/// alpha has only the trivial solution, so beta is set to zero exactly.
inline ExtendedPhasePoint sample(std::uint64_t seed, std::size_t n, const Torus& torus,
                                 const SampleOptions& opts = {},
                                 const ValidationLimits& lim = {}) {
    if (n < 1) throw ValidationError("sample requires n >= 1");
    CounterRng rng(seed);
    ExtendedPhasePoint x;
    x.n = n;
    x.q.resize(n);
    x.p.resize(n);
    x.alpha = MatC(n, n);
    x.beta = MatC(n, n);

    const cplx tau = torus.curve().tau;
    for (std::size_t a = 0; a < n; ++a) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 256) throw ConvergenceError("could not place separated marked points");
            const double u = rng.uniform(-0.45, 0.45);
            const double v = rng.uniform(-0.45, 0.45);
            const cplx cand = u + v * tau;
            bool ok = torus.lattice_distance(cand) > lim.min_separation;
            for (std::size_t b = 0; b < a && ok; ++b)
                ok = torus.lattice_distance(cand - x.q[b]) > lim.min_separation;
            if (ok) {
                x.q[a] = cand;
                break;
            }
        }
    }

    for (std::size_t a = 0; a < n; ++a) x.p[a] = rng.complex_uniform(-1.0, 1.0);

    if (opts.on_gauge_slice) {
        x.alpha = MatC::identity(n);
    } else {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 64) throw ConvergenceError("could not draw a well-conditioned alpha");
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t i = 0; i < n; ++i) x.alpha(a, i) = rng.complex_uniform(-1.0, 1.0);
            try {
                if (cond_1(x.alpha) < std::min(lim.max_condition, 1e3)) break;
            } catch (const ValidationError&) {
                // singular draw: retry
            }
        }
    }

    if (!opts.on_moment_surface && n > 1) {
        for (std::size_t a = 0; a < n; ++a) {
            // pivot on the largest alpha component, solve orthogonality for it
            std::size_t piv = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (std::abs(x.alpha(a, i)) > std::abs(x.alpha(a, piv))) piv = i;
            cplx acc{};
            for (std::size_t i = 0; i < n; ++i) {
                if (i == piv) continue;
                x.beta(a, i) = rng.complex_uniform(-1.0, 1.0);
                acc += x.beta(a, i) * x.alpha(a, i);
            }
            x.beta(a, piv) = -acc / x.alpha(a, piv);
        }
    }
    // else: beta stays zero (n = 1 orthogonality, or the trivial nullspace of
    // the moment condition at invertible alpha)

    validate(x, torus, lim);
    return x;
}

}  // namespace ellax
