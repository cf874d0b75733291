#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/linalg.hpp"
#include "ellax/theta.hpp"

namespace ellax {

/// Prescribed singular part of a vector-valued elliptic differential at one
/// pole: order1[i] is the coefficient of 1/(z-pole) in component i, order2[i]
/// the coefficient of 1/(z-pole)^2. An empty order2 means no double pole.
struct SingularPart {
    cplx pole;
    std::vector<cplx> order1;
    std::vector<cplx> order2;
};

/// Assembled vector-valued elliptic differential
///   v(z) = sum_poles [ order1 * E(z-pole) - order2 * E'(z-pole) ] + h,
/// where E = theta'/theta (simple-pole atom, residue 1, regular value 0 at
/// its own pole) and -E' is the double-pole atom (leading term +1/(z-pole)^2,
/// zero residue, regular value -c1 at its own pole). Double periodicity holds
/// exactly because the residues sum to zero.
class EllipticDifferential {
  public:
    EllipticDifferential(const Torus& torus, std::vector<SingularPart> sing,
                         std::vector<cplx> constant, double residue_sum_tol = 1e-10)
        : torus_(&torus), sing_(std::move(sing)), h_(std::move(constant)) {
        dim_ = h_.size();
        double scale = 0.0;
        std::vector<cplx> res_sum(dim_);
        for (const auto& s : sing_) {
            if (s.order1.size() != dim_ || (!s.order2.empty() && s.order2.size() != dim_))
                throw ValidationError("singular part dimension mismatch");
            for (std::size_t i = 0; i < dim_; ++i) {
                res_sum[i] += s.order1[i];
                scale = std::max(scale, std::abs(s.order1[i]));
            }
        }
        for (std::size_t i = 0; i < dim_; ++i)
            if (std::abs(res_sum[i]) > residue_sum_tol * std::max(1.0, scale))
                throw ValidationError("residues do not sum to zero: no elliptic differential");
    }

    std::size_t dim() const { return dim_; }
    const std::vector<cplx>& constant_term() const { return h_; }
    std::vector<cplx>& constant_term() { return h_; }

    /// Full value away from the poles.
    std::vector<cplx> operator()(const cplx& z) const {
        std::vector<cplx> v = h_;
        for (const auto& s : sing_) {
            const cplx e = torus_->log_derivative_E(z - s.pole);
            for (std::size_t i = 0; i < dim_; ++i) v[i] += s.order1[i] * e;
            if (!s.order2.empty()) {
                const cplx ep = torus_->E_prime(z - s.pole);
                for (std::size_t i = 0; i < dim_; ++i) v[i] -= s.order2[i] * ep;
            }
        }
        return v;
    }

    /// Analytic regular value at `at`: atoms centered there contribute their
    /// exact expansion constants (0 for the simple-pole atom, -c1 for the
    /// double-pole atom) instead of being evaluated. Never differences
    /// nearly-equal large values.
    std::vector<cplx> regular_value_at(const cplx& at) const {
        const double guard = torus_->control().pole_guard;
        std::vector<cplx> v = h_;
        for (const auto& s : sing_) {
            if (torus_->lattice_distance(at - s.pole) < guard) {
                if (!s.order2.empty()) {
                    const cplx c1 = torus_->c1();
                    for (std::size_t i = 0; i < dim_; ++i) v[i] -= s.order2[i] * c1;
                }
                continue;  // simple-pole atom has regular value 0 at its pole
            }
            const cplx e = torus_->log_derivative_E(at - s.pole);
            for (std::size_t i = 0; i < dim_; ++i) v[i] += s.order1[i] * e;
            if (!s.order2.empty()) {
                const cplx ep = torus_->E_prime(at - s.pole);
                for (std::size_t i = 0; i < dim_; ++i) v[i] -= s.order2[i] * ep;
            }
        }
        return v;
    }

  private:
    const Torus* torus_;
    std::vector<SingularPart> sing_;
    std::vector<cplx> h_;
    std::size_t dim_ = 0;
};

/// Assemble a differential with the given singular parts and constant term.
inline EllipticDifferential build_differential(const Torus& torus,
                                               std::vector<SingularPart> sing,
                                               std::vector<cplx> constant) {
    return EllipticDifferential(torus, std::move(sing), std::move(constant));
}

/// Data of one interpolation problem: prescribed singular parts plus the
/// conditions  sum_i alpha_a^i * (regular value of v_i at q_a) = b_a.
struct KricheverProblem {
    std::vector<SingularPart> sing;
    MatC alpha;           // rows alpha_a
    std::vector<cplx> q;  // contraction points q_a
    std::vector<cplx> b;  // right-hand sides b_a
};

/// Condition number of the linear system matrix; on the torus the holomorphic
/// basis is the constant differential, so the matrix is alpha itself.
inline double m_condition(const MatC& alpha) {
    try {
        return cond_1(alpha);
    } catch (const ValidationError&) {
        return std::numeric_limits<double>::infinity();
    }
}

/// Uniqueness-based solver: the singular assembly is fixed by the data, and
/// the only remaining freedom on the torus is the constant vector h, pinned
/// by the n contraction conditions through one dense linear solve.
inline EllipticDifferential solve_krichever(const Torus& torus, const KricheverProblem& prob) {
    const std::size_t n = prob.q.size();
    if (prob.alpha.rows() != n || prob.alpha.cols() != n || prob.b.size() != n)
        throw ValidationError("Krichever problem dimension mismatch");
    EllipticDifferential v(torus, prob.sing, std::vector<cplx>(n));
    std::vector<cplx> rhs(n);
    for (std::size_t a = 0; a < n; ++a) {
        const auto reg = v.regular_value_at(prob.q[a]);
        cplx contraction{};
        for (std::size_t i = 0; i < n; ++i) contraction += prob.alpha(a, i) * reg[i];
        rhs[a] = prob.b[a] - contraction;
    }
    const std::vector<cplx> h = lu_solve(prob.alpha, rhs);
    v.constant_term() = h;
    return v;
}

}  // namespace ellax
