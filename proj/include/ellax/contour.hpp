#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/linalg.hpp"

namespace ellax {

/// Node policy for trapezoidal contour quadrature. The node count doubles
/// until two successive levels agree to rel_tolerance (trapezoid sums on a
/// circle converge geometrically for analytic integrands).
struct QuadratureControl {
    int min_nodes = 32;
    int max_nodes = 512;
    double rel_tolerance = 1e-9;
};

/// Laurent coefficients c_m, m = low..high, of a matrix-valued function f
/// about `center`, via c_m = (1/N) sum_j f(center + r e^{i phi_j}) (r e^{i phi_j})^{-m}.
/// `f` maps cplx -> Matrix<cplx>. Never differences nearly-equal values:
/// regular parts at a pole come out of the same quadrature as the residue.
template <class F>
std::vector<MatC> laurent_coefficients(F&& f, const cplx& center, double radius,
                                       int low, int high,
                                       const QuadratureControl& ctrl = {}) {
    if (!(radius > 0.0)) throw ValidationError("contour radius must be positive");
    if (high < low) throw ValidationError("empty Laurent coefficient range");

    const std::size_t n_coeff = std::size_t(high - low + 1);
    std::vector<MatC> prev;
    for (int nodes = ctrl.min_nodes; nodes <= ctrl.max_nodes; nodes *= 2) {
        std::vector<MatC> coeff(n_coeff);
        bool sized = false;
        for (int j = 0; j < nodes; ++j) {
            const double phi = 2.0 * pi * double(j) / double(nodes);
            const cplx u = radius * std::exp(iu * phi);  // z - center on the circle
            const MatC val = f(center + u);
            if (!sized) {
                for (auto& c : coeff) c = MatC(val.rows(), val.cols());
                sized = true;
            }
            // powers u^{-m} for m = low..high, built incrementally
            cplx upow = std::pow(u, -low);
            const cplx ustep = 1.0 / u;
            for (std::size_t t = 0; t < n_coeff; ++t) {
                for (std::size_t r = 0; r < val.rows(); ++r)
                    for (std::size_t c = 0; c < val.cols(); ++c)
                        coeff[t](r, c) += val(r, c) * upow;
                upow *= ustep;
            }
        }
        double scale = 0.0;
        for (auto& c : coeff) {
            c *= cplx(1.0 / double(nodes), 0.0);
            scale = std::max(scale, max_abs(c));
        }
        if (!prev.empty()) {
            double diff = 0.0;
            for (std::size_t t = 0; t < n_coeff; ++t) diff = std::max(diff, max_abs(coeff[t] - prev[t]));
            if (diff <= ctrl.rel_tolerance * std::max(1.0, scale)) return coeff;
        }
        prev = std::move(coeff);
    }
    throw ConvergenceError("contour quadrature did not converge within max_nodes");
}

/// Scalar convenience wrapper.
template <class F>
std::vector<cplx> laurent_coefficients_scalar(F&& f, const cplx& center, double radius,
                                              int low, int high,
                                              const QuadratureControl& ctrl = {}) {
    auto wrap = [&f](const cplx& z) {
        MatC m(1, 1);
        m(0, 0) = f(z);
        return m;
    };
    auto mats = laurent_coefficients(wrap, center, radius, low, high, ctrl);
    std::vector<cplx> out(mats.size());
    for (std::size_t t = 0; t < mats.size(); ++t) out[t] = mats[t](0, 0);
    return out;
}

}  // namespace ellax
