#pragma once

#include <cmath>
#include <cstdint>

#include "ellax/common.hpp"
#include "ellax/dual.hpp"

namespace ellax {

/// Lattice modulus of the torus C/{1, tau}.
struct CurveModulus {
    cplx tau;
};

/// Truncation policy for the theta series plus the guard distance below
/// which ratio evaluations (E, E', Lax kernels) refuse to divide by theta.
struct SeriesControl {
    double term_tolerance = 1e-16;
    int max_terms = 64;
    double pole_guard = 1e-8;
};

/// Result of argument reduction z = z0 + m + k*tau with both lattice
/// coordinates of z0 in [-1/2, 1/2).
struct LatticeReduction {
    cplx z0;
    long m = 0;
    long k = 0;
};

/// Odd Jacobi-type theta function, its z-derivatives, and the logarithmic
/// derivative E(z) = theta'(z)/theta(z) on C/{1, tau}.
///
/// Series definition:
///   theta(z) = sum_{m in Z} exp(pi*i*tau*(m+1/2)^2 + 2*pi*i*(m+1/2)*(z+1/2))
///
/// Every evaluation reduces its argument to the fundamental cell first and
/// reapplies the exact quasi-periodicity multiplier
///   theta(z0 + m + k*tau) = (-1)^(m+k) exp(-pi*i*tau*k^2 - 2*pi*i*k*z0) theta(z0),
/// so relative accuracy is flat across the plane.
class Torus {
  public:
    explicit Torus(CurveModulus curve, SeriesControl ctrl = {})
        : curve_(curve), ctrl_(ctrl) {
        if (!(curve_.tau.imag() > 0.0))
            throw ValidationError("curve modulus requires Im(tau) > 0");
        if (!(ctrl_.term_tolerance > 0.0) || ctrl_.max_terms < 8)
            throw ValidationError("series control requires term_tolerance > 0 and max_terms >= 8");
        theta_prime0_ = series_deriv(cplx{0.0, 0.0}, 1);
        c1_ = series_deriv(cplx{0.0, 0.0}, 3) / (3.0 * theta_prime0_);
    }

    const CurveModulus& curve() const { return curve_; }
    const SeriesControl& control() const { return ctrl_; }

    /// theta'(0), the normalization that enters the Lax kernel numerators.
    cplx theta_prime0() const { return theta_prime0_; }

    /// Coefficient c1 in the local expansion E(x) = 1/x + c1*x + O(x^3);
    /// equals theta'''(0) / (3*theta'(0)).
    cplx c1() const { return c1_; }

    LatticeReduction reduce(const cplx& z) const {
        const double im_tau = curve_.tau.imag();
        const double y = z.imag() / im_tau;
        const long k = static_cast<long>(std::floor(y + 0.5));
        const double x = z.real() - y * curve_.tau.real();
        const long m = static_cast<long>(std::floor(x + 0.5));
        LatticeReduction red;
        red.m = m;
        red.k = k;
        red.z0 = z - cplx(double(m), 0.0) - double(k) * curve_.tau;
        return red;
    }

    /// Distance from z to the nearest lattice point (theta zero).
    double lattice_distance(const cplx& z) const {
        const cplx z0 = reduce(z).z0;
        double best = std::abs(z0);
        for (int dm = -1; dm <= 1; ++dm)
            for (int dk = -1; dk <= 1; ++dk) {
                const cplx lp = cplx(double(dm), 0.0) + double(dk) * curve_.tau;
                best = std::min(best, std::abs(z0 - lp));
            }
        return best;
    }

    template <class S>
    S theta(const S& z) const {
        const LatticeReduction red = reduce(value_of(z));
        const S z0 = reduced_arg(z, red);
        return multiplier(z0, red) * series(z0, 0);
    }

    template <class S>
    S theta_prime(const S& z) const {
        const LatticeReduction red = reduce(value_of(z));
        const S z0 = reduced_arg(z, red);
        // d/dz of multiplier(z)*series(z0): the multiplier contributes -2*pi*i*k.
        const cplx shift = -two_pi_i * double(red.k);
        return multiplier(z0, red) * (series(z0, 1) + shift * series(z0, 0));
    }

    /// E(z) = theta'(z)/theta(z); shifts by -2*pi*i*k under z -> z + k*tau.
    template <class S>
    S log_derivative_E(const S& z) const {
        const LatticeReduction red = reduce(value_of(z));
        guard_pole(red.z0);
        const S z0 = reduced_arg(z, red);
        return series(z0, 1) / series(z0, 0) - two_pi_i * double(red.k);
    }

    /// E'(z) = theta''(z)/theta(z) - E(z)^2; doubly periodic with a double
    /// pole +1/x^2 on the lattice (so -E' matches the second-order kernel
    /// used by the meromorphic solver).
    template <class S>
    S E_prime(const S& z) const {
        const LatticeReduction red = reduce(value_of(z));
        guard_pole(red.z0);
        const S z0 = reduced_arg(z, red);
        const S th = series(z0, 0);
        const S e = series(z0, 1) / th;
        return series(z0, 2) / th - e * e;
    }

  private:
    template <class S>
    static S reduced_arg(const S& z, const LatticeReduction& red) {
        return z - value_of(z) + red.z0;  // keeps any derivative payload of z
    }

    void guard_pole(const cplx& z0) const {
        double best = std::abs(z0);
        for (int dm = -1; dm <= 1 && best >= ctrl_.pole_guard; ++dm)
            for (int dk = -1; dk <= 1; ++dk) {
                const cplx lp = cplx(double(dm), 0.0) + double(dk) * curve_.tau;
                best = std::min(best, std::abs(z0 - lp));
            }
        if (best < ctrl_.pole_guard)
            throw PoleProximityError("evaluation within pole guard of a lattice point");
    }

    /// Quasi-periodicity multiplier as a function of the reduced argument.
    template <class S>
    S multiplier(const S& z0, const LatticeReduction& red) const {
        const double sign = ((red.m + red.k) % 2 != 0) ? -1.0 : 1.0;
        if (red.k == 0) return S(sign);
        const cplx c = -pi * iu * curve_.tau * double(red.k) * double(red.k);
        return sign * exp(c - two_pi_i * double(red.k) * z0);
    }

    /// deriv-th term-differentiated series at an already reduced argument.
    template <class S>
    S series(const S& z0, int deriv) const {
        const cplx pit = pi * iu * curve_.tau;
        S sum{};
        double scale = 0.0;
        int quiet = 0;
        for (int j = 0; j < ctrl_.max_terms; ++j) {
            double pair_mag = 0.0;
            for (const double r : {j + 0.5, -(j + 0.5)}) {
                S term = exp(pit * (r * r) + two_pi_i * r * (z0 + 0.5));
                for (int d = 0; d < deriv; ++d) term *= two_pi_i * r;
                sum += term;
                pair_mag = std::max(pair_mag, abs_of(term));
            }
            scale = std::max(scale, pair_mag);
            if (j >= 1 && pair_mag < ctrl_.term_tolerance * std::max(1.0, scale)) {
                if (++quiet >= 2) return sum;
            } else {
                quiet = 0;
            }
        }
        throw ConvergenceError("theta series did not converge within max_terms");
    }

    cplx series_deriv(const cplx& z0, int deriv) const { return series(z0, deriv); }

    CurveModulus curve_;
    SeriesControl ctrl_;
    cplx theta_prime0_{};
    cplx c1_{};
};

}  // namespace ellax
