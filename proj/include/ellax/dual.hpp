#pragma once

#include <cmath>
#include <complex>

#include "ellax/common.hpp"

namespace ellax {

/// First-order Taylor scalar a + b*eps with eps^2 = 0 over a complex base
/// type. Seeding b = 1 on one input propagates the exact holomorphic
/// derivative through any composition of arithmetic, exp, log, sqrt, pow.
template <class T>
struct Dual {
    T v{};  // value
    T d{};  // derivative

    Dual() = default;
    Dual(const T& value) : v(value) {}  // NOLINT: constants lift with d = 0
    Dual(double value) : v(value) {}    // NOLINT
    Dual(const T& value, const T& deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = v * o.d + d * o.v; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) {
        d = (d * o.v - v * o.d) / (o.v * o.v);
        v /= o.v;
        return *this;
    }
};

using DualC = Dual<cplx>;

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a) { return a; }

// mixed scalar forms
template <class T> Dual<T> operator+(Dual<T> a, const T& b) { a.v += b; return a; }
template <class T> Dual<T> operator+(const T& b, Dual<T> a) { a.v += b; return a; }
template <class T> Dual<T> operator-(Dual<T> a, const T& b) { a.v -= b; return a; }
template <class T> Dual<T> operator-(const T& b, const Dual<T>& a) { return {b - a.v, -a.d}; }
template <class T> Dual<T> operator*(Dual<T> a, const T& b) { a.v *= b; a.d *= b; return a; }
template <class T> Dual<T> operator*(const T& b, Dual<T> a) { a.v *= b; a.d *= b; return a; }
template <class T> Dual<T> operator/(Dual<T> a, const T& b) { a.v /= b; a.d /= b; return a; }
template <class T> Dual<T> operator/(const T& b, const Dual<T>& a) { return Dual<T>(b) / a; }
template <class T> Dual<T> operator+(Dual<T> a, double b) { a.v += b; return a; }
template <class T> Dual<T> operator+(double b, Dual<T> a) { a.v += b; return a; }
template <class T> Dual<T> operator-(Dual<T> a, double b) { a.v -= b; return a; }
template <class T> Dual<T> operator-(double b, const Dual<T>& a) { return {T(b) - a.v, -a.d}; }
template <class T> Dual<T> operator*(Dual<T> a, double b) { a.v *= b; a.d *= b; return a; }
template <class T> Dual<T> operator*(double b, Dual<T> a) { a.v *= b; a.d *= b; return a; }
template <class T> Dual<T> operator/(Dual<T> a, double b) { a.v /= b; a.d /= b; return a; }
template <class T> Dual<T> operator/(double b, const Dual<T>& a) { return Dual<T>(T(b)) / a; }

template <class T> Dual<T> exp(const Dual<T>& x) {
    using std::exp;
    const T e = exp(x.v);
    return {e, e * x.d};
}

template <class T> Dual<T> log(const Dual<T>& x) {
    using std::log;
    return {log(x.v), x.d / x.v};
}

template <class T> Dual<T> sqrt(const Dual<T>& x) {
    using std::sqrt;
    const T s = sqrt(x.v);
    return {s, x.d / (2.0 * s)};
}

/// Principal-branch power with a constant real exponent.
template <class T> Dual<T> pow(const Dual<T>& x, double e) {
    using std::exp;
    using std::log;
    const T p = exp(e * log(x.v));
    return {p, e * p / x.v * x.d};
}

// value/derivative access that also works on plain scalars, so generic code
// does not need to know whether it runs on cplx or Dual<cplx>.
inline cplx value_of(const cplx& x) { return x; }
inline double value_of(double x) { return x; }
template <class T> T value_of(const Dual<T>& x) { return x.v; }
template <class T> T deriv_of(const Dual<T>& x) { return x.d; }

inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const cplx& x) { return std::abs(x); }
template <class T> double abs_of(const Dual<T>& x) { return abs_of(x.v); }

}  // namespace ellax
