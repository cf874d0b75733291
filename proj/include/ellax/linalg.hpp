#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/dual.hpp"

namespace ellax {

/// Dense row-major square/rectangular matrix over an arbitrary scalar
/// (cplx or Dual<cplx>). Sizes stay tiny (rank of the bundle, <= 8), so a
/// hand-rolled partial-pivot LU is both adequate and lets forward-mode
/// derivative scalars flow through inversion unchanged.
template <class T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Matrix& operator+=(const Matrix& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Matrix& operator*=(const T& s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ValidationError("matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    T trace() const {
        T s{};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
        return s;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

using MatC = Matrix<cplx>;
using MatD = Matrix<DualC>;

namespace detail {

/// In-place LU with partial pivoting; pivot choice keys on |value part| so the
/// factorisation is identical whether or not derivative payloads ride along.
template <class T>
struct Lu {
    Matrix<T> lu;
    std::vector<std::size_t> perm;
    int sign = 1;

    explicit Lu(Matrix<T> m) : lu(std::move(m)), perm(lu.rows()) {
        const std::size_t n = lu.rows();
        if (lu.cols() != n) throw ValidationError("LU requires a square matrix");
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            double best = abs_of(lu(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double cand = abs_of(lu(i, k));
                if (cand > best) { best = cand; p = i; }
            }
            if (best == 0.0) throw ValidationError("singular matrix in LU factorisation");
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
                std::swap(perm[k], perm[p]);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                lu(i, k) /= lu(k, k);
                const T& lik = lu(i, k);
                for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= lik * lu(k, j);
            }
        }
    }

    std::vector<T> solve(const std::vector<T>& b) const {
        const std::size_t n = lu.rows();
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
            x[i] /= lu(i, i);
        }
        return x;
    }

    T det() const {
        T d = T(double(sign));
        for (std::size_t i = 0; i < lu.rows(); ++i) d *= lu(i, i);
        return d;
    }
};

}  // namespace detail

template <class T>
std::vector<T> lu_solve(const Matrix<T>& a, const std::vector<T>& b) {
    return detail::Lu<T>(a).solve(b);
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
    const std::size_t n = a.rows();
    detail::Lu<T> f(a);
    Matrix<T> inv(n, n);
    std::vector<T> e(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), T{});
        e[j] = T(1.0);
        auto col = f.solve(e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

template <class T>
T determinant(const Matrix<T>& a) {
    return detail::Lu<T>(a).det();
}

template <class T>
Matrix<T> commutator(const Matrix<T>& a, const Matrix<T>& b) {
    return a * b - b * a;
}

inline double max_abs(double x) { return std::abs(x); }
inline double max_abs(const cplx& x) { return std::abs(x); }
template <class T> double max_abs(const Dual<T>& x) { return abs_of(x); }

template <class T>
double max_abs(const Matrix<T>& m) {
    double w = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) w = std::max(w, abs_of(m(i, j)));
    return w;
}

/// 1-norm condition estimate via explicit inverse; fine at these sizes.
inline double one_norm(const MatC& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

inline double cond_1(const MatC& m) { return one_norm(m) * one_norm(inverse(m)); }

/// Rank-4 array of complex entries with (i,j,k,l) addressing; used for the
/// bracket table {L_ij(z), L_kl(w)} and the classical-exchange right side.
class Tensor4 {
  public:
    Tensor4() = default;
    explicit Tensor4(std::size_t n) : n_(n), a_(n * n * n * n) {}

    std::size_t dim() const { return n_; }

    cplx& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return a_[((i * n_ + j) * n_ + k) * n_ + l];
    }
    const cplx& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return a_[((i * n_ + j) * n_ + k) * n_ + l];
    }

    Tensor4& operator-=(const Tensor4& o) {
        for (std::size_t t = 0; t < a_.size(); ++t) a_[t] -= o.a_[t];
        return *this;
    }
    Tensor4& operator+=(const Tensor4& o) {
        for (std::size_t t = 0; t < a_.size(); ++t) a_[t] += o.a_[t];
        return *this;
    }
    friend Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
    friend Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }

    /// Swap the two tensor legs: out(i,j,k,l) = in(k,l,i,j).
    Tensor4 legs_swapped() const {
        Tensor4 t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t k = 0; k < n_; ++k)
                    for (std::size_t l = 0; l < n_; ++l) t(i, j, k, l) = (*this)(k, l, i, j);
        return t;
    }

    friend double max_abs(const Tensor4& t) {
        double w = 0.0;
        for (const auto& x : t.a_) w = std::max(w, std::abs(x));
        return w;
    }

  private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

}  // namespace ellax
