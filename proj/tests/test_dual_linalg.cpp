#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ellax/dual.hpp"
#include "ellax/linalg.hpp"
#include "ellax/rng.hpp"

using namespace ellax;

namespace {

// forward-mode derivative of f at z, via f(Dual(z, 1))
template <class F>
cplx dual_deriv(F&& f, const cplx& z) {
    return f(DualC{z, cplx(1.0)}).d;
}

// central finite difference for the cross-check
template <class F>
cplx fd_deriv(F&& f, const cplx& z, double h = 1e-6) {
    return (f(DualC{z + cplx(h)}).v - f(DualC{z - cplx(h)}).v) / (2.0 * h);
}

MatC random_matrix(CounterRng& rng, std::size_t n) {
    MatC m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.complex_uniform(-1.0, 1.0);
    return m;
}

}  // namespace

TEST_CASE("dual arithmetic differentiates elementary expressions") {
    const cplx z{0.7, -0.3};
    auto check = [&](auto f) {
        REQUIRE(std::abs(dual_deriv(f, z) - fd_deriv(f, z)) <= 1e-8);
    };
    check([](const DualC& x) { return x * x * x + 2.0 * x - DualC(1.5); });
    check([](const DualC& x) { return exp(x) * x; });
    check([](const DualC& x) { return log(x + DualC(2.0)); });
    check([](const DualC& x) { return sqrt(x + DualC(2.0)); });
    check([](const DualC& x) { return pow(x + DualC(2.0), -1.0 / 3.0); });
    check([](const DualC& x) { return DualC(1.0) / (x + DualC(2.0)); });
    check([](const DualC& x) { return (x - 0.5) * (2.0 - x) / (x + DualC(3.0)); });
}

TEST_CASE("dual helpers expose value and derivative parts") {
    const DualC d{cplx{1.0, 2.0}, cplx{3.0, 4.0}};
    REQUIRE(value_of(d) == cplx(1.0, 2.0));
    REQUIRE(deriv_of(d) == cplx(3.0, 4.0));
    REQUIRE(abs_of(d) == std::abs(cplx(1.0, 2.0)));
    REQUIRE(value_of(cplx{5.0, 6.0}) == cplx(5.0, 6.0));
    REQUIRE(value_of(7.0) == 7.0);
}

TEST_CASE("LU inversion, solve, and determinant") {
    CounterRng rng(3);
    for (std::size_t n : {1u, 2u, 3u, 5u}) {
        const MatC a = random_matrix(rng, n);
        const MatC inv = inverse(a);
        REQUIRE(max_abs(a * inv - MatC::identity(n)) <= 1e-12);
        REQUIRE(max_abs(inv * a - MatC::identity(n)) <= 1e-12);

        std::vector<cplx> b(n);
        for (auto& v : b) v = rng.complex_uniform(-1.0, 1.0);
        const auto x = lu_solve(a, b);
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc{};
            for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * x[j];
            REQUIRE(std::abs(acc - b[i]) <= 1e-12);
        }

        // det via product of eigen-free identity: det(a) * det(inv) = 1
        REQUIRE(std::abs(determinant(a) * determinant(inv) - 1.0) <= 1e-10);
    }

    MatC singular(2, 2);
    singular(0, 0) = 1.0;
    singular(0, 1) = 2.0;
    singular(1, 0) = 2.0;
    singular(1, 1) = 4.0;
    REQUIRE_THROWS_AS(inverse(singular), ValidationError);
    REQUIRE_THROWS_AS(determinant(singular), ValidationError);
}

TEST_CASE("derivative payloads flow through inversion") {
    // d/dt det(A + tB) at t=0 equals det(A) tr(A^{-1} B)
    CounterRng rng(5);
    const MatC a = random_matrix(rng, 3);
    const MatC b = random_matrix(rng, 3);
    MatD ad(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) ad(i, j) = DualC{a(i, j), b(i, j)};
    const DualC det = determinant(ad);
    const cplx want = determinant(a) * (inverse(a) * b).trace();
    REQUIRE(std::abs(det.d - want) <= 1e-11 * std::max(1.0, std::abs(want)));
    REQUIRE(std::abs(det.v - determinant(a)) <= 1e-12);
}

TEST_CASE("matrix utilities") {
    CounterRng rng(9);
    const MatC a = random_matrix(rng, 3);
    const MatC b = random_matrix(rng, 3);
    REQUIRE(max_abs(commutator(a, b) + commutator(b, a)) <= 1e-14);
    REQUIRE(std::abs(a.transposed()(0, 2) - a(2, 0)) == 0.0);
    REQUIRE(std::abs(cond_1(MatC::identity(4)) - 1.0) <= 1e-14);
    REQUIRE(cond_1(a) >= 1.0);

    MatC bad(2, 3);
    REQUIRE_THROWS_AS(bad * bad, ValidationError);
    REQUIRE_THROWS_AS(detail::Lu<cplx>(bad), ValidationError);
}

TEST_CASE("four-index tensor operations") {
    Tensor4 t(2);
    t(0, 1, 1, 0) = cplx(2.0, 1.0);
    t(1, 0, 0, 1) = cplx(-1.0, 0.5);
    const Tensor4 s = t.legs_swapped();
    REQUIRE(s(1, 0, 0, 1) == t(0, 1, 1, 0));
    REQUIRE(max_abs(s.legs_swapped() - t) == 0.0);
    REQUIRE(max_abs(t - t) == 0.0);
    REQUIRE(max_abs(t + t) == 2.0 * max_abs(t));
}

TEST_CASE("counter rng is deterministic and in range") {
    CounterRng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        REQUIRE(x == b.uniform());
    }
    REQUIRE(a.uniform() != c.uniform());

    const double lo = -2.0, hi = 3.0;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform(lo, hi);
        REQUIRE(x >= lo);
        REQUIRE(x < hi);
    }
    const cplx z = a.complex_uniform(-1.0, 1.0);
    REQUIRE(std::abs(z.real()) <= 1.0);
    REQUIRE(std::abs(z.imag()) <= 1.0);
    REQUIRE(a.draws() > 0);
}
