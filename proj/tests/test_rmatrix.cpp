#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ellax/contour.hpp"
#include "ellax/phase_space.hpp"
#include "ellax/rmatrix.hpp"
#include "ellax/theta.hpp"

using namespace ellax;

namespace {
const Torus& torus() {
    static const Torus t({{0.0, 2.0}});
    return t;
}
}  // namespace

TEST_CASE("dual holomorphic basis is normalized against the Tyurin vectors") {
    const auto x = sample(2, 3, torus());
    const HoloBasis hb = holo_basis(x.alpha);
    for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t a = 0; a < 3; ++a) {
            cplx dot{};
            for (std::size_t k = 0; k < 3; ++k) dot += x.alpha(b, k) * hb.pi(k, a);
            const cplx want = (a == b) ? cplx(1.0) : cplx(0.0);
            REQUIRE(std::abs(dot - want) <= 1e-12);
        }
}

TEST_CASE("degenerate Tyurin vectors admit no dual basis") {
    MatC sing(2, 2);
    sing(0, 0) = sing(0, 1) = cplx(1.0);
    sing(1, 0) = sing(1, 1) = cplx(1.0);
    REQUIRE_THROWS_AS(holo_basis(sing), ValidationError);
    // a conditioning cap can also reject a technically invertible matrix
    REQUIRE_THROWS_AS(holo_basis(MatC::identity(2), 0.5), ValidationError);
}

TEST_CASE("kernel annihilates the Tyurin vector at its marked point") {
    const auto x = sample(6, 2, torus());
    const cplx z{0.37, 0.73};
    for (std::size_t a = 0; a < 2; ++a) {
        const MatC r = r_scalar(torus(), x, z, x.q[a]);
        for (std::size_t j = 0; j < 2; ++j) {
            cplx dot{};
            for (std::size_t k = 0; k < 2; ++k) dot += r(j, k) * x.alpha(a, k);
            REQUIRE(std::abs(dot) <= 1e-12 * std::max(1.0, max_abs(r)));
        }
    }
}

TEST_CASE("kernel vanishes at the distinguished point in z") {
    const auto x = sample(10, 2, torus());
    const MatC r = r_scalar(torus(), x, cplx{0.0, 0.0}, cplx{0.11, 0.62});
    REQUIRE(max_abs(r) <= 1e-12);
}

TEST_CASE("w-poles carry unit residues of opposite sign") {
    const auto x = sample(14, 2, torus());
    const cplx z{0.41, 0.87};
    const double rad = 0.2 * torus().lattice_distance(z);
    auto at_z = laurent_coefficients([&](const cplx& w) { return r_scalar(torus(), x, z, w); },
                                     z, rad, -1, -1);
    auto at_0 = laurent_coefficients([&](const cplx& w) { return r_scalar(torus(), x, z, w); },
                                     cplx{0.0, 0.0}, rad, -1, -1);
    REQUIRE(max_abs(at_z[0] + MatC::identity(2)) <= 1e-10);
    REQUIRE(max_abs(at_0[0] - MatC::identity(2)) <= 1e-10);
}

TEST_CASE("z-residue at a marked point factors through the dual basis") {
    const auto x = sample(18, 2, torus());
    const HoloBasis hb = holo_basis(x.alpha);
    const cplx w{0.23, 1.31};
    for (std::size_t a = 0; a < 2; ++a) {
        const RLaurent rl = r_laurent_in_z(torus(), x, a, w);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k) {
                const cplx want = -x.alpha(a, j) * hb.pi(k, a);
                REQUIRE(std::abs(rl.res(j, k) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
            }
    }
}

TEST_CASE("Laurent coefficients annihilate the other Tyurin vectors") {
    const auto x = sample(22, 2, torus());
    // expansion in z at q_0; the kernel evaluated at w = q_1 must keep
    // annihilating alpha_1 order by order
    const RLaurent rl = r_laurent_in_z(torus(), x, 0, x.q[1]);
    for (const MatC* m : {&rl.r0, &rl.r1})
        for (std::size_t j = 0; j < 2; ++j) {
            cplx dot{};
            for (std::size_t k = 0; k < 2; ++k) dot += (*m)(j, k) * x.alpha(1, k);
            REQUIRE(std::abs(dot) <= 1e-8 * std::max(1.0, max_abs(*m)));
        }
}

TEST_CASE("tensor form places the kernel on the delta slice") {
    const auto x = sample(26, 2, torus());
    const cplx z{0.31, 0.57}, w{-0.22, 0.95};
    const MatC r = r_scalar(torus(), x, z, w);
    const Tensor4 t = r_tensor(torus(), x, z, w);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) {
                    const cplx want = (l == i) ? r(j, k) : cplx(0.0);
                    REQUIRE(t(i, j, k, l) == want);
                }
}

TEST_CASE("the two index readings genuinely differ") {
    const auto x = sample(30, 2, torus());
    const cplx z{0.29, 0.64}, w{0.52, 1.18};
    const MatC rp = r_scalar(torus(), x, z, w, RIndexReading::primary);
    const MatC rt = r_scalar(torus(), x, z, w, RIndexReading::transposed);
    REQUIRE(max_abs(rp - rt) > 1e-3);
    // and the transposed reading breaks the null-vector identity
    const MatC rq = r_scalar(torus(), x, z, x.q[0], RIndexReading::transposed);
    double worst = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        cplx dot{};
        for (std::size_t k = 0; k < 2; ++k) dot += rq(j, k) * x.alpha(0, k);
        worst = std::max(worst, std::abs(dot));
    }
    REQUIRE(worst > 1e-3);
}

TEST_CASE("z-Laurent guards its contour") {
    const auto x = sample(34, 2, torus());
    REQUIRE_THROWS_AS(r_laurent_in_z(torus(), x, 5, cplx{0.2, 0.3}), ValidationError);
    REQUIRE_THROWS_AS(r_laurent_in_z(torus(), x, 0, cplx{0.2, 0.3}, 10.0), ValidationError);
    REQUIRE_THROWS_AS(r_laurent_in_z(torus(), x, 0, cplx{0.2, 0.3}, 1e-13), ValidationError);
}
