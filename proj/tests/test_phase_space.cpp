#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ellax/lax.hpp"
#include "ellax/phase_space.hpp"
#include "ellax/rng.hpp"
#include "ellax/theta.hpp"

using namespace ellax;

namespace {
const Torus& torus() {
    static const Torus t({{0.0, 1.0}});
    return t;
}
}  // namespace

TEST_CASE("sampler is deterministic and satisfies the invariants") {
    const auto x = sample(17, 3, torus());
    const auto y = sample(17, 3, torus());
    REQUIRE(x.n == 3);
    for (std::size_t a = 0; a < 3; ++a) {
        REQUIRE(x.q[a] == y.q[a]);
        REQUIRE(x.p[a] == y.p[a]);
        for (std::size_t i = 0; i < 3; ++i) {
            REQUIRE(x.alpha(a, i) == y.alpha(a, i));
            REQUIRE(x.beta(a, i) == y.beta(a, i));
        }
    }
    REQUIRE_NOTHROW(validate(x, torus()));
    const auto z = sample(18, 3, torus());
    REQUIRE(z.q[0] != x.q[0]);
}

TEST_CASE("surface and slice sampling") {
    const auto xm = sample(5, 2, torus(), {.on_moment_surface = true});
    REQUIRE(max_abs(moment_map(xm)) == 0.0);
    REQUIRE(max_abs(xm.beta) == 0.0);

    const auto xs = sample(5, 2, torus(), {.on_gauge_slice = true});
    REQUIRE(max_abs(xs.alpha - MatC::identity(2)) == 0.0);
    REQUIRE_NOTHROW(validate(xs, torus()));
    // identity alpha forces the diagonal beta components to vanish
    for (std::size_t a = 0; a < 2; ++a) REQUIRE(xs.beta(a, a) == cplx(0.0));
}

TEST_CASE("validation rejects malformed points") {
    auto x = sample(7, 2, torus());

    auto broken = x;
    broken.beta(0, 0) += cplx(0.1);
    try {
        validate(broken, torus());
        FAIL("orthogonality violation not caught");
    } catch (const ValidationError& e) {
        REQUIRE(e.point_index == 0);
    }

    auto collide = x;
    collide.q[1] = collide.q[0] + cplx(1e-6, 0.0);
    REQUIRE_THROWS_AS(validate(collide, torus()), ValidationError);
    // coincidence modulo the lattice is also caught
    collide.q[1] = collide.q[0] + cplx(1.0, 1.0) + cplx(1e-6, 0.0);
    REQUIRE_THROWS_AS(validate(collide, torus()), ValidationError);

    auto degenerate = x;
    for (std::size_t i = 0; i < 2; ++i) degenerate.alpha(1, i) = degenerate.alpha(0, i);
    degenerate.beta = MatC(2, 2);
    REQUIRE_THROWS_AS(validate(degenerate, torus()), ValidationError);

    auto mis = x;
    mis.q.pop_back();
    REQUIRE_THROWS_AS(validate(mis, torus()), ValidationError);
}

TEST_CASE("group action and rescaling preserve structure") {
    const auto x = sample(11, 2, torus());

    MatC g(2, 2);  // unimodular by construction
    g(0, 0) = cplx(2.0, 0.0);
    g(0, 1) = cplx(0.3, 0.1);
    g(1, 0) = cplx(0.0);
    g(1, 1) = cplx(0.5, 0.0);
    REQUIRE(std::abs(determinant(g) - cplx(1.0)) <= 1e-15);

    const auto y = gauge_act(x, g);
    REQUIRE_NOTHROW(validate(y, torus()));
    // moment map transforms by conjugation
    const MatC want = g * moment_map(x) * inverse(g);
    REQUIRE(max_abs(moment_map(y) - want) <= 1e-12 * std::max(1.0, max_abs(want)));

    MatC notsl = g;
    notsl(0, 0) *= 2.0;
    REQUIRE_THROWS_AS(gauge_act(x, notsl), ValidationError);

    const auto r = rescale(x, 1, cplx(2.0, -1.0));
    REQUIRE_NOTHROW(validate(r, torus()));
    REQUIRE(max_abs(moment_map(r) - moment_map(x)) <= 1e-13);
    REQUIRE_THROWS_AS(rescale(x, 0, cplx(0.0)), ValidationError);
    REQUIRE_THROWS_AS(rescale(x, 5, cplx(1.0)), ValidationError);
}

TEST_CASE("chart layout pairs conjugate coordinates") {
    const Chart c = Chart::uniform(3, 1);
    const CoordLayout lay = CoordLayout::build(3, c);
    REQUIRE(lay.size() == 18);
    REQUIRE(lay.pair_count() == 9);
    for (std::size_t t = 0; t + 1 < lay.size(); t += 2) {
        const auto& pos = lay.ids[t];
        const auto& mom = lay.ids[t + 1];
        REQUIRE(pos.a == mom.a);
        if (pos.kind == CoordId::Kind::Q) {
            REQUIRE(mom.kind == CoordId::Kind::P);
        } else {
            REQUIRE(pos.kind == CoordId::Kind::Alpha);
            REQUIRE(mom.kind == CoordId::Kind::Beta);
            REQUIRE(pos.mu == mom.mu);
            REQUIRE(pos.mu != c.pivot[pos.a]);
        }
    }
}

TEST_CASE("chart round trip preserves the physics") {
    const auto x = sample(23, 2, torus());
    const Chart c = Chart::uniform(2, 0);
    REQUIRE(chart_admissible(x, c));

    const auto coords = chart_coordinates(x, c);
    const auto y = point_from_chart<cplx>(2, c, coords);
    REQUIRE_NOTHROW(validate(y, torus()));

    // the reconstruction differs from x only by the per-point rescaling, so
    // every Lax evaluation agrees
    const cplx z{0.05, 0.41};
    REQUIRE(max_abs(lax(torus(), y, z) - lax(torus(), x, z)) <= 1e-11);

    // pivots are pinned to one and the eliminated beta restores orthogonality
    for (std::size_t a = 0; a < 2; ++a) {
        REQUIRE(y.alpha(a, 0) == cplx(1.0));
        cplx dot{};
        for (std::size_t i = 0; i < 2; ++i) dot += y.beta(a, i) * y.alpha(a, i);
        REQUIRE(std::abs(dot) <= 1e-14);
    }

    // round trip through the coordinates is exact on the coordinates
    const auto coords2 = chart_coordinates(y, c);
    for (std::size_t t = 0; t < coords.size(); ++t)
        REQUIRE(std::abs(coords2[t] - coords[t]) <= 1e-14);
}

TEST_CASE("inadmissible charts are rejected") {
    auto x = sample(29, 2, torus());
    x.alpha(1, 0) = cplx(0.0);  // kill the pivot component
    x.beta(1, 0) = cplx(0.0);
    x.beta(1, 1) = cplx(0.0);  // keep orthogonality trivially
    const Chart c = Chart::uniform(2, 0);
    REQUIRE(!chart_admissible(x, c));
    REQUIRE_THROWS_AS(chart_coordinates(x, c), ValidationError);
    // the identity matrix is admissible only in the diagonal-pivot chart
    const auto xs = sample(29, 2, torus(), {.on_gauge_slice = true});
    REQUIRE(!chart_admissible(xs, Chart::uniform(2, 1)));
}

TEST_CASE("make_point validates its input") {
    const auto x = sample(31, 2, torus());
    REQUIRE_NOTHROW(make_point(torus(), x.q, x.p, x.alpha, x.beta));
    auto beta = x.beta;
    beta(1, 1) += cplx(0.2);
    REQUIRE_THROWS_AS(make_point(torus(), x.q, x.p, x.alpha, beta), ValidationError);
}
