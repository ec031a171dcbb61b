#include <doctest.h>

#include <cmath>
#include <vector>

#include "volterra/hashing.hpp"
#include "volterra/volterra_operator.hpp"

using namespace volterra;

namespace {

SimplexPoint random_sphere_point(SplitMixRng& rng, Index max_index, std::size_t support) {
    std::vector<Coordinate> coords;
    while (coords.size() < support) {
        const Index k = 1 + static_cast<Index>(rng.next_below(max_index));
        bool dup = false;
        for (const auto& c : coords) dup = dup || c.index == k;
        if (!dup) coords.push_back({k, 0.05 + 0.95 * rng.next_unit()});
    }
    return SimplexPoint::sparse(std::move(coords)).renormalized();
}

SkewMatrix random_matrix(SplitMixRng& rng) {
    switch (rng.next_below(4)) {
        case 0: return SkewMatrix::constant(-1.0 + 2.0 * rng.next_unit());
        case 1: return SkewMatrix::random_uniform(rng.next(), -1.0, 1.0);
        case 2: return SkewMatrix::random_uniform(rng.next(), 0.0, 1.0);
        default: return SkewMatrix::random_uniform(rng.next(), -1.0, 0.0);
    }
}

} // namespace

TEST_SUITE("operator") {

TEST_CASE("one step of the full-exchange cascade") {
    const VolterraOperator V(SkewMatrix::constant(-1.0));
    const auto x1 = apply(V, SimplexPoint::dense({0.5, 0.5}));
    CHECK(x1.value_at(1) == 0.25);
    CHECK(x1.value_at(2) == 0.75);

    // partial masses square each step
    auto x = SimplexPoint::dense({0.5, 0.5});
    x = apply(V, x);
    CHECK(x.mass_upto(1) == 0.25);
    x = apply(V, x);
    CHECK(x.mass_upto(1) == 0.0625);
}

TEST_CASE("zero matrix fixes every point") {
    const VolterraOperator V(SkewMatrix::constant(0.0));
    const auto x = SimplexPoint::sparse({{2, 0.375}, {5, 0.625}});
    CHECK(apply(V, x) == x);
}

TEST_CASE("vertices are fixed points, exactly") {
    const std::vector<SkewMatrix> mats = {
        SkewMatrix::constant(-1.0),
        SkewMatrix::constant(1.0),
        SkewMatrix::random_uniform(3, -1.0, 1.0),
        SkewMatrix::tilde({{0.0, -0.5}, {0.5, 0.0}}, SkewMatrix::constant(1.0)),
    };
    for (const auto& m : mats) {
        const VolterraOperator V(m);
        for (Index k = 1; k <= 100; ++k) {
            const auto e = SimplexPoint::unit(k);
            CHECK(apply(V, e) == e);
        }
    }
}

TEST_CASE("iterate records points and displacements") {
    const VolterraOperator V(SkewMatrix::constant(-1.0));
    const auto t = iterate(V, SimplexPoint::dense({0.5, 0.5}), 3);
    CHECK(t.points.size() == 4);
    CHECK(t.deltas.size() == 3);
    CHECK(t.steps() == 3);
    CHECK(t.points[0] == SimplexPoint::dense({0.5, 0.5}));
    CHECK(t.points[1] == SimplexPoint::dense({0.25, 0.75}));
    CHECK(t.deltas[0].l1 == 0.5);
    CHECK(t.deltas[0].rho > 0.0);

    const auto t0 = iterate(V, SimplexPoint::unit(2), 0);
    CHECK(t0.points.size() == 1);
    CHECK(t0.steps() == 0);
}

TEST_CASE("cascade closed form") {
    const auto x0 = SimplexPoint::uniform(1, 8);
    // (1/2)^(2^3) = 1/256 for the first four coordinates
    CHECK(cascade_partial_sum_oracle(x0, 4, 3) == 1.0 / 256.0);
    // cutoff at or past the support mass stays at one
    CHECK(cascade_partial_sum_oracle(x0, 8, 10) == 1.0);
    CHECK(cascade_partial_sum_oracle(x0, 20, 10) == 1.0);
    // five squarings of 7/8
    CHECK(cascade_partial_sum_oracle(x0, 7, 5) == 0.013939837037683136);
    CHECK_THROWS_AS(cascade_partial_sum_oracle(x0, 0, 1), InvalidRangeError);

    // the dynamics reproduce the closed form
    const VolterraOperator V(SkewMatrix::constant(-1.0));
    const auto t = iterate(V, x0, 5);
    for (Index m = 1; m <= 8; ++m) {
        CHECK(t.back().mass_upto(m) ==
              doctest::Approx(cascade_partial_sum_oracle(x0, m, 5)).epsilon(1e-12));
    }
}

TEST_CASE("mass conservation, support and positivity across random operators") {
    SplitMixRng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const VolterraOperator V(random_matrix(rng), 8);
        const auto x = random_sphere_point(rng, 30, 2 + rng.next_below(6));
        const auto [next, flushed] = apply_step(V, x);

        CHECK(std::fabs(next.mass() - x.mass()) <= 1e-12);
        CHECK(next.support_size() + flushed.size() == x.support_size());
        for (const auto& c : next.coords()) {
            CHECK(x.value_at(c.index) > 0.0); // no support growth
            CHECK(c.value > 0.0);             // no support loss short of a flush
        }
    }
}

TEST_CASE("coordinates below the flush threshold collapse to exact zero") {
    // the big coordinate saturates to exactly 1.0 once its complement drops
    // under half an ulp, so the small one hits an exact zero multiplier
    const VolterraOperator V(SkewMatrix::constant(-1.0));
    const auto t = iterate(V, SimplexPoint::dense({0.5, 0.5}), 10);
    CHECK(t.flush_count == 1);
    REQUIRE(t.flush_events.size() == 1);
    CHECK(t.flush_events[0].index == 1);
    CHECK(t.flush_events[0].step == 7);
    CHECK(t.back().support() == std::vector<Index>{2});
    CHECK(t.points[6].support_size() == 2); // still alive one step earlier
    CHECK(t.points[6].value_at(1) == std::ldexp(1.0, -64));
    CHECK(t.points[5].value_at(1) == std::ldexp(1.0, -32)); // squaring still exact here
}

TEST_CASE("a dominant-interaction orbit lands on the smallest-index vertex") {
    const VolterraOperator V(SkewMatrix::random_uniform(7, 0.0, 1.0));
    const auto t = iterate(V, SimplexPoint::uniform(1, 4), 500);
    CHECK(l1_to_vertex(t.back(), 1) < 1e-6);
}

TEST_CASE("out-of-contract input is rejected rather than propagated") {
    const VolterraOperator V(SkewMatrix::constant(-1.0));
    // mass 4 makes the interaction sum exceed the stabilizing term
    CHECK_THROWS_AS(apply(V, SimplexPoint::dense({2.0, 2.0})), NegativeCoordinateError);
}

TEST_CASE("block decomposition splits point and mass at the cut") {
    const auto m = SkewMatrix::tilde({{0.0, -0.5}, {0.5, 0.0}}, SkewMatrix::constant(1.0));
    const VolterraOperator V(m, 16);
    const auto d = decompose_tilde(V, SimplexPoint::uniform(1, 4));

    CHECK(d.k0 == 3);
    CHECK(d.y0 == SimplexPoint::dense({0.25, 0.25}));
    CHECK(d.r1 == 0.5);
    CHECK(d.z0 == SimplexPoint::dense({0.25, 0.25}));
    CHECK(d.r2 == 0.5);
    CHECK(d.head.matrix().at(1, 2) == -0.5);
    CHECK(d.tail.matrix().at(1, 2) == 1.0);

    // start with nothing in the head block
    const auto e = decompose_tilde(V, SimplexPoint::uniform(3, 6));
    CHECK(e.y0.is_zero());
    CHECK(e.r1 == 0.0);
    CHECK(e.r2 == 1.0);

    const VolterraOperator W(SkewMatrix::constant(-1.0));
    CHECK_THROWS_AS(decompose_tilde(W, SimplexPoint::uniform(1, 4)), NotTildeError);
}

TEST_CASE("block iteration concatenates to the joint iteration bit for bit") {
    const auto m = SkewMatrix::tilde({{0.0, -0.5}, {0.5, 0.0}}, SkewMatrix::constant(1.0));
    const VolterraOperator V(m, 16);
    const auto x0 = SimplexPoint::uniform(1, 6);
    const auto d = decompose_tilde(V, x0);

    SimplexPoint joint = x0;
    SimplexPoint y = d.y0;
    SimplexPoint z = d.z0;
    for (int n = 1; n <= 50; ++n) {
        joint = apply(V, joint);
        y = apply(d.head, y);
        z = apply(d.tail, z);
        CHECK(concat_blocks(y, z, d.k0) == joint);
    }
    CHECK(std::fabs(y.mass() - d.r1) <= 1e-12);
    CHECK(std::fabs(z.mass() - d.r2) <= 1e-12);
}

TEST_CASE("concat rejects a head that reaches past the cut") {
    CHECK_THROWS_AS(concat_blocks(SimplexPoint::unit(3), SimplexPoint::unit(1), 3),
                    InvalidRangeError);
    const auto glued = concat_blocks(SimplexPoint::unit(1), SimplexPoint::dense({0.5, 0.5}), 4);
    CHECK(glued.support() == std::vector<Index>{1, 4, 5});
}

TEST_CASE("class hint reflects the construction window") {
    const VolterraOperator V(SkewMatrix::constant(-1.0), 40);
    CHECK(V.class_hint().tag == MatrixTag::Aminus);
    CHECK(V.class_hint().scan_dim == 40);
}

} // TEST_SUITE
