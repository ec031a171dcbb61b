#include <doctest.h>

#include <cmath>
#include <vector>

#include "volterra/skew_matrix.hpp"

using namespace volterra;

TEST_SUITE("matrix") {

TEST_CASE("constant matrix") {
    const auto m = SkewMatrix::constant(-1.0);
    CHECK(m.at(2, 7) == -1.0);
    CHECK(m.at(7, 2) == 1.0);
    CHECK(m.at(5, 5) == 0.0);
    CHECK_THROWS_AS(m.at(0, 3), InvalidRangeError);
    CHECK_THROWS_AS(SkewMatrix::constant(1.5), InvalidRangeError);
}

TEST_CASE("random matrix entries are pure, bounded and strictly inside the range") {
    const auto m = SkewMatrix::random_uniform(0x5eed, 0.0, 1.0);
    for (Index k = 1; k <= 40; ++k) {
        for (Index i = k + 1; i <= 40; ++i) {
            const double v = m.at(k, i);
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            CHECK(m.at(k, i) == v);          // pure in (k, i)
            CHECK(m.at(i, k) == -v);         // antisymmetric by construction
        }
    }

    // same seed reproduces, different seed does not
    const auto m2 = SkewMatrix::random_uniform(0x5eed, 0.0, 1.0);
    const auto m3 = SkewMatrix::random_uniform(0x5eee, 0.0, 1.0);
    CHECK(m2.at(3, 11) == m.at(3, 11));
    bool differs = false;
    for (Index i = 2; i <= 20 && !differs; ++i) differs = m3.at(1, i) != m.at(1, i);
    CHECK(differs);

    CHECK_THROWS_AS(SkewMatrix::random_uniform(1, 0.5, 0.2), InvalidRangeError);
    CHECK_THROWS_AS(SkewMatrix::random_uniform(1, -1.5, 0.0), InvalidRangeError);
    CHECK_THROWS_AS(SkewMatrix::random_uniform(1, 0.0, 1.5), InvalidRangeError);
}

TEST_CASE("table matrix normalizes orientation and rejects contradictions") {
    const auto m = SkewMatrix::table({{4, 2, 0.5}, {1, 3, -0.25}});
    CHECK(m.at(2, 4) == -0.5);
    CHECK(m.at(4, 2) == 0.5);
    CHECK(m.at(1, 3) == -0.25);
    CHECK(m.at(1, 2) == 0.0);

    // duplicate pair with the same value collapses, conflicting values throw
    CHECK_NOTHROW(SkewMatrix::table({{1, 2, 0.5}, {2, 1, -0.5}}));
    CHECK_THROWS_AS(SkewMatrix::table({{1, 2, 0.5}, {2, 1, 0.5}}), NotSkewError);
    CHECK_THROWS_AS(SkewMatrix::table({{3, 3, 0.5}}), NotSkewError);
    CHECK_THROWS_AS(SkewMatrix::table({{0, 2, 0.5}}), InvalidRangeError);
    CHECK_THROWS_AS(SkewMatrix::table({{1, 2, 1.5}}), InvalidRangeError);
}

TEST_CASE("block matrix wiring") {
    const auto m = SkewMatrix::tilde({{0.0, -0.5}, {0.5, 0.0}}, SkewMatrix::constant(1.0));
    CHECK(m.at(1, 2) == -0.5);
    CHECK(m.at(2, 1) == 0.5);
    CHECK(m.at(1, 5) == 0.0); // no coupling across the cut
    CHECK(m.at(2, 3) == 0.0);
    CHECK(m.at(3, 4) == 1.0); // tail re-indexed to start at the cut
    CHECK(m.at(9, 4) == -1.0);

    const auto degenerate = SkewMatrix::tilde({{0.0}}, SkewMatrix::constant(-1.0));
    CHECK(degenerate.at(1, 5) == 0.0);
    CHECK(degenerate.at(2, 5) == -1.0);

    CHECK_THROWS_AS(SkewMatrix::tilde({}, SkewMatrix::constant(0.0)), InvalidRangeError);
    CHECK_THROWS_AS(SkewMatrix::tilde({{0.0, 1.0}}, SkewMatrix::constant(0.0)),
                    InvalidRangeError); // not square
    CHECK_THROWS_AS(SkewMatrix::tilde({{0.1}}, SkewMatrix::constant(0.0)), NotSkewError);
    CHECK_THROWS_AS(SkewMatrix::tilde({{0.0, 0.5}, {0.6, 0.0}}, SkewMatrix::constant(0.0)),
                    NotSkewError);
}

TEST_CASE("shifted matrix relabels indices") {
    const auto base = SkewMatrix::table({{3, 4, 0.75}});
    const auto m = SkewMatrix::shifted(base, 2);
    CHECK(m.at(1, 2) == 0.75);
    CHECK(m.at(2, 1) == -0.75);
    CHECK(m.at(1, 3) == 0.0);
}

TEST_CASE("antisymmetry spot checks") {
    ProbedEntry witness;
    CHECK(spot_check_skew(SkewMatrix::constant(-1.0), 100, 1, 2000, &witness));
    CHECK(spot_check_skew(SkewMatrix::random_uniform(9, -1.0, 1.0), 100, 2, 2000, &witness));
    CHECK(spot_check_skew(SkewMatrix::table({{1, 9, 0.5}}), 20, 3, 500, &witness));
    CHECK(spot_check_skew(SkewMatrix::tilde({{0.0, -0.5}, {0.5, 0.0}}, SkewMatrix::constant(1.0)),
                          50, 4, 1000, &witness));
}

TEST_CASE("window classification of the named families") {
    const auto cascade = classify(SkewMatrix::constant(-1.0), 50);
    CHECK(cascade.tag == MatrixTag::Aminus);
    CHECK(cascade.k0 == 0);
    CHECK(cascade.scan_dim == 50);

    CHECK(classify(SkewMatrix::constant(0.0), 10).tag == MatrixTag::Identity);
    CHECK(classify(SkewMatrix::constant(1.0), 10).tag == MatrixTag::Aplus);

    for (std::uint64_t seed : {1ULL, 7ULL, 42ULL}) {
        CHECK(classify(SkewMatrix::random_uniform(seed, 0.0, 1.0), 200).tag == MatrixTag::Aplus);
        CHECK(classify(SkewMatrix::random_uniform(seed, -1.0, 0.0), 200).tag == MatrixTag::Aminus);
        // both signs in every suffix and no zero coupling rectangle
        CHECK(classify(SkewMatrix::random_uniform(seed, -1.0, 1.0), 200).tag == MatrixTag::General);
    }
}

TEST_CASE("window classification finds the minimal block cut") {
    const auto m = SkewMatrix::tilde({{0.0, -0.5}, {0.5, 0.0}}, SkewMatrix::constant(1.0));
    const auto cls = classify(m, 20);
    CHECK(cls.tag == MatrixTag::TildePlus);
    CHECK(cls.k0 == 3);

    // mixed-sign tail keeps the cut but downgrades the sign tag
    const auto minus = SkewMatrix::tilde({{0.0, 0.5}, {-0.5, 0.0}}, SkewMatrix::constant(-0.25));
    CHECK(classify(minus, 20).tag == MatrixTag::TildeMinus);
    CHECK(classify(minus, 20).k0 == 3);

    // a single-entry head block of zeros is already sign-definite as a whole
    const auto deg = SkewMatrix::tilde({{0.0}}, SkewMatrix::constant(-1.0));
    CHECK(classify(deg, 20).tag == MatrixTag::Aminus);

    // zero tail behind a mixed-sign head: the nonnegative reading wins
    const auto silent = SkewMatrix::tilde(
        {{0.0, -0.5, 0.25}, {0.5, 0.0, -0.25}, {-0.25, 0.25, 0.0}}, SkewMatrix::constant(0.0));
    const auto scls = classify(silent, 20);
    CHECK(scls.tag == MatrixTag::TildePlus);
    CHECK(scls.k0 == 4);
}

TEST_CASE("classification is a statement about the window only") {
    // entries at (1,5) and (2,9) are invisible to a window of 4
    const auto m = SkewMatrix::table({{1, 5, 0.5}, {2, 9, -0.5}});
    CHECK(classify(m, 4).tag == MatrixTag::Identity);
    // a window of 12 sees both; the rows above any cut <= 9 still couple
    // past it, and everything from 10 on is zero, which reads as a block
    const auto cls = classify(m, 12);
    CHECK(cls.tag == MatrixTag::TildePlus);
    CHECK(cls.k0 == 10);

    CHECK_THROWS_AS(classify(m, 1), InvalidRangeError);
}

TEST_CASE("classification certificates quote real entries") {
    const auto m = SkewMatrix::random_uniform(11, -1.0, 1.0);
    const auto cls = classify(m, 30);
    CHECK(!cls.certificate.empty());
    for (const auto& probe : cls.certificate) {
        CHECK(probe.value == m.at(probe.k, probe.i));
    }
}

TEST_CASE("descriptors round-trip through json") {
    const auto check_roundtrip = [](const SkewMatrix& m) {
        const auto back = SkewMatrix::from_json(m.descriptor());
        for (Index k = 1; k <= 12; ++k)
            for (Index i = 1; i <= 12; ++i) CHECK(back.at(k, i) == m.at(k, i));
    };
    check_roundtrip(SkewMatrix::constant(-0.75));
    check_roundtrip(SkewMatrix::random_uniform(123, -0.5, 0.5));
    check_roundtrip(SkewMatrix::table({{1, 2, 0.5}, {3, 7, -0.25}}));
    check_roundtrip(SkewMatrix::tilde({{0.0, -0.5}, {0.5, 0.0}}, SkewMatrix::constant(1.0)));
    check_roundtrip(SkewMatrix::shifted(SkewMatrix::table({{3, 4, 0.75}}), 2));
}

TEST_CASE("descriptor parsing rejects malformed input") {
    CHECK_THROWS_AS(SkewMatrix::from_json(Json::parse(R"({"kind": "nope"})")), ConfigError);
    CHECK_THROWS_AS(SkewMatrix::from_json(Json::parse(R"({"kind": "constant"})")), ConfigError);
    CHECK_THROWS_AS(SkewMatrix::from_json(Json::parse(R"({"kind": "constant", "c": 2.0})")),
                    ConfigError); // out of range surfaces as a config error
    CHECK_THROWS_AS(SkewMatrix::from_json(Json::parse(R"({"kind": "random", "seed": 1})")),
                    ConfigError);
    CHECK_THROWS_AS(SkewMatrix::from_json(Json::parse(R"({"kind": "table", "entries": [[1, 2]]})")),
                    ConfigError);
    CHECK_THROWS_AS(SkewMatrix::from_json(Json::parse("[]")), ConfigError);
}

} // TEST_SUITE
