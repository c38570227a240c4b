#include <doctest.h>

#include <cmath>

#include "dvbc/analysis.hpp"
#include "dvbc/document.hpp"
#include "helpers.hpp"

using namespace dvbc;
using namespace dvbc::testing;

TEST_CASE("canonical complexes have the documented shapes") {
    auto circle = fixtures::canonical_complex("circle");
    CHECK(circle->vertices().size() == 3);
    CHECK(circle->edges().size() == 3);
    CHECK(circle->simplices(2).empty());

    auto tb = fixtures::canonical_complex("tetra_boundary");
    CHECK(tb->simplices(2).size() == 4);
    CHECK(tb->simplices(3).empty());

    auto s4 = fixtures::canonical_complex("simplex4_boundary");
    CHECK(s4->simplices(3).size() == 5);
    CHECK(s4->simplices(4).empty());

    CHECK_THROWS_AS(fixtures::canonical_complex("klein_bottle"), Error);
}

TEST_CASE("random fixtures are deterministic per seed, down to the bytes") {
    auto X = fixtures::canonical_complex("tetra_boundary");
    Document a;
    a.complex = X;
    a.bundle = fixtures::random_bundle(X, 3, 123);
    Document b;
    b.complex = X;
    b.bundle = fixtures::random_bundle(X, 3, 123);
    CHECK(serialize(a) == serialize(b));
    Document c;
    c.complex = X;
    c.bundle = fixtures::random_bundle(X, 3, 124);
    CHECK(serialize(a) != serialize(c));

    const VectorCochain s1 = fixtures::random_cochain(a.bundle, 1, 9);
    const VectorCochain s2 = fixtures::random_cochain(a.bundle, 1, 9);
    for (const auto& [key, val] : s1.values) CHECK(val == s2.values.at(key));
}

TEST_CASE("random bundles pass validation and stay well conditioned") {
    auto X = fixtures::canonical_complex("simplex4_boundary");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto E = fixtures::random_bundle(X, 2, seed);
        for (const auto& edge : X->edges()) {
            Eigen::JacobiSVD<MatrixXd> svd(E->transport(edge[0], edge[1]));
            CHECK(svd.singularValues()(1) >= 0.1);
        }
    }
}

TEST_CASE("rank-1 random transports stay in the sampling interval") {
    auto X = fixtures::canonical_complex("circle");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto E = fixtures::random_bundle(X, 1, seed);
        for (const auto& edge : X->edges()) {
            const double x = E->transport(edge[0], edge[1])(0, 0);
            CHECK(std::abs(x) >= 0.1);
            CHECK(std::abs(x) <= 1.5);
            CHECK(x >= 0.5);  // 1 + 0.5 u with u in [-1,1]
        }
    }
}

TEST_CASE("rotation_bundle_circle has the advertised holonomy") {
    CHECK(std::holds_alternative<GaugeTransform>(trivialize(*fixtures::rotation_bundle_circle(0.0))));

    auto E = fixtures::rotation_bundle_circle(0.7);
    MatrixXd R(2, 2);
    R << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    CHECK(max_residual(holonomy(*E, {0, 1, 2, 0}), R) <= 1e-15);

    CHECK(parallel_sections(fixtures::rotation_bundle_circle(M_PI)).dimension() == 0);
}

TEST_CASE("random gauges and cochains have valid shapes") {
    auto E = fixtures::random_bundle(fixtures::canonical_complex("tetrahedron"), 3, 77);
    CHECK_NOTHROW(validate_gauge(*E, fixtures::random_gauge(*E, 78)));

    const VectorCochain a = fixtures::random_cochain(E, 2, 79);
    CHECK(a.values.size() == E->base()->simplices(2).size());
    for (const auto& [key, val] : a.values) CHECK(val.size() == 3);

    const HomCochain A = fixtures::random_hom_cochain(E, 1, 80);
    for (const auto& [key, m] : A.values) {
        CHECK(m.rows() == 3);
        CHECK(m.cols() == 3);
    }
    CHECK_THROWS_AS(fixtures::random_cochain(E, 9, 81), Error);
}
