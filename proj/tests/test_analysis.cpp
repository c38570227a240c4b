#include <doctest.h>

#include <cmath>

#include "dvbc/analysis.hpp"
#include "helpers.hpp"

using namespace dvbc;
using namespace dvbc::testing;

namespace {

// Brute-force oracle for the space of parallel sections: stack the
// constraint U_{ij} s_j - s_i = 0 for every edge into one linear system
// over all fiber coordinates and measure its kernel.
int stacked_edge_kernel_dimension(const Bundle& E) {
    std::map<VertexId, int> offset;
    int total = 0;
    for (VertexId v : E.base()->vertices()) {
        offset[v] = total;
        total += E.dim(v);
    }
    int rows = 0;
    for (const auto& edge : E.base()->edges()) rows += E.dim(edge[0]);
    if (rows == 0) return total;
    MatrixXd system = MatrixXd::Zero(rows, total);
    int row = 0;
    for (const auto& edge : E.base()->edges()) {
        const int di = E.dim(edge[0]);
        system.block(row, offset.at(edge[1]), di, E.dim(edge[1])) =
            E.transport(edge[0], edge[1]);
        system.block(row, offset.at(edge[0]), di, di) = -MatrixXd::Identity(di, di);
        row += di;
    }
    Eigen::FullPivLU<MatrixXd> lu(system);
    lu.setThreshold(kRankTolerance);
    return total - static_cast<int>(lu.rank());
}

double max_deviation_from_identity(const Bundle& E) {
    double worst = 0.0;
    for (const auto& edge : E.base()->edges()) {
        const MatrixXd& U = E.transport(edge[0], edge[1]);
        worst = std::max(worst, max_residual(U, MatrixXd::Identity(U.rows(), U.cols())));
    }
    return worst;
}

} // namespace

TEST_CASE("is_flat on trivial, curved, and triangle-free bundles") {
    auto trivial = fixtures::trivial_bundle(fixtures::canonical_complex("tetra_boundary"), 2);
    CHECK(is_flat(*trivial).flat);

    auto curved = rank1_circle(2, 3, 5, /*filled=*/true);
    const FlatnessReport report = is_flat(*curved);
    CHECK(!report.flat);
    REQUIRE(report.witness.has_value());
    CHECK(*report.witness == SimplexKey{0, 1, 2});
    CHECK(report.max_residual == doctest::Approx(0.2));  // |2*3/5 - 1|

    CHECK(is_flat(*rank1_circle(2, 3, 5)).flat);  // no 2-simplices at all
}

TEST_CASE("holonomy_representation lists generator holonomies at the root") {
    auto trivial = fixtures::trivial_bundle(fixtures::canonical_complex("circle"), 3);
    for (const auto& [loop, hol] : holonomy_representation(*trivial, spanning_tree(*trivial->base())))
        CHECK(max_residual(hol, MatrixXd::Identity(3, 3)) <= 1e-15);

    auto flat = rank1_circle(2, 3, 6);
    const auto rep = holonomy_representation(*flat, spanning_tree(*flat->base()));
    REQUIRE(rep.size() == 1);
    CHECK(rep[0].first == Path{0, 1, 2, 0});
    CHECK(rep[0].second(0, 0) == doctest::Approx(1.0));

    auto rot = fixtures::rotation_bundle_circle(0.7);
    const auto rrep = holonomy_representation(*rot, spanning_tree(*rot->base()));
    MatrixXd R(2, 2);
    R << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    REQUIRE(rrep.size() == 1);
    CHECK(max_residual(rrep[0].second, R) <= 1e-15);
}

TEST_CASE("trivialize recovers a gauge of the trivial bundle") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto X = fixtures::canonical_complex(seed % 2 ? "tetra_boundary" : "tetrahedron");
        auto trivial = fixtures::trivial_bundle(X, 2);
        auto E = apply_gauge(*trivial, fixtures::random_gauge(*trivial, 3000 + seed));
        const TrivializationResult result = trivialize(*E);
        REQUIRE(std::holds_alternative<GaugeTransform>(result));
        auto fixed = apply_gauge(*E, std::get<GaugeTransform>(result));
        CHECK(max_deviation_from_identity(*fixed) <= 1e-9);
    }
}

TEST_CASE("trivialize reports nontrivial holonomy on the rotation circle") {
    const TrivializationResult result = trivialize(*fixtures::rotation_bundle_circle(0.7));
    REQUIRE(std::holds_alternative<Obstruction>(result));
    const Obstruction& obstruction = std::get<Obstruction>(result);
    CHECK(obstruction.kind == Obstruction::Kind::NontrivialHolonomy);
    CHECK(obstruction.loop == Path{0, 1, 2, 0});
    CHECK(obstruction.residual > 0.1);
}

TEST_CASE("trivialize reports the non-flat triangle first") {
    const TrivializationResult result = trivialize(*rank1_circle(2, 3, 5, /*filled=*/true));
    REQUIRE(std::holds_alternative<Obstruction>(result));
    const Obstruction& obstruction = std::get<Obstruction>(result);
    CHECK(obstruction.kind == Obstruction::Kind::NonFlat);
    CHECK(obstruction.triangle == SimplexKey{0, 1, 2});
}

TEST_CASE("trivialize succeeds on the flat rank-1 circle") {
    const TrivializationResult result = trivialize(*rank1_circle(2, 3, 6));
    REQUIRE(std::holds_alternative<GaugeTransform>(result));
    auto fixed = apply_gauge(*rank1_circle(2, 3, 6), std::get<GaugeTransform>(result));
    CHECK(max_deviation_from_identity(*fixed) <= 1e-12);
}

TEST_CASE("trivialize requires a connected complex") {
    auto X = build_complex({{0, 1}, {2, 3}});
    std::map<SimplexKey, MatrixXd> transports;
    transports[{0, 1}] = scalar1x1(1.0);
    transports[{2, 3}] = scalar1x1(1.0);
    auto E = new_bundle(X, 1, transports);
    CHECK_THROWS_AS(trivialize(*E), Error);
}

TEST_CASE("parallel_sections dimensions on the named fixtures") {
    auto trivial = fixtures::trivial_bundle(fixtures::canonical_complex("tetra_boundary"), 3);
    CHECK(parallel_sections(trivial).dimension() == 3);

    CHECK(parallel_sections(fixtures::rotation_bundle_circle(0.7)).dimension() == 0);
    CHECK(parallel_sections(fixtures::rotation_bundle_circle(0.0)).dimension() == 2);

    auto flat = rank1_circle(2, 3, 6);
    const ParallelBasis basis = parallel_sections(flat);
    REQUIRE(basis.dimension() == 1);
    const VectorCochain& s = basis.sections[0];
    const double scale = s.values.at({0})(0);
    REQUIRE(std::abs(scale) > 1e-12);
    CHECK(s.values.at({1})(0) / scale == doctest::Approx(0.5));
    CHECK(s.values.at({2})(0) / scale == doctest::Approx(1.0 / 6.0));
    const VectorCochain ds = nabla(s);
    for (const auto& [key, val] : ds.values) CHECK(val.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("parallel_sections agrees with the stacked-edge kernel oracle") {
    const char* names[] = {"circle", "tetra_boundary"};
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        auto X = fixtures::canonical_complex(names[seed % 2]);
        const int rank = 1 + static_cast<int>(seed % 3);
        BundlePtr E;
        if (seed % 2 == 0) {
            E = fixtures::random_bundle(X, rank, 3100 + seed);
        } else {
            // Engineered to hold at least one parallel section.
            BundlePtr core = rank > 1 ? whitney_sum(*fixtures::trivial_bundle(X, 1),
                                                    *fixtures::random_bundle(X, rank - 1,
                                                                             3200 + seed))
                                      : fixtures::trivial_bundle(X, 1);
            E = apply_gauge(*core, fixtures::random_gauge(*core, 3300 + seed));
        }
        CHECK(parallel_sections(E).dimension() == stacked_edge_kernel_dimension(*E));
    }
}

TEST_CASE("trivial_subbundle_gauge produces unit upper-triangular transports") {
    auto X = fixtures::canonical_complex("circle");

    // Full-rank case: a gauged trivial bundle flattens completely.
    auto trivial = fixtures::trivial_bundle(X, 2);
    auto E = apply_gauge(*trivial, fixtures::random_gauge(*trivial, 3400));
    const ParallelBasis full = parallel_sections(E);
    REQUIRE(full.dimension() == 2);
    auto gauged = apply_gauge(*E, trivial_subbundle_gauge(*E, full));
    CHECK(max_deviation_from_identity(*gauged) <= 1e-9);

    // One parallel direction inside a rank-2 bundle.
    auto mixed_core = whitney_sum(*fixtures::trivial_bundle(X, 1), *rank1_circle(2, 3, 5));
    auto mixed = apply_gauge(*mixed_core, fixtures::random_gauge(*mixed_core, 3500));
    const ParallelBasis one = parallel_sections(mixed);
    REQUIRE(one.dimension() == 1);
    auto shaped = apply_gauge(*mixed, trivial_subbundle_gauge(*mixed, one));
    for (const auto& edge : X->edges()) {
        const MatrixXd& U = shaped->transport(edge[0], edge[1]);
        CHECK(U(0, 0) == doctest::Approx(1.0));
        CHECK(std::abs(U(1, 0)) <= 1e-9);
    }
    CHECK(!verify_structure_group(*shaped, BlockUpperUnit{1}).has_value());

    CHECK_THROWS_AS(trivial_subbundle_gauge(*mixed, ParallelBasis{}), Error);
}

TEST_CASE("verify_structure_group block and orthogonal cases") {
    auto X = fixtures::canonical_complex("circle");
    auto sum = whitney_sum(*rank1_circle(2, 3, 5), *rank1_circle(7, 11, 13));
    CHECK(!verify_structure_group(*sum, BlockDiagonal{1}).has_value());

    auto rot = fixtures::rotation_bundle_circle(0.7);
    CHECK(!verify_structure_group(*rot, OrthogonalFor{euclidean_metric(*rot)}).has_value());

    std::map<SimplexKey, MatrixXd> transports;
    MatrixXd shear(2, 2);
    shear << 1, 0, 0.5, 1;  // lower-triangular entry breaks both block specs
    transports[{0, 1}] = shear;
    transports[{1, 2}] = MatrixXd::Identity(2, 2);
    transports[{0, 2}] = MatrixXd::Identity(2, 2);
    auto bad = new_bundle(X, 2, transports);
    auto violation = verify_structure_group(*bad, BlockDiagonal{1});
    REQUIRE(violation.has_value());
    CHECK(*violation == SimplexKey{0, 1});
    CHECK(verify_structure_group(*bad, BlockUpperUnit{1}).has_value());
}

TEST_CASE("equivalence of trivializability, flatness, and zero curvature when simply connected") {
    for (const char* name : {"filled_triangle", "simplex4_boundary"}) {
        auto X = fixtures::canonical_complex(name);
        auto trivial = fixtures::trivial_bundle(X, 2);

        auto flat = apply_gauge(*trivial, fixtures::random_gauge(*trivial, 3600));
        CHECK(std::holds_alternative<GaugeTransform>(trivialize(*flat)));
        CHECK(is_flat(*flat).flat);
        double f_max = 0.0;
        for (const auto& [key, m] : curvature(flat).values)
            f_max = std::max(f_max, m.cwiseAbs().maxCoeff());
        CHECK(f_max <= 1e-9);

        auto curved = fixtures::random_bundle(X, 2, 3700);
        CHECK(std::holds_alternative<Obstruction>(trivialize(*curved)));
        CHECK(!is_flat(*curved).flat);
        double c_max = 0.0;
        for (const auto& [key, m] : curvature(curved).values)
            c_max = std::max(c_max, m.cwiseAbs().maxCoeff());
        CHECK(c_max > 1e-9);
    }
}

TEST_CASE("flat transport is invariant under elementary homotopies") {
    auto X = fixtures::canonical_complex("tetrahedron");
    auto trivial = fixtures::trivial_bundle(X, 2);
    auto E = apply_gauge(*trivial, fixtures::random_gauge(*trivial, 3800));
    REQUIRE(is_flat(*E).flat);

    const Path p{0, 1, 2};
    const Path shorter = apply_elementary_homotopy(*X, p, 1, HomotopyMove::Delete);
    CHECK(max_residual(transport_along(*E, p), transport_along(*E, shorter)) <= 1e-9);
    const Path longer = apply_elementary_homotopy(*X, p, 1, HomotopyMove::Insert, 3);
    CHECK(max_residual(transport_along(*E, p), transport_along(*E, longer)) <= 1e-9);
}

TEST_CASE("verify_structure_group demands a uniform fiber dimension") {
    auto X = build_complex({{0, 1}, {5, 6}});
    std::map<VertexId, int> dims{{0, 1}, {1, 1}, {5, 2}, {6, 2}};
    std::map<SimplexKey, MatrixXd> transports;
    transports[{0, 1}] = scalar1x1(1.0);
    transports[{5, 6}] = MatrixXd::Identity(2, 2);
    auto E = new_bundle(X, dims, transports);
    CHECK_THROWS_AS(verify_structure_group(*E, BlockDiagonal{1}), Error);
}

TEST_CASE("parallel bases restrict to independent sets in every fiber") {
    auto X = fixtures::canonical_complex("tetra_boundary");
    auto core = whitney_sum(*fixtures::trivial_bundle(X, 2),
                            *fixtures::random_bundle(X, 1, 3900));
    auto E = apply_gauge(*core, fixtures::random_gauge(*core, 3901));
    const ParallelBasis basis = parallel_sections(E);
    REQUIRE(basis.dimension() == 2);
    for (VertexId v : X->vertices()) {
        MatrixXd stacked(3, basis.dimension());
        for (int c = 0; c < basis.dimension(); ++c)
            stacked.col(c) = basis.sections[static_cast<std::size_t>(c)].values.at({v});
        Eigen::JacobiSVD<MatrixXd> svd(stacked);
        const auto& sv = svd.singularValues();
        CHECK(sv(sv.size() - 1) > kRankTolerance * std::max(1.0, sv(0)));
    }
}
