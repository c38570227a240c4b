#include "dvbc/fixtures.hpp"

#include <cmath>
#include <random>

namespace dvbc {
namespace fixtures {

namespace {

/// Uniform double in [0,1) from the top 53 bits of mt19937_64 output, so the
/// sampling is pinned to the generator and not to a library distribution.
double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double uniform_pm1(std::mt19937_64& gen) { return 2.0 * uniform01(gen) - 1.0; }

MatrixXd sample_well_conditioned(std::mt19937_64& gen, int n) {
    while (true) {
        MatrixXd m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = 0.5 * uniform_pm1(gen);
        m += MatrixXd::Identity(n, n);
        Eigen::JacobiSVD<MatrixXd> svd(m);
        if (svd.singularValues()(n - 1) >= 0.1) return m;
    }
}

} // namespace

ComplexPtr canonical_complex(std::string_view name) {
    if (name == "circle") return build_complex({{0, 1}, {1, 2}, {0, 2}});
    if (name == "filled_triangle") return build_complex({{0, 1, 2}});
    if (name == "tetrahedron") return build_complex({{0, 1, 2, 3}});
    if (name == "tetra_boundary")
        return build_complex({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
    if (name == "simplex4_boundary")
        return build_complex({{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 3, 4}, {0, 2, 3, 4}, {1, 2, 3, 4}});
    throw Error("canonical_complex: unknown name '" + std::string(name) + "'");
}

BundlePtr trivial_bundle(ComplexPtr X, int n) {
    std::map<SimplexKey, MatrixXd> transports;
    for (const auto& edge : X->edges()) transports[edge] = MatrixXd::Identity(n, n);
    return new_bundle(std::move(X), n, std::move(transports));
}

BundlePtr random_bundle(ComplexPtr X, int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::map<SimplexKey, MatrixXd> transports;
    for (const auto& edge : X->edges()) transports[edge] = sample_well_conditioned(gen, n);
    return new_bundle(std::move(X), n, std::move(transports));
}

BundlePtr rotation_bundle_circle(double theta) {
    ComplexPtr X = canonical_complex("circle");
    MatrixXd rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    std::map<SimplexKey, MatrixXd> transports;
    transports[{0, 1}] = MatrixXd::Identity(2, 2);
    transports[{0, 2}] = MatrixXd::Identity(2, 2);
    transports[{1, 2}] = rot;
    return new_bundle(std::move(X), 2, std::move(transports));
}

VectorCochain random_cochain(BundlePtr E, int k, std::uint64_t seed) {
    if (k > E->base()->dimension()) throw Error("random_cochain: degree exceeds complex dimension");
    std::mt19937_64 gen(seed);
    VectorCochain out{E, k, {}};
    for (const auto& key : E->base()->simplices(k)) {
        VectorXd v(E->dim(key.front()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform_pm1(gen);
        out.values[key] = std::move(v);
    }
    return out;
}

ScalarCochain random_scalar_cochain(ComplexPtr X, int k, std::uint64_t seed) {
    if (k > X->dimension()) throw Error("random_scalar_cochain: degree exceeds complex dimension");
    std::mt19937_64 gen(seed);
    ScalarCochain out{std::move(X), k, {}};
    for (const auto& key : out.X->simplices(k)) out.values[key] = uniform_pm1(gen);
    return out;
}

HomCochain random_hom_cochain(BundlePtr E, int k, std::uint64_t seed) {
    if (k > E->base()->dimension())
        throw Error("random_hom_cochain: degree exceeds complex dimension");
    std::mt19937_64 gen(seed);
    HomCochain out{E, k, {}};
    for (const auto& key : E->base()->simplices(k)) {
        MatrixXd m(E->dim(key.front()), E->dim(key.back()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = uniform_pm1(gen);
        out.values[key] = std::move(m);
    }
    return out;
}

GaugeTransform random_gauge(const Bundle& E, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    GaugeTransform g;
    for (VertexId v : E.base()->vertices()) g.g[v] = sample_well_conditioned(gen, E.dim(v));
    return g;
}

} // namespace fixtures
} // namespace dvbc
