#include "dvbc/analysis.hpp"

#include <algorithm>

namespace dvbc {

namespace {

double identity_residual(const MatrixXd& m) {
    return max_residual(m, MatrixXd::Identity(m.rows(), m.cols()));
}

bool is_identity(const MatrixXd& m, Tolerance tol) {
    return tol.close(m, MatrixXd::Identity(m.rows(), m.cols()));
}

/// Tree gauge: T_v maps the root fiber to the fiber at v along the unique
/// tree path (a path listed v -> root composes to a map root -> v, since
/// transport targets the first vertex).  The gauge T_v^{-1} then turns every
/// tree transport into the identity.
std::map<VertexId, MatrixXd> tree_transports(const Bundle& E, const SpanningTree& tree) {
    std::map<VertexId, MatrixXd> T;
    for (VertexId v : E.base()->vertices()) T[v] = transport_along(E, tree.path_to_root(v));
    return T;
}

} // namespace

FlatnessReport is_flat(const Bundle& E, Tolerance tol) {
    FlatnessReport report;
    double worst_failure = -1.0;
    for (const auto& tri : E.base()->simplices(2)) {
        const MatrixXd hol = holonomy(E, {tri[0], tri[1], tri[2], tri[0]});
        const double residual = identity_residual(hol);
        report.max_residual = std::max(report.max_residual, residual);
        if (!is_identity(hol, tol) && residual > worst_failure) {
            report.flat = false;
            report.witness = tri;
            worst_failure = residual;
        }
    }
    return report;
}

std::vector<std::pair<Path, MatrixXd>> holonomy_representation(const Bundle& E,
                                                               const SpanningTree& tree) {
    std::vector<std::pair<Path, MatrixXd>> result;
    for (const auto& loop : generator_loops(*E.base(), tree))
        result.emplace_back(loop, holonomy(E, loop));
    return result;
}

TrivializationResult trivialize(const Bundle& E, Tolerance tol) {
    const SpanningTree tree = spanning_tree(*E.base());

    for (const auto& tri : E.base()->simplices(2)) {
        const MatrixXd hol = holonomy(E, {tri[0], tri[1], tri[2], tri[0]});
        if (!is_identity(hol, tol))
            return Obstruction{Obstruction::Kind::NonFlat, tri, {}, identity_residual(hol)};
    }
    for (const auto& [loop, hol] : holonomy_representation(E, tree)) {
        if (!is_identity(hol, tol))
            return Obstruction{Obstruction::Kind::NontrivialHolonomy, {}, loop,
                               identity_residual(hol)};
    }

    GaugeTransform gauge;
    for (const auto& [v, T] : tree_transports(E, tree)) gauge.g[v] = T.inverse();
    return gauge;
}

ParallelBasis parallel_sections(const BundlePtr& Eptr, Tolerance tol) {
    const Bundle& E = *Eptr;
    const SpanningTree tree = spanning_tree(*E.base());
    const int n = E.dim(tree.root);

    // Common fixed subspace of the generator holonomies at the root.  The
    // singular-value cutoff is anchored at max(1, largest value): hol - I is
    // pure roundoff for trivial holonomies, and a threshold relative only to
    // its own largest entry would mistake that noise for full rank.
    const auto rep = holonomy_representation(E, tree);
    MatrixXd kernel_basis;
    if (rep.empty()) {
        kernel_basis = MatrixXd::Identity(n, n);
    } else {
        MatrixXd stacked(static_cast<Eigen::Index>(rep.size()) * n, n);
        for (std::size_t i = 0; i < rep.size(); ++i)
            stacked.middleRows(static_cast<Eigen::Index>(i) * n, n) =
                rep[i].second - MatrixXd::Identity(n, n);
        Eigen::JacobiSVD<MatrixXd> svd(stacked, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cutoff = kRankTolerance * std::max(1.0, sv(0));
        int rank = 0;
        while (rank < n && sv(rank) > cutoff) ++rank;
        if (rank == n) return {};
        kernel_basis = svd.matrixV().rightCols(n - rank);
    }

    const auto T = tree_transports(E, tree);
    ParallelBasis basis;
    for (Eigen::Index c = 0; c < kernel_basis.cols(); ++c) {
        VectorCochain s{Eptr, 0, {}};
        for (VertexId v : E.base()->vertices())
            s.values[{v}] = T.at(v) * kernel_basis.col(c);
        // Guard against drift on long tree paths: keep the candidate only if
        // it is parallel on every edge, not just on the generator loops.
        bool parallel = true;
        for (const auto& edge : E.base()->edges()) {
            const VectorXd lhs = E.transport(edge[0], edge[1]) * s.values.at({edge[1]});
            if (!tol.close(lhs, s.values.at({edge[0]}))) {
                parallel = false;
                break;
            }
        }
        if (parallel) basis.sections.push_back(std::move(s));
    }
    return basis;
}

GaugeTransform trivial_subbundle_gauge(const Bundle& E, const ParallelBasis& basis) {
    const int k = basis.dimension();
    if (k == 0) throw Error("trivial_subbundle_gauge: empty basis");
    GaugeTransform gauge;
    for (VertexId v : E.base()->vertices()) {
        const int n = E.dim(v);
        if (k > n)
            throw Error("trivial_subbundle_gauge: basis larger than fiber at vertex " +
                        std::to_string(v));
        MatrixXd B(n, k);
        for (int c = 0; c < k; ++c) {
            const VectorXd& val = basis.sections[static_cast<std::size_t>(c)].values.at({v});
            if (val.size() != n)
                throw Error("trivial_subbundle_gauge: section shape mismatch at vertex " +
                            std::to_string(v));
            B.col(c) = val;
        }
        // Complete B to a basis: eliminate columns with row pivots of largest
        // magnitude, then append the standard basis vectors of the untouched
        // rows.
        MatrixXd W = B;
        const double scale = std::max(1.0, max_abs(B));
        std::vector<bool> pivoted(static_cast<std::size_t>(n), false);
        for (int c = 0; c < k; ++c) {
            int pivot = -1;
            double best = 0.0;
            for (int r = 0; r < n; ++r) {
                if (pivoted[static_cast<std::size_t>(r)]) continue;
                if (std::abs(W(r, c)) > best) {
                    best = std::abs(W(r, c));
                    pivot = r;
                }
            }
            if (pivot < 0 || best <= kRankTolerance * scale)
                throw Error("trivial_subbundle_gauge: basis not independent at vertex " +
                            std::to_string(v));
            pivoted[static_cast<std::size_t>(pivot)] = true;
            for (int r = 0; r < n; ++r) {
                if (pivoted[static_cast<std::size_t>(r)]) continue;
                W.row(r) -= (W(r, c) / W(pivot, c)) * W.row(pivot);
            }
        }
        MatrixXd P(n, n);
        P.leftCols(k) = B;
        int next = k;
        for (int r = 0; r < n; ++r)
            if (!pivoted[static_cast<std::size_t>(r)]) P.col(next++) = VectorXd::Unit(n, r);
        gauge.g[v] = P.inverse();
    }
    return gauge;
}

std::optional<SimplexKey> verify_structure_group(const Bundle& E, const StructureGroupSpec& spec,
                                                 Tolerance tol) {
    int n = -1;
    for (VertexId v : E.base()->vertices()) {
        if (n < 0) n = E.dim(v);
        if (E.dim(v) != n)
            throw Error("verify_structure_group: fiber dimension is not uniform");
    }
    if (const auto* orth = std::get_if<OrthogonalFor>(&spec))
        return is_metric_compatible(E, orth->metric, tol);

    const int k = std::holds_alternative<BlockDiagonal>(spec) ? std::get<BlockDiagonal>(spec).k
                                                              : std::get<BlockUpperUnit>(spec).k;
    if (k <= 0 || k > n) throw Error("verify_structure_group: block size out of range");
    for (const auto& edge : E.base()->edges()) {
        const MatrixXd& U = E.transport(edge[0], edge[1]);
        const MatrixXd zero_low = MatrixXd::Zero(n - k, k);
        if (!tol.close(U.bottomLeftCorner(n - k, k), zero_low)) return edge;
        if (std::holds_alternative<BlockDiagonal>(spec)) {
            if (!tol.close(U.topRightCorner(k, n - k), MatrixXd::Zero(k, n - k))) return edge;
        } else {
            if (!tol.close(U.topLeftCorner(k, k), MatrixXd::Identity(k, k))) return edge;
        }
    }
    return std::nullopt;
}

} // namespace dvbc
