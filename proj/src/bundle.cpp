#include "dvbc/bundle.hpp"

#include <sstream>

namespace dvbc {

namespace {

std::string edge_to_string(VertexId a, VertexId b) {
    return "{" + std::to_string(a) + "," + std::to_string(b) + "}";
}

std::string edge_to_string(const SimplexKey& e) { return edge_to_string(e[0], e[1]); }

void require_invertible(const MatrixXd& m, double rank_tol, const std::string& where) {
    if (m.rows() != m.cols())
        throw Error(where + ": non-square matrix cannot be invertible");
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= rank_tol * sv(0))
        throw Error(where + ": singular matrix (rank deficient at threshold)");
}

} // namespace

Bundle Bundle::create(ComplexPtr base, std::map<VertexId, int> dims,
                      std::map<SimplexKey, MatrixXd> transports, double rank_tol) {
    return create_with_reverse(std::move(base), std::move(dims), std::move(transports), {},
                               rank_tol);
}

Bundle Bundle::create(ComplexPtr base, int dim, std::map<SimplexKey, MatrixXd> transports,
                      double rank_tol) {
    std::map<VertexId, int> dims;
    for (VertexId v : base->vertices()) dims[v] = dim;
    return create_with_reverse(std::move(base), std::move(dims), std::move(transports), {},
                               rank_tol);
}

Bundle Bundle::create_with_reverse(ComplexPtr base, std::map<VertexId, int> dims,
                                   std::map<SimplexKey, MatrixXd> transports,
                                   std::map<SimplexKey, MatrixXd> reverse_overrides,
                                   double rank_tol) {
    Bundle E;
    E.base_ = std::move(base);
    for (VertexId v : E.base_->vertices()) {
        auto it = dims.find(v);
        if (it == dims.end())
            throw Error("bundle: missing fiber dimension at vertex " + std::to_string(v));
        if (it->second <= 0)
            throw Error("bundle: fiber dimension must be positive at vertex " + std::to_string(v));
        E.dims_[v] = it->second;
    }
    for (const auto& edge : E.base_->edges()) {
        auto it = transports.find(edge);
        if (it == transports.end())
            throw Error("bundle: missing transport for edge " + edge_to_string(edge));
        const MatrixXd& U = it->second;
        if (U.rows() != E.dims_[edge[0]] || U.cols() != E.dims_[edge[1]]) {
            std::ostringstream msg;
            msg << "bundle: transport on edge " << edge_to_string(edge) << " has shape "
                << U.rows() << "x" << U.cols() << ", expected " << E.dims_[edge[0]] << "x"
                << E.dims_[edge[1]];
            throw Error(msg.str());
        }
        require_invertible(U, rank_tol, "bundle: transport on edge " + edge_to_string(edge));
        E.forward_[edge] = U;
        E.reverse_[edge] = U.inverse();
    }
    for (const auto& [edge, key_unused] : transports) {
        (void)key_unused;
        if (!E.base_->has_simplex(edge))
            throw Error("bundle: transport given for non-edge " + edge_to_string(edge));
    }
    for (auto& [edge, R] : reverse_overrides) {
        if (!E.base_->has_simplex(edge))
            throw Error("bundle: reverse transport given for non-edge " + edge_to_string(edge));
        if (R.rows() != E.dims_[edge[1]] || R.cols() != E.dims_[edge[0]])
            throw Error("bundle: reverse transport on edge " + edge_to_string(edge) +
                        " has wrong shape");
        E.reverse_[edge] = R;
        E.overrides_[edge] = std::move(R);
    }
    return E;
}

int Bundle::dim(VertexId v) const {
    auto it = dims_.find(v);
    if (it == dims_.end()) throw Error("bundle: unknown vertex " + std::to_string(v));
    return it->second;
}

const MatrixXd& Bundle::transport(VertexId i, VertexId j) const {
    const bool ascending = i < j;
    SimplexKey edge = ascending ? SimplexKey{i, j} : SimplexKey{j, i};
    auto it = ascending ? forward_.find(edge) : reverse_.find(edge);
    if (it == (ascending ? forward_.end() : reverse_.end()))
        throw Error("bundle: " + edge_to_string(i, j) + " is not an edge");
    return it->second;
}

BundlePtr new_bundle(ComplexPtr base, int dim, std::map<SimplexKey, MatrixXd> transports) {
    return std::make_shared<Bundle>(Bundle::create(std::move(base), dim, std::move(transports)));
}

BundlePtr new_bundle(ComplexPtr base, std::map<VertexId, int> dims,
                     std::map<SimplexKey, MatrixXd> transports) {
    return std::make_shared<Bundle>(
        Bundle::create(std::move(base), std::move(dims), std::move(transports)));
}

MatrixXd transport_along(const Bundle& E, const Path& p) {
    validate_path(*E.base(), p);
    MatrixXd result = MatrixXd::Identity(E.dim(p.front()), E.dim(p.front()));
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        result = result * E.transport(p[i], p[i + 1]);
    return result;
}

MatrixXd holonomy(const Bundle& E, const Path& loop) {
    if (!is_loop(loop)) throw Error("holonomy: path is not a loop");
    return transport_along(E, loop);
}

void validate_gauge(const Bundle& E, const GaugeTransform& g, double rank_tol) {
    for (VertexId v : E.base()->vertices()) {
        auto it = g.g.find(v);
        if (it == g.g.end())
            throw Error("gauge: missing matrix at vertex " + std::to_string(v));
        if (it->second.rows() != E.dim(v) || it->second.cols() != E.dim(v))
            throw Error("gauge: matrix at vertex " + std::to_string(v) + " has wrong shape");
        require_invertible(it->second, rank_tol, "gauge: vertex " + std::to_string(v));
    }
}

BundlePtr apply_gauge(const Bundle& E, const GaugeTransform& g) {
    validate_gauge(E, g);
    std::map<SimplexKey, MatrixXd> transports;
    for (const auto& [edge, U] : E.stored_transports())
        transports[edge] = g.g.at(edge[0]) * U * g.g.at(edge[1]).inverse();
    return new_bundle(E.base(), E.dims(), std::move(transports));
}

GaugeTransform inverse(const GaugeTransform& g) {
    GaugeTransform r;
    for (const auto& [v, m] : g.g) r.g[v] = m.inverse();
    return r;
}

GaugeTransform compose(const GaugeTransform& g, const GaugeTransform& h) {
    GaugeTransform r;
    for (const auto& [v, m] : g.g) r.g[v] = m * h.g.at(v);
    return r;
}

BundlePtr whitney_sum(const Bundle& E, const Bundle& F) {
    if (!(E.base() == F.base() || *E.base() == *F.base()))
        throw Error("whitney_sum: base complexes differ");
    std::map<VertexId, int> dims;
    for (VertexId v : E.base()->vertices()) dims[v] = E.dim(v) + F.dim(v);
    std::map<SimplexKey, MatrixXd> transports;
    for (const auto& edge : E.base()->edges()) {
        const MatrixXd& A = E.transport(edge[0], edge[1]);
        const MatrixXd& B = F.transport(edge[0], edge[1]);
        MatrixXd block = MatrixXd::Zero(A.rows() + B.rows(), A.cols() + B.cols());
        block.topLeftCorner(A.rows(), A.cols()) = A;
        block.bottomRightCorner(B.rows(), B.cols()) = B;
        transports[edge] = std::move(block);
    }
    return new_bundle(E.base(), std::move(dims), std::move(transports));
}

BundlePtr pullback_bundle(const SimplicialMap& f, const Bundle& E) {
    if (auto bad = check_simplicial_map(f))
        throw Error("pullback_bundle: map is not simplicial");
    std::map<VertexId, int> dims;
    for (VertexId v : f.domain->vertices()) dims[v] = E.dim(f(v));
    std::map<SimplexKey, MatrixXd> transports;
    for (const auto& edge : f.domain->edges()) {
        const VertexId fi = f(edge[0]), fj = f(edge[1]);
        transports[edge] = (fi == fj) ? MatrixXd::Identity(E.dim(fi), E.dim(fi)).eval()
                                      : E.transport(fi, fj);
    }
    return new_bundle(f.domain, std::move(dims), std::move(transports));
}

BundleMap canonical_pullback_map(const SimplicialMap& f, BundlePtr E) {
    BundleMap m{f, {}, pullback_bundle(f, *E), std::move(E)};
    for (VertexId v : f.domain->vertices()) {
        const int n = m.codomain_bundle->dim(f(v));
        m.maps[v] = MatrixXd::Identity(n, n);
    }
    return m;
}

std::optional<SimplexKey> check_bundle_map(const BundleMap& m, Tolerance tol) {
    const Bundle& E = *m.domain_bundle;
    const Bundle& Ep = *m.codomain_bundle;
    for (const auto& edge : m.f.domain->edges()) {
        const VertexId i = edge[0], j = edge[1];
        const MatrixXd& mi = m.maps.at(i);
        const MatrixXd& mj = m.maps.at(j);
        const VertexId fi = m.f(i), fj = m.f(j);
        const MatrixXd lhs = (fi == fj) ? mi : (Ep.transport(fj, fi) * mi).eval();
        const MatrixXd rhs = mj * E.transport(j, i);
        if (!tol.close(lhs, rhs)) return edge;
    }
    return std::nullopt;
}

BundleMap factor_through_pullback(const BundleMap& m, Tolerance tol) {
    if (auto bad = check_bundle_map(m, tol))
        throw Error("factor_through_pullback: input is not a bundle map, square fails on edge " +
                    edge_to_string(*bad));
    BundleMap r{identity_map(m.f.domain), m.maps, m.domain_bundle,
                pullback_bundle(m.f, *m.codomain_bundle)};
    return r;
}

void validate_metric(const Bundle& E, const Metric& M, Tolerance tol) {
    for (VertexId v : E.base()->vertices()) {
        auto it = M.gram.find(v);
        if (it == M.gram.end())
            throw Error("metric: missing Gram matrix at vertex " + std::to_string(v));
        const MatrixXd& G = it->second;
        if (G.rows() != E.dim(v) || G.cols() != E.dim(v))
            throw Error("metric: Gram matrix at vertex " + std::to_string(v) + " has wrong shape");
        if (!tol.close(G, G.transpose().eval()))
            throw Error("metric: Gram matrix at vertex " + std::to_string(v) + " is not symmetric");
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G);
        const auto& ev = eig.eigenvalues();
        if (ev(0) <= kRankTolerance * std::max(1.0, std::abs(ev(ev.size() - 1))))
            throw Error("metric: Gram matrix at vertex " + std::to_string(v) +
                        " is not positive definite");
    }
}

Metric euclidean_metric(const Bundle& E) {
    Metric M;
    for (VertexId v : E.base()->vertices())
        M.gram[v] = MatrixXd::Identity(E.dim(v), E.dim(v));
    return M;
}

std::optional<SimplexKey> is_metric_compatible(const Bundle& E, const Metric& M, Tolerance tol) {
    validate_metric(E, M, tol);
    for (const auto& edge : E.base()->edges()) {
        const MatrixXd& U = E.transport(edge[0], edge[1]);
        const MatrixXd lhs = U.transpose() * M.gram.at(edge[0]) * U;
        if (!tol.close(lhs, M.gram.at(edge[1]))) return edge;
    }
    return std::nullopt;
}

} // namespace dvbc
