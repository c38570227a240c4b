#ifndef DVBC_BUNDLE_HPP
#define DVBC_BUNDLE_HPP

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>

#include "dvbc/complex.hpp"
#include "dvbc/tolerance.hpp"

namespace dvbc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A discrete vector bundle with connection: one fiber dimension per vertex
/// and one invertible transport matrix per edge.
///
/// Index convention: the first index is the target, so U_{ij} maps the fiber
/// at j to the fiber at i.  Storage keeps U_{ij} on the ascending edge key
/// {i<j}; the reverse transport U_{ji} is the inverse, computed once at
/// construction so that U_{ij} U_{ji} = I holds to machine precision.
class Bundle {
public:
    /// Validates and builds a bundle.  `transports` maps each ascending edge
    /// key {i<j} to U_{ij} of shape dim(i) x dim(j).  Errors: missing edge
    /// matrix, shape mismatch, or a matrix that is rank deficient at
    /// `rank_tol` (relative to its largest singular value).
    static Bundle create(ComplexPtr base, std::map<VertexId, int> dims,
                         std::map<SimplexKey, MatrixXd> transports,
                         double rank_tol = kRankTolerance);

    /// Uniform fiber dimension convenience overload.
    static Bundle create(ComplexPtr base, int dim, std::map<SimplexKey, MatrixXd> transports,
                         double rank_tol = kRankTolerance);

    /// As create(), but explicit reverse matrices may replace the computed
    /// inverses on selected edges.  Only shape is validated for these; the
    /// inverse-pair property becomes checkable rather than guaranteed.  Used
    /// by the file loader so that corrupted connections can be diagnosed.
    static Bundle create_with_reverse(ComplexPtr base, std::map<VertexId, int> dims,
                                      std::map<SimplexKey, MatrixXd> transports,
                                      std::map<SimplexKey, MatrixXd> reverse_overrides,
                                      double rank_tol = kRankTolerance);

    const ComplexPtr& base() const { return base_; }
    int dim(VertexId v) const;
    const std::map<VertexId, int>& dims() const { return dims_; }

    /// U_{ij} : fiber(j) -> fiber(i).  {i,j} must be an edge.
    const MatrixXd& transport(VertexId i, VertexId j) const;

    /// The stored forward matrices, keyed by ascending edge.
    const std::map<SimplexKey, MatrixXd>& stored_transports() const { return forward_; }

    /// Edges whose reverse transport was supplied explicitly instead of
    /// being the computed inverse (ascending keys).
    const std::map<SimplexKey, MatrixXd>& reverse_overrides() const { return overrides_; }

private:
    ComplexPtr base_;
    std::map<VertexId, int> dims_;
    std::map<SimplexKey, MatrixXd> forward_;   // {i<j} -> U_{ij}
    std::map<SimplexKey, MatrixXd> reverse_;   // {i<j} -> U_{ji}
    std::map<SimplexKey, MatrixXd> overrides_;
};

using BundlePtr = std::shared_ptr<const Bundle>;

BundlePtr new_bundle(ComplexPtr base, int dim, std::map<SimplexKey, MatrixXd> transports);
BundlePtr new_bundle(ComplexPtr base, std::map<VertexId, int> dims,
                     std::map<SimplexKey, MatrixXd> transports);

/// Composite transport along a path, edge by edge toward the start:
/// U_{v0 v1} U_{v1 v2} ... U_{v(k-1) vk}, mapping fiber(vk) -> fiber(v0).
/// A single-vertex path gives the identity.
MatrixXd transport_along(const Bundle& E, const Path& p);

/// Parallel transport around a loop, based at its first vertex.
MatrixXd holonomy(const Bundle& E, const Path& loop);

/// Per-vertex change of fiber basis; acts on transports by
/// U_{ij} -> g_i U_{ij} g_j^{-1}.
struct GaugeTransform {
    std::map<VertexId, MatrixXd> g;
};

/// Validates invertibility and dimensions of g against E.
void validate_gauge(const Bundle& E, const GaugeTransform& g, double rank_tol = kRankTolerance);

BundlePtr apply_gauge(const Bundle& E, const GaugeTransform& g);

GaugeTransform inverse(const GaugeTransform& g);
GaugeTransform compose(const GaugeTransform& g, const GaugeTransform& h);  // (g*h)_i = g_i h_i

/// Whitney sum over a common base: fibers concatenate, transports become
/// block diagonal.
BundlePtr whitney_sum(const Bundle& E, const Bundle& F);

/// Pullback along a simplicial map f: the fiber over a domain vertex i is
/// the fiber over f(i); a domain edge gets the image-edge transport, or the
/// identity when f collapses it to a vertex.
BundlePtr pullback_bundle(const SimplicialMap& f, const Bundle& E);

/// A map of bundles covering a simplicial map: one linear map per domain
/// vertex, fiber(l) -> fiber'(f(l)), subject to the commuting-square
/// condition checked by check_bundle_map.
struct BundleMap {
    SimplicialMap f;
    std::map<VertexId, MatrixXd> maps;
    BundlePtr domain_bundle;
    BundlePtr codomain_bundle;
};

/// The canonical map f*E -> E with identity fiber maps.
BundleMap canonical_pullback_map(const SimplicialMap& f, BundlePtr E);

/// nullopt when the square U'_{f(j)f(i)} m_i = m_j U_{ji} commutes on every
/// edge within tol; otherwise the first violating edge in canonical order.
std::optional<SimplexKey> check_bundle_map(const BundleMap& m, Tolerance tol = {});

/// Factors a bundle map m: E' -> E covering f through the pullback:
/// returns the unique map E' -> f*E over the identity with the same fiber
/// matrices.  Throws when m itself is not a valid bundle map.
BundleMap factor_through_pullback(const BundleMap& m, Tolerance tol = {});

/// Fiberwise inner products, stored as one Gram matrix per vertex.
struct Metric {
    std::map<VertexId, MatrixXd> gram;
};

/// Validates symmetry and positive definiteness against E's fibers.
void validate_metric(const Bundle& E, const Metric& M, Tolerance tol = {});

Metric euclidean_metric(const Bundle& E);

/// nullopt when every transport preserves the metric, in Gram form
/// U_{ij}^T G_i U_{ij} = G_j; otherwise the first violating edge.
std::optional<SimplexKey> is_metric_compatible(const Bundle& E, const Metric& M,
                                               Tolerance tol = {});

} // namespace dvbc

#endif
