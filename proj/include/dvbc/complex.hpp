#ifndef DVBC_COMPLEX_HPP
#define DVBC_COMPLEX_HPP

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dvbc/tolerance.hpp"

namespace dvbc {

using VertexId = int;

/// Canonical key of an oriented simplex: the strictly increasing list of its
/// vertex ids.  Any other ordering of the same vertices is handled through
/// permutation parity, never stored.
using SimplexKey = std::vector<VertexId>;

/// Sorts `ordering` into a canonical key and returns the sign of the sorting
/// permutation.  Throws on a repeated vertex (degenerate ordering).
std::pair<SimplexKey, int> canonicalize(std::span<const VertexId> ordering);

/// Sign of the permutation taking the canonical (ascending) order to
/// `ordering`; same as canonicalize().second.
int ordering_parity(std::span<const VertexId> ordering);

/// A finite abstract simplicial complex: a vertex set together with a
/// downward-closed family of simplices, stored per dimension in canonical
/// ascending key order.  Immutable after construction.
class SimplicialComplex {
public:
    /// Builds the closure of the given top cells.  Each cell is a list of
    /// distinct vertex ids in any order; all faces are generated.
    static SimplicialComplex from_top_cells(const std::vector<std::vector<VertexId>>& top_cells);

    int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
    const std::vector<VertexId>& vertices() const { return vertices_; }

    /// Simplices of dimension k in canonical order (empty span if none).
    const std::vector<SimplexKey>& simplices(int k) const;
    const std::vector<SimplexKey>& edges() const { return simplices(1); }

    bool has_vertex(VertexId v) const;
    bool has_simplex(const SimplexKey& canonical_key) const;
    bool has_edge(VertexId a, VertexId b) const;

    /// Maximal simplices (those not a face of any stored simplex), canonical
    /// order within each dimension, ascending dimension.
    std::vector<SimplexKey> facets() const;

    bool operator==(const SimplicialComplex& other) const = default;

private:
    std::vector<VertexId> vertices_;                 // ascending
    std::vector<std::vector<SimplexKey>> by_dim_;    // by_dim_[k] sorted
    static const std::vector<SimplexKey> kEmpty;
};

using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

ComplexPtr build_complex(const std::vector<std::vector<VertexId>>& top_cells);

/// An abstract simplicial map, represented by its vertex map.  Valid when
/// the image vertex set of every domain simplex spans a codomain simplex
/// (collapses to lower dimension allowed).
struct SimplicialMap {
    ComplexPtr domain;
    ComplexPtr codomain;
    std::map<VertexId, VertexId> vertex_map;

    VertexId operator()(VertexId v) const;

    /// Deduplicated, sorted image of a simplex; always a valid key, not
    /// necessarily of the same dimension.
    SimplexKey image(const SimplexKey& simplex) const;
};

SimplicialMap identity_map(ComplexPtr X);
SimplicialMap compose(const SimplicialMap& g, const SimplicialMap& f);  // g after f

/// nullopt when f is simplicial; otherwise the first domain simplex (canonical
/// order, ascending dimension) whose image spans no codomain simplex.
std::optional<SimplexKey> check_simplicial_map(const SimplicialMap& f);

/// A path is a vertex sequence whose consecutive pairs are edges; a loop
/// additionally closes up.  Single-vertex paths are allowed.
using Path = std::vector<VertexId>;

void validate_path(const SimplicialComplex& X, const Path& p);
bool is_loop(const Path& p);
Path concatenate(const Path& p, const Path& q);  // q must start where p ends

/// Rooted spanning tree of the 1-skeleton, stored as parent pointers.
struct SpanningTree {
    VertexId root = 0;
    std::map<VertexId, VertexId> parent;  // every vertex except the root

    Path path_from_root(VertexId v) const;
    Path path_to_root(VertexId v) const;
    bool contains_edge(VertexId a, VertexId b) const;
};

/// Deterministic spanning tree: breadth-first search from the smallest
/// vertex id, visiting neighbors in ascending order.  Throws a connectivity
/// error naming two components when the 1-skeleton is disconnected.
SpanningTree spanning_tree(const SimplicialComplex& X);

/// Edges of X not in the tree, canonical order.
std::vector<SimplexKey> non_tree_edges(const SimplicialComplex& X, const SpanningTree& tree);

/// One loop per non-tree edge {u,v} (u < v), based at the root: tree path
/// root -> u, the edge to v, tree path v -> root.  These loops generate the
/// fundamental group of the 1-skeleton.
std::vector<Path> generator_loops(const SimplicialComplex& X, const SpanningTree& tree);

enum class HomotopyMove { Insert, Delete };

/// Elementary simple homotopy of a path.  Insert places `inserted` between
/// positions i and i+1; Delete removes the vertex at position i (which may
/// not be an endpoint).  The three vertices involved must span a 2-simplex
/// of X, otherwise an invalid-move error is thrown.
Path apply_elementary_homotopy(const SimplicialComplex& X, const Path& p, std::size_t i,
                               HomotopyMove move, VertexId inserted = -1);

} // namespace dvbc

#endif
