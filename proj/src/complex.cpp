#include "dvbc/complex.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace dvbc {

namespace {

std::string key_to_string(const SimplexKey& key) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out << ",";
        out << key[i];
    }
    out << "]";
    return out.str();
}

} // namespace

std::pair<SimplexKey, int> canonicalize(std::span<const VertexId> ordering) {
    if (ordering.empty()) throw Error("canonicalize: empty vertex ordering");
    SimplexKey key(ordering.begin(), ordering.end());
    // Parity by inversion count; orderings are tiny.
    int inversions = 0;
    for (std::size_t i = 0; i < key.size(); ++i)
        for (std::size_t j = i + 1; j < key.size(); ++j) {
            if (key[i] == key[j])
                throw Error("degenerate ordering: repeated vertex " + std::to_string(key[i]));
            if (key[i] > key[j]) ++inversions;
        }
    std::sort(key.begin(), key.end());
    return {std::move(key), inversions % 2 == 0 ? 1 : -1};
}

int ordering_parity(std::span<const VertexId> ordering) {
    return canonicalize(ordering).second;
}

const std::vector<SimplexKey> SimplicialComplex::kEmpty{};

SimplicialComplex SimplicialComplex::from_top_cells(
    const std::vector<std::vector<VertexId>>& top_cells) {
    std::vector<std::set<SimplexKey>> closure;
    for (const auto& cell : top_cells) {
        if (cell.empty()) throw Error("build_complex: empty cell");
        auto [key, parity] = canonicalize(cell);
        (void)parity;
        for (VertexId v : key)
            if (v < 0) throw Error("build_complex: negative vertex id " + std::to_string(v));
        // Enumerate all non-empty subsets of the cell.
        const std::size_t n = key.size();
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            SimplexKey face;
            for (std::size_t b = 0; b < n; ++b)
                if (mask & (1u << b)) face.push_back(key[b]);
            const std::size_t dim = face.size() - 1;
            if (closure.size() <= dim) closure.resize(dim + 1);
            closure[dim].insert(std::move(face));
        }
    }
    SimplicialComplex X;
    X.by_dim_.reserve(closure.size());
    for (auto& level : closure)
        X.by_dim_.emplace_back(level.begin(), level.end());
    if (!X.by_dim_.empty())
        for (const auto& key : X.by_dim_[0]) X.vertices_.push_back(key[0]);
    return X;
}

const std::vector<SimplexKey>& SimplicialComplex::simplices(int k) const {
    if (k < 0 || k >= static_cast<int>(by_dim_.size())) return kEmpty;
    return by_dim_[k];
}

bool SimplicialComplex::has_vertex(VertexId v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

bool SimplicialComplex::has_simplex(const SimplexKey& key) const {
    const int k = static_cast<int>(key.size()) - 1;
    const auto& level = simplices(k);
    return std::binary_search(level.begin(), level.end(), key);
}

bool SimplicialComplex::has_edge(VertexId a, VertexId b) const {
    if (a > b) std::swap(a, b);
    return has_simplex({a, b});
}

std::vector<SimplexKey> SimplicialComplex::facets() const {
    std::vector<SimplexKey> result;
    for (int k = 0; k <= dimension(); ++k) {
        for (const auto& key : simplices(k)) {
            bool maximal = true;
            // A k-simplex is a facet iff no (k+1)-simplex contains it.
            for (const auto& upper : simplices(k + 1)) {
                if (std::includes(upper.begin(), upper.end(), key.begin(), key.end())) {
                    maximal = false;
                    break;
                }
            }
            if (maximal) result.push_back(key);
        }
    }
    return result;
}

ComplexPtr build_complex(const std::vector<std::vector<VertexId>>& top_cells) {
    return std::make_shared<SimplicialComplex>(SimplicialComplex::from_top_cells(top_cells));
}

VertexId SimplicialMap::operator()(VertexId v) const {
    auto it = vertex_map.find(v);
    if (it == vertex_map.end())
        throw Error("simplicial map: no image for vertex " + std::to_string(v));
    return it->second;
}

SimplexKey SimplicialMap::image(const SimplexKey& simplex) const {
    std::set<VertexId> image_set;
    for (VertexId v : simplex) image_set.insert((*this)(v));
    return SimplexKey(image_set.begin(), image_set.end());
}

SimplicialMap identity_map(ComplexPtr X) {
    SimplicialMap f{X, X, {}};
    for (VertexId v : X->vertices()) f.vertex_map[v] = v;
    return f;
}

SimplicialMap compose(const SimplicialMap& g, const SimplicialMap& f) {
    SimplicialMap h{f.domain, g.codomain, {}};
    for (const auto& [v, fv] : f.vertex_map) h.vertex_map[v] = g(fv);
    return h;
}

std::optional<SimplexKey> check_simplicial_map(const SimplicialMap& f) {
    for (VertexId v : f.domain->vertices())
        if (!f.vertex_map.count(v))
            throw Error("simplicial map: vertex map not total, missing vertex " + std::to_string(v));
    for (int k = 0; k <= f.domain->dimension(); ++k)
        for (const auto& key : f.domain->simplices(k))
            if (!f.codomain->has_simplex(f.image(key))) return key;
    return std::nullopt;
}

void validate_path(const SimplicialComplex& X, const Path& p) {
    if (p.empty()) throw Error("path: empty vertex sequence");
    for (VertexId v : p)
        if (!X.has_vertex(v)) throw Error("path: unknown vertex " + std::to_string(v));
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!X.has_edge(p[i], p[i + 1]))
            throw Error("path: {" + std::to_string(p[i]) + "," + std::to_string(p[i + 1]) +
                        "} is not an edge");
}

bool is_loop(const Path& p) { return !p.empty() && p.front() == p.back(); }

Path concatenate(const Path& p, const Path& q) {
    if (p.empty() || q.empty() || p.back() != q.front())
        throw Error("concatenate: second path must start where the first ends");
    Path r = p;
    r.insert(r.end(), q.begin() + 1, q.end());
    return r;
}

Path SpanningTree::path_to_root(VertexId v) const {
    Path p{v};
    while (p.back() != root) {
        auto it = parent.find(p.back());
        if (it == parent.end())
            throw Error("spanning tree: vertex " + std::to_string(p.back()) + " not in tree");
        p.push_back(it->second);
    }
    return p;
}

Path SpanningTree::path_from_root(VertexId v) const {
    Path p = path_to_root(v);
    std::reverse(p.begin(), p.end());
    return p;
}

bool SpanningTree::contains_edge(VertexId a, VertexId b) const {
    auto it = parent.find(a);
    if (it != parent.end() && it->second == b) return true;
    it = parent.find(b);
    return it != parent.end() && it->second == a;
}

SpanningTree spanning_tree(const SimplicialComplex& X) {
    const auto& vertices = X.vertices();
    if (vertices.empty()) throw Error("spanning_tree: complex has no vertices");

    std::map<VertexId, std::vector<VertexId>> adjacency;
    for (const auto& edge : X.edges()) {
        adjacency[edge[0]].push_back(edge[1]);
        adjacency[edge[1]].push_back(edge[0]);
    }
    for (auto& [v, nbrs] : adjacency) std::sort(nbrs.begin(), nbrs.end());

    SpanningTree tree;
    tree.root = vertices.front();
    std::set<VertexId> visited{tree.root};
    std::queue<VertexId> frontier;
    frontier.push(tree.root);
    while (!frontier.empty()) {
        VertexId v = frontier.front();
        frontier.pop();
        auto it = adjacency.find(v);
        if (it == adjacency.end()) continue;
        for (VertexId w : it->second) {
            if (visited.insert(w).second) {
                tree.parent[w] = v;
                frontier.push(w);
            }
        }
    }
    if (visited.size() != vertices.size()) {
        VertexId missing = 0;
        for (VertexId v : vertices)
            if (!visited.count(v)) {
                missing = v;
                break;
            }
        throw Error("spanning_tree: complex is disconnected; vertex " + std::to_string(missing) +
                    " is not reachable from vertex " + std::to_string(tree.root));
    }
    return tree;
}

std::vector<SimplexKey> non_tree_edges(const SimplicialComplex& X, const SpanningTree& tree) {
    std::vector<SimplexKey> result;
    for (const auto& edge : X.edges())
        if (!tree.contains_edge(edge[0], edge[1])) result.push_back(edge);
    return result;
}

std::vector<Path> generator_loops(const SimplicialComplex& X, const SpanningTree& tree) {
    std::vector<Path> loops;
    for (const auto& edge : non_tree_edges(X, tree)) {
        Path out = tree.path_from_root(edge[0]);
        out.push_back(edge[1]);
        loops.push_back(concatenate(out, tree.path_to_root(edge[1])));
    }
    return loops;
}

Path apply_elementary_homotopy(const SimplicialComplex& X, const Path& p, std::size_t i,
                               HomotopyMove move, VertexId inserted) {
    validate_path(X, p);
    Path q = p;
    if (move == HomotopyMove::Insert) {
        if (i + 1 >= p.size())
            throw Error("homotopy: insert position " + std::to_string(i) + " out of range");
        auto [tri, parity] = canonicalize(std::vector<VertexId>{p[i], inserted, p[i + 1]});
        (void)parity;
        if (!X.has_simplex(tri))
            throw Error("homotopy: invalid move, " + key_to_string(tri) +
                        " does not span a 2-simplex");
        q.insert(q.begin() + static_cast<std::ptrdiff_t>(i) + 1, inserted);
    } else {
        if (i == 0 || i + 1 >= p.size())
            throw Error("homotopy: cannot delete an endpoint");
        auto [tri, parity] = canonicalize(std::vector<VertexId>{p[i - 1], p[i], p[i + 1]});
        (void)parity;
        if (!X.has_simplex(tri))
            throw Error("homotopy: invalid move, " + key_to_string(tri) +
                        " does not span a 2-simplex");
        q.erase(q.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return q;
}

} // namespace dvbc
