#include "dvbc/cochain.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <sstream>

namespace dvbc {

namespace {

std::string key_to_string(std::span<const VertexId> key) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out << ",";
        out << key[i];
    }
    out << "]";
    return out.str();
}

void require_same_base(const SimplicialComplex& a, const SimplicialComplex& b,
                       const char* where) {
    if (!(&a == &b || a == b)) throw Error(std::string(where) + ": operands over different complexes");
}

void require_compatible_bundles(const Bundle& a, const Bundle& b, const char* where) {
    require_same_base(*a.base(), *b.base(), where);
    if (a.dims() != b.dims()) throw Error(std::string(where) + ": fiber dimensions differ");
}

const VectorXd& checked_value(const VectorCochain& c, const SimplexKey& key, const char* where) {
    auto it = c.values.find(key);
    if (it == c.values.end())
        throw Error(std::string(where) + ": missing value on simplex " + key_to_string(key));
    return it->second;
}

const MatrixXd& checked_value(const HomCochain& c, const SimplexKey& key, const char* where) {
    auto it = c.values.find(key);
    if (it == c.values.end())
        throw Error(std::string(where) + ": missing value on simplex " + key_to_string(key));
    return it->second;
}

SimplexKey face_omitting(const SimplexKey& key, std::size_t i) {
    SimplexKey face;
    face.reserve(key.size() - 1);
    for (std::size_t t = 0; t < key.size(); ++t)
        if (t != i) face.push_back(key[t]);
    return face;
}

long binomial(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

long factorial(int n) {
    long r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// All k-element subsets of {0,...,n-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> result;
    std::vector<int> current(k);
    std::iota(current.begin(), current.end(), 0);
    while (true) {
        result.push_back(current);
        int i = k - 1;
        while (i >= 0 && current[i] == n - k + i) --i;
        if (i < 0) break;
        ++current[i];
        for (int j = i + 1; j < k; ++j) current[j] = current[j - 1] + 1;
    }
    return result;
}

} // namespace

double ScalarCochain::value(const SimplexKey& key) const {
    auto it = values.find(key);
    return it == values.end() ? 0.0 : it->second;
}

VectorXd VectorCochain::value(const SimplexKey& key) const {
    auto it = values.find(key);
    if (it != values.end()) return it->second;
    return VectorXd::Zero(E->dim(key.front()));
}

MatrixXd HomCochain::value(const SimplexKey& key) const {
    auto it = values.find(key);
    if (it != values.end()) return it->second;
    return MatrixXd::Zero(E->dim(key.front()), E->dim(key.back()));
}

double eval(const ScalarCochain& w, std::span<const VertexId> ordering) {
    auto [key, parity] = canonicalize(ordering);
    if (!w.X->has_simplex(key))
        throw Error("eval: unknown simplex " + key_to_string(key));
    return parity * w.value(key);
}

VectorXd eval(const VectorCochain& c, std::span<const VertexId> ordering, VertexId base) {
    auto [key, parity] = canonicalize(ordering);
    if (!c.E->base()->has_simplex(key))
        throw Error("eval: unknown simplex " + key_to_string(key));
    VectorXd v = static_cast<double>(parity) * c.value(key);
    if (base == key.front()) return v;
    return c.E->transport(base, key.front()) * v;
}

VectorCochain nabla(const VectorCochain& s) {
    if (s.degree != 0) throw Error("nabla: operand must be a section (degree 0)");
    const Bundle& E = *s.E;
    VectorCochain out{s.E, 1, {}};
    for (const auto& edge : E.base()->edges()) {
        const VectorXd& si = checked_value(s, {edge[0]}, "nabla");
        const VectorXd& sj = checked_value(s, {edge[1]}, "nabla");
        out.values[edge] = E.transport(edge[0], edge[1]) * sj - si;
    }
    return out;
}

ScalarCochain d(const ScalarCochain& w) {
    ScalarCochain out{w.X, w.degree + 1, {}};
    for (const auto& key : w.X->simplices(w.degree + 1)) {
        double sum = 0.0;
        double sign = 1.0;
        for (std::size_t i = 0; i < key.size(); ++i, sign = -sign)
            sum += sign * w.value(face_omitting(key, i));
        out.values[key] = sum;
    }
    return out;
}

VectorCochain d_nabla(const VectorCochain& a) {
    const Bundle& E = *a.E;
    VectorCochain out{a.E, a.degree + 1, {}};
    for (const auto& key : E.base()->simplices(a.degree + 1)) {
        VectorXd sum = E.transport(key[0], key[1]) * checked_value(a, face_omitting(key, 0), "d_nabla");
        double sign = -1.0;
        for (std::size_t i = 1; i < key.size(); ++i, sign = -sign)
            sum += sign * checked_value(a, face_omitting(key, i), "d_nabla");
        out.values[key] = sum;
    }
    return out;
}

VectorXd eval_d_nabla(const VectorCochain& a, std::span<const VertexId> ordering) {
    if (ordering.size() < 2) throw Error("eval_d_nabla: ordering too short");
    const Bundle& E = *a.E;
    SimplexKey rest(ordering.begin() + 1, ordering.end());
    VectorXd sum = E.transport(ordering[0], ordering[1]) * eval(a, rest, ordering[1]);
    double sign = -1.0;
    for (std::size_t i = 1; i < ordering.size(); ++i, sign = -sign) {
        SimplexKey face;
        for (std::size_t t = 0; t < ordering.size(); ++t)
            if (t != i) face.push_back(ordering[t]);
        sum += sign * eval(a, face, ordering[0]);
    }
    return sum;
}

VectorXd cup_eval(const VectorCochain& a, const ScalarCochain& w, CupOrder order,
                  std::span<const VertexId> ordering, VertexId base) {
    const std::size_t k = static_cast<std::size_t>(a.degree);
    const std::size_t l = static_cast<std::size_t>(w.degree);
    if (ordering.size() != k + l + 1)
        throw Error("cup: ordering size does not match degrees");
    const std::size_t split = order == CupOrder::AlphaFirst ? k : l;
    auto front = ordering.subspan(0, split + 1);
    auto back = ordering.subspan(split);
    if (order == CupOrder::AlphaFirst)
        return eval(a, front, base) * eval(w, back);
    return eval(w, front) * eval(a, back, base);
}

VectorCochain cup(const VectorCochain& a, const ScalarCochain& w, CupOrder order) {
    require_same_base(*a.E->base(), *w.X, "cup");
    const int out_degree = a.degree + w.degree;
    if (out_degree > a.E->base()->dimension())
        throw Error("cup: degree overflow beyond complex dimension");
    VectorCochain out{a.E, out_degree, {}};
    for (const auto& key : a.E->base()->simplices(out_degree))
        out.values[key] = cup_eval(a, w, order, key, key.front());
    return out;
}

VectorCochain wedge(const VectorCochain& a, const ScalarCochain& w, CupOrder order) {
    require_same_base(*a.E->base(), *w.X, "wedge");
    const int out_degree = a.degree + w.degree;
    if (out_degree > a.E->base()->dimension())
        throw Error("wedge: degree overflow beyond complex dimension");
    const int m = out_degree + 1;
    VectorCochain out{a.E, out_degree, {}};
    for (const auto& key : a.E->base()->simplices(out_degree)) {
        VectorXd sum = VectorXd::Zero(a.E->dim(key.front()));
        std::vector<int> idx(m);
        std::iota(idx.begin(), idx.end(), 0);
        do {
            int inversions = 0;
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    if (idx[i] > idx[j]) ++inversions;
            SimplexKey ordering(m);
            for (int i = 0; i < m; ++i) ordering[i] = key[idx[i]];
            const double sign = inversions % 2 == 0 ? 1.0 : -1.0;
            sum += sign * cup_eval(a, w, order, ordering, key.front());
        } while (std::next_permutation(idx.begin(), idx.end()));
        out.values[key] = sum / static_cast<double>(factorial(m));
    }
    return out;
}

VectorCochain wedge_averaged(const VectorCochain& a, const ScalarCochain& w, AveragingMode mode) {
    require_same_base(*a.E->base(), *w.X, "wedge_averaged");
    const int k = a.degree;
    const int l = w.degree;
    const int out_degree = k + l;
    if (out_degree > a.E->base()->dimension())
        throw Error("wedge_averaged: degree overflow beyond complex dimension");
    const int m = out_degree + 1;
    VectorCochain out{a.E, out_degree, {}};
    for (const auto& key : a.E->base()->simplices(out_degree)) {
        const VertexId base = key.front();
        VectorXd sum = VectorXd::Zero(a.E->dim(base));
        if (mode == AveragingMode::OuterAlpha) {
            // One alpha face per (k+1)-subset; the inner average runs over the
            // scalar evaluations v * (sigma \ f), oriented so the combined
            // ordering (f \ {v}, v, sigma \ f) is an even permutation.
            for (const auto& positions : subsets(m, k + 1)) {
                SimplexKey face(k + 1);
                std::vector<bool> in_face(m, false);
                for (int t = 0; t <= k; ++t) {
                    face[t] = key[positions[t]];
                    in_face[positions[t]] = true;
                }
                SimplexKey complement;
                for (int t = 0; t < m; ++t)
                    if (!in_face[t]) complement.push_back(key[t]);
                const VectorXd alpha_part = eval(a, face, base);
                double inner = 0.0;
                for (int vi = 0; vi <= k; ++vi) {
                    SimplexKey seq;
                    seq.reserve(m);
                    for (int t = 0; t <= k; ++t)
                        if (t != vi) seq.push_back(face[t]);
                    seq.push_back(face[vi]);
                    seq.insert(seq.end(), complement.begin(), complement.end());
                    SimplexKey w_ordering{face[vi]};
                    w_ordering.insert(w_ordering.end(), complement.begin(), complement.end());
                    const int move_sign = (k - vi) % 2 == 0 ? 1 : -1;
                    inner += ordering_parity(seq) * move_sign * eval(w, w_ordering);
                }
                sum += alpha_part * (inner / (k + 1));
            }
            sum /= static_cast<double>(binomial(m, k + 1));
        } else {
            // One scalar face per (l+1)-subset; the inner average runs over
            // the alpha evaluations on (sigma \ f, v).
            for (const auto& positions : subsets(m, l + 1)) {
                SimplexKey face(l + 1);
                std::vector<bool> in_face(m, false);
                for (int t = 0; t <= l; ++t) {
                    face[t] = key[positions[t]];
                    in_face[positions[t]] = true;
                }
                SimplexKey complement;
                for (int t = 0; t < m; ++t)
                    if (!in_face[t]) complement.push_back(key[t]);
                for (int vi = 0; vi <= l; ++vi) {
                    SimplexKey alpha_ordering = complement;
                    alpha_ordering.push_back(face[vi]);
                    SimplexKey w_ordering{face[vi]};
                    for (int t = 0; t <= l; ++t)
                        if (t != vi) w_ordering.push_back(face[t]);
                    SimplexKey seq = alpha_ordering;
                    seq.insert(seq.end(), w_ordering.begin() + 1, w_ordering.end());
                    sum += ordering_parity(seq) * eval(a, alpha_ordering, base) *
                           eval(w, w_ordering);
                }
            }
            sum /= static_cast<double>(binomial(m, l + 1) * (l + 1));
        }
        out.values[key] = sum;
    }
    return out;
}

VectorCochain pullback_cochain(const SimplicialMap& f, const VectorCochain& a) {
    return pullback_cochain(f, a, pullback_bundle(f, *a.E));
}

VectorCochain pullback_cochain(const SimplicialMap& f, const VectorCochain& a,
                               BundlePtr pulled_back) {
    require_same_base(*a.E->base(), *f.codomain, "pullback_cochain");
    VectorCochain out{std::move(pulled_back), a.degree, {}};
    for (const auto& key : f.domain->simplices(a.degree)) {
        SimplexKey image_ordering;
        image_ordering.reserve(key.size());
        for (VertexId u : key) image_ordering.push_back(f(u));
        std::set<VertexId> distinct(image_ordering.begin(), image_ordering.end());
        if (distinct.size() == key.size())
            out.values[key] = eval(a, image_ordering, f(key.front()));
        else
            out.values[key] = VectorXd::Zero(out.E->dim(key.front()));
    }
    return out;
}

ScalarCochain pullback_cochain(const SimplicialMap& f, const ScalarCochain& w) {
    require_same_base(*w.X, *f.codomain, "pullback_cochain");
    ScalarCochain out{f.domain, w.degree, {}};
    for (const auto& key : f.domain->simplices(w.degree)) {
        SimplexKey image_ordering;
        image_ordering.reserve(key.size());
        for (VertexId u : key) image_ordering.push_back(f(u));
        std::set<VertexId> distinct(image_ordering.begin(), image_ordering.end());
        out.values[key] = distinct.size() == key.size() ? eval(w, image_ordering) : 0.0;
    }
    return out;
}

HomCochain curvature(BundlePtr E) {
    HomCochain F{E, 2, {}};
    for (const auto& key : E->base()->simplices(2))
        F.values[key] = E->transport(key[0], key[1]) * E->transport(key[1], key[2]) -
                        E->transport(key[0], key[2]);
    return F;
}

MatrixXd curvature_permuted(const Bundle& E, std::span<const VertexId> ordering) {
    auto [key, parity] = canonicalize(ordering);
    (void)parity;
    if (key.size() != 3 || !E.base()->has_simplex(key))
        throw Error("curvature_permuted: " + key_to_string(ordering) + " is not a stored triangle");
    const VertexId a = key[0], b = key[1], c = key[2];
    const MatrixXd F0 = E.transport(a, b) * E.transport(b, c) - E.transport(a, c);
    std::array<int, 3> pattern{};
    for (int t = 0; t < 3; ++t)
        pattern[t] = ordering[t] == a ? 0 : (ordering[t] == b ? 1 : 2);
    // Closed forms for each reorientation of the triangle [abc].
    if (pattern == std::array<int, 3>{0, 1, 2}) return F0;
    if (pattern == std::array<int, 3>{0, 2, 1}) return -F0 * E.transport(c, b);
    if (pattern == std::array<int, 3>{1, 0, 2}) return -E.transport(b, a) * F0;
    if (pattern == std::array<int, 3>{1, 2, 0}) return E.transport(b, a) * F0 * E.transport(c, a);
    if (pattern == std::array<int, 3>{2, 0, 1}) return E.transport(c, a) * F0 * E.transport(c, b);
    return -E.transport(c, b) * E.transport(b, a) * F0 * E.transport(c, a);  // [2,1,0]
}

VectorCochain hom_action(const HomCochain& A, const VectorCochain& a) {
    if (A.E) require_compatible_bundles(*A.E, *a.E, "hom_action");
    const int out_degree = A.degree + a.degree;
    if (out_degree > a.E->base()->dimension())
        throw Error("hom_action: degree overflow beyond complex dimension");
    VectorCochain out{a.E, out_degree, {}};
    for (const auto& key : a.E->base()->simplices(out_degree)) {
        SimplexKey front(key.begin(), key.begin() + A.degree + 1);
        SimplexKey back(key.begin() + A.degree, key.end());
        const MatrixXd Av = A.value(front);
        const VectorXd av = a.value(back);
        if (Av.cols() != av.size()) throw Error("hom_action: shape mismatch on " + key_to_string(key));
        out.values[key] = Av * av;
    }
    return out;
}

HomCochain d_nabla_hom(const HomCochain& A) {
    const Bundle& E = *A.E;
    const int k = A.degree;
    HomCochain out{A.E, k + 1, {}};
    for (const auto& key : E.base()->simplices(k + 1)) {
        MatrixXd sum =
            E.transport(key[0], key[1]) * checked_value(A, face_omitting(key, 0), "d_nabla_hom");
        double sign = -1.0;
        for (int i = 1; i <= k; ++i, sign = -sign)
            sum += sign * checked_value(A, face_omitting(key, static_cast<std::size_t>(i)),
                                        "d_nabla_hom");
        SimplexKey front(key.begin(), key.begin() + k + 1);
        sum += sign * checked_value(A, front, "d_nabla_hom") *
               E.transport(key[k], key[k + 1]);
        out.values[key] = sum;
    }
    return out;
}

ScalarCochain dot_sections(const VectorCochain& s, const VectorCochain& s2, const Metric& M) {
    require_compatible_bundles(*s.E, *s2.E, "dot_sections");
    if (s.degree != 0 || s2.degree != 0) throw Error("dot_sections: operands must be sections");
    validate_metric(*s.E, M);
    ScalarCochain out{s.E->base(), 0, {}};
    for (const auto& key : s.E->base()->simplices(0))
        out.values[key] = s.value(key).dot(M.gram.at(key[0]) * s2.value(key));
    return out;
}

ScalarCochain dot_cochain1_section(const VectorCochain& a, const VectorCochain& s,
                                   const Metric& M) {
    require_compatible_bundles(*a.E, *s.E, "dot_cochain1_section");
    if (a.degree != 1 || s.degree != 0)
        throw Error("dot_cochain1_section: expects a 1-cochain and a section");
    validate_metric(*a.E, M);
    const Bundle& E = *a.E;
    ScalarCochain out{E.base(), 1, {}};
    for (const auto& edge : E.base()->edges()) {
        const VectorXd avg =
            0.5 * (s.value({edge[0]}) + E.transport(edge[0], edge[1]) * s.value({edge[1]}));
        out.values[edge] = a.value(edge).dot(M.gram.at(edge[0]) * avg);
    }
    return out;
}

} // namespace dvbc
