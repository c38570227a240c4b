#ifndef DVBC_COCHAIN_HPP
#define DVBC_COCHAIN_HPP

#include <map>
#include <span>

#include "dvbc/bundle.hpp"

namespace dvbc {

/// Real-valued k-cochain.  Values are stored on canonical keys only;
/// evaluation on a permuted ordering multiplies by permutation parity.
/// A simplex of X without an entry evaluates to zero.
struct ScalarCochain {
    ComplexPtr X;
    int degree = 0;
    std::map<SimplexKey, double> values;

    double value(const SimplexKey& canonical_key) const;
};

/// Bundle-valued k-cochain.  The value on a canonical k-simplex lives in the
/// fiber at the simplex's lowest vertex.  Missing entries evaluate to the
/// zero vector of that fiber.
struct VectorCochain {
    BundlePtr E;
    int degree = 0;
    std::map<SimplexKey, VectorXd> values;

    VectorXd value(const SimplexKey& canonical_key) const;
};

/// Homomorphism-valued k-cochain: the value on [v0 < ... < vk] is a matrix
/// mapping the fiber at vk to the fiber at v0.  Stored on canonical keys
/// only; reorientation is provided just for curvature via the closed forms
/// of curvature_permuted.
struct HomCochain {
    BundlePtr E;
    int degree = 0;
    std::map<SimplexKey, MatrixXd> values;

    MatrixXd value(const SimplexKey& canonical_key) const;
};

/// Scalar evaluation on an arbitrary ordering of a stored simplex:
/// parity times the stored value.
double eval(const ScalarCochain& w, std::span<const VertexId> ordering);

/// Evaluation of a bundle-valued cochain on an arbitrary ordering of a
/// stored simplex, transported to `base`: the parity-signed stored value is
/// carried from the simplex's lowest vertex to `base` along the direct edge
/// (no transport when `base` is the lowest vertex itself).  `base` need not
/// lie in the ordering, but the edge must exist; inside a common simplex it
/// always does.
VectorXd eval(const VectorCochain& c, std::span<const VertexId> ordering, VertexId base);

/// Covariant derivative of a section: value U_{ij} s_j - s_i on each edge
/// {i<j}.  Coincides with d_nabla in degree 0.
VectorCochain nabla(const VectorCochain& s);

/// Simplicial coboundary of a scalar cochain (alternating facet sum).
ScalarCochain d(const ScalarCochain& w);

/// Exterior covariant derivative: on a canonical (k+1)-simplex,
///   U_{01} a[1..k+1]  +  sum_{i>=1} (-1)^i a[0..^i..k+1].
/// Requires a value on every face it touches.
VectorCochain d_nabla(const VectorCochain& a);

/// The same alternating formula carried out on an arbitrary ordering of a
/// simplex, anchored at its first vertex.  On non-canonical orderings this
/// is a genuinely different construction from the parity rule (they differ
/// by curvature terms), and it is the one pullbacks of derived cochains
/// follow: the derivative commutes with pullback exactly when the image
/// ordering is evaluated this way.
VectorXd eval_d_nabla(const VectorCochain& a, std::span<const VertexId> ordering);

enum class CupOrder { AlphaFirst, WFirst };

/// Cup product of a bundle-valued k-cochain with a scalar l-cochain: the
/// front face carries one factor, the back face the other, with the
/// bundle value transported to the simplex's lowest vertex.
VectorCochain cup(const VectorCochain& a, const ScalarCochain& w, CupOrder order);

/// Cup evaluated on one ordering of a (k+l)-simplex, result transported to
/// `base`.  This is the term generator for the wedge's permutation sum.
VectorXd cup_eval(const VectorCochain& a, const ScalarCochain& w, CupOrder order,
                  std::span<const VertexId> ordering, VertexId base);

/// Wedge product: the cup antisymmetrized over all orderings of each
/// simplex, normalized by 1/(k+l+1)!.  `order` selects which factor feeds
/// the cup first.  Sums are evaluated exactly.
VectorCochain wedge(const VectorCochain& a, const ScalarCochain& w, CupOrder order);

enum class AveragingMode { OuterAlpha, OuterW };

/// The same product arranged as a double average: the outer sum runs over
/// faces carrying one factor, the inner average over the complementary
/// evaluations of the other, with orientations fixed by the even-permutation
/// rule.  Equals wedge(a, w, AlphaFirst) on every input.
VectorCochain wedge_averaged(const VectorCochain& a, const ScalarCochain& w, AveragingMode mode);

/// Pullback of a cochain along a simplicial map, valued in the pullback
/// bundle: the image-simplex value transported to the image of the lowest
/// vertex when the image keeps full dimension, zero otherwise.
VectorCochain pullback_cochain(const SimplicialMap& f, const VectorCochain& a);
VectorCochain pullback_cochain(const SimplicialMap& f, const VectorCochain& a,
                               BundlePtr pulled_back);
ScalarCochain pullback_cochain(const SimplicialMap& f, const ScalarCochain& w);

/// Curvature as a Hom-valued 2-cochain: U_{01} U_{12} - U_{02} on each
/// canonical triangle.
HomCochain curvature(BundlePtr E);

/// Curvature of a permuted triangle ordering via its closed form, e.g.
/// F_{021} = -F_{012} U_{21}.  The ordering must be a permutation of a
/// stored 2-simplex.
MatrixXd curvature_permuted(const Bundle& E, std::span<const VertexId> ordering);

/// Action of a Hom-valued k-cochain on a vector-valued l-cochain:
/// A on the front face applied to the back-face value (which is already
/// anchored at the shared vertex).
VectorCochain hom_action(const HomCochain& A, const VectorCochain& a);

/// Exterior covariant derivative on Hom-valued cochains; the final term
/// composes with a transport on the right so sources match:
///   U_{01} A[1..k+1] + sum (-1)^i A[0..^i..k+1] + (-1)^{k+1} A[0..k] U_{k,k+1}.
HomCochain d_nabla_hom(const HomCochain& A);

/// Pointwise inner product of two sections: value s_i^T G_i s'_i.
ScalarCochain dot_sections(const VectorCochain& s, const VectorCochain& s2, const Metric& M);

/// Inner product of a 1-cochain with a section, averaging the section over
/// the edge: <a_{01}, (s_0 + U_{01} s_1)/2> at the lower vertex.
ScalarCochain dot_cochain1_section(const VectorCochain& a, const VectorCochain& s,
                                   const Metric& M);

} // namespace dvbc

#endif
