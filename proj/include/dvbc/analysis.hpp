#ifndef DVBC_ANALYSIS_HPP
#define DVBC_ANALYSIS_HPP

#include <variant>
#include <vector>

#include "dvbc/cochain.hpp"

namespace dvbc {

/// Outcome of the per-triangle holonomy check.  `witness` is the triangle
/// with the largest deviation of its holonomy from the identity, present
/// exactly when the bundle is not flat.
struct FlatnessReport {
    bool flat = true;
    std::optional<SimplexKey> witness;
    double max_residual = 0.0;
};

/// True iff parallel transport around every 2-simplex is the identity
/// within tol (equivalently, the curvature vanishes).  Complexes without
/// triangles are flat vacuously.
FlatnessReport is_flat(const Bundle& E, Tolerance tol = {});

/// Holonomy of each spanning-tree generator loop at the root; together
/// these determine the representation of the fundamental group for a flat
/// bundle.  Requires a connected complex.
std::vector<std::pair<Path, MatrixXd>> holonomy_representation(const Bundle& E,
                                                               const SpanningTree& tree);

/// Why a trivialization attempt failed: either a triangle with non-identity
/// holonomy, or a generator loop with nontrivial holonomy on a flat bundle.
struct Obstruction {
    enum class Kind { NonFlat, NontrivialHolonomy };
    Kind kind;
    SimplexKey triangle;  // set for NonFlat
    Path loop;            // set for NontrivialHolonomy
    double residual = 0.0;
};

/// Either the gauge bringing every transport to the identity, or the first
/// obstruction found (non-flat triangles checked before generator
/// holonomies, both in canonical order).
using TrivializationResult = std::variant<GaugeTransform, Obstruction>;

/// Attempts to trivialize by transporting a fiber basis from the root of a
/// spanning tree.  Succeeds iff the bundle is flat and every generator
/// holonomy is the identity within tol; the returned gauge then maps all
/// transports to the identity within tol.  Requires a connected complex.
TrivializationResult trivialize(const Bundle& E, Tolerance tol = {});

/// A maximal set of linearly independent parallel sections (nabla s = 0).
struct ParallelBasis {
    std::vector<VectorCochain> sections;
    int dimension() const { return static_cast<int>(sections.size()); }
};

/// Computes the common fixed subspace of the generator holonomies at the
/// root, transports each kernel vector along the tree, and keeps only the
/// candidates that satisfy nabla s = 0 on every edge within tol.
/// Requires a connected complex.
ParallelBasis parallel_sections(const BundlePtr& E, Tolerance tol = {});

/// Gauge whose first k columns at each vertex are the parallel sections,
/// completed to a basis by pivoted selection of standard basis vectors.
/// After apply_gauge every transport takes the block form
/// [[I_k, *], [0, A]].  Throws when the basis is empty or dependent at
/// some vertex.
GaugeTransform trivial_subbundle_gauge(const Bundle& E, const ParallelBasis& basis);

struct BlockDiagonal {
    int k;
};
struct BlockUpperUnit {
    int k;
};
struct OrthogonalFor {
    Metric metric;
};
using StructureGroupSpec = std::variant<BlockDiagonal, BlockUpperUnit, OrthogonalFor>;

/// nullopt when every transport lies in the requested subgroup within tol
/// (block-zero patterns, unit blocks, or Gram preservation); otherwise the
/// first violating edge.  Requires a uniform fiber dimension.
std::optional<SimplexKey> verify_structure_group(const Bundle& E, const StructureGroupSpec& spec,
                                                 Tolerance tol = {});

} // namespace dvbc

#endif
