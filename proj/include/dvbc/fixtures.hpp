#ifndef DVBC_FIXTURES_HPP
#define DVBC_FIXTURES_HPP

#include <cstdint>
#include <string_view>

#include "dvbc/cochain.hpp"

namespace dvbc {
namespace fixtures {

/// Named small complexes: "circle", "filled_triangle", "tetrahedron",
/// "tetra_boundary", "simplex4_boundary".
ComplexPtr canonical_complex(std::string_view name);

BundlePtr trivial_bundle(ComplexPtr X, int n);

/// Transports sampled as I + 0.5 N with N uniform in [-1,1] entrywise,
/// resampled until the smallest singular value exceeds 0.1.  The generator
/// is mt19937_64; equal seeds give identical bundles.
BundlePtr random_bundle(ComplexPtr X, int n, std::uint64_t seed);

/// Rank-2 bundle over the circle: identities on {0,1} and {0,2}, planar
/// rotation by theta on {1,2}.  Generator-loop holonomy is R(theta).
BundlePtr rotation_bundle_circle(double theta);

/// Entries uniform in [-1,1] on every canonical k-simplex.
VectorCochain random_cochain(BundlePtr E, int k, std::uint64_t seed);
ScalarCochain random_scalar_cochain(ComplexPtr X, int k, std::uint64_t seed);
HomCochain random_hom_cochain(BundlePtr E, int k, std::uint64_t seed);

/// Per-vertex matrices sampled like random_bundle transports.
GaugeTransform random_gauge(const Bundle& E, std::uint64_t seed);

} // namespace fixtures
} // namespace dvbc

#endif
