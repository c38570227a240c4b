#ifndef DVBC_TEST_HELPERS_HPP
#define DVBC_TEST_HELPERS_HPP

#include "dvbc/analysis.hpp"
#include "dvbc/fixtures.hpp"

namespace dvbc::testing {

inline MatrixXd scalar1x1(double x) {
    MatrixXd m(1, 1);
    m << x;
    return m;
}

/// Rank-1 bundle over the circle (or the filled triangle when `filled`)
/// with the stored transports U_{01} = u, U_{12} = v, U_{02} = w.
inline BundlePtr rank1_circle(double u, double v, double w, bool filled = false) {
    ComplexPtr X = filled ? fixtures::canonical_complex("filled_triangle")
                          : fixtures::canonical_complex("circle");
    std::map<SimplexKey, MatrixXd> transports;
    transports[{0, 1}] = scalar1x1(u);
    transports[{1, 2}] = scalar1x1(v);
    transports[{0, 2}] = scalar1x1(w);
    return new_bundle(std::move(X), 1, std::move(transports));
}

inline double max_value_residual(const VectorCochain& a, const VectorCochain& b) {
    double worst = 0.0;
    for (const auto& [key, unused] : a.values) {
        (void)unused;
        worst = std::max(worst, (a.value(key) - b.value(key)).cwiseAbs().maxCoeff());
    }
    for (const auto& [key, unused] : b.values) {
        (void)unused;
        worst = std::max(worst, (a.value(key) - b.value(key)).cwiseAbs().maxCoeff());
    }
    return worst;
}

inline double max_value_residual(const ScalarCochain& a, const ScalarCochain& b) {
    double worst = 0.0;
    for (const auto& [key, unused] : a.values) {
        (void)unused;
        worst = std::max(worst, std::abs(a.value(key) - b.value(key)));
    }
    for (const auto& [key, unused] : b.values) {
        (void)unused;
        worst = std::max(worst, std::abs(a.value(key) - b.value(key)));
    }
    return worst;
}

inline double max_value_residual(const HomCochain& a, const HomCochain& b) {
    double worst = 0.0;
    for (const auto& [key, unused] : a.values) {
        (void)unused;
        worst = std::max(worst, (a.value(key) - b.value(key)).cwiseAbs().maxCoeff());
    }
    for (const auto& [key, unused] : b.values) {
        (void)unused;
        worst = std::max(worst, (a.value(key) - b.value(key)).cwiseAbs().maxCoeff());
    }
    return worst;
}

/// Lift a scalar cochain to a rank-1 cochain over the trivial bundle, so the
/// bundle-valued wedge can multiply plain scalar cochains.
inline VectorCochain lift_scalar(const ScalarCochain& w, BundlePtr trivial_rank1) {
    VectorCochain out{std::move(trivial_rank1), w.degree, {}};
    for (const auto& [key, x] : w.values) out.values[key] = VectorXd::Constant(1, x);
    return out;
}

} // namespace dvbc::testing

#endif
