#ifndef DVBC_TOLERANCE_HPP
#define DVBC_TOLERANCE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dvbc {

/// Library-wide error type. Messages name the offending entity
/// (vertex, edge, simplex, key) where one exists.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Relative threshold for rank decisions: a singular value (or pivot)
/// counts as nonzero when it exceeds kRankTolerance times the largest one.
inline constexpr double kRankTolerance = 1e-8;

/// Elementwise comparison rule used by every numerical identity:
/// |a - b| <= abs + rel * max(|a|, |b|).
struct Tolerance {
    double abs = 1e-9;
    double rel = 1e-9;

    bool close(double a, double b) const {
        return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
    }

    bool close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
        if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                if (!close(a(i, j), b(i, j))) return false;
        return true;
    }
};

/// Largest elementwise absolute difference; shapes must agree.
inline double max_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs(const Eigen::MatrixXd& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

} // namespace dvbc

#endif
