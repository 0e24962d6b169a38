#pragma once

#include <Eigen/Eigenvalues>

#include "dper/core.hpp"

namespace dper {

/// Nearest positive semidefinite matrix in Frobenius norm: eigenvalues below
/// zero are clipped, the matrix is rebuilt and mirrored to exact symmetry.
template <typename Derived>
[[nodiscard]] Matrix<typename Derived::Scalar> psd_repair(const Eigen::MatrixBase<Derived>& sym) {
    using Scalar = typename Derived::Scalar;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym.derived(), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw InvalidArgument("eigendecomposition failed");
    const Vector<Scalar> clipped = es.eigenvalues().cwiseMax(Scalar(0));
    Matrix<Scalar> out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    for (Index c = 0; c < out.cols(); ++c) {
        out(c, c) = std::max(out(c, c), Scalar(0));
        for (Index r = c + 1; r < out.rows(); ++r) out(c, r) = out(r, c);
    }
    return out;
}

/// Smallest eigenvalue of a symmetric matrix.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& sym) {
    using Scalar = typename Derived::Scalar;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym.derived(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace dper
