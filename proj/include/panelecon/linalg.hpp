#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "panelecon/error.hpp"

namespace panelecon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LeastSquaresFit {
    Vector coef;
    Vector residuals;
    double ssr = 0.0;
    Matrix xtx_inverse;  // (X'X)^-1
};

namespace detail {

inline std::string column_name(std::span<const std::string> names, Eigen::Index j) {
    if (static_cast<std::size_t>(j) < names.size()) return names[static_cast<std::size_t>(j)];
    return "column " + std::to_string(j);
}

}  // namespace detail

/// OLS through a column-pivoted QR. Rank deficiency raises CollinearityError
/// listing the columns the pivoting found to be linearly dependent.
inline LeastSquaresFit least_squares(const Matrix& X, const Vector& y,
                                     std::span<const std::string> names = {}) {
    if (X.rows() != y.size()) throw ValidationError("least_squares: row count mismatch");
    if (X.rows() < X.cols()) {
        throw InsufficientDataError("least_squares: " + std::to_string(X.rows()) + " rows for " +
                                    std::to_string(X.cols()) + " parameters");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    qr.setThreshold(1e-10);
    const Eigen::Index k = X.cols();
    if (qr.rank() < k) {
        std::vector<std::string> dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = qr.rank(); j < k; ++j) dependent.push_back(detail::column_name(names, perm(j)));
        std::string msg = "design matrix is rank deficient; dependent columns:";
        for (const auto& d : dependent) msg += " " + d;
        throw CollinearityError(msg, std::move(dependent));
    }
    LeastSquaresFit fit;
    fit.coef = qr.solve(y);
    fit.residuals = y - X * fit.coef;
    fit.ssr = fit.residuals.squaredNorm();

    // (X'X)^-1 = P R^-1 R^-T P'
    const Matrix r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Matrix r_inv = r.template triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
    const Matrix inner = r_inv * r_inv.transpose();
    const auto p = qr.colsPermutation();
    fit.xtx_inverse = p * inner * p.transpose();
    return fit;
}

struct PseudoInverse {
    Matrix inverse;
    Eigen::Index rank = 0;
};

/// Moore-Penrose inverse of a symmetric matrix. Eigenvalues with magnitude
/// below tol * max|eigenvalue| are treated as zero.
inline PseudoInverse symmetric_pinv(const Matrix& m, double tol = 1e-10) {
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector& values = eig.eigenvalues();
    const double scale = values.cwiseAbs().maxCoeff();
    PseudoInverse out;
    Vector inv_values = Vector::Zero(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (scale > 0.0 && std::abs(values(i)) > tol * scale) {
            inv_values(i) = 1.0 / values(i);
            ++out.rank;
        }
    }
    out.inverse = eig.eigenvectors() * inv_values.asDiagonal() * eig.eigenvectors().transpose();
    return out;
}

inline bool is_positive_definite(const Matrix& m) {
    Eigen::LLT<Matrix> llt(0.5 * (m + m.transpose()));
    return llt.info() == Eigen::Success;
}

}  // namespace panelecon
