#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "panelecon/error.hpp"
#include "panelecon/linalg.hpp"

namespace panelecon {

/// Bartlett kernel weight 1 - |j|/(M+1); zero outside the window.
inline double bartlett_weight(int j, int bandwidth) {
    const double z = std::abs(static_cast<double>(j)) / (bandwidth + 1.0);
    return z < 1.0 ? 1.0 - z : 0.0;
}

/// Newey-West rule-of-thumb truncation lag floor(4 (T/100)^(2/9)).
inline int newey_west_bandwidth(std::size_t length) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(length) / 100.0, 2.0 / 9.0)));
}

enum class Kernel { bartlett };

/// Kernel long-run covariance of a multivariate series.
///
/// With Gamma(j) = (1/T) sum_t w_{t-j} w_t' (so Gamma(j)(a, b) is the
/// covariance of component a at t-j with component b at t):
///   omega  = sum_{|j| <= M} k(j) Gamma(j),  Gamma(-j) = Gamma(j)'
///   lambda = sum_{j >= 0}  k(j) Gamma(j)
/// and omega = lambda + lambda' - Gamma(0) for every bandwidth.
struct LongRunCovariance {
    Matrix omega;
    Matrix lambda;
    Matrix gamma0;
    int bandwidth = 0;
    Kernel kernel = Kernel::bartlett;
};

/// `u` holds one observation per row. Columns are used as given (no
/// demeaning). Omits the bandwidth to use the Newey-West rule.
inline LongRunCovariance long_run_cov(const Matrix& u, std::optional<int> bandwidth = std::nullopt,
                                      Kernel kernel = Kernel::bartlett) {
    const Eigen::Index t_len = u.rows();
    const int m = bandwidth ? *bandwidth : newey_west_bandwidth(static_cast<std::size_t>(t_len));
    if (m < 0) throw ValidationError("long_run_cov: bandwidth must be >= 0");
    if (t_len <= m + 1) {
        throw InsufficientDataError("long_run_cov: series length " + std::to_string(t_len) +
                                    " must exceed bandwidth + 1 = " + std::to_string(m + 1));
    }
    const double denom = static_cast<double>(t_len);
    LongRunCovariance out;
    out.bandwidth = m;
    out.kernel = kernel;
    out.gamma0 = u.transpose() * u / denom;
    out.lambda = out.gamma0;
    for (int j = 1; j <= m; ++j) {
        const Eigen::Index len = t_len - j;
        const Matrix gj = u.topRows(len).transpose() * u.bottomRows(len) / denom;
        out.lambda += bartlett_weight(j, m) * gj;
    }
    out.omega = out.lambda + out.lambda.transpose() - out.gamma0;
    out.omega = 0.5 * (out.omega + out.omega.transpose());
    return out;
}

/// Scalar convenience wrapper.
inline double long_run_variance(const Vector& u, std::optional<int> bandwidth = std::nullopt) {
    Matrix m(u.size(), 1);
    m.col(0) = u;
    return long_run_cov(m, bandwidth).omega(0, 0);
}

}  // namespace panelecon
