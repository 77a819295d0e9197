#pragma once

// Pooled panel fully modified OLS with individual intercepts.
//
// Per entity: a preliminary within regression gives residuals u; the
// long-run covariance of w = (u, demeaned dx) corrects the dependent
// variable for regressor endogeneity (y+ = y - w12 W22^-1 dx) and yields the
// serial-correlation bias term l+ = L21 - L22 W22^-1 W21. The pooled slope
// is (sum X'X)^-1 sum (X'y+ - T_i l+) over demeaned data.

#include <optional>
#include <string>
#include <vector>

#include "panelecon/distributions.hpp"
#include "panelecon/error.hpp"
#include "panelecon/estimation.hpp"
#include "panelecon/linalg.hpp"
#include "panelecon/long_run.hpp"
#include "panelecon/panel.hpp"

namespace panelecon {

struct FmolsOptions {
    /// Fixed kernel bandwidth; default is the Newey-West rule per entity.
    std::optional<int> bandwidth;
    Kernel kernel = Kernel::bartlett;
};

/// Estimation sample for FMOLS: the listwise sample that also has the first
/// difference of every regressor.
inline RegressionSample fmols_sample(const PanelDataset& d, const ModelSpec& spec) {
    return regression_sample(d, spec, SampleOptions{.require_regressor_differences = true});
}

/// R^2 = 1 - SSR/SST and the adjustment for k regressors plus absorbed
/// effects. Empty when SST is zero.
struct FitStatistics {
    std::optional<double> r_squared;
    std::optional<double> adj_r_squared;
};

inline FitStatistics fit_statistics(const Vector& residuals, const Vector& dependent, std::size_t k_regressors,
                                    std::size_t absorbed_effects) {
    FitStatistics f;
    const double sst = (dependent.array() - dependent.mean()).matrix().squaredNorm();
    if (!(sst > 0.0)) return f;
    const double n = static_cast<double>(dependent.size());
    const double r2 = 1.0 - residuals.squaredNorm() / sst;
    f.r_squared = r2;
    const double df = n - static_cast<double>(k_regressors + absorbed_effects);
    if (df > 0) f.adj_r_squared = 1.0 - (1.0 - r2) * (n - 1.0) / df;
    return f;
}

inline EstimationResult fmols_panel(const RegressionSample& s, const FmolsOptions& options = {}) {
    if (s.dX.rows() != s.X.rows() || s.dX.cols() != s.X.cols()) {
        throw ValidationError("fmols_panel: sample lacks regressor differences (use fmols_sample)");
    }
    const auto k = s.X.cols();
    Warnings warnings;

    // Retained entity blocks.
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (const auto& b : s.entity_blocks()) {
        const auto t_i = static_cast<Eigen::Index>(b.second - b.first);
        if (t_i < k + 3) {
            warnings.push_back("fmols: entity " + s.index->entities()[s.entity[b.first]] + " dropped (" +
                               std::to_string(t_i) + " observations, need " + std::to_string(k + 3) + ")");
            continue;
        }
        blocks.push_back(b);
    }
    if (blocks.empty()) throw InsufficientDataError("fmols: every entity was dropped for insufficient length");

    // Stack retained rows, demean per entity.
    Eigen::Index n = 0;
    for (const auto& [lo, hi] : blocks) n += static_cast<Eigen::Index>(hi - lo);
    Matrix data(n, 1 + 2 * k);  // [y, X, dX]
    std::vector<std::pair<std::size_t, std::size_t>> local;
    std::vector<std::size_t> local_entity;
    Eigen::Index row = 0;
    for (const auto& [lo, hi] : blocks) {
        const auto len = static_cast<Eigen::Index>(hi - lo);
        const auto src = static_cast<Eigen::Index>(lo);
        data.block(row, 0, len, 1) = s.y.segment(src, len);
        data.block(row, 1, len, k) = s.X.middleRows(src, len);
        data.block(row, 1 + k, len, k) = s.dX.middleRows(src, len);
        local.emplace_back(static_cast<std::size_t>(row), static_cast<std::size_t>(row + len));
        local_entity.push_back(s.entity[lo]);
        row += len;
    }
    const Vector y_raw = data.col(0);
    const Matrix means = detail::demean_blocks(data, local);
    const Vector y_w = data.col(0);
    const Matrix x_w = data.middleCols(1, k);
    const Matrix dx_w = data.rightCols(k);

    // Preliminary within regression.
    const auto prelim = least_squares(x_w, y_w, s.regressor_names);

    Matrix sxx = x_w.transpose() * x_w;
    Vector sxy = Vector::Zero(k);
    Vector y_plus(n);
    double omega_12_sum = 0.0;
    for (std::size_t b = 0; b < local.size(); ++b) {
        const auto [lo, hi] = local[b];
        const auto len = static_cast<Eigen::Index>(hi - lo);
        const auto start = static_cast<Eigen::Index>(lo);
        Matrix w(len, 1 + k);
        w.col(0) = prelim.residuals.segment(start, len);
        w.rightCols(k) = dx_w.middleRows(start, len);
        const int bw_rule = options.bandwidth ? *options.bandwidth : newey_west_bandwidth(static_cast<std::size_t>(len));
        const int bw = std::min<int>(bw_rule, static_cast<int>(len) - 2);
        const auto lr = long_run_cov(w, std::max(bw, 0), options.kernel);

        const Matrix omega22 = lr.omega.bottomRightCorner(k, k);
        const Vector omega21 = lr.omega.bottomLeftCorner(k, 1);
        Matrix omega22_inv;
        if (is_positive_definite(omega22)) {
            omega22_inv = omega22.inverse();
        } else {
            omega22_inv = symmetric_pinv(omega22).inverse;
            warnings.push_back("fmols: regressor long-run covariance singular for entity " +
                               s.index->entities()[local_entity[b]] + "; pseudo-inverse used");
        }
        const Vector coef = omega22_inv * omega21;  // W22^-1 W21
        const Vector lambda21 = lr.lambda.bottomLeftCorner(k, 1);
        const Matrix lambda22 = lr.lambda.bottomRightCorner(k, k);
        const Vector bias = lambda21 - lambda22 * coef;

        const Vector yp = y_w.segment(start, len) - dx_w.middleRows(start, len) * coef;
        y_plus.segment(start, len) = yp;
        sxy += x_w.middleRows(start, len).transpose() * yp - static_cast<double>(len) * bias;
        omega_12_sum += lr.omega(0, 0) - omega21.dot(coef);
    }

    Eigen::LDLT<Matrix> ldlt(sxx);
    if (ldlt.info() != Eigen::Success || !is_positive_definite(sxx)) {
        throw CollinearityError("fmols: demeaned regressors are collinear", s.regressor_names);
    }
    const Matrix sxx_inv = sxx.inverse();
    const Vector beta = sxx_inv * sxy;
    const double omega_1_2 = omega_12_sum / static_cast<double>(local.size());

    EstimationResult r;
    r.method = "Panel FMOLS (pooled)";
    r.names = s.regressor_names;
    r.coefficients = beta;
    r.covariance = omega_1_2 * sxx_inv;
    r.n_obs = static_cast<std::size_t>(n);
    r.n_entities = local.size();
    {
        std::vector<int> periods;
        for (const auto& [lo, hi] : blocks)
            for (std::size_t i = lo; i < hi; ++i) periods.push_back(s.period[i]);
        std::sort(periods.begin(), periods.end());
        r.periods_included = static_cast<std::size_t>(std::unique(periods.begin(), periods.end()) - periods.begin());
    }
    r.df_resid = static_cast<double>(n) - static_cast<double>(local.size()) - static_cast<double>(k);
    r.sigma2 = omega_1_2;
    r.residuals = y_w - x_w * beta;
    for (std::size_t b = 0; b < local.size(); ++b) {
        const auto bi = static_cast<Eigen::Index>(b);
        r.effects.emplace_back(s.index->entities()[local_entity[b]], means(bi, 0) - means.row(bi).segment(1, k).dot(beta));
    }
    const auto fit = fit_statistics(r.residuals, y_raw, static_cast<std::size_t>(k), local.size());
    r.r_squared = fit.r_squared.value_or(std::nan(""));
    r.adj_r_squared = fit.adj_r_squared.value_or(std::nan(""));
    const double sst_within = y_w.squaredNorm();
    if (sst_within > 0.0) r.within_r_squared = 1.0 - r.residuals.squaredNorm() / sst_within;
    r.warnings = std::move(warnings);
    detail::finish_inference(r);
    return r;
}

inline EstimationResult fmols_panel(const PanelDataset& d, const ModelSpec& spec, const FmolsOptions& options = {}) {
    auto r = fmols_panel(fmols_sample(d, spec), options);
    r.spec = spec;
    return r;
}

}  // namespace panelecon
