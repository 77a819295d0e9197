#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "panelecon/distributions.hpp"
#include "panelecon/error.hpp"
#include "panelecon/linalg.hpp"
#include "panelecon/panel.hpp"

namespace panelecon {

/// Coefficients, covariance, fit statistics and residuals of a linear panel
/// estimator.
struct EstimationResult {
    std::string method;
    ModelSpec spec;
    std::vector<std::string> names;
    Vector coefficients;
    Matrix covariance;
    Vector std_errors;
    Vector t_stats;
    Vector p_values;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    std::optional<double> within_r_squared;
    double sigma2 = 0.0;  // residual variance estimate
    double df_resid = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_entities = 0;
    std::size_t periods_included = 0;
    std::vector<std::pair<std::string, double>> effects;  // per-entity intercepts
    Vector residuals;
    Warnings warnings;

    std::optional<std::size_t> index_of(const std::string& name) const {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
    }
    double coef(const std::string& name) const {
        auto i = index_of(name);
        if (!i) throw ValidationError(method + ": no coefficient named '" + name + "'");
        return coefficients(static_cast<Eigen::Index>(*i));
    }
    double p_value(const std::string& name) const {
        auto i = index_of(name);
        if (!i) throw ValidationError(method + ": no coefficient named '" + name + "'");
        return p_values(static_cast<Eigen::Index>(*i));
    }
};

namespace detail {

/// Fills standard errors, t-statistics and Student-t p-values from the
/// covariance and df_resid.
inline void finish_inference(EstimationResult& r) {
    const Eigen::Index k = r.coefficients.size();
    r.covariance = 0.5 * (r.covariance + r.covariance.transpose());
    r.std_errors = r.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    r.t_stats.resize(k);
    r.p_values.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        r.t_stats(j) = r.coefficients(j) / r.std_errors(j);
        r.p_values(j) = dist::student_two_sided(r.t_stats(j), r.df_resid);
    }
}

inline double centered_ss(const Vector& y) { return (y.array() - y.mean()).matrix().squaredNorm(); }

/// Subtracts per-entity means in place; returns the means (rows = blocks).
inline Matrix demean_blocks(Matrix& m, const std::vector<std::pair<std::size_t, std::size_t>>& blocks) {
    Matrix means(static_cast<Eigen::Index>(blocks.size()), m.cols());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto [lo, hi] = blocks[b];
        const auto len = static_cast<Eigen::Index>(hi - lo);
        auto block = m.middleRows(static_cast<Eigen::Index>(lo), len);
        means.row(static_cast<Eigen::Index>(b)) = block.colwise().mean();
        block.rowwise() -= means.row(static_cast<Eigen::Index>(b));
    }
    return means;
}

}  // namespace detail

/// OLS with classical covariance s^2 (X'X)^-1. With `add_intercept` a
/// leading "const" column is prepended.
inline EstimationResult pooled_ols(const Vector& y, const Matrix& X, std::vector<std::string> names = {},
                                   bool add_intercept = true) {
    if (names.empty())
        for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    if (static_cast<Eigen::Index>(names.size()) != X.cols()) throw ValidationError("pooled_ols: name count mismatch");
    Matrix design = X;
    if (add_intercept) {
        design.resize(X.rows(), X.cols() + 1);
        design.col(0).setOnes();
        design.rightCols(X.cols()) = X;
        names.insert(names.begin(), "const");
    }
    const auto fit = least_squares(design, y, names);
    EstimationResult r;
    r.method = "Pooled OLS";
    r.names = std::move(names);
    r.coefficients = fit.coef;
    r.residuals = fit.residuals;
    r.n_obs = static_cast<std::size_t>(y.size());
    r.df_resid = static_cast<double>(design.rows() - design.cols());
    r.sigma2 = r.df_resid > 0 ? fit.ssr / r.df_resid : 0.0;
    r.covariance = r.sigma2 * fit.xtx_inverse;
    const double sst = add_intercept ? detail::centered_ss(y) : y.squaredNorm();
    r.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 1.0;
    const double n = static_cast<double>(r.n_obs);
    r.adj_r_squared = r.df_resid > 0 ? 1.0 - (1.0 - r.r_squared) * (n - (add_intercept ? 1.0 : 0.0)) / r.df_resid
                                     : r.r_squared;
    detail::finish_inference(r);
    return r;
}

inline EstimationResult pooled_ols(const RegressionSample& s) {
    auto r = pooled_ols(s.y, s.X, s.regressor_names, true);
    r.n_entities = s.n_entities();
    r.periods_included = s.periods_included();
    return r;
}

/// Within (fixed-effects) estimator with per-entity intercepts recovered
/// from the entity means.
inline EstimationResult fixed_effects(const RegressionSample& s) {
    const auto blocks = s.entity_blocks();
    const auto n_ent = blocks.size();
    const auto k = s.X.cols();
    Matrix yx(s.X.rows(), k + 1);
    yx.col(0) = s.y;
    yx.rightCols(k) = s.X;
    const Matrix means = detail::demean_blocks(yx, blocks);
    const Vector y_w = yx.col(0);
    const Matrix x_w = yx.rightCols(k);

    for (Eigen::Index j = 0; j < k; ++j) {
        const double scale = std::max(s.X.col(j).cwiseAbs().maxCoeff(), 1.0);
        if (x_w.col(j).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
            throw CollinearityError("fixed_effects: regressor '" + s.regressor_names[static_cast<std::size_t>(j)] +
                                        "' is constant within every entity and is absorbed by the effects",
                                    {s.regressor_names[static_cast<std::size_t>(j)]});
        }
    }
    const double n = static_cast<double>(s.n_obs());
    const double df = n - static_cast<double>(n_ent) - static_cast<double>(k);
    if (df <= 0) {
        throw InsufficientDataError("fixed_effects: " + std::to_string(s.n_obs()) + " observations for " +
                                    std::to_string(n_ent) + " entities and " + std::to_string(k) + " regressors");
    }
    const auto fit = least_squares(x_w, y_w, s.regressor_names);

    EstimationResult r;
    r.method = "Fixed effects";
    r.names = s.regressor_names;
    r.coefficients = fit.coef;
    r.residuals = fit.residuals;
    r.n_obs = s.n_obs();
    r.n_entities = n_ent;
    r.periods_included = s.periods_included();
    r.df_resid = df;
    r.sigma2 = fit.ssr / df;
    r.covariance = r.sigma2 * fit.xtx_inverse;
    for (std::size_t b = 0; b < n_ent; ++b) {
        const auto bi = static_cast<Eigen::Index>(b);
        const double alpha = means(bi, 0) - means.row(bi).tail(k).dot(fit.coef);
        r.effects.emplace_back(s.index->entities()[s.entity[blocks[b].first]], alpha);
    }
    const double sst_levels = detail::centered_ss(s.y);
    const double sst_within = y_w.squaredNorm();
    r.r_squared = sst_levels > 0.0 ? 1.0 - fit.ssr / sst_levels : 1.0;
    r.within_r_squared = sst_within > 0.0 ? 1.0 - fit.ssr / sst_within : 1.0;
    r.adj_r_squared = 1.0 - (1.0 - r.r_squared) * (n - 1.0) / df;
    detail::finish_inference(r);
    return r;
}

inline EstimationResult fixed_effects(const PanelDataset& d, const ModelSpec& spec) {
    auto r = fixed_effects(regression_sample(d, spec));
    r.spec = spec;
    return r;
}

/// Swamy-Arora variance components with per-entity quasi-demeaning weights.
struct VarianceComponents {
    double sigma2_u = 0.0;
    double sigma2_e = 0.0;
    std::vector<double> theta;  // per entity block, in sample order

    static double theta_for(double sigma2_u, double sigma2_e, double t_i) {
        const double denom = t_i * sigma2_u + sigma2_e;
        if (!(denom > 0.0)) return 0.0;
        return 1.0 - std::sqrt(sigma2_e / denom);
    }
};

struct RandomEffectsOptions {
    /// Overrides every theta_i (testing the pooled and within limits).
    std::optional<double> forced_theta;
};

struct RandomEffectsResult {
    EstimationResult estimate;
    VarianceComponents components;
};

inline RandomEffectsResult random_effects(const RegressionSample& s, const RandomEffectsOptions& options = {}) {
    const auto blocks = s.entity_blocks();
    const std::size_t n_ent = blocks.size();
    const auto k = s.X.cols();
    const double n = static_cast<double>(s.n_obs());
    if (s.n_obs() <= n_ent + static_cast<std::size_t>(k)) {
        throw InsufficientDataError("random_effects: need more observations than entities + regressors");
    }
    Warnings warnings;
    VarianceComponents vc;

    // Within residual variance.
    const EstimationResult fe = fixed_effects(s);
    vc.sigma2_e = fe.sigma2;

    // Between regression on entity means.
    Matrix yx(s.X.rows(), k + 1);
    yx.col(0) = s.y;
    yx.rightCols(k) = s.X;
    Matrix scratch = yx;
    const Matrix means = detail::demean_blocks(scratch, blocks);
    double inv_t_sum = 0.0;
    for (const auto& [lo, hi] : blocks) inv_t_sum += 1.0 / static_cast<double>(hi - lo);
    const double t_harmonic = static_cast<double>(n_ent) / inv_t_sum;
    if (n_ent > static_cast<std::size_t>(k) + 1) {
        try {
            const auto between = pooled_ols(means.col(0), means.rightCols(k), s.regressor_names, true);
            const double sigma2_between = between.sigma2;
            vc.sigma2_u = sigma2_between - vc.sigma2_e / t_harmonic;
        } catch (const CollinearityError& e) {
            warnings.push_back(std::string("random_effects: between regression failed (") + e.what() +
                               "); sigma2_u set to 0");
            vc.sigma2_u = 0.0;
        }
    } else {
        warnings.push_back("random_effects: too few entities for the between regression; sigma2_u set to 0");
        vc.sigma2_u = 0.0;
    }
    if (vc.sigma2_u < 0.0) {
        warnings.push_back("random_effects: negative sigma2_u estimate floored at 0 (pooled OLS limit)");
        vc.sigma2_u = 0.0;
    }

    Vector y_t(s.X.rows());
    Matrix x_t(s.X.rows(), k + 1);
    for (std::size_t b = 0; b < n_ent; ++b) {
        const auto [lo, hi] = blocks[b];
        const double t_i = static_cast<double>(hi - lo);
        const double theta = options.forced_theta ? *options.forced_theta
                                                  : VarianceComponents::theta_for(vc.sigma2_u, vc.sigma2_e, t_i);
        vc.theta.push_back(theta);
        const auto bi = static_cast<Eigen::Index>(b);
        for (std::size_t row = lo; row < hi; ++row) {
            const auto ri = static_cast<Eigen::Index>(row);
            y_t(ri) = s.y(ri) - theta * means(bi, 0);
            x_t(ri, 0) = 1.0 - theta;
            x_t.row(ri).tail(k) = s.X.row(ri) - theta * means.row(bi).tail(k);
        }
    }
    // Full demeaning removes the intercept column.
    const bool keep_const = x_t.col(0).cwiseAbs().maxCoeff() > 1e-12;
    std::vector<std::string> names = s.regressor_names;
    Matrix design = x_t;
    if (keep_const) names.insert(names.begin(), "const");
    else design = x_t.rightCols(k);

    const auto fit = least_squares(design, y_t, names);
    EstimationResult r;
    r.method = "Random effects";
    r.names = names;
    r.coefficients = fit.coef;
    r.residuals = fit.residuals;
    r.n_obs = s.n_obs();
    r.n_entities = n_ent;
    r.periods_included = s.periods_included();
    r.df_resid = n - static_cast<double>(design.cols());
    r.sigma2 = fit.ssr / r.df_resid;
    r.covariance = r.sigma2 * fit.xtx_inverse;
    const double sst = keep_const ? detail::centered_ss(y_t) : y_t.squaredNorm();
    r.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 1.0;
    r.adj_r_squared = 1.0 - (1.0 - r.r_squared) * (n - 1.0) / r.df_resid;
    r.warnings = std::move(warnings);
    detail::finish_inference(r);
    return {std::move(r), std::move(vc)};
}

inline RandomEffectsResult random_effects(const PanelDataset& d, const ModelSpec& spec,
                                          const RandomEffectsOptions& options = {}) {
    auto r = random_effects(regression_sample(d, spec), options);
    r.estimate.spec = spec;
    return r;
}

struct HausmanResult {
    double statistic = 0.0;
    int df = 0;
    double p = 1.0;
    bool pseudo_inverse = false;
    std::vector<std::string> compared;
    Warnings warnings;
};

/// H = q' V^- q with q = b_FE - b_RE and V = Var(b_FE) - Var(b_RE) over the
/// regressors both fits share (the RE intercept is excluded). When V is not
/// positive definite, its nonnegative part is pseudo-inverted and df = rank.
inline HausmanResult hausman(const EstimationResult& fe, const EstimationResult& re) {
    std::vector<std::string> re_names;
    for (const auto& nm : re.names)
        if (nm != "const") re_names.push_back(nm);
    std::vector<std::string> a = fe.names, b = re_names;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b || a.empty()) throw ValidationError("hausman: fixed and random effects cover different regressors");

    const auto k = static_cast<Eigen::Index>(fe.names.size());
    Vector q(k);
    Matrix v(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& ni = fe.names[static_cast<std::size_t>(i)];
        const auto ri = static_cast<Eigen::Index>(*re.index_of(ni));
        q(i) = fe.coefficients(i) - re.coefficients(ri);
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto rj = static_cast<Eigen::Index>(*re.index_of(fe.names[static_cast<std::size_t>(j)]));
            v(i, j) = fe.covariance(i, j) - re.covariance(ri, rj);
        }
    }
    HausmanResult h;
    h.compared = fe.names;
    if (is_positive_definite(v)) {
        h.statistic = q.dot(v.llt().solve(q));
        h.df = static_cast<int>(k);
    } else {
        h.pseudo_inverse = true;
        const Matrix sym = 0.5 * (v + v.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
        const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
        Vector inv = Vector::Zero(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            if (scale > 0.0 && eig.eigenvalues()(i) > 1e-10 * scale) {
                inv(i) = 1.0 / eig.eigenvalues()(i);
                ++h.df;
            }
        }
        const Vector qe = eig.eigenvectors().transpose() * q;
        h.statistic = qe.dot(inv.asDiagonal() * qe);
        h.warnings.push_back("hausman: covariance difference is not positive definite; pseudo-inverse with rank " +
                             std::to_string(h.df));
    }
    h.statistic = std::max(h.statistic, 0.0);
    h.p = h.df > 0 ? dist::chi2_sf(h.statistic, h.df) : 1.0;
    return h;
}

}  // namespace panelecon
