#pragma once

// Single-series Dickey-Fuller / Phillips-Perron tests and the panel battery
// built on them: Levin-Lin-Chu, Im-Pesaran-Shin and Fisher combinations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "panelecon/distributions.hpp"
#include "panelecon/error.hpp"
#include "panelecon/linalg.hpp"
#include "panelecon/long_run.hpp"
#include "panelecon/panel.hpp"
#include "panelecon/unit_root_tables.hpp"

namespace panelecon {

enum class Deterministic { none, intercept, trend };

inline int deterministic_terms(Deterministic d) {
    switch (d) {
        case Deterministic::none: return 0;
        case Deterministic::intercept: return 1;
        case Deterministic::trend: return 2;
    }
    return 0;
}

inline const char* to_string(Deterministic d) {
    switch (d) {
        case Deterministic::none: return "none";
        case Deterministic::intercept: return "intercept";
        case Deterministic::trend: return "trend";
    }
    return "?";
}

/// Asymptotic MacKinnon p-value of a Dickey-Fuller t-ratio.
inline double mackinnon_p(double tau, Deterministic det) {
    const tables::MacKinnonSurface& s = det == Deterministic::none        ? tables::kMacKinnonNone
                                        : det == Deterministic::intercept ? tables::kMacKinnonIntercept
                                                                          : tables::kMacKinnonTrend;
    if (std::isnan(tau)) return tau;
    if (tau > s.tau_max) return 1.0;
    if (tau < s.tau_min) return 0.0;
    double z = 0.0;
    if (tau <= s.tau_star) {
        for (std::size_t i = s.small_p.size(); i-- > 0;) z = z * tau + s.small_p[i];
    } else {
        for (std::size_t i = s.large_p.size(); i-- > 0;) z = z * tau + s.large_p[i];
    }
    return dist::normal_cdf(z);
}

struct AdfResult {
    double tau = 0.0;
    double p = 1.0;
    double rho = 0.0;  // coefficient on y_{t-1}
    int lags = 0;
    std::size_t n_obs = 0;  // regression rows
};

struct PpResult {
    double z_tau = 0.0;
    double tau = 0.0;
    double p = 1.0;
    int bandwidth = 0;
    std::size_t n_obs = 0;
};

namespace detail {

struct DfDesign {
    Vector dy;
    Matrix X;  // [deterministic..., y_{t-1}, dy_{t-1}..dy_{t-p}]
    Eigen::Index rho_col = 0;
};

inline DfDesign df_design(std::span<const double> y, int lags, Deterministic det) {
    const int nd = deterministic_terms(det);
    const auto n = static_cast<int>(y.size());
    auto ok = [&](int t) { return t >= 0 && t < n && !is_missing(y[static_cast<std::size_t>(t)]); };
    std::vector<int> rows;
    for (int t = lags + 1; t < n; ++t) {
        bool use = ok(t) && ok(t - 1);
        for (int l = 1; l <= lags && use; ++l) use = ok(t - l) && ok(t - l - 1);
        if (use) rows.push_back(t);
    }
    const int k = nd + 1 + lags;
    if (static_cast<int>(rows.size()) < k + 1) {
        throw InsufficientDataError("Dickey-Fuller regression with " + std::to_string(lags) + " lag(s) and " +
                                    std::to_string(nd) + " deterministic term(s) needs at least " +
                                    std::to_string(2 * lags + nd + 3) + " consecutive observations; have " +
                                    std::to_string(rows.size()) + " usable rows");
    }
    DfDesign d;
    d.rho_col = nd;
    d.dy.resize(static_cast<Eigen::Index>(rows.size()));
    d.X.resize(static_cast<Eigen::Index>(rows.size()), k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int t = rows[r];
        const auto ri = static_cast<Eigen::Index>(r);
        const auto at = [&](int s) { return y[static_cast<std::size_t>(s)]; };
        d.dy(ri) = at(t) - at(t - 1);
        Eigen::Index c = 0;
        if (nd >= 1) d.X(ri, c++) = 1.0;
        if (nd >= 2) d.X(ri, c++) = static_cast<double>(t + 1);
        d.X(ri, c++) = at(t - 1);
        for (int l = 1; l <= lags; ++l) d.X(ri, c++) = at(t - l) - at(t - l - 1);
    }
    return d;
}

inline std::vector<std::string> df_column_names(int lags, Deterministic det) {
    std::vector<std::string> names;
    if (deterministic_terms(det) >= 1) names.emplace_back("const");
    if (deterministic_terms(det) >= 2) names.emplace_back("trend");
    names.emplace_back("y(-1)");
    for (int l = 1; l <= lags; ++l) names.push_back("dy(-" + std::to_string(l) + ")");
    return names;
}

}  // namespace detail

/// Augmented Dickey-Fuller test. Missing cells (NaN) drop every regression
/// row that would use them.
inline AdfResult adf_test(std::span<const double> y, int lags, Deterministic det = Deterministic::intercept) {
    if (lags < 0) throw ValidationError("adf_test: lags must be >= 0");
    const auto d = detail::df_design(y, lags, det);
    const auto names = detail::df_column_names(lags, det);
    const auto fit = least_squares(d.X, d.dy, names);
    const double dof = static_cast<double>(d.X.rows() - d.X.cols());
    const double s2 = fit.ssr / dof;
    const double se = std::sqrt(s2 * fit.xtx_inverse(d.rho_col, d.rho_col));
    AdfResult r;
    r.rho = fit.coef(d.rho_col);
    r.tau = r.rho / se;
    r.p = mackinnon_p(r.tau, det);
    r.lags = lags;
    r.n_obs = static_cast<std::size_t>(d.X.rows());
    return r;
}

/// Phillips-Perron Z_tau: the lag-0 Dickey-Fuller t-ratio corrected with the
/// Bartlett long-run variance of its residuals.
inline PpResult pp_test(std::span<const double> y, Deterministic det = Deterministic::intercept,
                        std::optional<int> bandwidth = std::nullopt) {
    const std::size_t observed =
        static_cast<std::size_t>(std::count_if(y.begin(), y.end(), [](double v) { return !is_missing(v); }));
    const auto need = static_cast<std::size_t>(deterministic_terms(det) + 4);
    if (observed < need) {
        throw InsufficientDataError("pp_test: need at least " + std::to_string(need) + " observations, have " +
                                    std::to_string(observed));
    }
    const auto d = detail::df_design(y, 0, det);
    const auto fit = least_squares(d.X, d.dy, detail::df_column_names(0, det));
    const double n = static_cast<double>(d.X.rows());
    const double s2 = fit.ssr / (n - static_cast<double>(d.X.cols()));
    const double se = std::sqrt(s2 * fit.xtx_inverse(d.rho_col, d.rho_col));
    const double tau = fit.coef(d.rho_col) / se;

    const int m = bandwidth ? *bandwidth : newey_west_bandwidth(d.X.rows());
    const int m_eff = std::min<int>(m, static_cast<int>(d.X.rows()) - 2);
    const double gamma0 = fit.ssr / n;
    const double lrv = long_run_variance(fit.residuals, std::max(m_eff, 0));

    PpResult r;
    r.tau = tau;
    r.bandwidth = std::max(m_eff, 0);
    r.n_obs = d.X.rows();
    if (r.bandwidth == 0) {
        r.z_tau = tau;
    } else {
        const double lambda = std::sqrt(lrv);
        r.z_tau = std::sqrt(gamma0 / lrv) * tau - 0.5 * (lrv - gamma0) / lambda * (n * se / std::sqrt(s2));
    }
    r.p = mackinnon_p(r.z_tau, det);
    return r;
}

// ---------------------------------------------------------------------------
// Panel tests

enum class UnitRootTest { fisher_pp, fisher_adf, ips, llc };
enum class IntegrationOrder { level, first_difference };

inline const char* to_string(UnitRootTest t) {
    switch (t) {
        case UnitRootTest::fisher_pp: return "Fisher-PP";
        case UnitRootTest::fisher_adf: return "Fisher-ADF";
        case UnitRootTest::ips: return "IPS";
        case UnitRootTest::llc: return "LLC";
    }
    return "?";
}
inline const char* to_string(IntegrationOrder o) { return o == IntegrationOrder::level ? "I(0)" : "I(1)"; }

struct EntityUnitRoot {
    std::string entity;
    double statistic = 0.0;
    double p = 1.0;
    int lags = 0;
    std::size_t n_obs = 0;
};

struct UnitRootResult {
    UnitRootTest test = UnitRootTest::fisher_adf;
    IntegrationOrder order = IntegrationOrder::level;
    double statistic = 0.0;
    double p_value = 1.0;
    std::optional<int> df;  // Fisher tests: 2N
    std::vector<EntityUnitRoot> per_entity;
    std::size_t n_entities = 0;
    Warnings warnings;
};

struct UnitRootOptions {
    Deterministic deterministic = Deterministic::intercept;
    /// Fixed augmentation lag for every entity; default is the per-entity rule.
    std::optional<int> lags;
    /// Phillips-Perron bandwidth; default Newey-West.
    std::optional<int> pp_bandwidth;
};

/// One entity's values on a gap-free calendar from its first to last
/// observed period (missing cells as NaN).
struct PanelSeries {
    std::vector<std::string> entities;
    std::vector<std::vector<double>> values;
};

inline PanelSeries panel_series(const VariableSeries& s) {
    const auto& idx = s.index();
    PanelSeries out;
    for (std::size_t e = 0; e < idx.n_entities(); ++e) {
        int first = 0, last = -1;
        bool any = false;
        for (std::size_t t = 0; t < idx.n_periods(); ++t) {
            if (is_missing(s.at(e, t))) continue;
            if (!any) first = idx.periods()[t];
            last = idx.periods()[t];
            any = true;
        }
        if (!any) continue;
        std::vector<double> v(static_cast<std::size_t>(last - first + 1), kMissing);
        for (std::size_t t = 0; t < idx.n_periods(); ++t) {
            const int year = idx.periods()[t];
            if (year < first || year > last) continue;
            v[static_cast<std::size_t>(year - first)] = s.at(e, t);
        }
        out.entities.push_back(idx.entities()[e]);
        out.values.push_back(std::move(v));
    }
    return out;
}

/// floor(4 (T/100)^(2/9)), capped so the ADF regression keeps at least three
/// residual degrees of freedom. Returns -1 when even zero lags is infeasible.
inline int default_lag(std::size_t length, Deterministic det) {
    const int rule = newey_west_bandwidth(length);
    const int cap = (static_cast<int>(length) - deterministic_terms(det) - 5);
    if (cap < 0) return -1;
    return std::min(rule, cap / 2);
}

namespace detail {

inline std::size_t observed_count(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return !is_missing(x); }));
}

inline int entity_lag(const std::vector<double>& v, const UnitRootOptions& o) {
    if (o.lags) return *o.lags;
    return default_lag(observed_count(v), o.deterministic);
}

inline void require_entities(std::size_t n, const char* test) {
    if (n < 2) {
        throw InsufficientDataError(std::string(test) + ": need at least 2 usable entities, have " +
                                    std::to_string(n));
    }
}

/// Linear interpolation in `length` among rows with the requested lag;
/// nearest available row outside the bracketing range.
inline std::optional<std::pair<double, double>> ips_moments(std::span<const tables::IpsMoment> table, double length,
                                                            int lags) {
    const tables::IpsMoment* lo = nullptr;
    const tables::IpsMoment* hi = nullptr;
    for (const auto& row : table) {
        if (row.lags != lags) continue;
        if (row.length <= length && (!lo || row.length > lo->length)) lo = &row;
        if (row.length >= length && (!hi || row.length < hi->length)) hi = &row;
    }
    if (!lo && !hi) return std::nullopt;
    if (!lo) return std::make_pair(hi->mean, hi->variance);
    if (!hi) return std::make_pair(lo->mean, lo->variance);
    if (hi->length == lo->length) return std::make_pair(lo->mean, lo->variance);
    const double w = (length - lo->length) / static_cast<double>(hi->length - lo->length);
    return std::make_pair(lo->mean + w * (hi->mean - lo->mean), lo->variance + w * (hi->variance - lo->variance));
}

inline std::span<const tables::IpsMoment> ips_table(Deterministic det) {
    switch (det) {
        case Deterministic::none: return tables::kIpsMoments_none;
        case Deterministic::intercept: return tables::kIpsMoments_intercept;
        case Deterministic::trend: return tables::kIpsMoments_trend;
    }
    return {};
}

inline tables::LlcAdjustment llc_adjustment(double length, Warnings& warnings) {
    const auto& t = tables::kLlcAdjustments;
    const std::size_t n = std::size(t);
    if (length < t[0].length) {
        warnings.push_back("LLC: average effective length " + std::to_string(length) +
                           " is below the adjustment table (25); using the shortest tabulated row");
        return t[0];
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (length <= t[i].length) {
            const auto& a = t[i - 1];
            const auto& b = t[i];
            const double w = (length - a.length) / (b.length - a.length);
            auto mix = [w](double x, double y) { return x + w * (y - x); };
            return {length,
                    mix(a.mean_none, b.mean_none),
                    mix(a.sd_none, b.sd_none),
                    mix(a.mean_intercept, b.mean_intercept),
                    mix(a.sd_intercept, b.sd_intercept),
                    mix(a.mean_trend, b.mean_trend),
                    mix(a.sd_trend, b.sd_trend)};
        }
    }
    return t[n - 1];
}

}  // namespace detail

struct FisherResult {
    double chi2 = 0.0;
    int df = 0;
    double p = 1.0;
};

/// -2 sum ln p_i against chi-square(2N). p-values at or below zero are
/// floored at 1e-16.
inline FisherResult fisher_combine(std::span<const double> p_values, Warnings* warnings = nullptr) {
    if (p_values.empty()) throw ValidationError("fisher_combine: no p-values");
    constexpr double kFloor = 1e-16;
    FisherResult r;
    std::size_t clamped = 0;
    for (double p : p_values) {
        if (std::isnan(p)) throw ValidationError("fisher_combine: NaN p-value");
        if (p > 1.0) throw ValidationError("fisher_combine: p-value above 1");
        if (p < kFloor) {
            ++clamped;
            p = kFloor;
        }
        r.chi2 += -2.0 * std::log(p);
    }
    if (clamped > 0 && warnings) {
        warnings->push_back("fisher_combine: " + std::to_string(clamped) + " p-value(s) floored at 1e-16");
    }
    r.df = static_cast<int>(2 * p_values.size());
    r.p = dist::chi2_sf(r.chi2, r.df);
    return r;
}

inline UnitRootResult fisher_adf(const PanelSeries& panel, const UnitRootOptions& o = {}) {
    UnitRootResult out;
    out.test = UnitRootTest::fisher_adf;
    std::vector<double> ps;
    for (std::size_t i = 0; i < panel.values.size(); ++i) {
        const int p = detail::entity_lag(panel.values[i], o);
        try {
            if (p < 0) throw InsufficientDataError("series too short");
            const auto r = adf_test(panel.values[i], p, o.deterministic);
            out.per_entity.push_back({panel.entities[i], r.tau, r.p, p, r.n_obs});
            ps.push_back(r.p);
        } catch (const Error& e) {
            out.warnings.push_back("Fisher-ADF: entity " + panel.entities[i] + " dropped: " + e.what());
        }
    }
    if (ps.empty()) throw InsufficientDataError("Fisher-ADF: no entity supports the ADF regression");
    const auto f = fisher_combine(ps, &out.warnings);
    out.statistic = f.chi2;
    out.df = f.df;
    out.p_value = f.p;
    out.n_entities = ps.size();
    return out;
}

inline UnitRootResult fisher_pp(const PanelSeries& panel, const UnitRootOptions& o = {}) {
    UnitRootResult out;
    out.test = UnitRootTest::fisher_pp;
    std::vector<double> ps;
    for (std::size_t i = 0; i < panel.values.size(); ++i) {
        try {
            const auto r = pp_test(panel.values[i], o.deterministic, o.pp_bandwidth);
            out.per_entity.push_back({panel.entities[i], r.z_tau, r.p, r.bandwidth, r.n_obs});
            ps.push_back(r.p);
        } catch (const Error& e) {
            out.warnings.push_back("Fisher-PP: entity " + panel.entities[i] + " dropped: " + e.what());
        }
    }
    if (ps.empty()) throw InsufficientDataError("Fisher-PP: no entity supports the PP regression");
    const auto f = fisher_combine(ps, &out.warnings);
    out.statistic = f.chi2;
    out.df = f.df;
    out.p_value = f.p;
    out.n_entities = ps.size();
    return out;
}

/// Im-Pesaran-Shin W-tbar: standardized mean of per-entity ADF t-ratios.
inline UnitRootResult ips(const PanelSeries& panel, const UnitRootOptions& o = {}) {
    UnitRootResult out;
    out.test = UnitRootTest::ips;
    const auto table = detail::ips_table(o.deterministic);
    double sum_t = 0.0, sum_mean = 0.0, sum_var = 0.0;
    for (std::size_t i = 0; i < panel.values.size(); ++i) {
        const int p = detail::entity_lag(panel.values[i], o);
        try {
            if (p < 0) throw InsufficientDataError("series too short");
            const auto r = adf_test(panel.values[i], p, o.deterministic);
            const double length = static_cast<double>(r.n_obs) + p + 1.0;
            const auto m = detail::ips_moments(table, length, p);
            const int resid_df = static_cast<int>(r.n_obs) - (deterministic_terms(o.deterministic) + 1 + p);
            if (!m || resid_df < 3) {
                throw InsufficientDataError("no null moments for length " + std::to_string(length) + ", lags " +
                                            std::to_string(p));
            }
            out.per_entity.push_back({panel.entities[i], r.tau, r.p, p, r.n_obs});
            sum_t += r.tau;
            sum_mean += m->first;
            sum_var += m->second;
        } catch (const Error& e) {
            out.warnings.push_back("IPS: entity " + panel.entities[i] + " dropped: " + e.what());
        }
    }
    const std::size_t n = out.per_entity.size();
    if (n == 0) throw InsufficientDataError("IPS: all entities dropped");
    detail::require_entities(n, "IPS");
    const double nn = static_cast<double>(n);
    const double t_bar = sum_t / nn;
    out.statistic = std::sqrt(nn) * (t_bar - sum_mean / nn) / std::sqrt(sum_var / nn);
    out.p_value = dist::normal_cdf(out.statistic);
    out.n_entities = n;
    return out;
}

/// Levin-Lin-Chu adjusted pooled t-statistic.
inline UnitRootResult llc(const PanelSeries& panel, const UnitRootOptions& o = {}) {
    UnitRootResult out;
    out.test = UnitRootTest::llc;
    if (panel.values.size() < 2) throw InsufficientDataError("LLC: pooling needs at least 2 entities");
    const int nd = deterministic_terms(o.deterministic);

    std::vector<Vector> e_norm, v_norm;
    double sum_s = 0.0;
    std::size_t total_rows = 0;
    for (std::size_t i = 0; i < panel.values.size(); ++i) {
        const auto& y = panel.values[i];
        const int p = detail::entity_lag(y, o);
        try {
            if (p < 0) throw InsufficientDataError("series too short");
            const auto d = detail::df_design(y, p, o.deterministic);
            const Eigen::Index rows = d.X.rows();
            // Auxiliary regressors: deterministic terms and lagged differences.
            Matrix z(rows, d.X.cols() - 1);
            if (nd > 0) z.leftCols(nd) = d.X.leftCols(nd);
            if (p > 0) z.rightCols(p) = d.X.rightCols(p);
            const Vector ylag = d.X.col(d.rho_col);
            Vector e_hat = d.dy;
            Vector v_hat = ylag;
            if (z.cols() > 0) {
                e_hat = least_squares(z, d.dy).residuals;
                v_hat = least_squares(z, ylag).residuals;
            }
            const double vv = v_hat.squaredNorm();
            if (!(vv > 0.0)) throw CollinearityError("lagged level is explained by the auxiliary regressors");
            const double delta = v_hat.dot(e_hat) / vv;
            const double sigma2_e = (e_hat - delta * v_hat).squaredNorm() / static_cast<double>(rows);
            if (!(sigma2_e > 0.0)) throw InsufficientDataError("zero residual variance");

            // Long-run variance of the differenced series.
            std::vector<double> dys;
            for (std::size_t t = 1; t < y.size(); ++t) {
                if (!is_missing(y[t]) && !is_missing(y[t - 1])) dys.push_back(y[t] - y[t - 1]);
            }
            if (dys.size() < 3) throw InsufficientDataError("too few differences for the long-run variance");
            Vector dy = Eigen::Map<const Vector>(dys.data(), static_cast<Eigen::Index>(dys.size()));
            if (nd > 0) dy.array() -= dy.mean();
            const auto len = static_cast<double>(y.size());
            int kbar = static_cast<int>(std::floor(3.21 * std::cbrt(len)));
            kbar = std::min<int>(kbar, static_cast<int>(dy.size()) - 2);
            const double sigma2_y = long_run_variance(dy, std::max(kbar, 0));
            const double sigma_e = std::sqrt(sigma2_e);
            sum_s += std::sqrt(std::max(sigma2_y, 0.0)) / sigma_e;

            e_norm.push_back(e_hat / sigma_e);
            v_norm.push_back(v_hat / sigma_e);
            total_rows += static_cast<std::size_t>(rows);
            out.per_entity.push_back({panel.entities[i], delta, std::nan(""), p, static_cast<std::size_t>(rows)});
        } catch (const Error& e) {
            out.warnings.push_back("LLC: entity " + panel.entities[i] + " dropped: " + e.what());
        }
    }
    const std::size_t n = e_norm.size();
    detail::require_entities(n, "LLC");
    double svv = 0.0, sve = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        svv += v_norm[i].squaredNorm();
        sve += v_norm[i].dot(e_norm[i]);
    }
    const double delta = sve / svv;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) ssr += (e_norm[i] - delta * v_norm[i]).squaredNorm();
    const double nt = static_cast<double>(total_rows);
    const double sigma2 = ssr / nt;
    const double std_delta = std::sqrt(sigma2 / svv);
    const double t_delta = delta / std_delta;
    const double t_tilde = nt / static_cast<double>(n);
    const double s_n = sum_s / static_cast<double>(n);

    const auto adj = detail::llc_adjustment(t_tilde, out.warnings);
    double mu = adj.mean_intercept, sd = adj.sd_intercept;
    if (o.deterministic == Deterministic::none) {
        mu = adj.mean_none;
        sd = adj.sd_none;
    } else if (o.deterministic == Deterministic::trend) {
        mu = adj.mean_trend;
        sd = adj.sd_trend;
    }
    out.statistic = (t_delta - nt * s_n / sigma2 * std_delta * mu) / sd;
    out.p_value = dist::normal_cdf(out.statistic);
    out.n_entities = n;
    return out;
}

// ---------------------------------------------------------------------------
// Battery

struct BatteryEntry {
    UnitRootTest test;
    IntegrationOrder order;
    std::optional<UnitRootResult> result;
    std::string error;  // set when result is empty
};

struct BatteryResult {
    std::string variable;
    std::vector<BatteryEntry> entries;  // Fisher-PP, Fisher-ADF, IPS, LLC; each I(0) then I(1)

    const BatteryEntry& at(UnitRootTest t, IntegrationOrder o) const {
        for (const auto& e : entries)
            if (e.test == t && e.order == o) return e;
        throw ValidationError("battery entry not found");
    }
};

inline UnitRootResult run_unit_root_test(UnitRootTest test, const PanelSeries& panel, const UnitRootOptions& o) {
    switch (test) {
        case UnitRootTest::fisher_pp: return fisher_pp(panel, o);
        case UnitRootTest::fisher_adf: return fisher_adf(panel, o);
        case UnitRootTest::ips: return ips(panel, o);
        case UnitRootTest::llc: return llc(panel, o);
    }
    throw ValidationError("unknown unit-root test");
}

/// Four panel tests at level and first difference, in report column order.
inline BatteryResult run_battery(const PanelDataset& d, const std::string& variable, const UnitRootOptions& o = {}) {
    const VariableSeries& s = d.variable(variable);
    const PanelSeries level = panel_series(s);
    const PanelSeries diff = panel_series(first_difference(s));
    BatteryResult out;
    out.variable = variable;
    for (UnitRootTest t : {UnitRootTest::fisher_pp, UnitRootTest::fisher_adf, UnitRootTest::ips, UnitRootTest::llc}) {
        for (IntegrationOrder ord : {IntegrationOrder::level, IntegrationOrder::first_difference}) {
            BatteryEntry entry{t, ord, std::nullopt, {}};
            try {
                auto r = run_unit_root_test(t, ord == IntegrationOrder::level ? level : diff, o);
                r.order = ord;
                entry.result = std::move(r);
            } catch (const Error& e) {
                entry.error = e.what();
            }
            out.entries.push_back(std::move(entry));
        }
    }
    return out;
}

}  // namespace panelecon
