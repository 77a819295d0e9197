#pragma once

// First-difference dynamic panel GMM (Arellano-Bond).
//
//   dy_it = rho dy_i,t-1 + dx_it' b + de_it
//
// Lagged levels y_i,t-2, y_i,t-3, ... instrument the differenced equation at
// t; strictly exogenous regressors instrument themselves. One-step GMM uses
// the MA(1) weighting implied by differencing iid errors, two-step re-weights
// with the entity-clustered outer product of one-step moment residuals.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "panelecon/distributions.hpp"
#include "panelecon/error.hpp"
#include "panelecon/linalg.hpp"
#include "panelecon/panel.hpp"

namespace panelecon {

enum class GmmStep { one, two };

enum class RegressorTreatment {
    strictly_exogenous,  // instrumented by its own difference
    endogenous,          // instrumented by lagged levels, like y
};

struct GmmOptions {
    /// Deepest lag of the level instruments; default all available.
    std::optional<int> max_depth;
    bool collapse = false;
    GmmStep step = GmmStep::two;
    RegressorTreatment regressors = RegressorTreatment::strictly_exogenous;
};

/// Per-entity block of the differenced system. Rows are usable equations.
struct GmmBlock {
    std::string entity;
    std::vector<int> periods;
    Vector y;  // dy_t
    Matrix X;  // [dy_{t-1}, dx_t...]
    Matrix Z;  // instruments
};

/// Differenced sample plus instrument matrix.
struct GmmSample {
    std::vector<std::string> regressor_names;
    std::vector<std::string> instrument_names;
    std::vector<GmmBlock> blocks;

    std::size_t instrument_count() const { return instrument_names.size(); }
    std::size_t n_obs() const {
        std::size_t n = 0;
        for (const auto& b : blocks) n += static_cast<std::size_t>(b.y.size());
        return n;
    }
    std::size_t periods_included() const {
        std::vector<int> p;
        for (const auto& b : blocks) p.insert(p.end(), b.periods.begin(), b.periods.end());
        std::sort(p.begin(), p.end());
        return static_cast<std::size_t>(std::unique(p.begin(), p.end()) - p.begin());
    }
};

namespace detail {

struct InstrumentKey {
    int group;     // 0 = dependent, j+1 = regressor j (endogenous)
    int period;    // equation period; -1 when collapsed
    int distance;  // lag distance t - s

    auto operator<=>(const InstrumentKey&) const = default;
};

}  // namespace detail

/// Builds the differenced sample and instrument matrix from a dataset.
/// Requires spec.lagged_dependent.
inline GmmSample build_instruments(const PanelDataset& d, const ModelSpec& spec, const GmmOptions& options = {}) {
    spec.validate();
    if (!spec.lagged_dependent) throw ValidationError("build_instruments: the model needs a lagged dependent variable");
    if (options.max_depth && *options.max_depth < 1) throw ValidationError("build_instruments: max_depth must be >= 1");
    const auto& idx = d.index();
    const VariableSeries& ys = d.variable(spec.dependent);
    std::vector<const VariableSeries*> xs;
    for (const auto& r : spec.regressors) xs.push_back(&d.variable(r.variable));
    const std::size_t kx = xs.size();
    const bool endogenous = options.regressors == RegressorTreatment::endogenous;

    const int first_year = idx.periods().front();
    const int last_year = idx.periods().back();
    auto value = [&](const VariableSeries& s, std::size_t e, int year) -> double {
        auto t = idx.period_pos(year);
        if (!t) return kMissing;
        return s.at(e, *t);
    };
    auto y_at = [&](std::size_t e, int year) { return value(ys, e, year); };
    auto x_at = [&](std::size_t e, std::size_t j, int year) {
        return value(*xs[j], e, year - spec.regressors[j].lag);
    };

    GmmSample out;
    out.regressor_names.push_back(term_name(spec.dependent, 1));
    for (const auto& r : spec.regressors) out.regressor_names.push_back(term_name(r.variable, r.lag));

    struct RawRow {
        int period;
        double dy;
        std::vector<double> x;
        std::map<detail::InstrumentKey, double> gmm;  // level instruments
        std::vector<double> iv;                         // exogenous differences
    };
    std::map<detail::InstrumentKey, bool> keys_seen;
    std::vector<std::pair<std::string, std::vector<RawRow>>> raw;
    std::size_t entities_with_rows = 0;

    for (std::size_t e = 0; e < idx.n_entities(); ++e) {
        std::vector<RawRow> rows;
        for (int t = first_year + 2; t <= last_year; ++t) {
            const double y0 = y_at(e, t), y1 = y_at(e, t - 1), y2 = y_at(e, t - 2);
            if (is_missing(y0) || is_missing(y1) || is_missing(y2)) continue;
            RawRow row;
            row.period = t;
            row.dy = y0 - y1;
            row.x.push_back(y1 - y2);
            bool ok = true;
            for (std::size_t j = 0; j < kx && ok; ++j) {
                const double a = x_at(e, j, t), b = x_at(e, j, t - 1);
                ok = !is_missing(a) && !is_missing(b);
                if (ok) row.x.push_back(a - b);
            }
            if (!ok) continue;
            const int deepest = options.max_depth ? std::min(t - first_year, *options.max_depth + 1) : t - first_year;
            for (int dist = 2; dist <= deepest; ++dist) {
                const double lv = y_at(e, t - dist);
                if (is_missing(lv)) continue;
                detail::InstrumentKey key{0, options.collapse ? -1 : t, dist};
                row.gmm[key] = lv;
                keys_seen[key] = true;
            }
            if (endogenous) {
                for (std::size_t j = 0; j < kx; ++j) {
                    for (int dist = 2; dist <= deepest; ++dist) {
                        const double lv = x_at(e, j, t - dist);
                        if (is_missing(lv)) continue;
                        detail::InstrumentKey key{static_cast<int>(j) + 1, options.collapse ? -1 : t, dist};
                        row.gmm[key] = lv;
                        keys_seen[key] = true;
                    }
                }
            } else {
                row.iv.assign(row.x.begin() + 1, row.x.end());
            }
            rows.push_back(std::move(row));
        }
        if (!rows.empty()) ++entities_with_rows;
        raw.emplace_back(idx.entities()[e], std::move(rows));
    }
    if (entities_with_rows == 0 || keys_seen.empty()) {
        throw InsufficientDataError("build_instruments: no entity has a usable differenced period with a lagged-level "
                                    "instrument (need at least 3 consecutive periods)");
    }

    std::map<detail::InstrumentKey, std::size_t> column_of;
    for (const auto& [key, _] : keys_seen) {
        column_of.emplace(key, column_of.size());
        const std::string base = key.group == 0 ? spec.dependent : spec.regressors[static_cast<std::size_t>(key.group - 1)].variable;
        std::string name = base + "(-" + std::to_string(key.distance) + ")";
        if (key.period >= 0) name += "@" + std::to_string(key.period);
        out.instrument_names.push_back(name);
    }
    const std::size_t n_gmm = column_of.size();
    if (!endogenous) {
        for (std::size_t j = 0; j < kx; ++j) out.instrument_names.push_back("D(" + out.regressor_names[j + 1] + ")");
    }
    const auto n_inst = static_cast<Eigen::Index>(out.instrument_names.size());
    const auto n_par = static_cast<Eigen::Index>(kx + 1);
    if (n_inst < n_par) {
        throw InsufficientDataError("build_instruments: " + std::to_string(n_inst) + " instruments for " +
                                    std::to_string(n_par) + " parameters");
    }

    for (auto& [entity, rows] : raw) {
        if (rows.empty()) continue;
        GmmBlock b;
        b.entity = entity;
        const auto r = static_cast<Eigen::Index>(rows.size());
        b.y.resize(r);
        b.X.resize(r, n_par);
        b.Z = Matrix::Zero(r, n_inst);
        for (Eigen::Index i = 0; i < r; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            b.periods.push_back(row.period);
            b.y(i) = row.dy;
            for (Eigen::Index j = 0; j < n_par; ++j) b.X(i, j) = row.x[static_cast<std::size_t>(j)];
            for (const auto& [key, v] : row.gmm) b.Z(i, static_cast<Eigen::Index>(column_of.at(key))) = v;
            for (std::size_t j = 0; j < row.iv.size(); ++j) b.Z(i, static_cast<Eigen::Index>(n_gmm + j)) = row.iv[j];
        }
        out.blocks.push_back(std::move(b));
    }

    // Drop instrument columns that are zero everywhere (e.g. an exogenous
    // regressor difference that never varies).
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < n_inst; ++c) {
        bool nonzero = false;
        for (const auto& b : out.blocks) nonzero = nonzero || b.Z.col(c).cwiseAbs().maxCoeff() > 0.0;
        if (nonzero) keep.push_back(c);
    }
    if (static_cast<Eigen::Index>(keep.size()) != n_inst) {
        std::vector<std::string> names;
        for (auto c : keep) names.push_back(out.instrument_names[static_cast<std::size_t>(c)]);
        out.instrument_names = std::move(names);
        for (auto& b : out.blocks) {
            Matrix z(b.Z.rows(), static_cast<Eigen::Index>(keep.size()));
            for (std::size_t c = 0; c < keep.size(); ++c) z.col(static_cast<Eigen::Index>(c)) = b.Z.col(keep[c]);
            b.Z = std::move(z);
        }
        if (static_cast<Eigen::Index>(keep.size()) < n_par) {
            throw InsufficientDataError("build_instruments: too few non-zero instrument columns");
        }
    }
    return out;
}

struct GmmResult {
    std::vector<std::string> names;
    Vector coefficients;
    Matrix covariance;
    Vector std_errors;
    Vector z_stats;
    Vector p_values;
    double j_stat = 0.0;
    int j_df = 0;
    std::optional<double> j_p;  // empty when exactly identified
    double criterion = 0.0;     // g' W g at the reported weighting
    std::size_t instrument_count = 0;
    std::size_t n_obs = 0;
    std::size_t n_entities = 0;
    std::size_t periods_included = 0;
    GmmStep step = GmmStep::two;
    std::vector<Vector> residuals;  // per block
    Warnings warnings;

    double coef(const std::string& name) const {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ValidationError("gmm: no coefficient named '" + name + "'");
        return coefficients(it - names.begin());
    }
    double p_value(const std::string& name) const {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ValidationError("gmm: no coefficient named '" + name + "'");
        return p_values(it - names.begin());
    }
};

/// MA(1) weighting block for differenced iid errors: 2 on the diagonal and
/// -1 between rows of consecutive periods.
inline Matrix differenced_error_weight(const std::vector<int>& periods) {
    const auto n = static_cast<Eigen::Index>(periods.size());
    Matrix h = 2.0 * Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (periods[static_cast<std::size_t>(i + 1)] - periods[static_cast<std::size_t>(i)] == 1) {
            h(i, i + 1) = -1.0;
            h(i + 1, i) = -1.0;
        }
    }
    return h;
}

namespace detail {

inline Matrix invert_weight(const Matrix& s, const char* which, Warnings& warnings) {
    if (is_positive_definite(s)) {
        Eigen::LLT<Matrix> llt(0.5 * (s + s.transpose()));
        return llt.solve(Matrix::Identity(s.rows(), s.cols()));
    }
    const auto p = symmetric_pinv(s);
    warnings.push_back(std::string("gmm: ") + which + " weighting matrix is singular (rank " + std::to_string(p.rank) +
                       " of " + std::to_string(s.rows()) + "); pseudo-inverse used");
    return p.inverse;
}

struct LinearGmm {
    Vector beta;
    Matrix bread_inv;  // (Szx' W Szx)^-1
};

inline LinearGmm solve_linear_gmm(const Matrix& szx, const Vector& szy, const Matrix& w) {
    const Matrix bread = szx.transpose() * w * szx;
    Eigen::LDLT<Matrix> ldlt(0.5 * (bread + bread.transpose()));
    if (ldlt.info() != Eigen::Success || !is_positive_definite(bread)) {
        throw CollinearityError("gmm: instruments do not identify the parameters");
    }
    LinearGmm out;
    out.beta = ldlt.solve(szx.transpose() * w * szy);
    out.bread_inv = ldlt.solve(Matrix::Identity(bread.rows(), bread.cols()));
    return out;
}

}  // namespace detail

inline GmmResult gmm_estimate(const GmmSample& sample, GmmStep step = GmmStep::two) {
    if (sample.blocks.empty()) throw InsufficientDataError("gmm: empty sample");
    const auto l = static_cast<Eigen::Index>(sample.instrument_count());
    const auto k = static_cast<Eigen::Index>(sample.regressor_names.size());
    if (l < k) {
        throw InsufficientDataError("gmm: " + std::to_string(l) + " moment conditions for " + std::to_string(k) +
                                    " parameters");
    }
    GmmResult r;
    r.names = sample.regressor_names;
    r.instrument_count = static_cast<std::size_t>(l);
    r.n_obs = sample.n_obs();
    r.n_entities = sample.blocks.size();
    r.periods_included = sample.periods_included();
    r.step = step;

    Matrix szx = Matrix::Zero(l, k);
    Vector szy = Vector::Zero(l);
    Matrix zhz = Matrix::Zero(l, l);
    for (const auto& b : sample.blocks) {
        if (b.Z.cols() != l || b.X.cols() != k) throw ValidationError("gmm: inconsistent block dimensions");
        szx += b.Z.transpose() * b.X;
        szy += b.Z.transpose() * b.y;
        zhz += b.Z.transpose() * differenced_error_weight(b.periods) * b.Z;
    }

    const Matrix w1 = detail::invert_weight(zhz, "one-step", r.warnings);
    const auto one = detail::solve_linear_gmm(szx, szy, w1);

    auto residuals_at = [&](const Vector& beta) {
        std::vector<Vector> res;
        for (const auto& b : sample.blocks) res.push_back(b.y - b.X * beta);
        return res;
    };
    auto moments = [&](const std::vector<Vector>& res) {
        Vector g = Vector::Zero(l);
        for (std::size_t i = 0; i < res.size(); ++i) g += sample.blocks[i].Z.transpose() * res[i];
        return g;
    };

    const auto res1 = residuals_at(one.beta);
    const double n = static_cast<double>(r.n_obs);
    if (step == GmmStep::one) {
        double ssr = 0.0;
        for (const auto& e : res1) ssr += e.squaredNorm();
        const double sigma2 = ssr / (2.0 * std::max(n - static_cast<double>(k), 1.0));
        r.coefficients = one.beta;
        r.covariance = sigma2 * one.bread_inv;
        r.residuals = res1;
        const Vector g = moments(res1);
        r.criterion = g.dot(w1 * g);
        r.j_stat = sigma2 > 0.0 ? r.criterion / sigma2 : 0.0;
    } else {
        Matrix s = Matrix::Zero(l, l);
        for (std::size_t i = 0; i < res1.size(); ++i) {
            const Vector zi_e = sample.blocks[i].Z.transpose() * res1[i];
            s += zi_e * zi_e.transpose();
        }
        const Matrix w2 = detail::invert_weight(s, "two-step", r.warnings);
        const auto two = detail::solve_linear_gmm(szx, szy, w2);
        r.coefficients = two.beta;
        r.covariance = two.bread_inv;
        r.residuals = residuals_at(two.beta);
        const Vector g = moments(r.residuals);
        r.criterion = g.dot(w2 * g);
        r.j_stat = r.criterion;
    }
    r.j_stat = std::max(r.j_stat, 0.0);
    r.j_df = static_cast<int>(l - k);
    if (r.j_df > 0) r.j_p = dist::chi2_sf(r.j_stat, r.j_df);

    r.covariance = 0.5 * (r.covariance + r.covariance.transpose());
    r.std_errors = r.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    r.z_stats = r.coefficients.cwiseQuotient(r.std_errors);
    r.p_values.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) r.p_values(j) = dist::normal_two_sided(r.z_stats(j));
    return r;
}

struct JStatistic {
    double j = 0.0;
    int df = 0;
    std::optional<double> p;
};

/// Hansen J (two-step) or Sargan (one-step) overidentification statistic.
inline JStatistic j_statistic(const GmmResult& result) {
    return {result.j_stat, result.j_df, result.j_p};
}

inline GmmResult dynamic_gmm(const PanelDataset& d, const ModelSpec& spec, const GmmOptions& options = {}) {
    const auto sample = build_instruments(d, spec, options);
    return gmm_estimate(sample, options.step);
}

}  // namespace panelecon
