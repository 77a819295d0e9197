#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "panelecon/error.hpp"
#include "panelecon/linalg.hpp"
#include "panelecon/panel.hpp"

namespace panelecon {

struct JarqueBera {
    double stat = 0.0;
    double p = 1.0;
};

/// JB = n/6 (S^2 + (K-3)^2/4), p from the chi-square(2) survival exp(-JB/2).
inline JarqueBera jarque_bera(std::size_t n, double skewness, double kurtosis) {
    const double excess = kurtosis - 3.0;
    JarqueBera jb;
    jb.stat = static_cast<double>(n) / 6.0 * (skewness * skewness + excess * excess / 4.0);
    jb.p = std::exp(-jb.stat / 2.0);
    return jb;
}

/// Descriptive summary of one series. Skewness, kurtosis and Jarque-Bera are empty when
/// the series is constant.
struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double maximum = 0.0;
    double minimum = 0.0;
    double std_dev = 0.0;  // divisor n - 1
    std::optional<double> skewness;
    std::optional<double> kurtosis;  // raw, not excess
    double sum = 0.0;
    double sum_sq_dev = 0.0;
    std::optional<double> jb_stat;
    std::optional<double> jb_p;
};

inline SummaryStats summarize(std::span<const double> data) {
    std::vector<double> x;
    x.reserve(data.size());
    for (double v : data)
        if (!is_missing(v)) x.push_back(v);
    if (x.size() < 4) {
        throw InsufficientDataError("summarize: need at least 4 observations, have " + std::to_string(x.size()));
    }
    SummaryStats s;
    s.n = x.size();
    const double n = static_cast<double>(s.n);
    for (double v : x) s.sum += v;
    s.mean = s.sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    s.sum_sq_dev = m2;
    s.std_dev = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;

    std::sort(x.begin(), x.end());
    s.minimum = x.front();
    s.maximum = x.back();
    const std::size_t mid = s.n / 2;
    s.median = (s.n % 2 == 1) ? x[mid] : 0.5 * (x[mid - 1] + x[mid]);

    // Rounding can leave a tiny m2 for a constant series; treat relative
    // spread below 1e-14 as zero.
    const double scale = std::max(std::abs(s.mean), 1.0);
    if (std::sqrt(m2) > 1e-14 * scale) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
        const auto jb = jarque_bera(s.n, *s.skewness, *s.kurtosis);
        s.jb_stat = jb.stat;
        s.jb_p = jb.p;
    } else {
        s.std_dev = 0.0;
    }
    return s;
}

inline SummaryStats summarize(const VariableSeries& series) {
    try {
        return summarize(std::span<const double>(series.values()));
    } catch (const InsufficientDataError& e) {
        throw InsufficientDataError(series.name() + ": " + e.what());
    }
}

struct CorrelationMatrix {
    std::vector<std::string> variables;
    Matrix entries;
    std::size_t n_used = 0;

    double operator()(std::size_t a, std::size_t b) const {
        return entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
};

/// Pearson correlation of equal-length vectors.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("pearson: mismatched or short inputs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Correlation matrix on the listwise sample of all requested variables.
inline CorrelationMatrix pearson_matrix(const PanelDataset& d, const std::vector<std::string>& variables) {
    if (variables.size() < 2) throw ValidationError("pearson_matrix: need at least 2 variables");
    std::vector<const VariableSeries*> cols;
    for (const auto& v : variables) cols.push_back(&d.variable(v));

    const std::size_t cells = d.index().cells();
    std::vector<std::vector<double>> data(variables.size());
    for (std::size_t c = 0; c < cells; ++c) {
        bool ok = true;
        for (const auto* s : cols) ok = ok && !is_missing(s->values()[c]);
        if (!ok) continue;
        for (std::size_t j = 0; j < cols.size(); ++j) data[j].push_back(cols[j]->values()[c]);
    }
    const std::size_t n = data[0].size();
    if (n < 3) {
        throw InsufficientDataError("pearson_matrix: shared sample has " + std::to_string(n) +
                                    " rows, need at least 3");
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto [lo, hi] = std::minmax_element(data[j].begin(), data[j].end());
        if (*lo == *hi) throw ValidationError("pearson_matrix: '" + variables[j] + "' is constant on the shared sample");
    }

    CorrelationMatrix out;
    out.variables = variables;
    out.n_used = n;
    const auto k = static_cast<Eigen::Index>(variables.size());
    out.entries = Matrix::Identity(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = a + 1; b < k; ++b) {
            const double r = pearson(data[static_cast<std::size_t>(a)], data[static_cast<std::size_t>(b)]);
            out.entries(a, b) = r;
            out.entries(b, a) = r;
        }
    }
    return out;
}

}  // namespace panelecon
