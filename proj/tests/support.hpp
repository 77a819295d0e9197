#pragma once

// Shared fixtures for the unit and acceptance suites: small panel builders
// and the seeded data-generating processes behind the Monte Carlo checks.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "panelecon/panel.hpp"
#include "panelecon/unit_root.hpp"

namespace testing_support {

using panelecon::kMissing;
using panelecon::PanelDataset;
using panelecon::PanelIndex;
using panelecon::PanelSeries;
using panelecon::VariableSeries;

/// Gaussian draws from a fixed-seed 64-bit Mersenne twister.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double normal() { return n_(gen_); }
    double uniform() { return u_(gen_); }
    std::uint64_t next_seed() { return gen_(); }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> n_{0.0, 1.0};
    std::uniform_real_distribution<double> u_{0.0, 1.0};
};

inline std::vector<std::string> entity_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("E" + std::to_string(1000 + i));
    return out;
}

inline std::vector<int> year_range(int first, std::size_t count) {
    std::vector<int> out;
    for (std::size_t t = 0; t < count; ++t) out.push_back(first + static_cast<int>(t));
    return out;
}

/// Dataset from entity-major value vectors.
inline PanelDataset make_panel(const std::vector<std::string>& entities, const std::vector<int>& years,
                               const std::vector<std::pair<std::string, std::vector<double>>>& vars) {
    auto index = std::make_shared<const PanelIndex>(entities, years);
    std::vector<VariableSeries> series;
    for (const auto& [name, values] : vars) series.emplace_back(name, index, values);
    return PanelDataset(index, std::move(series));
}

inline PanelSeries as_panel_series(const std::vector<std::vector<double>>& rows) {
    PanelSeries p;
    p.entities = entity_names(rows.size());
    p.values = rows;
    return p;
}

inline std::vector<double> random_walk(Rng& rng, std::size_t t_len) {
    std::vector<double> y(t_len);
    double level = 0.0;
    for (auto& v : y) {
        level += rng.normal();
        v = level;
    }
    return y;
}

inline std::vector<double> ar1(Rng& rng, std::size_t t_len, double phi, std::size_t burn = 50) {
    std::vector<double> y(t_len);
    double x = 0.0;
    for (std::size_t t = 0; t < burn + t_len; ++t) {
        x = phi * x + rng.normal();
        if (t >= burn) y[t - burn] = x;
    }
    return y;
}

inline PanelSeries random_walk_panel(Rng& rng, std::size_t n, std::size_t t_len) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(random_walk(rng, t_len));
    return as_panel_series(rows);
}

inline PanelSeries ar1_panel(Rng& rng, std::size_t n, std::size_t t_len, double phi) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(ar1(rng, t_len, phi));
    return as_panel_series(rows);
}

/// Cointegrated panel: x random walk, y = a_i + beta x + u with
/// corr(u_t, dx_t) = endogeneity. Variables "y" and "x".
inline PanelDataset cointegrated_panel(Rng& rng, std::size_t n, std::size_t t_len, double beta, double endogeneity) {
    std::vector<double> y(n * t_len), x(n * t_len);
    const double s = std::sqrt(1.0 - endogeneity * endogeneity);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        double level = rng.normal();
        for (std::size_t t = 0; t < t_len; ++t) {
            const double v = rng.normal();
            const double u = endogeneity * v + s * rng.normal();
            level += v;
            x[i * t_len + t] = level;
            y[i * t_len + t] = a + beta * level + u;
        }
    }
    return make_panel(entity_names(n), year_range(2000, t_len), {{"y", y}, {"x", x}});
}

/// Dynamic panel y_it = a_i + rho y_{i,t-1} + beta x_it + e_it with x an
/// exogenous AR(1). `error_ar` makes e a unit-variance AR(1), which
/// invalidates the lagged-level instruments. Variables "y" and "x".
inline PanelDataset dynamic_panel(Rng& rng, std::size_t n, std::size_t t_len, double rho, double beta,
                                  double error_ar = 0.0, std::size_t burn = 50) {
    std::vector<double> y(n * t_len), x(n * t_len);
    const double s = std::sqrt(1.0 - error_ar * error_ar);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        double yl = a / (1.0 - rho);
        double xl = 0.0;
        double e = 0.0;
        for (std::size_t t = 0; t < burn + t_len; ++t) {
            e = error_ar * e + s * rng.normal();
            xl = 0.5 * xl + rng.normal();
            yl = a + rho * yl + beta * xl + e;
            if (t >= burn) {
                y[i * t_len + t - burn] = yl;
                x[i * t_len + t - burn] = xl;
            }
        }
    }
    return make_panel(entity_names(n), year_range(2000, t_len), {{"y", y}, {"x", x}});
}

/// Static panel y = 1 + beta x + u_i + e with corr(u_i, xbar_i) set by
/// `effect_corr` (0 gives the random-effects null). Variables "y" and "x".
inline PanelDataset effects_panel(Rng& rng, std::size_t n, std::size_t t_len, double beta, double effect_corr) {
    std::vector<double> y(n * t_len), x(n * t_len);
    const double s = std::sqrt(1.0 - effect_corr * effect_corr);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = rng.normal();
        const double u = effect_corr * m + s * rng.normal();
        for (std::size_t t = 0; t < t_len; ++t) {
            const double xv = m + rng.normal();
            x[i * t_len + t] = xv;
            y[i * t_len + t] = 1.0 + beta * xv + u + rng.normal();
        }
    }
    return make_panel(entity_names(n), year_range(2000, t_len), {{"y", y}, {"x", x}});
}

}  // namespace testing_support
