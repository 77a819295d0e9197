#pragma once

// Synthetic country-year panel with the shape of the aid / prosperity data:
// 74 entities over 2013-2021, raw (unlogged) positive indicators, some
// missing cells. The prosperity score follows a persistent partial
// adjustment path toward an entity-specific level.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "panelecon/panel.hpp"

namespace panelecon {

struct FixtureOptions {
    std::uint64_t seed = 20230917;
    std::size_t entities = 74;
    int first_year = 2013;
    int last_year = 2021;
    double rho = 0.93;             // persistence of log prosperity
    double missing_share = 0.03;   // random missing cells per regressor
    std::size_t late_starters = 6; // entities first observed one year late
};

/// Three-letter identifiers AAA, AAB, ...
inline std::string fixture_entity_code(std::size_t i) {
    std::string s(3, 'A');
    s[2] = static_cast<char>('A' + i % 26);
    s[1] = static_cast<char>('A' + (i / 26) % 26);
    s[0] = static_cast<char>('A' + (i / 676) % 26);
    return s;
}

/// Raw variables pp, odapc, is, rl, aideconinfra, aidedu.
inline PanelDataset synthetic_fixture(const FixtureOptions& o = {}) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<std::string> entities;
    for (std::size_t i = 0; i < o.entities; ++i) entities.push_back(fixture_entity_code(i));
    std::vector<int> years;
    for (int y = o.first_year; y <= o.last_year; ++y) years.push_back(y);
    auto index = std::make_shared<const PanelIndex>(entities, years);
    const std::size_t T = years.size();
    const std::size_t burn = 1;  // one pre-sample year seeds the lags

    struct Spec {
        const char* name;
        double mean, between_sd, ar, shock_sd;
    };
    // Log-scale centres and spreads in the range of the source indicators.
    const Spec regs[] = {{"odapc", 3.2, 1.3, 0.6, 0.30}, {"is", 3.34, 0.20, 0.8, 0.03}, {"rl", 3.4, 0.45, 0.8, 0.04},
                         {"aideconinfra", 3.55, 1.9, 0.5, 0.50}, {"aidedu", 3.74, 1.0, 0.6, 0.25}};
    constexpr std::size_t R = std::size(regs);

    std::vector<std::vector<double>> logs(R + 1, std::vector<double>(index->cells(), kMissing));
    for (std::size_t i = 0; i < o.entities; ++i) {
        double mu[R];
        double x[R];
        for (std::size_t r = 0; r < R; ++r) {
            mu[r] = regs[r].mean + regs[r].between_sd * z(rng);
            x[r] = mu[r] + regs[r].shock_sd * z(rng);
        }
        // Richer rule of law, higher long-run prosperity.
        const double target = 3.96 + 0.2 * (mu[2] - 3.4) + 0.08 * z(rng);
        const double gap = 0.05 + 0.25 * u(rng);
        double y = target - gap;
        double x_prev[R];
        for (std::size_t t = 0; t < T + burn; ++t) {
            for (std::size_t r = 0; r < R; ++r) x_prev[r] = x[r];
            for (std::size_t r = 0; r < R; ++r) {
                x[r] = mu[r] + regs[r].ar * (x[r] - mu[r]) + regs[r].shock_sd * z(rng);
            }
            y = o.rho * y + (1.0 - o.rho) * target + 0.01 * (x_prev[2] - mu[2]) + 0.002 * (x_prev[4] - mu[4]) +
                0.004 * z(rng);
            if (t < burn) continue;
            const std::size_t cell = i * T + (t - burn);
            logs[0][cell] = y;
            for (std::size_t r = 0; r < R; ++r) logs[r + 1][cell] = x[r];
        }
    }

    // Late starters lose their first year; regressors lose random cells.
    for (std::size_t k = 0; k < o.late_starters && k < o.entities; ++k) {
        const std::size_t i = (k * 11 + 3) % o.entities;
        for (auto& v : logs) v[i * T] = kMissing;
    }
    for (std::size_t r = 1; r <= R; ++r) {
        for (std::size_t c = 0; c < index->cells(); ++c) {
            if (u(rng) < o.missing_share) logs[r][c] = kMissing;
        }
    }

    const char* names[] = {"pp", "odapc", "is", "rl", "aideconinfra", "aidedu"};
    std::vector<VariableSeries> vars;
    for (std::size_t r = 0; r <= R; ++r) {
        std::vector<double> raw(index->cells(), kMissing);
        for (std::size_t c = 0; c < raw.size(); ++c) {
            if (is_missing(logs[r][c])) continue;
            // Four decimals, like indicator downloads.
            raw[c] = std::round(std::exp(logs[r][c]) * 1e4) / 1e4;
        }
        vars.emplace_back(names[r], index, std::move(raw));
    }
    return PanelDataset(index, std::move(vars));
}

}  // namespace panelecon
