#pragma once

// Embedded constants for unit-root p-values and panel moment adjustments.

#include <array>
#include <cstddef>

namespace panelecon::tables {

/// MacKinnon (1994) asymptotic response surface for the Dickey-Fuller t-ratio
/// with a single I(1) regressor. p = Phi(poly(tau)), with the small-p
/// polynomial below tau_star and the large-p polynomial above it.
struct MacKinnonSurface {
    double tau_star;
    double tau_min;
    double tau_max;
    std::array<double, 3> small_p;  // ascending powers
    std::array<double, 4> large_p;  // ascending powers
};

inline constexpr MacKinnonSurface kMacKinnonNone{
    -1.04, -19.04, 1e300, {0.6344, 1.2378, 3.2496e-2}, {0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2}};
inline constexpr MacKinnonSurface kMacKinnonIntercept{
    -1.61, -18.83, 2.74, {2.1659, 1.4412, 3.8269e-2}, {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2}};
inline constexpr MacKinnonSurface kMacKinnonTrend{
    -2.89, -16.18, 0.70, {3.2512, 1.6047, 4.9588e-2}, {2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2}};

/// Levin-Lin-Chu mean and standard-deviation adjustments for the pooled
/// t-ratio, indexed by the average effective series length. The last row is
/// the asymptotic limit.
struct LlcAdjustment {
    double length;
    double mean_none, sd_none;
    double mean_intercept, sd_intercept;
    double mean_trend, sd_trend;
};

inline constexpr LlcAdjustment kLlcAdjustments[] = {
    {25, 0.004, 1.049, -0.554, 0.919, -0.703, 1.003},
    {30, 0.003, 1.035, -0.546, 0.889, -0.674, 0.949},
    {35, 0.002, 1.027, -0.541, 0.867, -0.653, 0.906},
    {40, 0.002, 1.021, -0.537, 0.850, -0.637, 0.871},
    {45, 0.001, 1.017, -0.533, 0.837, -0.624, 0.842},
    {50, 0.001, 1.014, -0.531, 0.826, -0.614, 0.818},
    {60, 0.001, 1.011, -0.527, 0.810, -0.598, 0.780},
    {70, 0.000, 1.008, -0.524, 0.798, -0.587, 0.751},
    {80, 0.000, 1.007, -0.521, 0.789, -0.578, 0.728},
    {90, 0.000, 1.006, -0.520, 0.782, -0.571, 0.710},
    {100, 0.000, 1.005, -0.518, 0.776, -0.566, 0.695},
    {250, 0.000, 1.001, -0.509, 0.742, -0.533, 0.603},
    {1e5, 0.000, 1.000, -0.500, 0.707, -0.500, 0.500},
};

/// Null mean and variance of the ADF t-ratio for a Gaussian random walk of
/// the given length, augmented with `lags` lagged differences.
struct IpsMoment {
    int length;
    int lags;
    double mean;
    double variance;
};

#include "panelecon/ips_moments.inc"

}  // namespace panelecon::tables
