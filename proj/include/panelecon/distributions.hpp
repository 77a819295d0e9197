#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace panelecon::dist {

inline double normal_cdf(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    return boost::math::cdf(boost::math::normal_distribution<double>{}, x);
}

/// Two-sided p-value of a standard normal statistic.
inline double normal_two_sided(double z) {
    return std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
}

/// P(X > x) for X ~ chi-square(df). df == 0 is a point mass at zero.
inline double chi2_sf(double x, double df) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 1.0;
    if (df <= 0.0) return 0.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

/// Two-sided p-value of a Student-t statistic.
inline double student_two_sided(double t, double df) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (df <= 0.0) return normal_two_sided(t);
    if (std::isinf(t)) return 0.0;
    boost::math::students_t_distribution<double> d(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(d, std::abs(t))));
}

}  // namespace panelecon::dist
