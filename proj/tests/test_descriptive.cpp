#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "panelecon/descriptive.hpp"
#include "support.hpp"

using namespace panelecon;
using testing_support::make_panel;
using testing_support::Rng;

TEST(JarqueBera, ProsperityScoreRow) {
    const auto jb = jarque_bera(633, -0.517344, 2.859780);
    EXPECT_NEAR(jb.stat, 28.755, 0.01);
    EXPECT_NEAR(jb.p, 0.000001, 5e-7);
}

TEST(JarqueBera, AidPerCapitaRow) {
    EXPECT_NEAR(jarque_bera(633, -1.322848, 5.678379).stat, 373.82, 0.05);
}

TEST(JarqueBera, AllReferenceColumns) {
    struct Row {
        double s, k, jb;
    };
    const Row rows[] = {{-0.517344, 2.859780, 28.75509}, {-1.322848, 5.678379, 373.8240},
                        {-0.902952, 4.359087, 134.7342}, {-0.461788, 2.878564, 22.88665},
                        {-0.475326, 3.165511, 24.55865}, {-0.385532, 2.861981, 16.18340}};
    for (const auto& r : rows) EXPECT_NEAR(jarque_bera(633, r.s, r.k).stat, r.jb, 0.01) << r.s;
}

TEST(JarqueBera, ClosedForm) {
    // n/6 (S^2 + (K-3)^2/4) and exp(-JB/2) for two degrees of freedom.
    const auto jb = jarque_bera(100, 0.5, 4.0);
    EXPECT_NEAR(jb.stat, 100.0 / 6.0 * (0.25 + 0.25), 1e-12);
    EXPECT_NEAR(jb.stat, 8.3333, 1e-4);
    EXPECT_NEAR(jb.p, std::exp(-jb.stat / 2.0), 1e-12);
    EXPECT_NEAR(jb.p, 0.015504, 1e-6);
}

TEST(Summary, MeanAndStdDevIdentities) {
    EXPECT_NEAR(2507.560 / 633.0, 3.961391, 1e-6);
    EXPECT_NEAR(std::sqrt(13.51222 / 632.0), 0.146219, 1e-6);
}

TEST(Summary, OneToFive) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const auto s = summarize(x);
    EXPECT_EQ(s.n, 5u);
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
    EXPECT_DOUBLE_EQ(s.median, 3.0);
    EXPECT_DOUBLE_EQ(s.minimum, 1.0);
    EXPECT_DOUBLE_EQ(s.maximum, 5.0);
    EXPECT_NEAR(s.std_dev, 1.581139, 1e-6);
    EXPECT_NEAR(*s.skewness, 0.0, 1e-12);
    EXPECT_NEAR(*s.kurtosis, 1.7, 1e-12);
    EXPECT_DOUBLE_EQ(s.sum, 15.0);
    EXPECT_DOUBLE_EQ(s.sum_sq_dev, 10.0);
}

TEST(Summary, EvenLengthMedianAndMissingSkipped) {
    const std::vector<double> x{4, kMissing, 1, 3, 2};
    const auto s = summarize(x);
    EXPECT_EQ(s.n, 4u);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
}

TEST(Summary, ConstantSeriesHasNoShapeMoments) {
    const std::vector<double> x(10, 3.7);
    const auto s = summarize(x);
    EXPECT_DOUBLE_EQ(s.std_dev, 0.0);
    EXPECT_FALSE(s.skewness.has_value());
    EXPECT_FALSE(s.kurtosis.has_value());
    EXPECT_FALSE(s.jb_stat.has_value());
}

TEST(Summary, TooFewObservations) {
    const std::vector<double> x{1, 2, kMissing, 3};
    EXPECT_THROW(summarize(x), InsufficientDataError);
}

TEST(Summary, BruteForceMoments) {
    Rng rng(42);
    std::vector<double> x(257);
    for (auto& v : x) v = std::exp(rng.normal());
    const auto s = summarize(x);
    long double mean = 0;
    for (double v : x) mean += v;
    mean /= x.size();
    long double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const long double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const long double n = x.size();
    EXPECT_NEAR(s.mean, static_cast<double>(mean), 1e-12);
    EXPECT_NEAR(s.std_dev, static_cast<double>(std::sqrt(m2 / (n - 1))), 1e-12);
    EXPECT_NEAR(*s.skewness, static_cast<double>((m3 / n) / std::pow(m2 / n, 1.5L)), 1e-10);
    EXPECT_NEAR(*s.kurtosis, static_cast<double>((m4 / n) / ((m2 / n) * (m2 / n))), 1e-10);
}

TEST(Summary, AffineInvariance) {
    Rng rng(9);
    std::vector<double> x(80), z(80);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal() + 0.3 * rng.normal() * rng.normal();
        z[i] = 2.5 * x[i] - 7.0;
    }
    const auto a = summarize(x);
    const auto b = summarize(z);
    EXPECT_NEAR(b.mean, 2.5 * a.mean - 7.0, 1e-12);
    EXPECT_NEAR(b.std_dev, 2.5 * a.std_dev, 1e-12);
    EXPECT_NEAR(*b.skewness, *a.skewness, 1e-9);
    EXPECT_NEAR(*b.kurtosis, *a.kurtosis, 1e-9);
}

TEST(Correlation, HandOracle) {
    // x = (1,2,3,4), y = (1,3,2,4): sxy = 4, sxx = syy = 5.
    const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
    EXPECT_NEAR(pearson(x, y), 0.8, 1e-15);
    const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
    EXPECT_NEAR(pearson(a, b), 0.5, 1e-15);
}

TEST(Correlation, NegativeAffineIsMinusOne) {
    Rng rng(1);
    std::vector<double> x(30), y(30);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = -3.0 * x[i] + 2.0;
    }
    EXPECT_DOUBLE_EQ(pearson(x, y), -1.0);
}

TEST(Correlation, MatrixUsesListwiseSample) {
    const auto d = make_panel({"A", "B"}, {2013, 2014, 2015},
                              {{"a", {1, 2, 3, 4, 5, 6}}, {"b", {2, 1, 4, 3, 6, kMissing}}, {"c", {1, 1, 2, 3, 5, 8}}});
    const auto m = pearson_matrix(d, {"a", "b", "c"});
    EXPECT_EQ(m.n_used, 5u);
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 1, 4, 3, 6}, c{1, 1, 2, 3, 5};
    EXPECT_NEAR(m(0, 1), pearson(a, b), 1e-15);
    EXPECT_NEAR(m(0, 2), pearson(a, c), 1e-15);
    EXPECT_NEAR(m(2, 1), pearson(b, c), 1e-15);
    EXPECT_DOUBLE_EQ(m(1, 1), 1.0);
}

TEST(Correlation, SymmetricUnitDiagonalAndAffineInvariant) {
    Rng rng(77);
    const std::size_t cells = 40;
    std::vector<double> a(cells), b(cells), c(cells), b2(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        a[i] = rng.normal();
        b[i] = a[i] + rng.normal();
        c[i] = rng.uniform() < 0.1 ? kMissing : rng.normal() - 0.5 * b[i];
        b2[i] = 4.0 * b[i] + 11.0;
    }
    const auto years = testing_support::year_range(2000, 8);
    const auto names = testing_support::entity_names(5);
    const auto m = pearson_matrix(make_panel(names, years, {{"a", a}, {"b", b}, {"c", c}}), {"a", "b", "c"});
    const auto m2 = pearson_matrix(make_panel(names, years, {{"a", a}, {"b", b2}, {"c", c}}), {"a", "b", "c"});
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(m(i, i), 1.0);
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_DOUBLE_EQ(m(i, j), m(j, i));
            EXPECT_LE(std::abs(m(i, j)), 1.0);
            EXPECT_NEAR(m(i, j), m2(i, j), 1e-12);
        }
    }
}

TEST(Correlation, ConstantColumnRejected) {
    const auto d = make_panel({"A"}, {2013, 2014, 2015, 2016}, {{"a", {1, 2, 3, 4}}, {"b", {2, 2, 2, 2}}});
    EXPECT_THROW(pearson_matrix(d, {"a", "b"}), ValidationError);
}
