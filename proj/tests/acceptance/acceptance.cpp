// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every random draw derives from kMasterSeed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "panelecon/descriptive.hpp"
#include "panelecon/estimation.hpp"
#include "panelecon/fmols.hpp"
#include "panelecon/gmm.hpp"
#include "panelecon/pipeline.hpp"
#include "panelecon/report.hpp"
#include "panelecon/unit_root.hpp"
#include "../support.hpp"

using namespace panelecon;
using testing_support::make_panel;
using testing_support::Rng;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kMasterSeed = 20240611;

/// Collects check outcomes for one criterion.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    void near(double actual, double expected, double tol, const std::string& what) {
        std::ostringstream s;
        s.precision(10);
        s << what << ": got " << actual << ", want " << expected << " +/- " << tol;
        expect(std::isfinite(actual) && std::abs(actual - expected) <= tol, s.str());
    }
    void note(const std::string& line) { notes_.push_back(line); }
    const std::vector<std::string>& failures() const { return failures_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << v;
    return s.str();
}

// ---- criterion 1 -----------------------------------------------------------

void descriptive_identities(Checks& c) {
    const auto lnpp = jarque_bera(633, -0.517344, 2.859780);
    c.near(lnpp.stat, 28.755, 0.01, "LNPP Jarque-Bera");
    c.expect(report::fixed6(lnpp.p) == "0.000001", "LNPP probability prints as " + report::fixed6(lnpp.p));
    c.near(jarque_bera(633, -1.322848, 5.678379).stat, 373.82, 0.05, "LNODAPC Jarque-Bera");
    c.near(2507.560 / 633.0, 3.961391, 1e-5, "LNPP sum/n");
    c.near(std::sqrt(13.51222 / 632.0), 0.146219, 1e-5, "LNPP sqrt(sum sq dev/(n-1))");

    // The same identities hold for the implementation's own summaries.
    Rng rng(kMasterSeed);
    std::vector<double> x(633);
    for (auto& v : x) v = 4.0 + 0.15 * rng.normal();
    const auto s = summarize(x);
    c.near(s.sum / static_cast<double>(s.n), s.mean, 1e-12, "summary sum/n");
    c.near(std::sqrt(s.sum_sq_dev / static_cast<double>(s.n - 1)), s.std_dev, 1e-12, "summary std dev");
    c.near(*s.jb_stat, jarque_bera(s.n, *s.skewness, *s.kurtosis).stat, 1e-10, "summary Jarque-Bera");
    c.note("LNPP JB " + fmt(lnpp.stat, 5) + ", p " + report::fixed6(lnpp.p));
}

// ---- criterion 2 -----------------------------------------------------------

EstimationResult scalar_result(double coef, double var) {
    EstimationResult r;
    r.names = {"x"};
    r.coefficients = Vector::Constant(1, coef);
    r.covariance = Matrix::Constant(1, 1, var);
    return r;
}

void hand_oracles(Checks& c) {
    Vector y(5);
    y << 2, 4, 5, 4, 5;
    Matrix X(5, 1);
    X << 1, 2, 3, 4, 5;
    const auto ols = pooled_ols(y, X, {"x"}, true);
    c.near(ols.coef("x"), 0.6, 1e-12, "OLS slope");
    c.near(ols.coef("const"), 2.2, 1e-12, "OLS intercept");

    Rng rng(kMasterSeed + 1);
    const auto base = testing_support::effects_panel(rng, 10, 5, 0.7, 0.3);
    std::vector<double> xv = base.variable("x").values(), z(xv.size());
    for (auto& v : z) v = rng.normal();
    xv[3] = kMissing;
    xv[27] = kMissing;
    const auto d = make_panel(base.index().entities(), base.periods(),
                              {{"y", base.variable("y").values()}, {"x", xv}, {"z", z}});
    const ModelSpec spec{"y", false, {{"x", 0}, {"z", 0}}};
    const auto s = regression_sample(d, spec);
    const auto n_ent = static_cast<Eigen::Index>(d.index().n_entities());

    // Fixed effects against dummy-variable OLS.
    const auto fe = fixed_effects(s);
    Matrix D = Matrix::Zero(static_cast<Eigen::Index>(s.n_obs()), n_ent + 2);
    for (std::size_t r = 0; r < s.n_obs(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        D(row, static_cast<Eigen::Index>(s.entity[r])) = 1.0;
        D.row(row).tail(2) = s.X.row(row);
    }
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < n_ent; ++i) names.push_back("d" + std::to_string(i));
    names.insert(names.end(), {"x", "z"});
    const auto lsdv = pooled_ols(s.y, D, names, false);
    for (const char* v : {"x", "z"}) c.near(fe.coef(v), lsdv.coef(v), 1e-10, std::string("FE vs LSDV ") + v);

    // Random effects against explicit block GLS with the estimated components.
    const auto re = random_effects(s);
    const double su = re.components.sigma2_u, se = re.components.sigma2_e;
    c.expect(su > 0.0, "random-effects variance component is positive");
    Matrix A = Matrix::Zero(3, 3);
    Vector b = Vector::Zero(3);
    for (const auto& [lo, hi] : s.entity_blocks()) {
        const auto t = static_cast<Eigen::Index>(hi - lo);
        const Matrix omega = se * Matrix::Identity(t, t) + su * Matrix::Ones(t, t);
        Matrix Xi(t, 3);
        Xi.col(0).setOnes();
        Xi.rightCols(2) = s.X.middleRows(static_cast<Eigen::Index>(lo), t);
        const Matrix oinv = omega.inverse();
        A += Xi.transpose() * oinv * Xi;
        b += Xi.transpose() * oinv * s.y.segment(static_cast<Eigen::Index>(lo), t);
    }
    const Vector gls = A.ldlt().solve(b);
    c.near(re.estimate.coef("const"), gls(0), 1e-8, "RE vs block GLS const");
    c.near(re.estimate.coef("x"), gls(1), 1e-8, "RE vs block GLS x");
    c.near(re.estimate.coef("z"), gls(2), 1e-8, "RE vs block GLS z");

    const auto h = hausman(scalar_result(3.0, 1.5), scalar_result(1.0, 0.5));
    c.near(h.statistic, 4.0, 1e-12, "Hausman scalar statistic");
    c.near(h.p, 0.0455, 1e-3, "Hausman scalar p");

    const std::vector<double> ps{0.05, 0.05};
    const auto f = fisher_combine(ps);
    c.near(f.chi2, 11.983, 1e-3, "Fisher statistic");
    c.near(f.p, 0.0175, 1e-4, "Fisher p");

    Rng grng(kMasterSeed + 2);
    const auto dyn = testing_support::dynamic_panel(grng, 60, 6, 0.5, 1.0);
    GmmOptions o;
    o.collapse = true;
    o.max_depth = 1;
    for (auto step : {GmmStep::one, GmmStep::two}) {
        o.step = step;
        const auto g = dynamic_gmm(dyn, ModelSpec{"y", true, {{"x", 0}}}, o);
        c.expect(g.instrument_count == 2 && g.j_df == 0, "exactly identified GMM has 2 instruments");
        c.expect(std::abs(g.j_stat) < 1e-8, "exactly identified GMM J = " + std::to_string(g.j_stat));
    }
}

// ---- criterion 3 -----------------------------------------------------------

// y = a_i + beta x + e with e orthogonal per entity to {1, x, dx} over the
// estimation rows, so every FMOLS correction vanishes at bandwidth 0.
PanelDataset orthogonal_panel(Rng& rng, std::size_t n, std::size_t t_len, double beta) {
    std::vector<double> y(n * (t_len + 1)), x(n * (t_len + 1));
    for (std::size_t i = 0; i < n; ++i) {
        Vector xs(static_cast<Eigen::Index>(t_len) + 1);
        double level = rng.normal();
        for (Eigen::Index t = 0; t < xs.size(); ++t) xs(t) = (level += rng.normal());
        Matrix basis(static_cast<Eigen::Index>(t_len), 3);
        Vector e(static_cast<Eigen::Index>(t_len));
        for (Eigen::Index t = 0; t < e.size(); ++t) {
            basis(t, 0) = 1.0;
            basis(t, 1) = xs(t + 1);
            basis(t, 2) = xs(t + 1) - xs(t);
            e(t) = rng.normal();
        }
        e -= basis * basis.colPivHouseholderQr().solve(e);
        const double a = rng.normal();
        const std::size_t base = i * (t_len + 1);
        x[base] = xs(0);
        y[base] = a + beta * xs(0);
        for (std::size_t t = 0; t < t_len; ++t) {
            const auto k = static_cast<Eigen::Index>(t) + 1;
            x[base + t + 1] = xs(k);
            y[base + t + 1] = a + beta * xs(k) + e(k - 1);
        }
    }
    return make_panel(testing_support::entity_names(n), testing_support::year_range(2000, t_len + 1), {{"y", y}, {"x", x}});
}

void collapse_oracles(Checks& c) {
    Rng rng(kMasterSeed + 3);
    const ModelSpec spec{"y", false, {{"x", 0}}};
    const auto d = orthogonal_panel(rng, 8, 15, 1.3);
    FmolsOptions fo;
    fo.bandwidth = 0;
    c.near(fmols_panel(d, spec, fo).coef("x"), fixed_effects(fmols_sample(d, spec)).coef("x"), 1e-8,
           "FMOLS bandwidth 0 vs within OLS");

    const auto walk = testing_support::random_walk(rng, 80);
    for (auto det : {Deterministic::none, Deterministic::intercept, Deterministic::trend}) {
        const auto pp = pp_test(walk, det, 0);
        const auto df = adf_test(walk, 0, det);
        c.near(pp.z_tau, df.tau, 1e-12, std::string("PP bandwidth 0 vs ADF statistic, ") + to_string(det));
        c.near(pp.p, df.p, 1e-12, std::string("PP bandwidth 0 vs ADF p, ") + to_string(det));
    }

    const auto e = testing_support::effects_panel(rng, 20, 7, 0.8, 0.4);
    RandomEffectsOptions ro;
    ro.forced_theta = 1.0;
    c.near(random_effects(e, spec, ro).estimate.coef("x"), fixed_effects(e, spec).coef("x"), 1e-10,
           "RE theta 1 vs FE");
}

// ---- criterion 4 -----------------------------------------------------------

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    const auto n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - p[i]);
        d = std::max(d, p[i] - static_cast<double>(i) / n);
    }
    return d;
}

void monte_carlo(Checks& c) {
    const ModelSpec static_spec{"y", false, {{"x", 0}}};
    const ModelSpec dynamic_spec{"y", true, {{"x", 0}}};

    // (a) FMOLS recovery and endogeneity correction.
    {
        Rng rng(kMasterSeed + 10);
        std::vector<double> abs_err;
        for (int r = 0; r < 100; ++r) {
            const auto d = testing_support::cointegrated_panel(rng, 20, 50, 2.0, 0.0);
            abs_err.push_back(std::abs(fmols_panel(d, static_spec).coef("x") - 2.0));
        }
        std::vector<double> fm_bias, ols_bias;
        for (int r = 0; r < 200; ++r) {
            const auto d = testing_support::cointegrated_panel(rng, 20, 50, 2.0, 0.6);
            fm_bias.push_back(fmols_panel(d, static_spec).coef("x") - 2.0);
            ols_bias.push_back(fixed_effects(fmols_sample(d, static_spec)).coef("x") - 2.0);
        }
        c.expect(mean(abs_err) <= 0.05, "(a) FMOLS mean |error| " + fmt(mean(abs_err)) + " > 0.05");
        c.expect(std::abs(mean(fm_bias)) < std::abs(mean(ols_bias)),
                 "(a) FMOLS bias " + fmt(mean(fm_bias), 5) + " not below static OLS bias " + fmt(mean(ols_bias), 5));
        c.note("(a) FMOLS mean |error| " + fmt(mean(abs_err)) + "; bias FMOLS " + fmt(mean(fm_bias), 5) +
               " vs static OLS " + fmt(mean(ols_bias), 5));
    }

    // (b) Two-step GMM persistence and the Nickell contrast.
    {
        Rng rng(kMasterSeed + 20);
        std::vector<double> gmm_bias, fe_bias;
        for (int r = 0; r < 100; ++r) {
            const auto d = testing_support::dynamic_panel(rng, 100, 8, 0.8, 1.0);
            gmm_bias.push_back(dynamic_gmm(d, dynamic_spec).coef("y(-1)") - 0.8);
            fe_bias.push_back(fixed_effects(d, dynamic_spec).coef("y(-1)") - 0.8);
        }
        c.expect(std::abs(mean(gmm_bias)) <= 0.03, "(b) two-step GMM bias " + fmt(mean(gmm_bias)) + " exceeds 0.03");
        c.expect(mean(fe_bias) < -0.05, "(b) FE bias " + fmt(mean(fe_bias)) + " not below -0.05");
        c.note("(b) rho bias: two-step GMM " + fmt(mean(gmm_bias)) + ", FE " + fmt(mean(fe_bias)));
    }

    // (c) Fisher-ADF size on random walks and power on their differences.
    {
        Rng rng(kMasterSeed + 30);
        int size = 0, power = 0;
        const int reps = 500;
        for (int r = 0; r < reps; ++r) {
            const auto walks = testing_support::random_walk_panel(rng, 10, 50);
            if (fisher_adf(walks).p_value < 0.05) ++size;
            auto diffs = walks;
            for (auto& row : diffs.values) {
                for (std::size_t t = row.size() - 1; t > 0; --t) row[t] -= row[t - 1];
                row.erase(row.begin());
            }
            if (fisher_adf(diffs).p_value < 0.05) ++power;
        }
        const double size_rate = 100.0 * size / reps, power_rate = 100.0 * power / reps;
        c.expect(size_rate >= 2.0 && size_rate <= 9.0, "(c) Fisher-ADF size " + fmt(size_rate, 1) + "% outside [2, 9]");
        c.expect(power_rate >= 95.0, "(c) Fisher-ADF power " + fmt(power_rate, 1) + "% below 95");
        c.note("(c) Fisher-ADF rejections: level " + fmt(size_rate, 1) + "%, difference " + fmt(power_rate, 1) + "%");
    }

    // (d) Hausman size and power.
    {
        Rng rng(kMasterSeed + 40);
        int size = 0, power = 0;
        const int reps = 500;
        for (int r = 0; r < reps; ++r) {
            const auto null = testing_support::effects_panel(rng, 74, 9, 1.0, 0.0);
            if (hausman(fixed_effects(null, static_spec), random_effects(null, static_spec).estimate).p < 0.05) ++size;
            const auto alt = testing_support::effects_panel(rng, 74, 9, 1.0, 0.5);
            if (hausman(fixed_effects(alt, static_spec), random_effects(alt, static_spec).estimate).p < 0.05) ++power;
        }
        const double size_rate = 100.0 * size / reps, power_rate = 100.0 * power / reps;
        c.expect(size_rate <= 10.0, "(d) Hausman size " + fmt(size_rate, 1) + "% above 10");
        c.expect(power_rate >= 80.0, "(d) Hausman power " + fmt(power_rate, 1) + "% below 80");
        c.note("(d) Hausman rejections: null " + fmt(size_rate, 1) + "%, correlated effects " + fmt(power_rate, 1) + "%");
    }

    // (e) Hansen J under valid instruments and under AR(1) errors with
    // first-order correlation 0.4, which invalidate the lagged levels.
    {
        Rng rng(kMasterSeed + 50);
        std::vector<double> valid_p;
        int invalid_rejections = 0;
        const int reps = 200;
        for (int r = 0; r < reps; ++r) {
            valid_p.push_back(*dynamic_gmm(testing_support::dynamic_panel(rng, 200, 8, 0.5, 1.0), dynamic_spec).j_p);
            if (*dynamic_gmm(testing_support::dynamic_panel(rng, 200, 8, 0.5, 1.0, 0.4), dynamic_spec).j_p < 0.05)
                ++invalid_rejections;
        }
        const double ks = ks_uniform(valid_p), rate = 100.0 * invalid_rejections / reps;
        c.expect(ks < 0.12, "(e) J p-value KS distance " + fmt(ks) + " not below 0.12");
        c.expect(rate > 50.0, "(e) J rejection under invalid instruments " + fmt(rate, 1) + "% not above 50");
        c.note("(e) J: KS distance " + fmt(ks) + ", invalid-instrument rejections " + fmt(rate, 1) + "%");
    }
}

// ---- criteria 5 and 6 ------------------------------------------------------

const fs::path kSourceDir = PANELECON_SOURCE_DIR;
const std::string kCli = PANELECON_CLI;

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("panelecon_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

/// Shipped config with its data path made absolute.
fs::path prepared_config(const fs::path& dir) {
    const auto src = kSourceDir / "configs" / "pipeline.json";
    std::ifstream in(src);
    json j = json::parse(in);
    j["data"]["path"] = (kSourceDir / "data" / "synthetic_panel.csv").string();
    const auto out = dir / "config.json";
    std::ofstream(out) << j.dump(2);
    return out;
}

int run_cli(const std::string& args) {
    const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> dir_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[e.path().filename().string()] = s.str();
    }
    return out;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

/// Row of a rendered table whose first cell equals `label`.
const json* find_row(const json& table, const std::string& label) {
    for (const auto& row : table["rows"]) {
        if (row[0]["text"] == label) return &row;
    }
    return nullptr;
}

/// p-values of every "(p-value)" row keyed by variable and equation column.
std::map<std::pair<std::string, std::size_t>, double> stored_p_values(const json& table) {
    std::map<std::pair<std::string, std::size_t>, double> out;
    for (const auto& row : table["rows"]) {
        const std::string label = row[0]["text"];
        const auto pos = label.find(" (p-value)");
        if (pos == std::string::npos) continue;
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k].contains("p_value")) out[{label.substr(0, pos), k}] = row[k]["p_value"];
        }
    }
    return out;
}

void pipeline_end_to_end(Checks& c, fs::path& bundle_dir) {
    const auto dir = scratch("pipeline");
    const auto config = prepared_config(dir);
    const auto a = dir / "run_a", b = dir / "run_b";
    const int code_a = run_cli("run --config " + config.string() + " --out " + a.string());
    const int code_b = run_cli("run --config " + config.string() + " --out " + b.string());
    c.expect(code_a == 0 && code_b == 0, "exit codes " + std::to_string(code_a) + ", " + std::to_string(code_b));
    bundle_dir = a;
    if (code_a != 0) return;

    const std::vector<std::string> artifacts{"table1_descriptive", "table2_correlation", "table3_unit_root",
                                             "table4_hausman",     "table5_gmm",         "table6_fmols",
                                             "table7_comparison"};
    for (const auto& name : artifacts) {
        for (const char* ext : {".md", ".csv", ".json"}) c.expect(fs::exists(a / (name + ext)), "missing " + name + ext);
    }
    const auto bytes_a = dir_bytes(a), bytes_b = dir_bytes(b);
    c.expect(bytes_a == bytes_b, "reruns differ");
    c.note("run: " + std::to_string(bytes_a.size()) + " files, byte-identical on rerun: " + (bytes_a == bytes_b ? "yes" : "no"));

    // Same bundle again with the seed given explicitly.
    const auto seed = read_json(a / "manifest.json")["seed"].get<std::uint64_t>();
    const auto s = dir / "run_seed";
    c.expect(run_cli("run --config " + config.string() + " --seed " + std::to_string(seed) + " --out " + s.string()) == 0 &&
                 dir_bytes(s) == bytes_a,
             "explicit --seed run differs");

    const auto gmm = read_json(a / "table5_gmm.json"), fmols = read_json(a / "table6_fmols.json");
    for (const auto* t : {&gmm, &fmols}) {
        c.expect((*t)["header"].size() == 6, (*t)["id"].get<std::string>() + " does not have five equations");
        for (const auto& row : (*t)["rows"]) {
            for (const auto& cell : row) c.expect(cell["text"] != "n/a", (*t)["id"].get<std::string>() + " has an n/a cell");
        }
        c.expect(find_row(*t, "LNPP (p-value)") != nullptr, "missing lagged dependent row");
    }

    // Comparison stars follow the stored p-values and match the GMM and FMOLS tables.
    const auto cmp = read_json(a / "table7_comparison.json");
    const auto gp = stored_p_values(gmm), fp = stored_p_values(fmols);
    std::size_t checked = 0;
    std::string variable;
    for (const auto& row : cmp["rows"]) {
        if (row[0]["text"] != "") variable = row[0]["text"];
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (!row[k].contains("p_value")) continue;
            const double p = row[k]["p_value"];
            const std::string expected = "(" + report::fixed6(p) + (p < 0.05 ? "*" : "**") + ")";
            c.expect(row[k]["text"] == expected, "comparison cell " + row[k]["text"].get<std::string>() + " should be " + expected);
            const auto& source = k == 1 ? gp : fp;
            bool matched = false;
            for (const auto& [key, stored] : source) {
                if (key.first == variable && stored == p) matched = true;
            }
            c.expect(matched, "comparison p-value for " + variable + " not found in its estimation table");
            ++checked;
        }
    }
    c.expect(checked == 10, "comparison has " + std::to_string(checked) + " starred cells, want 10");
}

void qualitative_magnitudes(Checks& c, const fs::path& bundle_dir) {
    if (!fs::exists(bundle_dir / "table5_gmm.json")) {
        c.expect(false, "no pipeline bundle to inspect");
        return;
    }
    for (const char* name : {"table5_gmm.json", "table6_fmols.json"}) {
        const auto t = read_json(bundle_dir / name);
        const auto* p_row = find_row(t, "LNPP (p-value)");
        if (p_row == nullptr) {
            c.expect(false, std::string(name) + " has no lagged dependent row");
            continue;
        }
        // The coefficient row follows its p-value row.
        const auto& rows = t["rows"];
        std::size_t idx = 0;
        while (&rows[idx] != p_row) ++idx;
        const auto& coef = rows[idx + 1];
        double lo = 1.0, hi = 0.0;
        for (std::size_t k = 1; k < coef.size(); ++k) {
            const double v = coef[k]["value"];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            c.expect(v > 0.85 && v < 1.0, std::string(name) + " lagged dependent coefficient " + fmt(v, 6));
        }
        c.note(std::string(name) + ": lagged dependent in [" + fmt(lo, 4) + ", " + fmt(hi, 4) + "]");
    }
    const auto fm = read_json(bundle_dir / "table6_fmols.json");
    const auto* r2 = find_row(fm, "R squared");
    c.expect(r2 != nullptr, "FMOLS table has no R squared row");
    if (r2 != nullptr) {
        double lo = 1.0;
        for (std::size_t k = 1; k < r2->size(); ++k) {
            const double v = (*r2)[k]["value"];
            lo = std::min(lo, v);
            c.expect(v > 0.99, "R squared " + fmt(v, 6));
        }
        c.note("FMOLS R squared min " + fmt(lo, 6));
    }
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        std::string title;
        std::function<void(Checks&)> run;
    };
    fs::path bundle_dir;
    const std::vector<Criterion> criteria{
        {1, "descriptive identities", descriptive_identities},
        {2, "hand oracles", hand_oracles},
        {3, "estimator collapse oracles", collapse_oracles},
        {4, "Monte Carlo recovery", monte_carlo},
        {5, "pipeline end to end", [&](Checks& c) { pipeline_end_to_end(c, bundle_dir); }},
        {6, "qualitative magnitudes", [&](Checks& c) { qualitative_magnitudes(c, bundle_dir); }},
    };

    bool all_ok = true;
    for (const auto& cr : criteria) {
        Checks checks;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(checks);
        } catch (const std::exception& e) {
            checks.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool ok = checks.failures().empty();
        all_ok = all_ok && ok;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << cr.number << ": " << cr.title << " (" << fmt(secs, 2)
                  << " s)\n";
        for (const auto& n : checks.notes()) std::cout << "    " << n << '\n';
        for (const auto& f : checks.failures()) std::cout << "    failed: " << f << '\n';
        std::cout.flush();
    }
    return all_ok ? 0 : 1;
}
