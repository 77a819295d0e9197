#pragma once

// Report tables (descriptive, correlation, unit root, Hausman, GMM, FMOLS,
// comparison) and their Markdown / CSV / JSON renderings. Display strings
// carry six decimals; JSON also keeps the full-precision value.

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "panelecon/csv.hpp"
#include "panelecon/descriptive.hpp"
#include "panelecon/error.hpp"
#include "panelecon/estimation.hpp"
#include "panelecon/gmm.hpp"
#include "panelecon/unit_root.hpp"

namespace panelecon::report {

enum class Format { markdown, csv, json };

inline std::string extension(Format f) {
    switch (f) {
        case Format::markdown: return "md";
        case Format::csv: return "csv";
        case Format::json: return "json";
    }
    return "txt";
}

inline Format parse_format(const std::string& s) {
    if (s == "md" || s == "markdown") return Format::markdown;
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ValidationError("unknown output format '" + s + "' (expected md, csv or json)");
}

/// Fixed six-decimal display.
inline std::string fixed6(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

/// "*" when p < 0.05, otherwise "**"; p = 0.05 itself maps to "**".
inline std::string significance_mark(double p) { return p < 0.05 ? "*" : "**"; }

struct Cell {
    std::string text;
    std::optional<double> value;
    std::optional<double> p_value;
    std::string error;

    static Cell label(std::string s) { return {std::move(s), std::nullopt, std::nullopt, {}}; }
    static Cell number(double v) { return {fixed6(v), v, std::nullopt, {}}; }
    static Cell count(std::size_t n) { return {std::to_string(n), static_cast<double>(n), std::nullopt, {}}; }
    static Cell starred_p(double p) { return {fixed6(p) + significance_mark(p), p, p, {}}; }
    static Cell stat_with_p(double stat, double p) {
        return {fixed6(stat) + " (" + fixed6(p) + ")", stat, p, {}};
    }
    static Cell failed(std::string why) { return {"n/a", std::nullopt, std::nullopt, std::move(why)}; }
    static Cell blank() { return {}; }
};

struct Table {
    std::string id;
    std::string title;
    std::string caption;
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

inline std::string render_markdown(const Table& t) {
    std::ostringstream out;
    out << "### " << t.title << "\n\n|";
    for (const auto& h : t.header) out << ' ' << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i == 0 ? " :--- |" : " ---: |");
    out << '\n';
    for (const auto& row : t.rows) {
        out << '|';
        for (const auto& c : row) out << ' ' << c.text << " |";
        out << '\n';
    }
    if (!t.caption.empty()) out << '\n' << t.caption << '\n';
    return out.str();
}

inline std::string render_csv(const Table& t) {
    std::ostringstream out;
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << csv::escape_field(t.header[i]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv::escape_field(row[i].text);
        out << '\n';
    }
    return out.str();
}

inline nlohmann::json to_json(const Table& t) {
    nlohmann::json j;
    j["id"] = t.id;
    j["title"] = t.title;
    j["caption"] = t.caption;
    j["header"] = t.header;
    auto rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        auto cells = nlohmann::json::array();
        for (const auto& c : row) {
            nlohmann::json cell;
            cell["text"] = c.text;
            if (c.value && std::isfinite(*c.value)) cell["value"] = *c.value;
            if (c.p_value && std::isfinite(*c.p_value)) cell["p_value"] = *c.p_value;
            if (!c.error.empty()) cell["error"] = c.error;
            cells.push_back(std::move(cell));
        }
        rows.push_back(std::move(cells));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline std::string render(const Table& t, Format f) {
    switch (f) {
        case Format::markdown: return render_markdown(t);
        case Format::csv: return render_csv(t);
        case Format::json: return to_json(t).dump(2) + "\n";
    }
    return {};
}

// ---------------------------------------------------------------------------
// Table builders

inline Table descriptive_table(const std::vector<std::pair<std::string, SummaryStats>>& stats) {
    Table t;
    t.id = "descriptive";
    t.title = "Descriptive statistics";
    t.header.push_back("Summary");
    for (const auto& [name, _] : stats) t.header.push_back(name);
    auto opt = [](const std::optional<double>& v) { return v ? Cell::number(*v) : Cell::failed("undefined for a constant series"); };
    auto add = [&](const std::string& label, auto&& cell_of) {
        std::vector<Cell> row{Cell::label(label)};
        for (const auto& [_, s] : stats) row.push_back(cell_of(s));
        t.rows.push_back(std::move(row));
    };
    add("Mean", [](const SummaryStats& s) { return Cell::number(s.mean); });
    add("Median", [](const SummaryStats& s) { return Cell::number(s.median); });
    add("Maximum", [](const SummaryStats& s) { return Cell::number(s.maximum); });
    add("Minimum", [](const SummaryStats& s) { return Cell::number(s.minimum); });
    add("Std. Dev.", [](const SummaryStats& s) { return Cell::number(s.std_dev); });
    add("Skewness", [&](const SummaryStats& s) { return opt(s.skewness); });
    add("Kurtosis", [&](const SummaryStats& s) { return opt(s.kurtosis); });
    add("Jarque-Bera", [&](const SummaryStats& s) { return opt(s.jb_stat); });
    add("Probability", [&](const SummaryStats& s) { return opt(s.jb_p); });
    add("Sum", [](const SummaryStats& s) { return Cell::number(s.sum); });
    add("Sum Sq. Dev.", [](const SummaryStats& s) { return Cell::number(s.sum_sq_dev); });
    add("Observations", [](const SummaryStats& s) { return Cell::count(s.n); });
    return t;
}

inline Table correlation_table(const CorrelationMatrix& m) {
    Table t;
    t.id = "correlation";
    t.title = "Pearson correlation matrix";
    t.caption = "Listwise sample, n = " + std::to_string(m.n_used) + ".";
    t.header.push_back("");
    for (const auto& v : m.variables) t.header.push_back(v);
    for (std::size_t a = 0; a < m.variables.size(); ++a) {
        std::vector<Cell> row{Cell::label(m.variables[a])};
        for (std::size_t b = 0; b < m.variables.size(); ++b) row.push_back(Cell::number(m(a, b)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table unit_root_table(const std::vector<BatteryResult>& batteries) {
    Table t;
    t.id = "unit_root";
    t.title = "Panel unit root tests";
    t.caption = "p-values are in the parentheses.";
    t.header.push_back("Variable");
    const UnitRootTest order[] = {UnitRootTest::fisher_pp, UnitRootTest::fisher_adf, UnitRootTest::ips,
                                  UnitRootTest::llc};
    for (auto test : order) {
        for (auto o : {IntegrationOrder::level, IntegrationOrder::first_difference}) {
            t.header.push_back(std::string(to_string(test)) + " " + to_string(o));
        }
    }
    for (const auto& b : batteries) {
        std::vector<Cell> row{Cell::label(b.variable)};
        for (auto test : order) {
            for (auto o : {IntegrationOrder::level, IntegrationOrder::first_difference}) {
                const auto& e = b.at(test, o);
                row.push_back(e.result ? Cell::stat_with_p(e.result->statistic, e.result->p_value) : Cell::failed(e.error));
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct HausmanRow {
    std::string variable;
    std::optional<double> fixed;
    std::optional<double> random;
    std::optional<HausmanResult> test;
    std::string error;
};

inline Table hausman_table(const std::vector<HausmanRow>& rows) {
    Table t;
    t.id = "hausman";
    t.title = "Hausman test";
    t.header = {"Variable", "Fixed", "Random", "p value"};
    for (const auto& r : rows) {
        if (!r.error.empty() || !r.test) {
            t.rows.push_back({Cell::label(r.variable), Cell::failed(r.error), Cell::failed(r.error), Cell::failed(r.error)});
            continue;
        }
        Cell p = Cell::number(r.test->p);
        p.p_value = r.test->p;
        t.rows.push_back({Cell::label(r.variable), Cell::number(*r.fixed), Cell::number(*r.random), std::move(p)});
    }
    return t;
}

/// One column of the GMM / FMOLS tables.
struct EquationColumn {
    int label = 0;
    std::string dependent;
    std::vector<std::string> regressor_variables;  // variable names, aligned to coefficient order after the lag
    std::vector<std::string> coefficient_names;
    Vector coefficients;
    Vector p_values;
    std::optional<double> j_p;
    std::optional<double> r_squared;
    std::optional<double> adj_r_squared;
    std::size_t periods = 0;
    std::size_t cross_sections = 0;
    std::size_t observations = 0;
    std::string error;

    std::optional<std::pair<double, double>> find(const std::string& variable) const {
        for (std::size_t i = 0; i < regressor_variables.size(); ++i) {
            if (regressor_variables[i] == variable) {
                const auto j = static_cast<Eigen::Index>(i);
                return std::make_pair(coefficients(j), p_values(j));
            }
        }
        return std::nullopt;
    }
};

/// Coefficient order of every estimator: lagged dependent first (when
/// present), then the spec's regressors.
inline std::vector<std::string> coefficient_variables(const ModelSpec& spec) {
    std::vector<std::string> v;
    if (spec.lagged_dependent) v.push_back(spec.dependent);
    for (const auto& r : spec.regressors) v.push_back(r.variable);
    return v;
}

inline EquationColumn column_from(const ModelSpec& spec, const GmmResult& r) {
    EquationColumn c;
    c.label = spec.label;
    c.dependent = spec.dependent;
    c.regressor_variables = coefficient_variables(spec);
    c.coefficient_names = r.names;
    c.coefficients = r.coefficients;
    c.p_values = r.p_values;
    c.j_p = r.j_p;
    c.periods = r.periods_included;
    c.cross_sections = r.n_entities;
    c.observations = r.n_obs;
    return c;
}

inline EquationColumn column_from(const ModelSpec& spec, const EstimationResult& r) {
    EquationColumn c;
    c.label = spec.label;
    c.dependent = spec.dependent;
    c.regressor_variables = coefficient_variables(spec);
    c.coefficient_names = r.names;
    c.coefficients = r.coefficients;
    c.p_values = r.p_values;
    c.r_squared = r.r_squared;
    c.adj_r_squared = r.adj_r_squared;
    c.periods = r.periods_included;
    c.cross_sections = r.n_entities;
    c.observations = r.n_obs;
    return c;
}

inline EquationColumn failed_column(const ModelSpec& spec, std::string error) {
    EquationColumn c;
    c.label = spec.label;
    c.dependent = spec.dependent;
    c.regressor_variables = coefficient_variables(spec);
    c.error = std::move(error);
    return c;
}

namespace detail {

inline std::vector<std::string> row_variables(const std::vector<EquationColumn>& cols) {
    std::vector<std::string> vars;
    for (const auto& c : cols)
        for (const auto& v : c.regressor_variables)
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    return vars;
}

inline Table estimation_table(std::string id, std::string title, std::string caption,
                              const std::vector<EquationColumn>& cols, bool with_j, bool with_r2) {
    Table t;
    t.id = std::move(id);
    t.title = std::move(title);
    t.caption = std::move(caption);
    t.header.push_back("Variable");
    for (const auto& c : cols) t.header.push_back("Equation " + std::to_string(c.label));
    for (const auto& v : row_variables(cols)) {
        std::vector<Cell> prow{Cell::label(v + " (p-value)")};
        std::vector<Cell> crow{Cell::label("Coefficient")};
        for (const auto& c : cols) {
            if (!c.error.empty()) {
                prow.push_back(Cell::failed(c.error));
                crow.push_back(Cell::failed(c.error));
                continue;
            }
            auto hit = c.find(v);
            prow.push_back(hit ? Cell::starred_p(hit->second) : Cell::blank());
            crow.push_back(hit ? Cell::number(hit->first) : Cell::blank());
        }
        t.rows.push_back(std::move(prow));
        t.rows.push_back(std::move(crow));
    }
    auto summary_row = [&](const std::string& label, auto&& cell_of) {
        std::vector<Cell> row{Cell::label(label)};
        for (const auto& c : cols) row.push_back(c.error.empty() ? cell_of(c) : Cell::failed(c.error));
        t.rows.push_back(std::move(row));
    };
    if (with_j) {
        summary_row("Probability (J-Statistic)", [](const EquationColumn& c) {
            return c.j_p ? Cell::number(*c.j_p) : Cell::failed("exactly identified");
        });
    }
    if (with_r2) {
        summary_row("R squared", [](const EquationColumn& c) { return Cell::number(c.r_squared.value_or(std::nan(""))); });
        summary_row("Adjusted R squared",
                    [](const EquationColumn& c) { return Cell::number(c.adj_r_squared.value_or(std::nan(""))); });
    }
    summary_row("Periods Included", [](const EquationColumn& c) { return Cell::count(c.periods); });
    summary_row("Cross Section", [](const EquationColumn& c) { return Cell::count(c.cross_sections); });
    summary_row("Total Panel Observations", [](const EquationColumn& c) { return Cell::count(c.observations); });
    return t;
}

}  // namespace detail

inline Table gmm_table(const std::vector<EquationColumn>& cols) {
    return detail::estimation_table("gmm", "Dynamic panel GMM results", "(**P>0.05, *P<0.05)", cols, true, false);
}

inline Table fmols_table(const std::vector<EquationColumn>& cols) {
    return detail::estimation_table("fmols", "Fully modified OLS results", "(**P>0.05, *P<0.05)", cols, false, true);
}

/// Side-by-side GMM / FMOLS rows for each equation's regressors (the lagged
/// dependent is omitted).
inline Table comparison_table(const std::vector<EquationColumn>& gmm, const std::vector<EquationColumn>& fmols) {
    Table t;
    t.id = "comparison";
    t.title = "GMM and FMOLS comparison";
    t.caption = "(**P>0.05, *P<0.05)";
    t.header = {"Variable", "GMM", "FMOLS"};
    auto cell_pair = [](const std::vector<EquationColumn>& cols, int label, const std::string& v)
        -> std::pair<Cell, Cell> {
        for (const auto& c : cols) {
            if (c.label != label) continue;
            if (!c.error.empty()) return {Cell::failed(c.error), Cell::failed(c.error)};
            if (auto hit = c.find(v)) {
                Cell p{"(" + fixed6(hit->second) + significance_mark(hit->second) + ")", hit->second, hit->second, {}};
                return {std::move(p), Cell::number(hit->first)};
            }
        }
        return {Cell::failed("not estimated"), Cell::failed("not estimated")};
    };
    for (const auto& g : gmm) {
        for (const auto& v : g.regressor_variables) {
            if (v == g.dependent) continue;
            auto [gp, gc] = cell_pair(gmm, g.label, v);
            auto [fp, fc] = cell_pair(fmols, g.label, v);
            t.rows.push_back({Cell::label(v), std::move(gp), std::move(fp)});
            t.rows.push_back({Cell::label(""), std::move(gc), std::move(fc)});
        }
    }
    return t;
}

}  // namespace panelecon::report
