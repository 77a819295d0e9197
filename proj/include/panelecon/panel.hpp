#pragma once

// Panel data model: an unbalanced entity x period x variable store plus the
// series transformations (log, calendar lag, first difference) and the
// listwise alignment that turns a ModelSpec into an estimation sample.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "panelecon/csv.hpp"
#include "panelecon/error.hpp"
#include "panelecon/linalg.hpp"

namespace panelecon {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Entity identifiers and strictly increasing integer periods shared by all
/// series of a dataset.
class PanelIndex {
public:
    PanelIndex(std::vector<std::string> entities, std::vector<int> periods)
        : entities_(std::move(entities)), periods_(std::move(periods)) {
        for (std::size_t i = 0; i < entities_.size(); ++i) {
            if (!entity_pos_.emplace(entities_[i], i).second) {
                throw ValidationError("duplicate entity identifier '" + entities_[i] + "'");
            }
        }
        for (std::size_t t = 0; t < periods_.size(); ++t) {
            if (t > 0 && periods_[t] <= periods_[t - 1]) {
                throw ValidationError("periods must be strictly increasing");
            }
            period_pos_.emplace(periods_[t], t);
        }
    }

    const std::vector<std::string>& entities() const noexcept { return entities_; }
    const std::vector<int>& periods() const noexcept { return periods_; }
    std::size_t n_entities() const noexcept { return entities_.size(); }
    std::size_t n_periods() const noexcept { return periods_.size(); }
    std::size_t cells() const noexcept { return entities_.size() * periods_.size(); }

    std::optional<std::size_t> entity_pos(const std::string& id) const {
        auto it = entity_pos_.find(id);
        if (it == entity_pos_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<std::size_t> period_pos(int year) const {
        auto it = period_pos_.find(year);
        if (it == period_pos_.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const PanelIndex& o) const {
        return entities_ == o.entities_ && periods_ == o.periods_;
    }

private:
    std::vector<std::string> entities_;
    std::vector<int> periods_;
    std::unordered_map<std::string, std::size_t> entity_pos_;
    std::unordered_map<int, std::size_t> period_pos_;
};

enum class Role { unspecified, dependent, regressor };

enum class TransformKind { raw, natural_log, lagged, differenced };

struct Transform {
    TransformKind kind = TransformKind::raw;
    int lag = 0;  // meaningful for lagged

    bool operator==(const Transform&) const = default;
};

/// One variable over the full entity x period grid, entity-major, with NaN
/// marking missing cells.
class VariableSeries {
public:
    VariableSeries(std::string name, std::shared_ptr<const PanelIndex> index, std::vector<double> values,
                   Transform transform = {}, Role role = Role::unspecified)
        : name_(std::move(name)),
          index_(std::move(index)),
          values_(std::move(values)),
          transform_(transform),
          role_(role) {
        if (!index_) throw ValidationError("series '" + name_ + "' has no panel index");
        if (values_.size() != index_->cells()) {
            throw ValidationError("series '" + name_ + "' has " + std::to_string(values_.size()) +
                                  " cells, expected " + std::to_string(index_->cells()));
        }
    }

    const std::string& name() const noexcept { return name_; }
    Transform transform() const noexcept { return transform_; }
    Role role() const noexcept { return role_; }
    const PanelIndex& index() const noexcept { return *index_; }
    const std::shared_ptr<const PanelIndex>& index_ptr() const noexcept { return index_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double at(std::size_t entity, std::size_t period) const {
        return values_[entity * index_->n_periods() + period];
    }

    std::span<const double> entity_values(std::size_t entity) const {
        return {values_.data() + entity * index_->n_periods(), index_->n_periods()};
    }

    std::size_t missing_count() const {
        return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), is_missing));
    }
    std::size_t observed_count() const { return values_.size() - missing_count(); }

    /// Non-missing values in entity-major order.
    std::vector<double> observed() const {
        std::vector<double> out;
        out.reserve(values_.size());
        for (double v : values_)
            if (!is_missing(v)) out.push_back(v);
        return out;
    }

    VariableSeries renamed(std::string name) const {
        VariableSeries copy = *this;
        copy.name_ = std::move(name);
        return copy;
    }
    VariableSeries with_role(Role role) const {
        VariableSeries copy = *this;
        copy.role_ = role;
        return copy;
    }

    /// Values and missing pattern equal (NaN == NaN).
    bool same_values(const VariableSeries& o) const {
        if (!(*index_ == *o.index_) || values_.size() != o.values_.size()) return false;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const bool ma = is_missing(values_[i]);
            const bool mb = is_missing(o.values_[i]);
            if (ma != mb) return false;
            if (!ma && values_[i] != o.values_[i]) return false;
        }
        return true;
    }

private:
    std::string name_;
    std::shared_ptr<const PanelIndex> index_;
    std::vector<double> values_;
    Transform transform_;
    Role role_;
};

/// Immutable panel dataset. Every declared variable has at least one
/// observation.
class PanelDataset {
public:
    PanelDataset(std::shared_ptr<const PanelIndex> index, std::vector<VariableSeries> variables)
        : index_(std::move(index)), variables_(std::move(variables)) {
        if (!index_) throw ValidationError("dataset has no panel index");
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            const auto& v = variables_[i];
            if (!(v.index() == *index_)) {
                throw ValidationError("variable '" + v.name() + "' is defined on a different panel index");
            }
            if (!by_name_.emplace(v.name(), i).second) {
                throw ValidationError("duplicate variable '" + v.name() + "'");
            }
            if (v.observed_count() == 0) {
                throw ValidationError("variable '" + v.name() + "' has no non-missing observation");
            }
        }
    }

    const PanelIndex& index() const noexcept { return *index_; }
    const std::shared_ptr<const PanelIndex>& index_ptr() const noexcept { return index_; }
    const std::vector<std::string>& entities() const noexcept { return index_->entities(); }
    const std::vector<int>& periods() const noexcept { return index_->periods(); }
    const std::vector<VariableSeries>& variables() const noexcept { return variables_; }

    std::vector<std::string> variable_names() const {
        std::vector<std::string> out;
        for (const auto& v : variables_) out.push_back(v.name());
        return out;
    }

    bool has(const std::string& name) const { return by_name_.count(name) != 0; }

    const VariableSeries& variable(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) throw ValidationError("unknown variable '" + name + "'");
        return variables_[it->second];
    }

    std::size_t missing_count(const std::string& name) const { return variable(name).missing_count(); }

    /// Copy with the series added, or replacing a same-named one.
    PanelDataset with_variable(VariableSeries series) const {
        std::vector<VariableSeries> vars = variables_;
        auto it = by_name_.find(series.name());
        if (it != by_name_.end()) vars[it->second] = std::move(series);
        else vars.push_back(std::move(series));
        return PanelDataset(index_, std::move(vars));
    }

    bool operator==(const PanelDataset& o) const {
        if (!(*index_ == *o.index_) || variables_.size() != o.variables_.size()) return false;
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            if (variables_[i].name() != o.variables_[i].name()) return false;
            if (!variables_[i].same_values(o.variables_[i])) return false;
        }
        return true;
    }

private:
    std::shared_ptr<const PanelIndex> index_;
    std::vector<VariableSeries> variables_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

// ---------------------------------------------------------------------------
// CSV ingestion

enum class CsvSchema { wide, long_format };

namespace detail {

struct RawCell {
    std::string entity;
    int year;
    std::string variable;
    double value;
    std::size_t line;
};

inline std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    // strip UTF-8 BOM
    if (!lines.empty() && lines[0].size() >= 3 && lines[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
        lines[0].erase(0, 3);
    }
    while (!lines.empty() && csv::trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

inline PanelDataset assemble(const std::vector<std::string>& var_order, const std::vector<std::string>& entity_order,
                             std::vector<RawCell> cells, const std::vector<std::pair<std::string, int>>& row_keys) {
    std::vector<int> years;
    for (const auto& [e, y] : row_keys) years.push_back(y);
    for (const auto& c : cells) years.push_back(c.year);
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    auto index = std::make_shared<const PanelIndex>(entity_order, years);

    std::unordered_map<std::string, std::size_t> var_pos;
    for (std::size_t i = 0; i < var_order.size(); ++i) var_pos.emplace(var_order[i], i);
    std::vector<std::vector<double>> grids(var_order.size(), std::vector<double>(index->cells(), kMissing));
    for (const auto& c : cells) {
        const std::size_t e = *index->entity_pos(c.entity);
        const std::size_t t = *index->period_pos(c.year);
        grids[var_pos.at(c.variable)][e * index->n_periods() + t] = c.value;
    }
    std::vector<VariableSeries> series;
    for (std::size_t i = 0; i < var_order.size(); ++i) {
        series.emplace_back(var_order[i], index, std::move(grids[i]));
    }
    return PanelDataset(index, std::move(series));
}

inline int require_year(std::string_view text, std::size_t line) {
    auto y = csv::parse_year(csv::trim(text));
    if (!y) {
        throw ValidationError("line " + std::to_string(line) + ": year '" + std::string(text) +
                              "' is not a 4-digit integer");
    }
    return *y;
}

}  // namespace detail

/// Reads a panel from CSV. Wide: `entity,year,<var>...`; long:
/// `entity,year,variable,value`. Empty cells and "NA" are missing.
inline PanelDataset ingest_csv(std::istream& in, CsvSchema schema = CsvSchema::wide) {
    const auto lines = detail::read_lines(in);
    if (lines.empty()) throw ValidationError("empty CSV input");
    const auto header = csv::split_record(lines[0]);
    std::vector<std::string> head;
    for (const auto& h : header) head.emplace_back(csv::trim(h));
    if (head.size() < 2 || head[0] != "entity" || head[1] != "year") {
        throw ValidationError("CSV header must start with 'entity,year'");
    }

    std::vector<std::string> entity_order;
    std::unordered_map<std::string, bool> seen_entity;
    std::vector<detail::RawCell> cells;
    std::vector<std::pair<std::string, int>> row_keys;
    auto note_entity = [&](const std::string& e) {
        if (seen_entity.emplace(e, true).second) entity_order.push_back(e);
    };

    if (schema == CsvSchema::wide) {
        if (head.size() < 3) throw ValidationError("wide CSV header declares no variables");
        std::vector<std::string> vars(head.begin() + 2, head.end());
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].empty()) throw ValidationError("empty variable name in header");
            for (std::size_t j = 0; j < i; ++j)
                if (vars[j] == vars[i]) throw ValidationError("duplicate variable column '" + vars[i] + "'");
        }
        std::map<std::pair<std::string, int>, std::size_t> keys;
        for (std::size_t li = 1; li < lines.size(); ++li) {
            const std::size_t line_no = li + 1;
            if (csv::trim(lines[li]).empty()) continue;
            const auto f = csv::split_record(lines[li]);
            if (f.size() != head.size()) {
                throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(head.size()) + " fields, found " + std::to_string(f.size()));
            }
            std::string entity(csv::trim(f[0]));
            if (entity.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty entity");
            const int year = detail::require_year(f[1], line_no);
            auto [it, inserted] = keys.emplace(std::make_pair(entity, year), line_no);
            if (!inserted) {
                throw ValidationError("line " + std::to_string(line_no) + ": duplicate key (" + entity + ", " +
                                      std::to_string(year) + "), first seen on line " + std::to_string(it->second));
            }
            note_entity(entity);
            row_keys.emplace_back(entity, year);
            for (std::size_t c = 2; c < f.size(); ++c) {
                const auto cell = csv::trim(f[c]);
                if (csv::is_missing_token(cell)) continue;
                auto v = csv::parse_double(cell);
                if (!v) {
                    throw ValidationError("line " + std::to_string(line_no) + ", column '" + head[c] +
                                          "': cannot parse '" + std::string(cell) + "' as a number");
                }
                cells.push_back({entity, year, head[c], *v, line_no});
            }
        }
        if (row_keys.empty()) throw ValidationError("CSV has a header but no data rows");
        return detail::assemble(vars, entity_order, std::move(cells), row_keys);
    }

    if (head.size() != 4 || head[2] != "variable" || head[3] != "value") {
        throw ValidationError("long CSV header must be 'entity,year,variable,value'");
    }
    std::vector<std::string> vars;
    std::map<std::tuple<std::string, int, std::string>, std::size_t> keys;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        if (csv::trim(lines[li]).empty()) continue;
        const auto f = csv::split_record(lines[li]);
        if (f.size() != 4) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected 4 fields, found " +
                                  std::to_string(f.size()));
        }
        std::string entity(csv::trim(f[0]));
        std::string var(csv::trim(f[2]));
        if (entity.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty entity");
        if (var.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty variable name");
        const int year = detail::require_year(f[1], line_no);
        auto [it, inserted] = keys.emplace(std::make_tuple(entity, year, var), line_no);
        if (!inserted) {
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate key (" + entity + ", " +
                                  std::to_string(year) + ", " + var + "), first seen on line " +
                                  std::to_string(it->second));
        }
        note_entity(entity);
        row_keys.emplace_back(entity, year);
        if (std::find(vars.begin(), vars.end(), var) == vars.end()) vars.push_back(var);
        const auto cell = csv::trim(f[3]);
        if (csv::is_missing_token(cell)) continue;
        auto v = csv::parse_double(cell);
        if (!v) {
            throw ValidationError("line " + std::to_string(line_no) + ", variable '" + var + "': cannot parse '" +
                                  std::string(cell) + "' as a number");
        }
        cells.push_back({entity, year, var, *v, line_no});
    }
    if (row_keys.empty()) throw ValidationError("CSV has a header but no data rows");
    return detail::assemble(vars, entity_order, std::move(cells), row_keys);
}

inline PanelDataset ingest_csv_string(const std::string& text, CsvSchema schema = CsvSchema::wide) {
    std::istringstream in(text);
    return ingest_csv(in, schema);
}

/// Writes the dataset in the wide schema. Rows where every variable is
/// missing are omitted; values are written in shortest round-trip form.
inline void render_csv(const PanelDataset& d, std::ostream& out) {
    out << "entity,year";
    for (const auto& v : d.variables()) out << ',' << csv::escape_field(v.name());
    out << '\n';
    const auto& idx = d.index();
    for (std::size_t e = 0; e < idx.n_entities(); ++e) {
        for (std::size_t t = 0; t < idx.n_periods(); ++t) {
            bool any = false;
            for (const auto& v : d.variables()) any = any || !is_missing(v.at(e, t));
            if (!any) continue;
            out << csv::escape_field(idx.entities()[e]) << ',' << idx.periods()[t];
            for (const auto& v : d.variables()) {
                out << ',';
                const double x = v.at(e, t);
                if (!is_missing(x)) out << csv::format_roundtrip(x);
            }
            out << '\n';
        }
    }
}

inline std::string render_csv_string(const PanelDataset& d) {
    std::ostringstream out;
    render_csv(d, out);
    return out.str();
}

// ---------------------------------------------------------------------------
// Series transformations

/// ln of every positive cell; non-positive cells become missing and are
/// reported through `warnings`.
inline VariableSeries natural_log(const VariableSeries& s, Warnings* warnings = nullptr) {
    if (s.transform().kind != TransformKind::raw && warnings) {
        warnings->push_back("natural_log: series '" + s.name() + "' is not tagged raw");
    }
    std::vector<double> out(s.values().size(), kMissing);
    std::size_t non_positive = 0;
    std::size_t produced = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = s.values()[i];
        if (is_missing(x)) continue;
        if (x <= 0.0) {
            ++non_positive;
            continue;
        }
        out[i] = std::log(x);
        ++produced;
    }
    if (warnings && non_positive > 0) {
        warnings->push_back("natural_log: " + std::to_string(non_positive) + " non-positive value(s) in '" +
                            s.name() + "' set to missing");
    }
    if (warnings && produced == 0) {
        warnings->push_back("natural_log: '" + s.name() + "' has no positive values; result is all missing");
    }
    return VariableSeries(s.name(), s.index_ptr(), std::move(out), {TransformKind::natural_log, 0}, s.role());
}

/// Calendar lag: the value at (i, t) is the input at (i, t - k), missing when
/// period t - k is absent or unobserved.
inline VariableSeries lag(const VariableSeries& s, int k, Warnings* warnings = nullptr) {
    if (k < 1) throw ValidationError("lag order must be >= 1, got " + std::to_string(k));
    const auto& idx = s.index();
    std::vector<double> out(s.values().size(), kMissing);
    std::size_t produced = 0;
    for (std::size_t t = 0; t < idx.n_periods(); ++t) {
        auto src = idx.period_pos(idx.periods()[t] - k);
        if (!src) continue;
        for (std::size_t e = 0; e < idx.n_entities(); ++e) {
            const double v = s.at(e, *src);
            out[e * idx.n_periods() + t] = v;
            if (!is_missing(v)) ++produced;
        }
    }
    if (warnings && produced == 0) {
        warnings->push_back("lag: lag " + std::to_string(k) + " of '" + s.name() + "' is entirely missing");
    }
    return VariableSeries(s.name(), s.index_ptr(), std::move(out), {TransformKind::lagged, k}, s.role());
}

/// y(i, t) - y(i, t - 1) under the calendar lag.
inline VariableSeries first_difference(const VariableSeries& s) {
    const VariableSeries lagged = lag(s, 1);
    std::vector<double> out(s.values().size(), kMissing);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double a = s.values()[i];
        const double b = lagged.values()[i];
        if (!is_missing(a) && !is_missing(b)) out[i] = a - b;
    }
    return VariableSeries(s.name(), s.index_ptr(), std::move(out), {TransformKind::differenced, 0}, s.role());
}

// ---------------------------------------------------------------------------
// Model specification and sample alignment

enum class InterceptKind { common, individual };

struct RegressorTerm {
    std::string variable;
    int lag = 0;

    bool operator==(const RegressorTerm&) const = default;
};

/// One regression equation: dependent ~ [dependent(-1)] + regressors.
struct ModelSpec {
    std::string dependent;
    bool lagged_dependent = false;
    std::vector<RegressorTerm> regressors;
    InterceptKind intercept = InterceptKind::individual;
    int label = 1;

    void validate() const {
        if (dependent.empty()) throw ValidationError("model " + std::to_string(label) + ": no dependent variable");
        if (regressors.empty()) throw ValidationError("model " + std::to_string(label) + ": no regressors");
        for (const auto& r : regressors) {
            if (r.variable.empty()) throw ValidationError("model " + std::to_string(label) + ": unnamed regressor");
            if (r.lag < 0) {
                throw ValidationError("model " + std::to_string(label) + ": negative lag on '" + r.variable + "'");
            }
        }
    }

    bool operator==(const ModelSpec&) const = default;
};

/// Display name of a (possibly lagged) term, e.g. "LNODAPC(-1)".
inline std::string term_name(const std::string& variable, int lag_order) {
    if (lag_order == 0) return variable;
    return variable + "(-" + std::to_string(lag_order) + ")";
}

/// Listwise-aligned estimation sample in entity-major, period-ascending order.
struct RegressionSample {
    std::shared_ptr<const PanelIndex> index;
    std::string dependent;
    std::vector<std::string> regressor_names;  // lagged dependent first when present
    std::vector<std::size_t> entity;           // position in index->entities()
    std::vector<int> period;
    Vector y;
    Matrix X;
    Matrix dX;  // first differences of X; filled only when requested
    std::vector<std::size_t> entity_counts;  // rows per entity, size n_entities of the index

    std::size_t n_obs() const { return static_cast<std::size_t>(y.size()); }
    std::size_t n_regressors() const { return static_cast<std::size_t>(X.cols()); }
    std::size_t n_entities() const {
        return static_cast<std::size_t>(std::count_if(entity_counts.begin(), entity_counts.end(),
                                                      [](std::size_t c) { return c > 0; }));
    }
    std::size_t periods_included() const {
        std::vector<int> p = period;
        std::sort(p.begin(), p.end());
        return static_cast<std::size_t>(std::unique(p.begin(), p.end()) - p.begin());
    }
    /// Row ranges [begin, end) of each entity with at least one row, in index order.
    std::vector<std::pair<std::size_t, std::size_t>> entity_blocks() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        std::size_t i = 0;
        while (i < entity.size()) {
            std::size_t j = i;
            while (j < entity.size() && entity[j] == entity[i]) ++j;
            out.emplace_back(i, j);
            i = j;
        }
        return out;
    }
};

struct SampleOptions {
    /// Also require the calendar first difference of every regressor and
    /// store it in RegressionSample::dX.
    bool require_regressor_differences = false;
};

inline RegressionSample regression_sample(const PanelDataset& d, const ModelSpec& spec, SampleOptions options = {}) {
    spec.validate();
    const VariableSeries& ys = d.variable(spec.dependent);

    std::vector<VariableSeries> columns;
    std::vector<std::string> names;
    if (spec.lagged_dependent) {
        columns.push_back(lag(ys, 1));
        names.push_back(term_name(spec.dependent, 1));
    }
    for (const auto& r : spec.regressors) {
        const VariableSeries& base = d.variable(r.variable);
        columns.push_back(r.lag == 0 ? base : lag(base, r.lag));
        names.push_back(term_name(r.variable, r.lag));
    }
    std::vector<VariableSeries> diffs;
    if (options.require_regressor_differences) {
        for (const auto& c : columns) diffs.push_back(first_difference(c));
    }

    const auto& idx = d.index();
    RegressionSample s;
    s.index = d.index_ptr();
    s.dependent = spec.dependent;
    s.regressor_names = names;
    s.entity_counts.assign(idx.n_entities(), 0);

    std::vector<std::size_t> keep_e;
    std::vector<std::size_t> keep_t;
    for (std::size_t e = 0; e < idx.n_entities(); ++e) {
        for (std::size_t t = 0; t < idx.n_periods(); ++t) {
            bool ok = !is_missing(ys.at(e, t));
            for (const auto& c : columns) ok = ok && !is_missing(c.at(e, t));
            for (const auto& c : diffs) ok = ok && !is_missing(c.at(e, t));
            if (!ok) continue;
            keep_e.push_back(e);
            keep_t.push_back(t);
        }
    }
    if (keep_e.empty()) {
        // Name the column with the fewest observations.
        std::string binding = spec.dependent;
        std::size_t fewest = ys.observed_count();
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].observed_count() < fewest) {
                fewest = columns[j].observed_count();
                binding = names[j];
            }
        }
        throw InsufficientDataError("model " + std::to_string(spec.label) +
                                    ": aligned sample is empty (binding variable '" + binding + "')");
    }
    const auto n = static_cast<Eigen::Index>(keep_e.size());
    const auto k = static_cast<Eigen::Index>(columns.size());
    s.y.resize(n);
    s.X.resize(n, k);
    if (!diffs.empty()) s.dX.resize(n, k);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t e = keep_e[static_cast<std::size_t>(r)];
        const std::size_t t = keep_t[static_cast<std::size_t>(r)];
        s.entity.push_back(e);
        s.period.push_back(idx.periods()[t]);
        s.entity_counts[e] += 1;
        s.y(r) = ys.at(e, t);
        for (Eigen::Index j = 0; j < k; ++j) {
            s.X(r, j) = columns[static_cast<std::size_t>(j)].at(e, t);
            if (!diffs.empty()) s.dX(r, j) = diffs[static_cast<std::size_t>(j)].at(e, t);
        }
    }
    return s;
}

}  // namespace panelecon
