#pragma once

// Config-driven pipeline: load or fetch data, derive the analysis variables,
// then run the descriptive, correlation, unit-root, Hausman, GMM, FMOLS and
// comparison stages. Every stage yields one table or an error record.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "panelecon/descriptive.hpp"
#include "panelecon/error.hpp"
#include "panelecon/estimation.hpp"
#include "panelecon/fetch.hpp"
#include "panelecon/fmols.hpp"
#include "panelecon/gmm.hpp"
#include "panelecon/panel.hpp"
#include "panelecon/report.hpp"
#include "panelecon/unit_root.hpp"
#include "panelecon/version.hpp"

namespace panelecon {

inline constexpr int kConfigSchemaVersion = 1;

struct VariableDefinition {
    std::string name;
    std::string source;
    bool log = true;
};

/// Stage identifiers in execution order.
enum class Stage { descriptive, correlation, unit_root, hausman, gmm, fmols, comparison };

inline constexpr Stage kAllStages[] = {Stage::descriptive, Stage::correlation, Stage::unit_root, Stage::hausman,
                                       Stage::gmm,         Stage::fmols,       Stage::comparison};

inline const char* stage_id(Stage s) {
    switch (s) {
        case Stage::descriptive: return "descriptive";
        case Stage::correlation: return "correlation";
        case Stage::unit_root: return "unit_root";
        case Stage::hausman: return "hausman";
        case Stage::gmm: return "gmm";
        case Stage::fmols: return "fmols";
        case Stage::comparison: return "comparison";
    }
    return "?";
}

inline int table_number(Stage s) { return static_cast<int>(s) + 1; }

inline std::optional<Stage> parse_stage(const std::string& id) {
    for (Stage s : kAllStages)
        if (id == stage_id(s)) return s;
    return std::nullopt;
}

struct PipelineConfig {
    int schema_version = kConfigSchemaVersion;
    std::uint64_t seed = 0;

    // Data source: a CSV file, or fetch descriptors.
    std::optional<std::filesystem::path> data_path;
    CsvSchema data_schema = CsvSchema::wide;
    std::optional<fetch::FetchOptions> fetch_options;
    std::vector<fetch::IndicatorDescriptor> indicators;

    std::vector<VariableDefinition> variables;
    std::vector<ModelSpec> models;

    std::vector<std::string> descriptive_variables;  // empty: all defined variables
    std::vector<std::string> unit_root_variables;    // empty: all defined variables
    UnitRootOptions unit_root;
    bool hausman_lagged_dependent = false;
    FmolsOptions fmols;
    GmmOptions gmm;

    std::map<Stage, bool> stages;  // missing: enabled
    std::filesystem::path output_dir = "out";
    std::vector<report::Format> formats{report::Format::markdown, report::Format::csv, report::Format::json};
    bool record_timings = false;

    /// Canonical JSON of the effective configuration, the digest input.
    nlohmann::json canonical;

    bool enabled(Stage s) const {
        auto it = stages.find(s);
        return it == stages.end() || it->second;
    }

    const VariableDefinition* find_variable(const std::string& name) const {
        for (const auto& v : variables)
            if (v.name == name) return &v;
        return nullptr;
    }

    /// Checks labels and variable references; throws ValidationError.
    void validate() const {
        if (schema_version != kConfigSchemaVersion) {
            throw ValidationError("config: schema_version " + std::to_string(schema_version) + " is not supported (expected " +
                                  std::to_string(kConfigSchemaVersion) + ")");
        }
        if (!data_path && indicators.empty()) throw ValidationError("config: data needs a path or fetch indicators");
        if (variables.empty()) throw ValidationError("config: no variables defined");
        std::set<std::string> names;
        for (const auto& v : variables) {
            if (v.name.empty() || v.source.empty()) throw ValidationError("config: variable needs a name and a source");
            if (!names.insert(v.name).second) throw ValidationError("config: variable '" + v.name + "' defined twice");
        }
        auto require = [&](const std::string& name, const std::string& where) {
            if (!names.count(name)) throw ValidationError("config: " + where + " references undefined variable '" + name + "'");
        };
        std::set<int> labels;
        for (const auto& m : models) {
            m.validate();
            if (!labels.insert(m.label).second) {
                throw ValidationError("config: model label " + std::to_string(m.label) + " is not unique");
            }
            const std::string where = "model " + std::to_string(m.label);
            require(m.dependent, where);
            for (const auto& r : m.regressors) require(r.variable, where);
        }
        for (const auto& v : descriptive_variables) require(v, "descriptive options");
        for (const auto& v : unit_root_variables) require(v, "unit_root options");
        if (formats.empty()) throw ValidationError("config: no output formats");
        if (unit_root.lags && *unit_root.lags < 0) throw ValidationError("config: unit_root.lags must be >= 0");
        if (unit_root.pp_bandwidth && *unit_root.pp_bandwidth < 0) {
            throw ValidationError("config: unit_root.pp_bandwidth must be >= 0");
        }
        if (fmols.bandwidth && *fmols.bandwidth < 0) throw ValidationError("config: fmols.bandwidth must be >= 0");
        if (gmm.max_depth && *gmm.max_depth < 1) throw ValidationError("config: gmm.max_depth must be >= 1");
    }
};

namespace detail {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError("config: unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_as(const nlohmann::json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("config: '" + std::string(key) + "' in " + where + " is missing or has the wrong type");
    }
}

template <class T>
std::optional<T> get_optional(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return get_as<T>(obj, key, where);
}

inline std::vector<std::string> string_list(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return {};
    return get_as<std::vector<std::string>>(obj, key, where);
}

}  // namespace detail

/// Parses a JSON config; relative paths resolve against base_dir.
inline PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
    using detail::check_keys;
    using detail::get_as;
    using detail::get_optional;
    PipelineConfig c;
    check_keys(j, {"schema_version", "seed", "data", "variables", "models", "options", "stages", "output"}, "config");
    if (!j.contains("schema_version")) throw ValidationError("config: schema_version is required");
    c.schema_version = get_as<int>(j, "schema_version", "config");
    if (c.schema_version != kConfigSchemaVersion) {
        throw ValidationError("config: schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
                              std::to_string(kConfigSchemaVersion) + ")");
    }
    if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
        throw ValidationError("config: seed is required and must be a non-negative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();

    const auto& data = j.contains("data") ? j["data"] : throw ValidationError("config: data is required");
    check_keys(data, {"path", "schema", "fetch"}, "data");
    if (data.contains("path")) {
        c.data_path = base_dir / get_as<std::string>(data, "path", "data");
        const auto schema = get_optional<std::string>(data, "schema", "data").value_or("wide");
        if (schema == "wide") c.data_schema = CsvSchema::wide;
        else if (schema == "long") c.data_schema = CsvSchema::long_format;
        else throw ValidationError("config: data.schema must be 'wide' or 'long'");
    }
    if (data.contains("fetch")) {
        if (c.data_path) throw ValidationError("config: data has both a path and fetch descriptors");
        const auto& f = data["fetch"];
        check_keys(f, {"base_url", "cache_dir", "per_page", "indicators"}, "data.fetch");
        fetch::FetchOptions o;
        if (auto b = get_optional<std::string>(f, "base_url", "data.fetch")) o.base_url = *b;
        o.cache_dir = base_dir / get_optional<std::string>(f, "cache_dir", "data.fetch").value_or("cache");
        if (auto p = get_optional<int>(f, "per_page", "data.fetch")) o.per_page = *p;
        if (o.per_page < 1) throw ValidationError("config: data.fetch.per_page must be positive");
        c.fetch_options = o;
        if (!f.contains("indicators") || !f["indicators"].is_array()) {
            throw ValidationError("config: data.fetch.indicators must be a list");
        }
        for (const auto& ind : f["indicators"]) {
            check_keys(ind, {"provider", "code", "start_year", "end_year", "variable"}, "data.fetch.indicators");
            fetch::IndicatorDescriptor d;
            d.provider = get_optional<std::string>(ind, "provider", "indicator").value_or("worldbank");
            d.code = get_as<std::string>(ind, "code", "indicator");
            if (d.code.empty()) throw ValidationError("config: indicator code must be non-empty");
            d.start_year = get_as<int>(ind, "start_year", "indicator");
            d.end_year = get_as<int>(ind, "end_year", "indicator");
            d.variable = get_optional<std::string>(ind, "variable", "indicator").value_or("");
            c.indicators.push_back(std::move(d));
        }
    }

    if (!j.contains("variables") || !j["variables"].is_array()) throw ValidationError("config: variables must be a list");
    for (const auto& v : j["variables"]) {
        check_keys(v, {"name", "source", "log"}, "variables");
        VariableDefinition def;
        def.name = get_as<std::string>(v, "name", "variables");
        def.source = get_as<std::string>(v, "source", "variables");
        def.log = get_optional<bool>(v, "log", "variables").value_or(true);
        c.variables.push_back(std::move(def));
    }

    if (j.contains("models")) {
        if (!j["models"].is_array()) throw ValidationError("config: models must be a list");
        for (const auto& m : j["models"]) {
            check_keys(m, {"label", "dependent", "lagged_dependent", "regressors"}, "models");
            ModelSpec spec;
            spec.label = get_as<int>(m, "label", "models");
            spec.dependent = get_as<std::string>(m, "dependent", "models");
            spec.lagged_dependent = get_optional<bool>(m, "lagged_dependent", "models").value_or(false);
            if (!m.contains("regressors") || !m["regressors"].is_array()) {
                throw ValidationError("config: model regressors must be a list");
            }
            for (const auto& r : m["regressors"]) {
                check_keys(r, {"variable", "lag"}, "model regressors");
                spec.regressors.push_back(
                    {get_as<std::string>(r, "variable", "regressor"), get_optional<int>(r, "lag", "regressor").value_or(0)});
            }
            c.models.push_back(std::move(spec));
        }
    }

    if (j.contains("options")) {
        const auto& o = j["options"];
        check_keys(o, {"descriptive", "unit_root", "hausman", "fmols", "gmm"}, "options");
        if (o.contains("descriptive")) {
            check_keys(o["descriptive"], {"variables"}, "options.descriptive");
            c.descriptive_variables = detail::string_list(o["descriptive"], "variables", "options.descriptive");
        }
        if (o.contains("unit_root")) {
            const auto& u = o["unit_root"];
            check_keys(u, {"deterministic", "lags", "pp_bandwidth", "variables"}, "options.unit_root");
            const auto det = get_optional<std::string>(u, "deterministic", "options.unit_root").value_or("intercept");
            if (det == "none") c.unit_root.deterministic = Deterministic::none;
            else if (det == "intercept") c.unit_root.deterministic = Deterministic::intercept;
            else if (det == "trend") c.unit_root.deterministic = Deterministic::trend;
            else throw ValidationError("config: unit_root.deterministic must be none, intercept or trend");
            c.unit_root.lags = get_optional<int>(u, "lags", "options.unit_root");
            c.unit_root.pp_bandwidth = get_optional<int>(u, "pp_bandwidth", "options.unit_root");
            c.unit_root_variables = detail::string_list(u, "variables", "options.unit_root");
        }
        if (o.contains("hausman")) {
            check_keys(o["hausman"], {"lagged_dependent"}, "options.hausman");
            c.hausman_lagged_dependent =
                get_optional<bool>(o["hausman"], "lagged_dependent", "options.hausman").value_or(false);
        }
        if (o.contains("fmols")) {
            check_keys(o["fmols"], {"bandwidth"}, "options.fmols");
            c.fmols.bandwidth = get_optional<int>(o["fmols"], "bandwidth", "options.fmols");
        }
        if (o.contains("gmm")) {
            const auto& g = o["gmm"];
            check_keys(g, {"max_depth", "collapse", "step", "regressors"}, "options.gmm");
            c.gmm.max_depth = get_optional<int>(g, "max_depth", "options.gmm");
            c.gmm.collapse = get_optional<bool>(g, "collapse", "options.gmm").value_or(false);
            const auto step = get_optional<std::string>(g, "step", "options.gmm").value_or("two");
            if (step == "one") c.gmm.step = GmmStep::one;
            else if (step == "two") c.gmm.step = GmmStep::two;
            else throw ValidationError("config: gmm.step must be 'one' or 'two'");
            const auto reg = get_optional<std::string>(g, "regressors", "options.gmm").value_or("exogenous");
            if (reg == "exogenous") c.gmm.regressors = RegressorTreatment::strictly_exogenous;
            else if (reg == "endogenous") c.gmm.regressors = RegressorTreatment::endogenous;
            else throw ValidationError("config: gmm.regressors must be 'exogenous' or 'endogenous'");
        }
    }

    if (j.contains("stages")) {
        const auto& s = j["stages"];
        if (!s.is_object()) throw ValidationError("config: stages must be an object");
        for (const auto& [key, value] : s.items()) {
            auto st = parse_stage(key);
            if (!st) throw ValidationError("config: unknown stage '" + key + "'");
            if (!value.is_boolean()) throw ValidationError("config: stage '" + key + "' must be true or false");
            c.stages[*st] = value.get<bool>();
        }
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        check_keys(o, {"dir", "formats", "record_timings"}, "output");
        if (auto d = get_optional<std::string>(o, "dir", "output")) c.output_dir = base_dir / *d;
        if (o.contains("formats")) {
            c.formats.clear();
            for (const auto& f : detail::string_list(o, "formats", "output")) c.formats.push_back(report::parse_format(f));
        }
        c.record_timings = get_optional<bool>(o, "record_timings", "output").value_or(false);
    }

    c.canonical = j;
    c.validate();
    return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// Replaces the seed, keeping the digest input in step.
inline void override_seed(PipelineConfig& c, std::uint64_t seed) {
    c.seed = seed;
    c.canonical["seed"] = seed;
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

/// Digest of the canonical config (object keys sorted by the JSON library).
inline std::string config_digest(const PipelineConfig& c) { return "sha256:" + sha256_hex(c.canonical.dump()); }

// ---------------------------------------------------------------------------
// Data loading

/// Union of datasets over entities and periods. Warns about entities that
/// are absent from some variable (the strict-join diagnostic).
inline PanelDataset merge_datasets(const std::vector<PanelDataset>& parts, Warnings& warnings) {
    if (parts.empty()) throw ValidationError("merge: no datasets");
    std::vector<std::string> entities;
    std::set<std::string> seen;
    std::set<int> period_set;
    for (const auto& p : parts) {
        for (const auto& e : p.entities())
            if (seen.insert(e).second) entities.push_back(e);
        period_set.insert(p.periods().begin(), p.periods().end());
    }
    auto index = std::make_shared<const PanelIndex>(entities, std::vector<int>(period_set.begin(), period_set.end()));
    std::vector<VariableSeries> vars;
    std::set<std::string> names;
    for (const auto& p : parts) {
        for (const auto& v : p.variables()) {
            if (!names.insert(v.name()).second) throw ValidationError("merge: variable '" + v.name() + "' appears twice");
            std::vector<double> grid(index->cells(), kMissing);
            std::vector<std::string> unmatched;
            for (std::size_t e = 0; e < index->n_entities(); ++e) {
                auto src_e = p.index().entity_pos(index->entities()[e]);
                bool any = false;
                if (src_e) {
                    for (std::size_t t = 0; t < index->n_periods(); ++t) {
                        auto src_t = p.index().period_pos(index->periods()[t]);
                        if (!src_t) continue;
                        const double x = v.at(*src_e, *src_t);
                        grid[e * index->n_periods() + t] = x;
                        any = any || !is_missing(x);
                    }
                }
                if (!any) unmatched.push_back(index->entities()[e]);
            }
            if (!unmatched.empty() && parts.size() > 1) {
                std::string list;
                for (const auto& u : unmatched) list += (list.empty() ? "" : ", ") + u;
                warnings.push_back("join: variable '" + v.name() + "' has no observation for " +
                                   std::to_string(unmatched.size()) + " entities: " + list);
            }
            vars.emplace_back(v.name(), index, std::move(grid));
        }
    }
    return PanelDataset(index, std::move(vars));
}

inline PanelDataset load_csv_file(const std::filesystem::path& path, CsvSchema schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open data file " + path.string());
    try {
        return ingest_csv(in, schema);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

/// Raw dataset from the configured file or from fetched indicators.
inline PanelDataset load_raw_data(const PipelineConfig& c, Warnings& warnings) {
    if (c.data_path) return load_csv_file(*c.data_path, c.data_schema);
    std::vector<PanelDataset> parts;
    for (const auto& outcome : fetch::fetch_indicators(c.indicators, *c.fetch_options)) {
        if (!outcome.ok) throw IoError("fetch: " + outcome.error);
        parts.push_back(load_csv_file(outcome.file, CsvSchema::long_format));
    }
    return merge_datasets(parts, warnings);
}

/// Analysis dataset holding the configured variables only.
inline PanelDataset derive_variables(const PanelDataset& raw, const PipelineConfig& c, Warnings& warnings) {
    std::vector<VariableSeries> vars;
    for (const auto& def : c.variables) {
        if (!raw.has(def.source)) {
            throw ValidationError("variable '" + def.name + "': source column '" + def.source + "' not in the data");
        }
        const auto& src = raw.variable(def.source);
        vars.push_back(def.log ? natural_log(src, &warnings).renamed(def.name) : src.renamed(def.name));
    }
    return PanelDataset(raw.index_ptr(), std::move(vars));
}

// ---------------------------------------------------------------------------
// Bundle

struct TableArtifact {
    Stage stage;
    std::string status;  // ok, failed, disabled
    std::optional<report::Table> table;
    std::vector<std::string> errors;
};

struct ReportBundle {
    std::vector<TableArtifact> tables;
    nlohmann::json manifest;
    Warnings warnings;
    bool any_failed = false;

    const TableArtifact& artifact(Stage s) const {
        for (const auto& t : tables)
            if (t.stage == s) return t;
        throw ValidationError(std::string("bundle has no ") + stage_id(s) + " table");
    }
};

inline std::string artifact_basename(Stage s) {
    return "table" + std::to_string(table_number(s)) + "_" + stage_id(s);
}

namespace detail {

/// Appends warnings with a source prefix, skipping exact repeats.
struct WarningLog {
    Warnings items;
    std::set<std::string> seen;

    void add(const std::string& source, const Warnings& ws) {
        for (const auto& w : ws) {
            std::string line = "[" + source + "] " + w;
            if (seen.insert(line).second) items.push_back(std::move(line));
        }
    }
};

/// Rows where every listed variable is observed.
inline std::vector<std::vector<double>> listwise_columns(const PanelDataset& d, const std::vector<std::string>& vars) {
    std::vector<const VariableSeries*> series;
    for (const auto& v : vars) series.push_back(&d.variable(v));
    std::vector<std::vector<double>> cols(vars.size());
    const std::size_t cells = d.index().cells();
    for (std::size_t i = 0; i < cells; ++i) {
        bool ok = true;
        for (const auto* s : series) ok = ok && !is_missing(s->values()[i]);
        if (!ok) continue;
        for (std::size_t k = 0; k < series.size(); ++k) cols[k].push_back(series[k]->values()[i]);
    }
    return cols;
}

}  // namespace detail

/// Runs every enabled stage in order. Throws only for config or data
/// problems that precede computation; stage failures land in the bundle.
inline ReportBundle run_pipeline(const PipelineConfig& config) {
    config.validate();
    using Clock = std::chrono::steady_clock;
    detail::WarningLog log;
    nlohmann::json timings = nlohmann::json::object();
    auto timed = [&](const std::string& key, auto&& fn) {
        const auto t0 = Clock::now();
        fn();
        timings[key] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    };

    std::optional<PanelDataset> data;
    timed("ingest", [&] {
        Warnings w;
        const PanelDataset raw = load_raw_data(config, w);
        data = derive_variables(raw, config, w);
        log.add("ingest", w);
    });
    const PanelDataset& d = *data;

    std::vector<std::string> all_vars;
    for (const auto& v : config.variables) all_vars.push_back(v.name);
    const auto desc_vars = config.descriptive_variables.empty() ? all_vars : config.descriptive_variables;
    const auto ur_vars = config.unit_root_variables.empty() ? all_vars : config.unit_root_variables;

    ReportBundle bundle;
    std::vector<report::EquationColumn> gmm_cols, fmols_cols;
    bool gmm_ran = false, fmols_ran = false;

    for (Stage stage : kAllStages) {
        TableArtifact art{stage, "ok", std::nullopt, {}};
        if (!config.enabled(stage)) {
            art.status = "disabled";
            bundle.tables.push_back(std::move(art));
            continue;
        }
        const std::string sid = stage_id(stage);
        timed(sid, [&] {
            try {
                switch (stage) {
                    case Stage::descriptive: {
                        const auto cols = detail::listwise_columns(d, desc_vars);
                        std::vector<std::pair<std::string, SummaryStats>> stats;
                        for (std::size_t k = 0; k < desc_vars.size(); ++k) {
                            try {
                                stats.emplace_back(desc_vars[k], summarize(std::span<const double>(cols[k])));
                            } catch (const InsufficientDataError& e) {
                                throw InsufficientDataError(desc_vars[k] + ": " + e.what());
                            }
                        }
                        art.table = report::descriptive_table(stats);
                        break;
                    }
                    case Stage::correlation:
                        art.table = report::correlation_table(pearson_matrix(d, desc_vars));
                        break;
                    case Stage::unit_root: {
                        std::vector<BatteryResult> batteries;
                        for (const auto& v : ur_vars) {
                            batteries.push_back(run_battery(d, v, config.unit_root));
                            for (const auto& e : batteries.back().entries) {
                                const std::string src = sid + " " + v + " " + to_string(e.test) + " " + to_string(e.order);
                                if (e.result) log.add(src, e.result->warnings);
                                else art.errors.push_back(src + ": " + e.error);
                            }
                        }
                        art.table = report::unit_root_table(batteries);
                        break;
                    }
                    case Stage::hausman: {
                        std::vector<report::HausmanRow> rows;
                        for (const auto& m : config.models) {
                            ModelSpec spec = m;
                            spec.lagged_dependent = config.hausman_lagged_dependent;
                            report::HausmanRow row;
                            row.variable = spec.regressors.front().variable;
                            try {
                                const auto fe = fixed_effects(d, spec);
                                const auto re = random_effects(d, spec);
                                auto h = hausman(fe, re.estimate);
                                const auto term = term_name(spec.regressors.front().variable, spec.regressors.front().lag);
                                row.fixed = fe.coef(term);
                                row.random = re.estimate.coef(term);
                                const std::string src = sid + " equation " + std::to_string(m.label);
                                log.add(src, fe.warnings);
                                log.add(src, re.estimate.warnings);
                                log.add(src, h.warnings);
                                row.test = std::move(h);
                            } catch (const Error& e) {
                                row.error = e.what();
                                art.errors.push_back("equation " + std::to_string(m.label) + ": " + e.what());
                            }
                            rows.push_back(std::move(row));
                        }
                        art.table = report::hausman_table(rows);
                        break;
                    }
                    case Stage::gmm: {
                        for (const auto& m : config.models) {
                            try {
                                const auto r = dynamic_gmm(d, m, config.gmm);
                                log.add(sid + " equation " + std::to_string(m.label), r.warnings);
                                gmm_cols.push_back(report::column_from(m, r));
                            } catch (const Error& e) {
                                art.errors.push_back("equation " + std::to_string(m.label) + ": " + e.what());
                                gmm_cols.push_back(report::failed_column(m, e.what()));
                            }
                        }
                        gmm_ran = true;
                        art.table = report::gmm_table(gmm_cols);
                        break;
                    }
                    case Stage::fmols: {
                        for (const auto& m : config.models) {
                            try {
                                const auto r = fmols_panel(d, m, config.fmols);
                                log.add(sid + " equation " + std::to_string(m.label), r.warnings);
                                fmols_cols.push_back(report::column_from(m, r));
                            } catch (const Error& e) {
                                art.errors.push_back("equation " + std::to_string(m.label) + ": " + e.what());
                                fmols_cols.push_back(report::failed_column(m, e.what()));
                            }
                        }
                        fmols_ran = true;
                        art.table = report::fmols_table(fmols_cols);
                        break;
                    }
                    case Stage::comparison:
                        if (!gmm_ran || !fmols_ran) {
                            throw ValidationError("comparison needs the gmm and fmols stages enabled");
                        }
                        art.table = report::comparison_table(gmm_cols, fmols_cols);
                        break;
                }
            } catch (const Error& e) {
                art.table.reset();
                art.errors.push_back(e.what());
            }
        });
        if (!art.errors.empty()) {
            art.status = "failed";
            bundle.any_failed = true;
        }
        bundle.tables.push_back(std::move(art));
    }

    bundle.warnings = log.items;
    auto& m = bundle.manifest;
    m["tool"] = "panelecon";
    m["version"] = kVersion;
    m["config_digest"] = config_digest(config);
    m["seed"] = config.seed;
    m["entities"] = d.index().n_entities();
    m["periods"] = d.index().periods();
    auto tables = nlohmann::json::array();
    for (const auto& t : bundle.tables) {
        nlohmann::json e;
        e["table"] = table_number(t.stage);
        e["id"] = stage_id(t.stage);
        e["status"] = t.status;
        e["errors"] = t.errors;
        auto files = nlohmann::json::array();
        if (t.table)
            for (auto f : config.formats) files.push_back(artifact_basename(t.stage) + "." + report::extension(f));
        e["files"] = std::move(files);
        tables.push_back(std::move(e));
    }
    m["tables"] = std::move(tables);
    m["warnings"] = bundle.warnings;
    if (config.record_timings) m["timings_ms"] = timings;
    return bundle;
}

/// The single writer for a bundle: every file goes to a temporary name
/// first and is renamed into place. Returns the written paths.
inline std::vector<std::filesystem::path> write_bundle(const ReportBundle& b, const std::filesystem::path& dir,
                                                       const std::vector<report::Format>& formats) {
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    for (const auto& t : b.tables) {
        if (!t.table) continue;
        for (auto f : formats) {
            files.emplace_back(dir / (artifact_basename(t.stage) + "." + report::extension(f)), report::render(*t.table, f));
        }
    }
    files.emplace_back(dir / "manifest.json", b.manifest.dump(2) + "\n");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& [path, bytes] : files) {
        fetch::detail::write_atomically(path, bytes);
        written.push_back(path);
    }
    return written;
}

}  // namespace panelecon
