// panelecon command line: fetch, ingest, describe, unitroot, hausman,
// estimate, report, run and simulate.
//
// Exit codes: 0 success, 1 validation error, 2 stage failure, 3 I/O or
// network error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "panelecon/pipeline.hpp"
#include "panelecon/synthetic.hpp"

namespace fs = std::filesystem;
using namespace panelecon;

namespace {

enum Exit { kOk = 0, kValidation = 1, kStageFailure = 2, kIo = 3 };

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string format;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config = true) {
    auto* c = cmd->add_option("--config", o.config, "Pipeline config (JSON)");
    if (needs_config) c->required();
    cmd->add_option("--seed", o.seed, "Master seed, overrides the config");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"md", "csv", "json"}));
    cmd->add_option("--out", o.out, "Output directory");
}

PipelineConfig load(const CommonOptions& o) {
    auto c = load_config(o.config);
    if (o.seed) override_seed(c, *o.seed);
    return c;
}

/// Runs the selected stages; prints to stdout unless an output directory
/// is given (or implied, for the full run).
int run_stages(const CommonOptions& o, const std::vector<Stage>& stages, bool default_to_config_dir) {
    auto config = load(o);
    if (!stages.empty()) {
        for (Stage s : kAllStages) config.stages[s] = false;
        for (Stage s : stages) config.stages[s] = true;
    }
    const auto bundle = run_pipeline(config);

    std::vector<report::Format> formats = config.formats;
    if (!o.format.empty()) formats = {report::parse_format(o.format)};
    std::optional<fs::path> dir;
    if (!o.out.empty()) dir = fs::path(o.out);
    else if (default_to_config_dir) dir = config.output_dir;

    if (dir) {
        for (const auto& p : write_bundle(bundle, *dir, formats)) std::cout << "wrote " << p.string() << '\n';
    } else {
        const auto f = o.format.empty() ? report::Format::markdown : report::parse_format(o.format);
        bool first = true;
        for (const auto& t : bundle.tables) {
            if (!t.table) continue;
            if (!first) std::cout << '\n';
            first = false;
            std::cout << report::render(*t.table, f);
        }
    }
    for (const auto& t : bundle.tables) {
        for (const auto& e : t.errors) std::cerr << "table " << table_number(t.stage) << " (" << stage_id(t.stage) << "): " << e << '\n';
    }
    if (!bundle.warnings.empty()) std::cerr << bundle.warnings.size() << " warning(s); see manifest.json\n";
    return bundle.any_failed ? kStageFailure : kOk;
}

int cmd_fetch(const CommonOptions& o) {
    auto config = load(o);
    if (config.indicators.empty()) throw ValidationError("config has no fetch indicators");
    auto options = *config.fetch_options;
    if (!o.out.empty()) options.cache_dir = o.out;
    int status = kOk;
    for (const auto& r : fetch::fetch_indicators(config.indicators, options)) {
        if (r.ok) {
            std::cout << r.descriptor.code << ": " << r.rows << " rows -> " << r.file.string()
                      << (r.from_cache ? " (cached)" : "") << '\n';
        } else {
            std::cerr << r.descriptor.code << ": " << r.error << '\n';
            status = kIo;
        }
    }
    return status;
}

int cmd_ingest(const CommonOptions& o, const std::string& input, const std::string& schema) {
    Warnings warnings;
    std::optional<PanelDataset> d;
    if (!input.empty()) {
        d = load_csv_file(input, schema == "long" ? CsvSchema::long_format : CsvSchema::wide);
    } else {
        if (o.config.empty()) throw ValidationError("ingest needs --config or --input");
        const auto config = load(o);
        d = derive_variables(load_raw_data(config, warnings), config, warnings);
    }
    std::cout << "entities: " << d->index().n_entities() << "\nperiods: " << d->periods().front() << "-"
              << d->periods().back() << " (" << d->index().n_periods() << ")\n";
    for (const auto& v : d->variables()) {
        std::cout << v.name() << ": " << v.observed_count() << " observed, " << v.missing_count() << " missing\n";
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    if (!o.out.empty()) {
        fs::path path = o.out;
        if (fs::is_directory(path)) path /= "panel.csv";
        fetch::detail::write_atomically(path, render_csv_string(*d));
        std::cout << "wrote " << path.string() << '\n';
    }
    return kOk;
}

int cmd_simulate(std::uint64_t seed, const std::string& out) {
    FixtureOptions fo;
    fo.seed = seed;
    const auto d = synthetic_fixture(fo);
    if (out.empty()) {
        std::cout << render_csv_string(d);
    } else {
        fetch::detail::write_atomically(out, render_csv_string(d));
        std::cout << "wrote " << out << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Panel econometrics pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    CommonOptions common;
    std::string method, input, schema = "wide", sim_out;
    std::uint64_t sim_seed = FixtureOptions{}.seed;

    auto* fetch_cmd = app.add_subcommand("fetch", "Download configured indicators into the cache");
    add_common(fetch_cmd, common);
    auto* ingest_cmd = app.add_subcommand("ingest", "Load a panel and report its shape");
    add_common(ingest_cmd, common, false);
    ingest_cmd->add_option("--input", input, "CSV file to ingest instead of the configured data");
    ingest_cmd->add_option("--schema", schema, "CSV layout")->check(CLI::IsMember({"wide", "long"}));
    auto* describe_cmd = app.add_subcommand("describe", "Descriptive statistics and correlation tables");
    add_common(describe_cmd, common);
    auto* unitroot_cmd = app.add_subcommand("unitroot", "Panel unit-root battery");
    add_common(unitroot_cmd, common);
    auto* hausman_cmd = app.add_subcommand("hausman", "Fixed vs random effects with the Hausman test");
    add_common(hausman_cmd, common);
    auto* estimate_cmd = app.add_subcommand("estimate", "FMOLS or dynamic GMM estimation");
    add_common(estimate_cmd, common);
    estimate_cmd->add_option("--method", method, "Estimator")->required()->check(CLI::IsMember({"fmols", "gmm"}));
    auto* report_cmd = app.add_subcommand("report", "GMM, FMOLS and their comparison table");
    add_common(report_cmd, common);
    auto* run_cmd = app.add_subcommand("run", "Full pipeline, written to the output directory");
    add_common(run_cmd, common);
    auto* simulate_cmd = app.add_subcommand("simulate", "Write the synthetic 74 x 9 fixture panel");
    simulate_cmd->add_option("--seed", sim_seed, "Generator seed");
    simulate_cmd->add_option("--out", sim_out, "Output CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*fetch_cmd) return cmd_fetch(common);
        if (*ingest_cmd) return cmd_ingest(common, input, schema);
        if (*describe_cmd) return run_stages(common, {Stage::descriptive, Stage::correlation}, false);
        if (*unitroot_cmd) return run_stages(common, {Stage::unit_root}, false);
        if (*hausman_cmd) return run_stages(common, {Stage::hausman}, false);
        if (*estimate_cmd) return run_stages(common, {method == "gmm" ? Stage::gmm : Stage::fmols}, false);
        if (*report_cmd) return run_stages(common, {Stage::gmm, Stage::fmols, Stage::comparison}, false);
        if (*run_cmd) return run_stages(common, {}, true);
        if (*simulate_cmd) return cmd_simulate(sim_seed, sim_out);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kStageFailure;
    }
    return kOk;
}
