#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weakfactor/config_io.hpp"
#include "weakfactor/csv.hpp"
#include "weakfactor/empirical_bounds.hpp"
#include "weakfactor/montecarlo.hpp"
#include "weakfactor/presets.hpp"

namespace weakfactor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::optional<int> reps;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    std::string out_path;
    std::string grid;
};

struct RunManifest {
    std::string command;
    std::string source;  // config path or preset id
    std::uint64_t seed = 0;
    std::string output;
    unsigned workers = 0;
    std::string timestamp;

    nlohmann::ordered_json to_json() const {
        return {{"command", command}, {"source", source},   {"seed", seed},
                {"output", output},   {"workers", workers}, {"timestamp", timestamp}};
    }
};

class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string factor_label(FactorKind k) { return std::string(config_detail::factor_kind_names().name(k)); }

inline std::string idio_label(const IdiosyncraticSpec& s) {
    return std::string(config_detail::idio_kind_names().name(s.kind));
}

inline std::string alpha_field(const IdiosyncraticSpec& s) {
    return s.kind == IdiosyncraticSpec::Kind::nts ? csv::number(s.alpha) : std::string();
}

inline std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string v = config_detail::trim(item);
        if (v.empty()) continue;
        out.push_back(config_detail::parse_double("grid", v));
    }
    if (out.empty()) throw config_error("grid", "expected a comma-separated list of numbers");
    return out;
}

// "d:n,d:n,..."
inline std::vector<bounds::GridPoint> parse_point_list(const std::string& text) {
    std::vector<bounds::GridPoint> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string v = config_detail::trim(item);
        if (v.empty()) continue;
        const auto colon = v.find(':');
        if (colon == std::string::npos) throw config_error("grid", "expected d:n pairs, got '" + v + "'");
        const auto d = config_detail::parse_int("grid", config_detail::trim(v.substr(0, colon)));
        const auto n = config_detail::parse_int("grid", config_detail::trim(v.substr(colon + 1)));
        if (d < 1 || n < 1) throw config_error("grid", "d and n must be positive");
        out.push_back({static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n)});
    }
    if (out.empty()) throw config_error("grid", "expected at least one d:n pair");
    return out;
}

inline ModelConfig apply_overrides(ModelConfig config, const CommonOptions& o) {
    if (o.reps) config.replications = *o.reps;
    if (o.seed) config.master_seed = *o.seed;
    config.validate();
    return config;
}

// ---------------------------------------------------------------------------
// Report builders

inline csv::Row model_columns(const ModelConfig& c) {
    return {factor_label(c.factor_kind), idio_label(c.idio), alpha_field(c.idio), csv::number(static_cast<long long>(c.n)),
            csv::number(static_cast<long long>(c.d))};
}

inline const csv::Row& table_header() {
    static const csv::Row h{"table_id", "factor_kind", "idio_kind", "alpha",         "n",   "d",
                            "estimator", "mean_rhat", "prob_hit", "replications", "seed"};
    return h;
}

inline void append_report_rows(csv::Table& table, const std::string& id, const MCReport& report,
                               const csv::Row& extra_before_estimator = {}, const csv::Row& suffix = {}) {
    for (std::size_t k = 0; k < EstimateSet::names.size(); ++k) {
        csv::Row row{id};
        for (auto& f : model_columns(report.config)) row.push_back(f);
        for (const auto& f : extra_before_estimator) row.push_back(f);
        row.push_back(std::string(EstimateSet::names[k]));
        row.push_back(csv::number(report.summary[k].mean));
        row.push_back(csv::number(report.summary[k].prob_hit));
        row.push_back(csv::number(report.replications));
        row.push_back(csv::number(static_cast<unsigned long long>(report.config.master_seed)));
        for (const auto& f : suffix) row.push_back(f);
        table.add(std::move(row));
    }
}

inline csv::Table simulate_report(const MCReport& report, const std::string& timestamp) {
    csv::Table t;
    t.header = table_header();
    t.header.front() = "run_id";
    t.header.push_back("timestamp");
    append_report_rows(t, "simulate", report, {}, {timestamp});
    return t;
}

inline csv::Table table_report(const std::string& id, const std::vector<MCReport>& cells) {
    csv::Table t;
    t.header = table_header();
    for (const auto& r : cells) append_report_rows(t, id, r);
    return t;
}

struct SweepPanelResult {
    std::vector<MCReport> reports;  // parallel to the grid
};

inline csv::Table sweep_report(const std::string& id, SweepParameter parameter, const std::vector<double>& grid,
                               const std::vector<SweepPanelResult>& panels) {
    csv::Table t;
    t.header = {"figure_id", "factor_kind", "idio_kind", "alpha",    "n",            "d",   "parameter",
                "value",     "estimator",   "mean_rhat", "prob_hit", "replications", "seed"};
    for (const auto& panel : panels)
        for (std::size_t g = 0; g < grid.size(); ++g)
            append_report_rows(t, id, panel.reports[g], {std::string(to_string(parameter)), csv::number(grid[g])});
    return t;
}

inline const csv::Row& bounds_header() {
    static const csv::Row h{"study", "row_type", "label", "d",     "n",       "index",   "observed",
                            "envelope", "ratio", "slope", "band_lo", "band_hi", "target"};
    return h;
}

inline void append_points(csv::Table& t, const std::string& study, const bounds::ScalingStudyResult& r) {
    for (const auto& p : r.points) {
        t.add({study, "point", "", csv::number(static_cast<long long>(p.d)), csv::number(static_cast<long long>(p.n)),
               csv::number(p.index), csv::number(p.observed), csv::number(p.envelope), csv::number(p.ratio), "", "",
               "", ""});
    }
}

inline void append_slope(csv::Table& t, const std::string& study, const bounds::SlopeFit& s) {
    t.add({study, "summary", s.label, "", "", "", "", "", "", csv::number(s.slope), csv::number(s.band_lo),
           csv::number(s.band_hi), csv::number(s.target)});
}

inline void append_scalar(csv::Table& t, const std::string& study, const std::string& label, double value) {
    t.add({study, "summary", label, "", "", "", csv::number(value), "", "", "", "", "", ""});
}

// ---------------------------------------------------------------------------
// Commands

struct CommandOutput {
    csv::Table table;
    RunManifest manifest;
};

inline CommandOutput cmd_simulate(const CommonOptions& o) {
    if (o.config_path.empty()) throw usage_error("simulate requires --config PATH");
    const ModelConfig config = apply_overrides(load_config(o.config_path), o);
    const MCReport report = run_experiment(config, ExecutionOptions{o.workers});
    const std::string ts = utc_timestamp();
    return {simulate_report(report, ts), {"simulate", o.config_path, config.master_seed, o.out_path, o.workers, ts}};
}

inline CommandOutput cmd_table(const CommonOptions& o, std::ostream& log) {
    const TablePreset* preset = find_table_preset(o.preset);
    if (!preset) throw config_error("preset", "unknown table preset '" + o.preset + "' (see list-presets)");
    std::vector<MCReport> reports;
    std::uint64_t seed = preset->base.master_seed;
    for (const auto& cell : preset->cells()) {
        const ModelConfig config = apply_overrides(cell, o);
        seed = config.master_seed;
        reports.push_back(run_experiment(config, ExecutionOptions{o.workers}));
        log << preset->id << ": n=" << config.n << " d=" << config.d << " done\n";
    }
    return {table_report(preset->id, reports), {"table", preset->id, seed, o.out_path, o.workers, utc_timestamp()}};
}

inline CommandOutput cmd_sweep(const CommonOptions& o, std::ostream& log) {
    const FigurePreset* preset = find_figure_preset(o.preset);
    if (!preset) throw config_error("preset", "unknown figure preset '" + o.preset + "' (see list-presets)");
    const std::vector<double> grid = o.grid.empty() ? preset->grid : parse_number_list(o.grid);
    std::vector<SweepPanelResult> panels;
    std::uint64_t seed = 0;
    for (const auto& base : preset->panels) {
        const ModelConfig config = apply_overrides(base, o);
        for (double v : grid) with_parameter(config, preset->parameter, v).validate();
        seed = config.master_seed;
        panels.push_back({run_sweep(config, preset->parameter, grid, ExecutionOptions{o.workers})});
        log << preset->id << ": " << factor_label(config.factor_kind) << "/" << idio_label(config.idio) << " done\n";
    }
    return {sweep_report(preset->id, preset->parameter, grid, panels),
            {"sweep", preset->id, seed, o.out_path, o.workers, utc_timestamp()}};
}

struct BoundsOptions {
    std::string study;
    double alpha = 0.5;
    long long n = 390;
};

inline CommandOutput cmd_bounds(const CommonOptions& o, const BoundsOptions& b) {
    bounds::StudyOptions opts;
    if (o.reps) {
        if (*o.reps < 1) throw config_error("replications", "must be >= 1");
        opts.replications = *o.reps;
    }
    if (o.seed) opts.seed = *o.seed;
    opts.workers = o.workers;

    csv::Table t;
    t.header = bounds_header();
    if (b.study == "concentration") {
        std::vector<bounds::GridPoint> grid;
        if (o.grid.empty()) {
            for (Eigen::Index d : {50, 100, 200, 400})
                for (Eigen::Index n : {d / 4, d, 4 * d}) grid.push_back({d, n});
            grid.push_back({100, 1600});
        } else {
            grid = parse_point_list(o.grid);
        }
        for (const auto& p : grid)
            if (p.d > bounds::kConcentrationMaxDimension)
                throw config_error("grid", "concentration study caps d at " +
                                               std::to_string(bounds::kConcentrationMaxDimension));
        const auto r = bounds::concentration_study(grid, opts);
        append_points(t, b.study, r);
        append_scalar(t, b.study, "ratio_spread", r.ratio_spread());
        for (const auto& p : r.points)
            if (auto s = bounds::shrink_factor(r, p.d, p.n))
                append_scalar(t, b.study, "shrink@" + std::to_string(p.d) + ":" + std::to_string(p.n), *s);
    } else if (b.study == "jumpnorm") {
        if (!(b.alpha > 0.0 && b.alpha < 1.0)) throw config_error("alpha", "must lie in (0, 1)");
        const auto grid = o.grid.empty()
                              ? std::vector<bounds::GridPoint>{{100, 390}, {400, 390}, {1600, 390}, {100, 26}, {100, 78}}
                              : parse_point_list(o.grid);
        const auto r = bounds::jump_norm_study(grid, b.alpha, opts);
        append_points(t, b.study, r);
        append_scalar(t, b.study, "ratio_spread", r.ratio_spread());
        for (const auto& s : r.slopes) append_slope(t, b.study, s);
    } else if (b.study == "eigenscaling") {
        if (b.n < 2) throw config_error("n", "must be >= 2");
        std::vector<Eigen::Index> d_grid{100, 300, 1000, 3000};
        if (!o.grid.empty()) {
            d_grid.clear();
            for (double v : parse_number_list(o.grid)) d_grid.push_back(static_cast<Eigen::Index>(std::llround(v)));
        }
        for (auto d : d_grid)
            if (d < 25) throw config_error("grid", "eigenscaling needs d >= 25");
        const auto r = bounds::eigen_scaling_study(d_grid, static_cast<Eigen::Index>(b.n), opts);
        append_points(t, b.study, r);
        for (const auto& s : r.slopes) append_slope(t, b.study, s);
    } else {
        throw config_error("study", "unknown study '" + b.study + "' (expected concentration|jumpnorm|eigenscaling)");
    }
    return {std::move(t), {"bounds", b.study, opts.seed, o.out_path, o.workers, utc_timestamp()}};
}

inline void list_presets(std::ostream& out) {
    for (const auto& p : table_presets()) out << p.id << "  " << p.description << "\n";
    for (const auto& p : figure_presets())
        out << p.id << "  sweep of " << to_string(p.parameter) << ": " << p.description << "\n";
}

inline void emit(const CommandOutput& result, const CommonOptions& o, std::ostream& out) {
    if (o.out_path.empty()) {
        csv::write(out, result.table);
        return;
    }
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file) throw config_error("out", "cannot write '" + o.out_path + "'");
    csv::write(file, result.table);
    std::ofstream manifest(o.out_path + ".manifest.json", std::ios::binary);
    if (!manifest) throw config_error("out", "cannot write manifest next to '" + o.out_path + "'");
    manifest << result.manifest.to_json().dump(2) << "\n";
}

/// Entry point shared by the executable and the tests. Returns the exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"weakfactor: factor-number estimation experiments on simulated high-frequency panels"};
    app.require_subcommand(0, 1);
    bool list_flag = false;
    app.add_flag("--list-presets", list_flag, "List table and figure presets");

    CommonOptions o;
    BoundsOptions b;
    auto add_common = [&](CLI::App* sub, bool with_grid) {
        sub->add_option("--reps", o.reps, "Replications per cell");
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_option("--workers", o.workers, "Worker threads (0: all cores)");
        sub->add_option("--out", o.out_path, "CSV output path (default: stdout)");
        if (with_grid) sub->add_option("--grid", o.grid, "Grid override");
    };

    auto* simulate = app.add_subcommand("simulate", "Run one experiment from a config file");
    simulate->add_option("--config", o.config_path, "Config file")->required();
    add_common(simulate, false);

    auto* table = app.add_subcommand("table", "Run every cell of a table preset");
    table->add_option("--preset", o.preset, "table1..table8")->required();
    add_common(table, false);

    auto* sweep = app.add_subcommand("sweep", "Run a figure preset's parameter sweep");
    sweep->add_option("--preset", o.preset, "fig1..fig4")->required();
    add_common(sweep, true);

    auto* bounds_cmd = app.add_subcommand("bounds", "Run a scaling study");
    bounds_cmd->add_option("--study", b.study, "concentration | jumpnorm | eigenscaling")->required();
    bounds_cmd->add_option("--alpha", b.alpha, "NTS activity index for jumpnorm");
    bounds_cmd->add_option("--n", b.n, "Sample size for eigenscaling");
    add_common(bounds_cmd, true);

    auto* list = app.add_subcommand("list-presets", "List table and figure presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (list_flag || list->parsed()) {
            list_presets(out);
            return kExitOk;
        }
        std::optional<CommandOutput> result;
        if (simulate->parsed()) result = cmd_simulate(o);
        else if (table->parsed()) result = cmd_table(o, err);
        else if (sweep->parsed()) result = cmd_sweep(o, err);
        else if (bounds_cmd->parsed()) result = cmd_bounds(o, b);
        else {
            err << app.help();
            return kExitUsage;
        }
        emit(*result, o, out);
        return kExitOk;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace weakfactor::cli
