#pragma once

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cptseg/cptseg.hpp"

namespace cptseg::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_bad_input = 2;
inline constexpr int exit_algorithm = 3;
inline constexpr int exit_io = 4;

namespace detail {

struct SharedFlags {
    std::string input;
    std::string time_col = "time";
    std::string value_col = "value";
    std::string model;
    std::string penalty;
    std::string tau;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    bool threshold_set = false;
    int pop_size = 50;
    int maxiter = 1000;
    int run = 100;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string seeding = "log_informed";
    int max_cpts = 5;
    int num_intervals = 5000;
    int min_seg_len = 0; // 0: model default
    int max_m = -1;
    std::string out = ".";
    std::string formats = "json,csv,svg";
};

inline void add_shared_flags(CLI::App* cmd, SharedFlags& f, bool with_method_opts) {
    cmd->add_option("--input", f.input, "input CSV path")->required();
    cmd->add_option("--time-col", f.time_col, "time column name (optional in the file)");
    cmd->add_option("--value-col", f.value_col, "value column name");
    if (with_method_opts) {
        cmd->add_option("--model", f.model, "model identifier");
        cmd->add_option("--penalty", f.penalty, "penalty identifier");
        cmd->add_option("--tau", f.tau, "comma-separated changepoints (manual method)");
        cmd->add_option("--threshold", f.threshold, "NHPP exceedance threshold")
            ->each([&f](const std::string&) { f.threshold_set = true; });
        cmd->add_option("--pop-size", f.pop_size, "GA population size");
        cmd->add_option("--maxiter", f.maxiter, "GA maximum generations");
        cmd->add_option("--run", f.run, "GA stall generations before stopping");
        cmd->add_option("--seeding", f.seeding,
                        "GA seeding: uniform_half|build_informed|log_informed");
        cmd->add_option("--max-cpts", f.max_cpts, "binseg changepoint budget");
        cmd->add_option("--num-intervals", f.num_intervals, "WBS random intervals");
        cmd->add_option("--min-seg-len", f.min_seg_len, "minimum segment length override");
        cmd->add_option("--max-m", f.max_m, "exact search changepoint cap");
    }
    cmd->add_option("--seed", f.seed, "RNG seed (falls back to CPTSEG_SEED)")
        ->each([&f](const std::string&) { f.seed_set = true; });
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--formats", f.formats, "outputs: subset of json,csv,svg");
}

inline std::uint64_t resolve_seed(const SharedFlags& f) {
    if (f.seed_set) return f.seed;
    if (const char* env = std::getenv("CPTSEG_SEED")) {
        try {
            return static_cast<std::uint64_t>(std::stoull(env));
        } catch (...) {
            throw invalid_input("CPTSEG_SEED is not an integer");
        }
    }
    return 1;
}

inline std::set<std::string> parse_formats(const std::string& formats) {
    std::set<std::string> out;
    std::stringstream ss(formats);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item != "json" && item != "csv" && item != "svg")
            throw invalid_input("unknown output format: " + item);
        out.insert(item);
    }
    if (out.empty()) throw invalid_input("no output formats selected");
    return out;
}

inline std::vector<int> parse_tau(const std::string& arg) {
    std::vector<int> tau;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            tau.push_back(std::stoi(item));
        } catch (...) {
            throw invalid_input("bad --tau entry: " + item);
        }
    }
    return tau;
}

inline std::vector<std::string> parse_list(const std::string& arg) {
    std::vector<std::string> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Per-method defaults mirroring the common usage of each wrapped
/// algorithm: pelt/binseg default to meanvar+MBIC, ga-shi to
/// trendshift_ar1+BIC, ga-coen is pinned to nhpp+BMDL.
inline void method_defaults(const std::string& method, std::string& model, std::string& penalty) {
    if (model.empty()) {
        if (method == "pelt" || method == "binseg" || method == "wbs") model = "meanvar";
        else if (method == "ga-shi") model = "trendshift_ar1";
        else if (method == "ga-coen") model = "nhpp";
        else model = "meanshift_norm";
    }
    if (penalty.empty()) {
        if (method == "pelt" || method == "binseg" || method == "wbs") penalty = "MBIC";
        else if (method == "ga-coen") penalty = "BMDL";
        else penalty = "BIC";
    }
    if (method == "wbs") model = "meanshift_norm";
    if (method == "ga-coen") {
        model = "nhpp";
        penalty = "BMDL";
    }
}

inline SegmentationResult run_method(const TimeSeries& series, const std::string& method,
                                     const SharedFlags& f) {
    std::string model_id = f.model, penalty_id = f.penalty;
    method_defaults(method, model_id, penalty_id);
    const ModelSpec model = ModelSpec::parse(model_id);
    const PenaltyId penalty = parse_penalty(penalty_id);

    SegmentOptions opts;
    if (!f.tau.empty()) opts.manual_tau = parse_tau(f.tau);
    const std::uint64_t seed = resolve_seed(f);
    opts.ga.pop_size = f.pop_size;
    opts.ga.maxiter = f.maxiter;
    opts.ga.run = std::min(f.run, f.maxiter);
    opts.ga.rng_seed = seed;
    opts.ga.seeding = parse_seeding(f.seeding);
    opts.wbs.num_intervals = f.num_intervals;
    opts.wbs.rng_seed = seed;
    opts.binseg_max_cpts = f.max_cpts;
    if (f.min_seg_len > 0) opts.min_seg_len = f.min_seg_len;
    if (f.max_m >= 0) opts.exact_max_m = f.max_m;
    if (f.threshold_set) opts.nhpp.threshold = f.threshold;
    return segment(series, method, model, penalty, opts);
}

inline csv::Table glance_table() {
    return csv::Table(
        {"algorithm", "seg_params", "model_name", "criteria", "fitness", "elapsed_time"});
}

inline std::vector<std::string> glance_row(const SegmentationResult& r) {
    const auto g = glance(r);
    return {g.algorithm,        g.seg_params,
            g.model_name,       g.criteria,
            csv::format_number(g.fitness), csv::format_number(g.elapsed_seconds)};
}

inline void write_segment_artifacts(const SegmentationResult& result, const std::string& out_dir,
                                    const std::set<std::string>& formats) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    if (formats.count("json")) json_io::write_result((dir / "result.json").string(), result);
    if (formats.count("csv")) {
        auto gt = glance_table();
        gt.add_row(glance_row(result));
        csv::write_file((dir / "glance.csv").string(), gt.to_csv());

        const auto tt = tidy(result.model);
        std::vector<std::string> header{"region", "num_obs", "min", "max",
                                        "mean",   "sd",      "begin", "end"};
        for (const auto& p : tt.param_names) header.push_back(p);
        csv::Table tidy_csv(header);
        for (const auto& row : tt.rows) {
            std::vector<std::string> cells{row.region,
                                           std::to_string(row.num_obs),
                                           csv::format_number(row.min),
                                           csv::format_number(row.max),
                                           csv::format_number(row.mean),
                                           csv::format_number(row.sd),
                                           csv::format_number(row.begin),
                                           csv::format_number(row.end)};
            for (double p : row.params) cells.push_back(csv::format_number(p));
            tidy_csv.add_row(cells);
        }
        csv::write_file((dir / "tidy.csv").string(), tidy_csv.to_csv());

        csv::Table augment_csv({"index", "y", "region", ".fitted", ".resid"});
        for (const auto& row : augment(result.model))
            augment_csv.add_row({std::to_string(row.index), csv::format_number(row.y), row.region,
                                 csv::format_number(row.fitted), csv::format_number(row.resid)});
        csv::write_file((dir / "augment.csv").string(), augment_csv.to_csv());
    }
    if (formats.count("svg"))
        csv::write_file((dir / "plot.svg").string(),
                        svg::segmentation_chart(result, result.algorithm));
}

} // namespace detail

/// Entry point shared by the binary and the tests.  Returns the process
/// exit code; diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& err = std::cerr) {
    CLI::App app{"changepoint segmentation toolkit"};
    app.set_config("--config", "", "TOML config mirroring the flags");
    app.require_subcommand(1);

    detail::SharedFlags seg_flags;
    std::string seg_method = "pelt";
    auto* cmd_segment = app.add_subcommand("segment", "segment one series with one method");
    cmd_segment->add_option("--method", seg_method,
                            "null|manual|exact|pelt|binseg|wbs|ga|ga-coen|ga-shi|random");
    detail::add_shared_flags(cmd_segment, seg_flags, true);

    detail::SharedFlags cmp_flags;
    std::string cmp_methods;
    auto* cmd_compare = app.add_subcommand("compare", "run several methods on one series");
    cmd_compare->add_option("--methods", cmp_methods, "comma-separated method list")->required();
    detail::add_shared_flags(cmd_compare, cmp_flags, true);

    std::string sim_spec_path, sim_out = ".";
    auto* cmd_simulate = app.add_subcommand("simulate", "generate a synthetic series");
    cmd_simulate->add_option("--spec", sim_spec_path, "TOML simulation spec")->required();
    cmd_simulate->add_option("--out", sim_out, "output directory");

    detail::SharedFlags bench_flags;
    std::string bench_seedings;
    auto* cmd_bench = app.add_subcommand("bench", "compare GA seeding strategies");
    cmd_bench->add_option("--seedings", bench_seedings, "comma-separated seeding strategies")
        ->required();
    detail::add_shared_flags(cmd_bench, bench_flags, true);

    std::vector<const char*> argv;
    argv.push_back("cptseg");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << "\n";
        return exit_bad_input;
    }

    try {
        namespace fs = std::filesystem;
        if (cmd_segment->parsed()) {
            const auto formats = detail::parse_formats(seg_flags.formats);
            const auto series =
                csv::read_series(seg_flags.input, seg_flags.time_col, seg_flags.value_col);
            const auto result = detail::run_method(series, seg_method, seg_flags);
            detail::write_segment_artifacts(result, seg_flags.out, formats);
        } else if (cmd_compare->parsed()) {
            const auto formats = detail::parse_formats(cmp_flags.formats);
            const auto methods = detail::parse_list(cmp_methods);
            if (methods.size() < 2) throw invalid_input("compare needs at least 2 methods");
            const auto series =
                csv::read_series(cmp_flags.input, cmp_flags.time_col, cmp_flags.value_col);

            std::map<std::string, int> seen;
            auto table = csv::Table({"name", "algorithm", "seg_params", "model_name", "criteria",
                                     "fitness", "elapsed_time", "error"});
            nlohmann::json byname = nlohmann::json::object();
            std::vector<std::pair<std::string, std::vector<int>>> rug;
            for (const auto& method : methods) {
                std::string name = method;
                const int count = ++seen[method];
                if (count > 1) name += "_" + std::to_string(count);
                try {
                    const auto result = detail::run_method(series, method, cmp_flags);
                    auto row = detail::glance_row(result);
                    row.insert(row.begin(), name);
                    row.push_back("");
                    table.add_row(row);
                    nlohmann::json entry;
                    entry["changepoints"] = changepoints(result);
                    entry["fitness"] = {{"name", result.fitness_name},
                                        {"value", result.fitness_value}};
                    if (series.has_labels()) entry["changepoint_labels"] = changepoint_labels(result);
                    byname[name] = entry;
                    rug.emplace_back(name, changepoints(result));
                } catch (const std::exception& e) {
                    table.add_row({name, method, "", "", "", "", "", e.what()});
                    byname[name] = {{"error", e.what()}};
                }
            }
            const fs::path dir(cmp_flags.out);
            if (formats.count("csv"))
                csv::write_file((dir / "compare.csv").string(), table.to_csv());
            if (formats.count("json"))
                csv::write_file((dir / "compare.json").string(), byname.dump(2) + "\n");
            if (formats.count("svg"))
                csv::write_file((dir / "plot.svg").string(), svg::rug_chart(series, rug));
        } else if (cmd_simulate->parsed()) {
            const auto spec = toml::read_sim_spec(toml::parse_file(sim_spec_path));
            const auto [series, truth] = simulate(spec);
            csv::Table out({"time", "value"});
            for (int i = 1; i <= series.n(); ++i)
                out.add_row({std::to_string(i), csv::format_number(series.value(i))});
            const fs::path dir(sim_out);
            csv::write_file((dir / "series.csv").string(), out.to_csv());
            nlohmann::json truth_json;
            truth_json["tau"] = truth.tau();
            truth_json["n"] = truth.n();
            csv::write_file((dir / "truth.json").string(), truth_json.dump(2) + "\n");
        } else if (cmd_bench->parsed()) {
            const auto seedings = detail::parse_list(bench_seedings);
            if (seedings.size() < 2) throw invalid_input("bench needs at least 2 seeding strategies");
            const auto series =
                csv::read_series(bench_flags.input, bench_flags.time_col, bench_flags.value_col);
            std::string model_id = bench_flags.model, penalty_id = bench_flags.penalty;
            detail::method_defaults("ga", model_id, penalty_id);
            const ModelSpec model = ModelSpec::parse(model_id);
            const PenaltyId penalty = parse_penalty(penalty_id);

            csv::Table trace({"strategy", "generation", "best_fitness"});
            csv::Table summary({"strategy", "generations", "stopped_early", "best_fitness"});
            for (const auto& seeding : seedings) {
                GaConfig cfg;
                cfg.pop_size = bench_flags.pop_size;
                cfg.maxiter = bench_flags.maxiter;
                cfg.run = std::min(bench_flags.run, bench_flags.maxiter);
                cfg.rng_seed = detail::resolve_seed(bench_flags);
                cfg.seeding = parse_seeding(seeding);
                const auto info = ga_run(series, model, penalty, cfg);
                for (std::size_t g = 0; g < info.trace_best.size(); ++g)
                    trace.add_row({seeding, std::to_string(g + 1),
                                   csv::format_number(info.trace_best[g])});
                summary.add_row({seeding, std::to_string(info.generations),
                                 info.generations < cfg.maxiter ? "true" : "false",
                                 csv::format_number(info.best_fitness)});
            }
            const fs::path dir(bench_flags.out);
            csv::write_file((dir / "trace.csv").string(), trace.to_csv());
            csv::write_file((dir / "summary.csv").string(), summary.to_csv());
        }
        return exit_ok;
    } catch (const invalid_input& e) {
        err << "error: " << e.what() << "\n";
        return exit_bad_input;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_algorithm;
    }
}

} // namespace cptseg::cli
