#pragma once

#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cptseg/core.hpp"
#include "cptseg/ga.hpp"
#include "cptseg/penalties.hpp"
#include "cptseg/search.hpp"
#include "cptseg/types.hpp"

namespace cptseg {

/// Per-run options for segment().  Only the fields relevant to the chosen
/// method are consulted.
struct SegmentOptions {
    std::optional<std::vector<int>> manual_tau;
    GaConfig ga;
    WbsConfig wbs;
    int binseg_max_cpts = 5;
    std::optional<int> min_seg_len;
    std::optional<int> exact_max_m;
    NhppSettings nhpp;
};

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[static_cast<std::size_t>(i)];
    }
    return os.str();
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string join_doubles(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << format_double(v[i]);
    }
    return os.str();
}

inline void append_ga_params(std::vector<std::pair<std::string, std::string>>& params,
                             const GaConfig& cfg, const GaRunInfo& info) {
    params.emplace_back("pop_size", std::to_string(cfg.pop_size));
    params.emplace_back("maxiter", std::to_string(cfg.maxiter));
    params.emplace_back("run", std::to_string(cfg.run));
    params.emplace_back("crossover_prob", format_double(cfg.crossover_prob));
    params.emplace_back("mutation_prob", format_double(cfg.mutation_prob));
    params.emplace_back("elitism", std::to_string(cfg.effective_elitism()));
    params.emplace_back("seeding", seeding_name(cfg.seeding));
    params.emplace_back("rng_seed", std::to_string(cfg.rng_seed));
    params.emplace_back("generations", std::to_string(info.generations));
    if (info.seeding_fallback) params.emplace_back("warning", "seeding_fallback_log_informed");
    params.emplace_back("trace_best", join_doubles(info.trace_best));
    params.emplace_back("trace_mean", join_doubles(info.trace_mean));
}

} // namespace detail

/// Run one segmentation method and package the result.  The model
/// component is always produced by refitting the chosen model at the
/// returned changepoint set, and the fitness is the chosen penalty
/// evaluated on that refit.
///
/// Methods: null, manual, exact, pelt, binseg, wbs, ga, ga-coen, ga-shi,
/// random.  ga-coen forces the NHPP model with BMDL; wbs ranks candidates
/// with meanshift CUSUM statistics and selects with MBIC, ignoring the
/// model argument (a warning flag is recorded when it differs).
inline SegmentationResult segment(const TimeSeries& x, const std::string& method,
                                  ModelSpec model, PenaltyId penalty,
                                  const SegmentOptions& opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    const int n = x.n();

    std::vector<std::pair<std::string, std::string>> seg_params;
    std::optional<ChangepointSet> tau;

    if (method == "null") {
        tau = ChangepointSet::empty(n);
    } else if (method == "manual") {
        if (!opts.manual_tau) throw invalid_input("manual method requires tau");
        tau = ChangepointSet(*opts.manual_tau, n);
        seg_params.emplace_back("tau", detail::join_ints(tau->tau()));
    } else if (method == "exact") {
        const int min_len = opts.min_seg_len.value_or(model.min_segment_length());
        const int max_m = opts.exact_max_m.value_or(n - 1);
        tau = exact_search_tau(x, model, penalty, max_m, min_len, opts.nhpp);
        seg_params.emplace_back("max_m", std::to_string(max_m));
        seg_params.emplace_back("min_seg_len", std::to_string(min_len));
    } else if (method == "pelt") {
        pelt_decomposition(penalty, model, n); // rejects MDL/BMDL
        tau = pelt_tau(x, model, penalty, opts.min_seg_len);
        seg_params.emplace_back(
            "min_seg_len",
            std::to_string(opts.min_seg_len.value_or(model.min_segment_length())));
    } else if (method == "binseg") {
        tau = binseg_tau(x, model, penalty, opts.binseg_max_cpts, opts.min_seg_len, opts.nhpp);
        seg_params.emplace_back("max_cpts", std::to_string(opts.binseg_max_cpts));
    } else if (method == "wbs") {
        const ModelSpec wbs_model{ModelFamily::meanshift, Distribution::normal, 1, false};
        if (model.name() != wbs_model.name())
            seg_params.emplace_back("warning", "model_ignored_meanshift_cusum");
        model = wbs_model;
        penalty = PenaltyId::MBIC;
        tau = wbs_tau(x, opts.wbs, model.min_segment_length());
        seg_params.emplace_back("num_intervals", std::to_string(opts.wbs.num_intervals));
        seg_params.emplace_back("rng_seed", std::to_string(opts.wbs.rng_seed));
    } else if (method == "ga" || method == "ga-coen" || method == "ga-shi" ||
               method == "random") {
        GaConfig cfg = opts.ga;
        if (method == "ga-coen") {
            model = ModelSpec{ModelFamily::nhpp};
            penalty = PenaltyId::BMDL;
            cfg.seeding = SeedingStrategy::build_informed;
        } else if (method == "ga-shi") {
            // Shi's variant: linear trends with AR(1) errors under BIC
        } else if (method == "random") {
            cfg.maxiter = 1;
            cfg.run = 1;
        }
        const auto info = ga_run(x, model, penalty, cfg, opts.nhpp);
        tau = info.best_tau;
        detail::append_ga_params(seg_params, cfg, info);
    } else {
        throw invalid_input("unknown method: " + method);
    }

    ModelFit fit = fit_model(x, *tau, model, opts.nhpp);
    const double value = penalty_value(penalty, fit);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return SegmentationResult{method, std::move(seg_params), penalty_name(penalty), value,
                              std::move(fit), elapsed};
}

// Spec-surface wrappers.

inline SegmentationResult exact_search(const TimeSeries& x, const ModelSpec& model,
                                       PenaltyId penalty, int max_m,
                                       SegmentOptions opts = {}) {
    opts.exact_max_m = max_m;
    return segment(x, "exact", model, penalty, opts);
}

inline SegmentationResult pelt(const TimeSeries& x, const ModelSpec& model, PenaltyId penalty,
                               std::optional<int> min_seg_len = std::nullopt) {
    SegmentOptions opts;
    opts.min_seg_len = min_seg_len;
    return segment(x, "pelt", model, penalty, opts);
}

inline SegmentationResult binseg(const TimeSeries& x, const ModelSpec& model, PenaltyId penalty,
                                 int max_cpts) {
    SegmentOptions opts;
    opts.binseg_max_cpts = max_cpts;
    return segment(x, "binseg", model, penalty, opts);
}

inline SegmentationResult wbs(const TimeSeries& x, const WbsConfig& config) {
    SegmentOptions opts;
    opts.wbs = config;
    return segment(x, "wbs", ModelSpec{ModelFamily::meanshift}, PenaltyId::MBIC, opts);
}

inline SegmentationResult ga(const TimeSeries& x, const ModelSpec& model, PenaltyId penalty,
                             const GaConfig& config, const NhppSettings& nhpp = {}) {
    SegmentOptions opts;
    opts.ga = config;
    opts.nhpp = nhpp;
    return segment(x, "ga", model, penalty, opts);
}

inline SegmentationResult ga_coen(const TimeSeries& x, GaConfig config = {},
                                  const NhppSettings& nhpp = {}) {
    SegmentOptions opts;
    opts.ga = config;
    opts.nhpp = nhpp;
    return segment(x, "ga-coen", ModelSpec{ModelFamily::nhpp}, PenaltyId::BMDL, opts);
}

inline SegmentationResult ga_shi(const TimeSeries& x, GaConfig config = {}) {
    SegmentOptions opts;
    opts.ga = config;
    return segment(x, "ga-shi", ModelSpec{ModelFamily::lmshift, Distribution::normal, 1, true},
                   PenaltyId::BIC, opts);
}

} // namespace cptseg
