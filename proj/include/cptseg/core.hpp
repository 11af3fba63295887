#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cptseg/types.hpp"

namespace cptseg {

/// A fitted segment model: the data, the changepoint set it was fit at,
/// per-region and global parameters, and fitted values.
///
/// `region_params` is a small named-column table with one row per region.
/// `num_params_per_region` / `num_model_params` are the parameter counts
/// a(theta) and b(theta) used by the penalized objective functions.
struct ModelFit {
    TimeSeries data;
    ChangepointSet tau;
    std::vector<std::string> region_param_names;
    std::vector<std::vector<double>> region_params; // [region][param]
    std::vector<std::pair<std::string, double>> model_params;
    std::vector<double> fitted_values;
    std::string model_name;
    int num_params_per_region = 0;
    int num_model_params = 0;
    double log_lik = 0.0;
    /// Sum of region log-priors at the MAP estimate; set by NHPP fits only.
    std::optional<double> log_prior;

    void validate() const {
        const std::size_t regions_expected = static_cast<std::size_t>(tau.m()) + 1;
        if (region_params.size() != regions_expected)
            throw invalid_input("region_params must have exactly m+1 rows");
        for (const auto& row : region_params)
            if (row.size() != region_param_names.size())
                throw invalid_input("region_params rows must match the column names");
        if (fitted_values.size() != static_cast<std::size_t>(data.n()))
            throw invalid_input("fitted_values must have length n");
        if (tau.n() != data.n())
            throw invalid_input("tau refers to a different series length");
    }
};

/// Log-likelihood value plus the parameter-count metadata every penalty
/// needs: a(theta), b(theta), df = a*(m+1) + b + m, and nobs.
struct LogLikSummary {
    double value;
    int num_params_per_region; // a(theta)
    int num_model_params;      // b(theta)
    int df;
    int nobs;
    ChangepointSet tau;
    std::optional<double> log_prior;

    LogLikSummary(double value_, int a, int b, int nobs_, ChangepointSet tau_,
                  std::optional<double> log_prior_ = std::nullopt)
        : value(value_),
          num_params_per_region(a),
          num_model_params(b),
          df(a * (tau_.m() + 1) + b + tau_.m()),
          nobs(nobs_),
          tau(std::move(tau_)),
          log_prior(log_prior_) {
        if (a < 0 || b < 0) throw invalid_input("parameter counts must be nonnegative");
        if (nobs < 1) throw invalid_input("nobs must be positive");
    }
};

/// Result of one segmentation run: algorithm metadata, the fitness
/// (penalty name and value), the refit model, and elapsed wall time.
struct SegmentationResult {
    std::string algorithm;
    std::vector<std::pair<std::string, std::string>> seg_params;
    std::string fitness_name;
    double fitness_value = 0.0;
    ModelFit model;
    double elapsed_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Result surfaces
// ---------------------------------------------------------------------------

struct AugmentRow {
    int index;
    double y;
    std::string region;
    double fitted;
    double resid;
};

/// Per-observation table: index, y, region label, .fitted, .resid.
inline std::vector<AugmentRow> augment(const ModelFit& fit) {
    fit.validate();
    const auto labels = regions(fit.tau);
    std::vector<AugmentRow> rows;
    rows.reserve(static_cast<std::size_t>(fit.data.n()));
    for (int i = 1; i <= fit.data.n(); ++i) {
        const int j = fit.tau.region_of(i);
        const double y = fit.data.value(i);
        const double fitted = fit.fitted_values[static_cast<std::size_t>(i - 1)];
        rows.push_back({i, y, labels[static_cast<std::size_t>(j)], fitted, y - fitted});
    }
    return rows;
}

struct TidyRow {
    std::string region;
    int num_obs;
    double min;
    double max;
    double mean;
    double sd; // sample sd (divisor n-1); NaN for single-observation regions
    double begin;
    double end;
    std::vector<double> params; // aligned with TidyTable::param_names
};

struct TidyTable {
    std::vector<std::string> param_names;
    std::vector<TidyRow> rows;
};

/// Per-region summary table with the fitted region parameters appended.
inline TidyTable tidy(const ModelFit& fit) {
    fit.validate();
    const auto labels = regions(fit.tau);
    const auto bounds = fit.tau.boundaries();
    TidyTable table;
    table.param_names = fit.region_param_names;
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        const int lo = bounds[j], hi = bounds[j + 1];
        TidyRow row;
        row.region = labels[j];
        row.num_obs = hi - lo;
        row.begin = static_cast<double>(lo);
        row.end = static_cast<double>(hi);
        double mn = std::numeric_limits<double>::infinity();
        double mx = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (int i = lo; i < hi; ++i) {
            const double y = fit.data.value(i);
            mn = std::min(mn, y);
            mx = std::max(mx, y);
            sum += y;
        }
        row.min = mn;
        row.max = mx;
        row.mean = sum / row.num_obs;
        if (row.num_obs > 1) {
            double ss = 0.0;
            for (int i = lo; i < hi; ++i) {
                const double d = fit.data.value(i) - row.mean;
                ss += d * d;
            }
            row.sd = std::sqrt(ss / (row.num_obs - 1));
        } else {
            row.sd = std::numeric_limits<double>::quiet_NaN();
        }
        row.params = fit.region_params[j];
        table.rows.push_back(std::move(row));
    }
    return table;
}

struct GlanceRow {
    std::string algorithm;
    std::string seg_params; // compact "key=value" rendering
    std::string model_name;
    std::string criteria;
    double fitness;
    double elapsed_seconds;
};

/// One-row summary of a segmentation run.
inline GlanceRow glance(const SegmentationResult& result) {
    std::string params;
    for (const auto& [k, v] : result.seg_params) {
        if (k.rfind("trace_", 0) == 0) continue; // traces stay in the JSON artifact
        if (!params.empty()) params += ";";
        params += k + "=" + v;
    }
    return {result.algorithm, params,      result.model.model_name,
            result.fitness_name, result.fitness_value, result.elapsed_seconds};
}

/// Sorted changepoint indices of a result.
inline std::vector<int> changepoints(const SegmentationResult& result) {
    return result.model.tau.tau();
}

/// Time labels of the changepoints; errors when the series has none.
inline std::vector<std::string> changepoint_labels(const SegmentationResult& result) {
    const TimeSeries& x = result.model.data;
    if (!x.has_labels()) throw invalid_input("no time labels");
    std::vector<std::string> out;
    for (int t : result.model.tau.tau()) out.push_back(x.label(t));
    return out;
}

/// Penalty name/value pair of a result.
inline std::pair<std::string, double> fitness(const SegmentationResult& result) {
    return {result.fitness_name, result.fitness_value};
}

} // namespace cptseg
