#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "cptseg/core.hpp"
#include "cptseg/csv.hpp"
#include "cptseg/models.hpp"

namespace cptseg::json_io {

using nlohmann::json;

/// result.json schema: algorithm, seg_params, fitness{name,value},
/// changepoints, changepoint_labels, model{...}, elapsed_seconds.
inline json result_to_json(const SegmentationResult& result) {
    json j;
    j["algorithm"] = result.algorithm;
    json params = json::object();
    for (const auto& [k, v] : result.seg_params) params[k] = v;
    j["seg_params"] = params;
    j["fitness"] = {{"name", result.fitness_name}, {"value", result.fitness_value}};
    j["changepoints"] = result.model.tau.tau();
    if (result.model.data.has_labels()) {
        json labels = json::array();
        for (int t : result.model.tau.tau()) labels.push_back(result.model.data.label(t));
        j["changepoint_labels"] = labels;
    } else {
        j["changepoint_labels"] = nullptr;
    }

    const auto ll = log_likelihood(result.model);
    json model;
    model["name"] = result.model.model_name;
    json region_rows = json::array();
    const auto labels = regions(result.model.tau);
    for (std::size_t r = 0; r < result.model.region_params.size(); ++r) {
        json row;
        row["region"] = labels[r];
        for (std::size_t c = 0; c < result.model.region_param_names.size(); ++c)
            row[result.model.region_param_names[c]] = result.model.region_params[r][c];
        region_rows.push_back(row);
    }
    model["region_params"] = region_rows;
    json mp = json::object();
    for (const auto& [k, v] : result.model.model_params) mp[k] = v;
    model["model_params"] = mp;
    model["df"] = ll.df;
    model["logLik"] = ll.value;
    if (result.model.log_prior) model["logPrior"] = *result.model.log_prior;
    j["model"] = model;
    j["elapsed_seconds"] = result.elapsed_seconds;
    return j;
}

inline void write_result(const std::string& path, const SegmentationResult& result) {
    csv::write_file(path, result_to_json(result).dump(2) + "\n");
}

inline json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open JSON file: " + path);
    json j;
    in >> j;
    return j;
}

} // namespace cptseg::json_io
