#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cptseg/rng.hpp"
#include "cptseg/types.hpp"

namespace cptseg {

enum class SimDistribution { normal, lognormal, poisson, trend };

/// One region of a synthetic series.
struct SimRegion {
    int length = 0;
    SimDistribution distribution = SimDistribution::normal;
    // normal/lognormal: (mean, sd); poisson: (rate, -); trend: intercept,
    // slope, noise sd
    double mean = 0.0;
    double sd = 1.0;
    double rate = 1.0;
    double intercept = 0.0;
    double slope = 0.0;
};

struct SimSpec {
    std::vector<SimRegion> regions;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (regions.empty()) throw invalid_input("simulation spec needs at least one region");
        for (const auto& r : regions) {
            if (r.length < 1) throw invalid_input("region lengths must be >= 1");
            if (r.sd < 0.0) throw invalid_input("sd must be nonnegative");
            if (r.distribution == SimDistribution::poisson && r.rate < 0.0)
                throw invalid_input("poisson rate must be nonnegative");
        }
    }
};

/// Draw the concatenated series and return it with the true changepoint
/// set (the cumulative region starts).  Deterministic given rng_seed.
inline std::pair<TimeSeries, ChangepointSet> simulate(const SimSpec& spec) {
    spec.validate();
    Rng rng(spec.rng_seed);
    std::vector<double> values;
    std::vector<int> tau;
    int pos = 1;
    for (std::size_t j = 0; j < spec.regions.size(); ++j) {
        const auto& r = spec.regions[j];
        if (j > 0) tau.push_back(pos);
        for (int t = 0; t < r.length; ++t) {
            switch (r.distribution) {
            case SimDistribution::normal:
                values.push_back(rng.normal(r.mean, r.sd));
                break;
            case SimDistribution::lognormal:
                values.push_back(rng.lognormal(r.mean, r.sd));
                break;
            case SimDistribution::poisson:
                values.push_back(static_cast<double>(rng.poisson(r.rate)));
                break;
            case SimDistribution::trend:
                values.push_back(r.intercept + r.slope * t + rng.normal(0.0, r.sd));
                break;
            }
        }
        pos += r.length;
    }
    const int n = static_cast<int>(values.size());
    return {TimeSeries(std::move(values)), ChangepointSet(std::move(tau), n)};
}

} // namespace cptseg
