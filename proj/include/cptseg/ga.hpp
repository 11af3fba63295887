#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cptseg/penalties.hpp"
#include "cptseg/rng.hpp"
#include "cptseg/search.hpp"
#include "cptseg/types.hpp"

namespace cptseg {

enum class SeedingStrategy { uniform_half, build_informed, log_informed };

inline std::string seeding_name(SeedingStrategy s) {
    switch (s) {
    case SeedingStrategy::uniform_half: return "uniform_half";
    case SeedingStrategy::build_informed: return "build_informed";
    case SeedingStrategy::log_informed: return "log_informed";
    }
    return "?";
}

inline SeedingStrategy parse_seeding(const std::string& id) {
    if (id == "uniform_half") return SeedingStrategy::uniform_half;
    if (id == "build_informed") return SeedingStrategy::build_informed;
    if (id == "log_informed") return SeedingStrategy::log_informed;
    throw invalid_input("unknown seeding strategy: " + id);
}

struct GaConfig {
    int pop_size = 50;
    int maxiter = 1000;
    int run = 100;            // stop after this many generations without improvement
    double crossover_prob = 0.8;
    double mutation_prob = 0.1; // applied per bit as mutation_prob / n
    int elitism = -1;           // -1: ceil(0.05 * pop_size)
    SeedingStrategy seeding = SeedingStrategy::log_informed;
    std::uint64_t rng_seed = 1;

    int effective_elitism() const {
        return elitism >= 0 ? elitism
                            : static_cast<int>(std::ceil(0.05 * pop_size));
    }

    void validate() const {
        if (pop_size < 2) throw invalid_input("pop_size must be >= 2");
        if (maxiter < 1) throw invalid_input("maxiter must be >= 1");
        if (run < 1 || run > maxiter) throw invalid_input("run must satisfy 1 <= run <= maxiter");
        if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 ||
            mutation_prob > 1.0)
            throw invalid_input("probabilities must lie in [0,1]");
        if (effective_elitism() > pop_size) throw invalid_input("elitism cannot exceed pop_size");
    }
};

/// Binary encoding of a changepoint set: bit t-1 set means t is a
/// changepoint.  Bit 0 (position 1) is always clear.
using Chromosome = std::vector<char>;

/// Decode a chromosome, repairing spacing violations by clearing the later
/// bit so every region has at least min_seg_len observations.
inline ChangepointSet decode_chromosome(const Chromosome& bits, int n, int min_seg_len) {
    std::vector<int> tau;
    int last = 1;
    for (int t = 2; t <= n; ++t) {
        if (bits[static_cast<std::size_t>(t - 1)] && t - last >= min_seg_len) {
            tau.push_back(t);
            last = t;
        }
    }
    while (!tau.empty() && n + 1 - tau.back() < min_seg_len) tau.pop_back();
    return ChangepointSet(tau, n);
}

/// Per-position inclusion probability for the informed seeding: three
/// times the average changepoint count of the fast pilot algorithms,
/// divided by n, capped at 1/2.
inline double informed_probability(const std::vector<int>& counts, int n) {
    double mean = 0.0;
    for (int c : counts) mean += c;
    mean /= static_cast<double>(counts.size());
    return std::min(0.5, 3.0 * mean / n);
}

struct SeedingPlan {
    double probability;
    bool fallback_warning = false; // build_informed pilots failed; used ln n / n
};

/// Resolve the per-bit probability for the initial population.
inline SeedingPlan seeding_plan(SeedingStrategy strategy, const TimeSeries& x,
                                std::uint64_t rng_seed) {
    const int n = x.n();
    switch (strategy) {
    case SeedingStrategy::uniform_half:
        return {0.5, false};
    case SeedingStrategy::log_informed:
        return {std::log(static_cast<double>(n)) / n, false};
    case SeedingStrategy::build_informed: {
        try {
            std::vector<int> counts;
            counts.push_back(pelt_tau(x, ModelSpec{ModelFamily::meanvar}, PenaltyId::MBIC).m());
            counts.push_back(
                binseg_tau(x, ModelSpec{ModelFamily::meanvar}, PenaltyId::MBIC, 5).m());
            WbsConfig wbs_cfg{std::min(1000, 5 * n), rng_seed};
            counts.push_back(wbs_tau(x, wbs_cfg).m());
            return {informed_probability(counts, n), false};
        } catch (const std::exception&) {
            return {std::log(static_cast<double>(n)) / n, true};
        }
    }
    }
    return {0.5, false};
}

/// Draw an initial population with the given per-bit probability.
inline std::vector<Chromosome> seed_population(double probability, int n, int pop_size, Rng& rng) {
    std::vector<Chromosome> pop;
    pop.reserve(static_cast<std::size_t>(pop_size));
    for (int i = 0; i < pop_size; ++i) {
        Chromosome bits(static_cast<std::size_t>(n), 0);
        for (int t = 2; t <= n; ++t)
            bits[static_cast<std::size_t>(t - 1)] = rng.bernoulli(probability) ? 1 : 0;
        pop.push_back(std::move(bits));
    }
    return pop;
}

struct GaRunInfo {
    ChangepointSet best_tau;
    double best_fitness; // -(penalized objective)
    std::vector<double> trace_best;
    std::vector<double> trace_mean;
    int generations = 0;
    bool seeding_fallback = false;
};

/// Genetic search over binary-encoded changepoint sets: linear-rank
/// selection, single-point crossover, per-bit mutation, elitism.  All
/// randomness is drawn on the sequential loop, so results depend only on
/// the inputs and rng_seed.
inline GaRunInfo ga_run(const TimeSeries& x, const ModelSpec& model, PenaltyId penalty,
                        const GaConfig& config, const NhppSettings& nhpp = {}) {
    config.validate();
    if (penalty == PenaltyId::BMDL && model.family != ModelFamily::nhpp)
        throw invalid_input("BMDL requires NHPP");
    const int n = x.n();
    const int min_len = model.min_segment_length();
    const double neg_inf = -std::numeric_limits<double>::infinity();

    Rng rng(config.rng_seed);
    const auto plan = seeding_plan(config.seeding, x, config.rng_seed);
    auto population = seed_population(plan.probability, n, config.pop_size, rng);

    // fitness cache keyed by the decoded changepoint set
    std::map<std::vector<int>, double> cache;
    auto evaluate = [&](const Chromosome& bits) {
        const auto cpts = decode_chromosome(bits, n, min_len);
        auto it = cache.find(cpts.tau());
        if (it != cache.end()) return it->second;
        double fit = neg_inf;
        try {
            fit = -penalty_value(penalty, fit_model(x, cpts, model, nhpp));
        } catch (const std::exception&) {
        }
        cache.emplace(cpts.tau(), fit);
        return fit;
    };

    std::vector<double> fitness(static_cast<std::size_t>(config.pop_size), neg_inf);
    for (int i = 0; i < config.pop_size; ++i)
        fitness[static_cast<std::size_t>(i)] = evaluate(population[static_cast<std::size_t>(i)]);

    GaRunInfo info{ChangepointSet::empty(n), neg_inf, {}, {}, 0, plan.fallback_warning};
    Chromosome best_bits(static_cast<std::size_t>(n), 0);
    int stall = 0;

    auto record_generation = [&]() {
        double gen_best = neg_inf;
        int gen_best_idx = -1;
        double mean_sum = 0.0;
        int mean_count = 0;
        for (int i = 0; i < config.pop_size; ++i) {
            const double f = fitness[static_cast<std::size_t>(i)];
            if (f > gen_best) {
                gen_best = f;
                gen_best_idx = i;
            }
            if (std::isfinite(f)) {
                mean_sum += f;
                ++mean_count;
            }
        }
        if (gen_best > info.best_fitness) {
            info.best_fitness = gen_best;
            best_bits = population[static_cast<std::size_t>(gen_best_idx)];
            stall = 0;
        } else {
            ++stall;
        }
        info.trace_best.push_back(info.best_fitness);
        info.trace_mean.push_back(mean_count > 0 ? mean_sum / mean_count : neg_inf);
        ++info.generations;
    };

    record_generation();

    // cumulative linear-rank selection weights: rank r (1 = worst) gets
    // probability 2r / (N(N+1))
    std::vector<int> order(static_cast<std::size_t>(config.pop_size));
    std::vector<double> cumulative(static_cast<std::size_t>(config.pop_size));
    auto select_parent = [&]() {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t pos = std::min(static_cast<std::size_t>(it - cumulative.begin()),
                                         cumulative.size() - 1);
        return order[pos];
    };

    while (info.generations < config.maxiter && stall < config.run) {
        for (int i = 0; i < config.pop_size; ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fitness[static_cast<std::size_t>(a)] < fitness[static_cast<std::size_t>(b)];
        });
        const double total = 0.5 * config.pop_size * (config.pop_size + 1);
        double acc = 0.0;
        for (int r = 0; r < config.pop_size; ++r) {
            acc += static_cast<double>(r + 1) / total;
            cumulative[static_cast<std::size_t>(r)] = acc;
        }

        std::vector<Chromosome> next;
        next.reserve(static_cast<std::size_t>(config.pop_size));
        std::set<Chromosome> members;
        const int elite = std::min(config.effective_elitism(), config.pop_size);
        // elites are the best distinct chromosomes, so several good
        // structures stay alive instead of clones of one
        for (int i = config.pop_size - 1;
             i >= 0 && static_cast<int>(next.size()) < elite; --i) {
            const auto& candidate =
                population[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            if (members.insert(candidate).second) next.push_back(candidate);
        }

        const double per_bit = config.mutation_prob / n;
        auto mutate = [&](Chromosome& child) {
            for (int k = 1; k < n; ++k)
                if (rng.bernoulli(per_bit)) child[static_cast<std::size_t>(k)] ^= 1;
            child[0] = 0;
        };
        while (static_cast<int>(next.size()) < config.pop_size) {
            Chromosome child_a = population[static_cast<std::size_t>(select_parent())];
            Chromosome child_b = population[static_cast<std::size_t>(select_parent())];
            if (rng.bernoulli(config.crossover_prob)) {
                const int cut = rng.uniform_int(1, n - 1);
                for (int k = cut; k < n; ++k)
                    std::swap(child_a[static_cast<std::size_t>(k)], child_b[static_cast<std::size_t>(k)]);
            }
            for (Chromosome* child : {&child_a, &child_b}) {
                mutate(*child);
                // a duplicate of a member already in this generation gets
                // one extra mutation pass so a converged population keeps
                // a trickle of exploration
                if (members.count(*child)) mutate(*child);
                if (static_cast<int>(next.size()) < config.pop_size) {
                    next.push_back(*child);
                    members.insert(*child);
                }
            }
        }
        population.swap(next);
        for (int i = 0; i < config.pop_size; ++i)
            fitness[static_cast<std::size_t>(i)] = evaluate(population[static_cast<std::size_t>(i)]);
        record_generation();
    }

    if (!std::isfinite(info.best_fitness))
        throw algorithm_error("genetic search found no feasible changepoint set");
    info.best_tau = decode_chromosome(best_bits, n, min_len);
    return info;
}

} // namespace cptseg
