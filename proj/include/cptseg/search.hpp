#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "cptseg/models.hpp"
#include "cptseg/nhpp.hpp"
#include "cptseg/penalties.hpp"
#include "cptseg/rng.hpp"
#include "cptseg/types.hpp"

namespace cptseg {

/// Threshold and priors forwarded to fit_nhpp by the generic fitting path.
struct NhppSettings {
    std::optional<double> threshold;
    GammaHyperparams hyper;
    NhppFitOptions opts;
};

/// Fit any catalog model at a fixed changepoint set.
inline ModelFit fit_model(const TimeSeries& x, const ChangepointSet& tau, const ModelSpec& spec,
                          const NhppSettings& nhpp = {}) {
    switch (spec.family) {
    case ModelFamily::meanshift:
        return fit_meanshift(x, tau, spec.distribution, spec.ar1);
    case ModelFamily::lmshift:
        return fit_lmshift(x, tau, spec.degree, spec.ar1);
    case ModelFamily::meanvar:
        return fit_meanvar(x, tau);
    case ModelFamily::nhpp:
        return fit_nhpp(x, tau, nhpp.threshold, nhpp.hyper, nhpp.opts);
    }
    throw invalid_input("unknown model family");
}

namespace search_detail {

constexpr double inf = std::numeric_limits<double>::infinity();

/// Candidate ordering shared by every search: lower objective wins; ties
/// prefer fewer changepoints, then the lexicographically smaller tau.
inline bool better(double value_a, const std::vector<int>& tau_a, double value_b,
                   const std::vector<int>& tau_b) {
    if (value_a != value_b) return value_a < value_b;
    if (tau_a.size() != tau_b.size()) return tau_a.size() < tau_b.size();
    return tau_a < tau_b;
}

struct PrefixSums {
    std::vector<double> sum, sum_sq;

    explicit PrefixSums(const TimeSeries& x) : sum(1, 0.0), sum_sq(1, 0.0) {
        sum.reserve(static_cast<std::size_t>(x.n()) + 1);
        sum_sq.reserve(static_cast<std::size_t>(x.n()) + 1);
        for (double v : x.values()) {
            sum.push_back(sum.back() + v);
            sum_sq.push_back(sum_sq.back() + v * v);
        }
    }

    /// Residual sum of squares of observations s+1..t around their mean.
    double sse(int s, int t) const {
        const double len = static_cast<double>(t - s);
        const double seg_sum = sum[static_cast<std::size_t>(t)] - sum[static_cast<std::size_t>(s)];
        const double seg_sq = sum_sq[static_cast<std::size_t>(t)] - sum_sq[static_cast<std::size_t>(s)];
        return std::max(0.0, seg_sq - seg_sum * seg_sum / len);
    }
};

/// Positions {p_1 < ... < p_m} (0-based segment ends) to 1-based tau.
inline std::vector<int> positions_to_tau(std::vector<int> positions) {
    for (int& p : positions) p += 1;
    return positions;
}

} // namespace search_detail

// ---------------------------------------------------------------------------
// Exact search (brute-force oracle)
// ---------------------------------------------------------------------------

/// Global minimizer of the penalized objective over every changepoint set
/// with m <= max_m and region lengths >= min_seg_len.  Candidates whose fit
/// errors (degenerate variance, short regions) are excluded.  Guarded to
/// n <= 20; intended as the correctness oracle for the fast searches.
inline ChangepointSet exact_search_tau(const TimeSeries& x, const ModelSpec& model,
                                       PenaltyId penalty, int max_m, int min_seg_len,
                                       const NhppSettings& nhpp = {}) {
    const int n = x.n();
    if (n > 20) throw algorithm_error("exact search too large");
    if (max_m < 0) max_m = n - 1;

    double best_value = search_detail::inf;
    std::vector<int> best_tau;
    bool found = false;

    const std::uint32_t masks = 1u << (n - 1);
    std::vector<int> tau;
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        if (std::popcount(mask) > max_m) continue;
        tau.clear();
        int last = 1;
        bool valid = true;
        for (int t = 2; t <= n && valid; ++t) {
            if (mask & (1u << (t - 2))) {
                if (t - last < min_seg_len) valid = false;
                tau.push_back(t);
                last = t;
            }
        }
        if (!valid || n + 1 - last < min_seg_len) continue;
        try {
            const ChangepointSet cpts(tau, n);
            const double value = penalty_value(penalty, fit_model(x, cpts, model, nhpp));
            if (!found || search_detail::better(value, tau, best_value, best_tau)) {
                best_value = value;
                best_tau = tau;
                found = true;
            }
        } catch (const std::exception&) {
            // infeasible candidate
        }
    }
    if (!found) throw algorithm_error("exact search found no feasible changepoint set");
    return ChangepointSet(best_tau, n);
}

// ---------------------------------------------------------------------------
// PELT
// ---------------------------------------------------------------------------

namespace search_detail {

/// Segment cost for the meanvar model: -2 x (sum of per-region normal
/// log-densities at the region mean and sample variance), which is
/// segment-additive.  Returns +inf for infeasible segments.
inline double meanvar_cost(const PrefixSums& ps, int s, int t) {
    const int len = t - s;
    if (len < 2) return inf;
    const double sse = ps.sse(s, t);
    const double seg_sq = ps.sum_sq[static_cast<std::size_t>(t)] - ps.sum_sq[static_cast<std::size_t>(s)];
    if (detail::negligible_sse(sse, seg_sq)) return inf;
    const double var = sse / (len - 1);
    return len * (std::log(var) + detail::ln_2pi) + (len - 1);
}

/// PELT over a segment-additive cost.  `K` is the pruning slack: pruning
/// stays exact when cost(s,u] + cost(u,t] + K <= cost(s,t] for all splits
/// into valid segments.
///
/// With a minimum segment length L, a candidate pruned at time t is only
/// dominated for futures T >= t + L (the dominating route needs the valid
/// segment (t, T]), so pruned candidates stay usable for L-1 more steps.
inline std::vector<int> pelt_additive(int n, int min_len, double beta, double pruning_slack,
                                      const std::function<double(int, int)>& cost) {
    constexpr int never = std::numeric_limits<int>::max();
    struct Candidate {
        int pos;
        int pruned_at;
    };

    std::vector<double> f(static_cast<std::size_t>(n) + 1, inf);
    std::vector<int> prev(static_cast<std::size_t>(n) + 1, 0);
    f[0] = -beta;
    std::vector<Candidate> candidates{{0, never}};

    for (int t = min_len; t <= n; ++t) {
        std::erase_if(candidates, [&](const Candidate& c) {
            return c.pruned_at != never && t - c.pruned_at >= min_len;
        });
        double best = inf;
        int best_s = -1;
        for (const auto& cand : candidates) {
            const int s = cand.pos;
            if (t - s < min_len) continue;
            const double c = cost(s, t);
            if (!std::isfinite(c)) continue;
            const double total = f[static_cast<std::size_t>(s)] + c + beta;
            if (total < best) {
                best = total;
                best_s = s;
            }
        }
        if (best_s >= 0) {
            f[static_cast<std::size_t>(t)] = best;
            prev[static_cast<std::size_t>(t)] = best_s;
        }
        if (std::isfinite(f[static_cast<std::size_t>(t)])) {
            for (auto& cand : candidates) {
                const int s = cand.pos;
                if (cand.pruned_at != never || t - s < min_len) continue;
                const double c = cost(s, t);
                // infeasible segments give no bound; the candidate stays
                if (!std::isfinite(c) || !std::isfinite(f[static_cast<std::size_t>(s)])) continue;
                if (f[static_cast<std::size_t>(s)] + c + pruning_slack >
                    f[static_cast<std::size_t>(t)])
                    cand.pruned_at = t;
            }
        }
        candidates.push_back({t, never});
    }
    if (!std::isfinite(f[static_cast<std::size_t>(n)]))
        throw algorithm_error("degenerate variance");

    std::vector<int> positions;
    for (int t = n; t > 0; t = prev[static_cast<std::size_t>(t)]) {
        if (prev[static_cast<std::size_t>(t)] == 0) break;
        positions.push_back(prev[static_cast<std::size_t>(t)]);
    }
    std::reverse(positions.begin(), positions.end());
    return positions_to_tau(std::move(positions));
}

/// Optimal-partition table for the meanshift model: dp[k][t] holds the
/// minimum pooled SSE of splitting the first t observations into k
/// segments.  Used to minimize objectives that depend on tau only through
/// (m, total SSE).
struct MeanshiftSseTable {
    std::vector<std::vector<double>> dp;
    std::vector<std::vector<int>> parent;

    MeanshiftSseTable(const PrefixSums& ps, int n, int min_len) {
        const int max_segments = n / min_len;
        dp.assign(static_cast<std::size_t>(max_segments) + 1,
                  std::vector<double>(static_cast<std::size_t>(n) + 1, inf));
        parent.assign(static_cast<std::size_t>(max_segments) + 1,
                      std::vector<int>(static_cast<std::size_t>(n) + 1, -1));
        for (int t = min_len; t <= n; ++t) dp[1][static_cast<std::size_t>(t)] = ps.sse(0, t);
        for (int k = 2; k <= max_segments; ++k) {
            for (int t = k * min_len; t <= n; ++t) {
                double best = inf;
                int best_s = -1;
                for (int s = (k - 1) * min_len; s <= t - min_len; ++s) {
                    const double v = dp[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(s)];
                    if (!std::isfinite(v)) continue;
                    const double total = v + ps.sse(s, t);
                    if (total < best) {
                        best = total;
                        best_s = s;
                    }
                }
                dp[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = best;
                parent[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = best_s;
            }
        }
    }

    std::vector<int> reconstruct(int k, int n) const {
        std::vector<int> positions;
        int t = n;
        for (int level = k; level > 1; --level) {
            const int s = parent[static_cast<std::size_t>(level)][static_cast<std::size_t>(t)];
            positions.push_back(s);
            t = s;
        }
        std::reverse(positions.begin(), positions.end());
        return positions_to_tau(std::move(positions));
    }
};

/// Bi-criteria extension for meanshift + MBIC, where the objective mixes
/// the total SSE with the per-segment sum of ln(ell).  Each DP state keeps
/// the Pareto frontier over (sum ln ell, SSE); fronts stay small on real
/// data because SSE improvements usually accompany longer segments.
struct ParetoPoint {
    double sum_log_len;
    double sse;
    int parent_pos;
    int parent_idx;
};

struct MeanshiftParetoTable {
    // frontier[k][t]: nondominated (sum ln ell, SSE) over k-segment splits
    std::vector<std::vector<std::vector<ParetoPoint>>> frontier;

    MeanshiftParetoTable(const PrefixSums& ps, int n, int min_len) {
        const int max_segments = n / min_len;
        frontier.assign(static_cast<std::size_t>(max_segments) + 1,
                        std::vector<std::vector<ParetoPoint>>(static_cast<std::size_t>(n) + 1));
        for (int t = min_len; t <= n; ++t)
            frontier[1][static_cast<std::size_t>(t)] = {
                {std::log(static_cast<double>(t)), ps.sse(0, t), 0, -1}};
        std::vector<ParetoPoint> merged;
        for (int k = 2; k <= max_segments; ++k) {
            for (int t = k * min_len; t <= n; ++t) {
                merged.clear();
                for (int s = (k - 1) * min_len; s <= t - min_len; ++s) {
                    const auto& prev = frontier[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(s)];
                    const double log_len = std::log(static_cast<double>(t - s));
                    const double seg_sse = ps.sse(s, t);
                    for (int i = 0; i < static_cast<int>(prev.size()); ++i)
                        merged.push_back({prev[static_cast<std::size_t>(i)].sum_log_len + log_len,
                                          prev[static_cast<std::size_t>(i)].sse + seg_sse, s, i});
                }
                frontier[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = prune(merged);
            }
        }
    }

    static std::vector<ParetoPoint> prune(std::vector<ParetoPoint>& pts) {
        std::sort(pts.begin(), pts.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
            if (a.sse != b.sse) return a.sse < b.sse;
            return a.sum_log_len < b.sum_log_len;
        });
        std::vector<ParetoPoint> kept;
        double best_log = inf;
        for (const auto& p : pts) {
            if (p.sum_log_len < best_log) {
                kept.push_back(p);
                best_log = p.sum_log_len;
            }
        }
        return kept;
    }

    std::vector<int> reconstruct(int k, int idx, int n) const {
        std::vector<int> positions;
        int t = n, i = idx;
        for (int level = k; level > 1; --level) {
            const auto& p = frontier[static_cast<std::size_t>(level)][static_cast<std::size_t>(t)]
                                    [static_cast<std::size_t>(i)];
            positions.push_back(p.parent_pos);
            t = p.parent_pos;
            i = p.parent_idx;
        }
        std::reverse(positions.begin(), positions.end());
        return positions_to_tau(std::move(positions));
    }
};

} // namespace search_detail

/// Exact minimizer of the penalized objective for the meanshift-normal and
/// meanvar models under a segment-additive penalty.
///
/// meanvar costs decompose per segment, so the classic pruned DP applies
/// directly (with a conservative slack: the sample-variance likelihood is
/// not exactly superadditive).  The meanshift likelihood couples segments
/// through the pooled variance, so it is minimized exactly per candidate m
/// via optimal-partition tables instead, then the best m is selected.
inline ChangepointSet pelt_tau(const TimeSeries& x, const ModelSpec& model, PenaltyId penalty,
                               std::optional<int> min_seg_len = std::nullopt) {
    if (model.family != ModelFamily::meanvar &&
        !(model.family == ModelFamily::meanshift &&
          model.distribution == Distribution::normal && !model.ar1))
        throw invalid_input("pelt supports the meanshift_norm and meanvar models");
    const int n = x.n();
    const int min_len = min_seg_len.value_or(model.min_segment_length());
    if (min_len < model.min_segment_length())
        throw invalid_input("min_seg_len below the model's minimum");
    if (n < 2 * min_len) throw invalid_input("series too short for two segments");

    const auto decomp = pelt_decomposition(penalty, model, n);
    const search_detail::PrefixSums ps(x);

    auto objective = [&](const std::vector<int>& tau) {
        return penalty_value(penalty, fit_model(x, ChangepointSet(tau, n), model));
    };

    std::vector<int> best_tau; // null model

    if (model.family == ModelFamily::meanvar) {
        auto cost = [&](int s, int t) {
            return search_detail::meanvar_cost(ps, s, t) + decomp.segment_extra(t - s);
        };
        // slack -1.0 covers the worst-case subadditivity gap of the
        // sample-variance cost (bounded by 4x the length-2 term, ~0.77)
        std::vector<int> dp_tau =
            search_detail::pelt_additive(n, min_len, decomp.per_changepoint, -1.0, cost);
        if (!dp_tau.empty()) {
            double null_value = search_detail::inf;
            try {
                null_value = objective({});
            } catch (const std::exception&) {
            }
            const double dp_value = objective(dp_tau);
            if (search_detail::better(dp_value, dp_tau, null_value, {})) best_tau = dp_tau;
        }
        return ChangepointSet(best_tau, n);
    }

    // meanshift: objective = P(m) [+ sum ln(ell/n) for MBIC] + n ln(SSE/n) + n(1 + ln 2pi)
    const double const_term = n * (1.0 + detail::ln_2pi);
    const double total_sum_sq = ps.sum_sq.back();
    auto value_for = [&](int m, double sse, double sum_log_len) {
        if (detail::negligible_sse(sse, total_sum_sq)) return search_detail::inf;
        double v = n * std::log(sse / n) + const_term;
        if (m > 0) {
            v += decomp.constant + decomp.per_changepoint * m;
            if (decomp.mbic_segment_term) v += sum_log_len - (m + 1) * std::log(static_cast<double>(n));
        }
        return v;
    };

    double best_value = search_detail::inf;
    bool found = false;

    if (!decomp.mbic_segment_term) {
        const search_detail::MeanshiftSseTable table(ps, n, min_len);
        const int max_segments = n / min_len;
        for (int k = 1; k <= max_segments; ++k) {
            const double sse = table.dp[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
            if (!std::isfinite(sse)) continue;
            const double v = value_for(k - 1, sse, 0.0);
            if (!std::isfinite(v)) continue;
            std::vector<int> tau = table.reconstruct(k, n);
            if (!found || search_detail::better(v, tau, best_value, best_tau)) {
                best_value = v;
                best_tau = std::move(tau);
                found = true;
            }
        }
    } else {
        const search_detail::MeanshiftParetoTable table(ps, n, min_len);
        const int max_segments = n / min_len;
        for (int k = 1; k <= max_segments; ++k) {
            const auto& front = table.frontier[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
            for (int i = 0; i < static_cast<int>(front.size()); ++i) {
                const auto& p = front[static_cast<std::size_t>(i)];
                const double v = value_for(k - 1, p.sse, p.sum_log_len);
                if (!std::isfinite(v)) continue;
                std::vector<int> tau = table.reconstruct(k, i, n);
                if (!found || search_detail::better(v, tau, best_value, best_tau)) {
                    best_value = v;
                    best_tau = std::move(tau);
                    found = true;
                }
            }
        }
    }
    if (!found) throw algorithm_error("degenerate variance");
    return ChangepointSet(best_tau, n);
}

// ---------------------------------------------------------------------------
// Binary segmentation
// ---------------------------------------------------------------------------

/// Greedy recursive splitting: each step adds the single changepoint that
/// most decreases the penalized objective (full model refit per candidate);
/// stops when no split decreases it or when max_cpts is reached.
inline ChangepointSet binseg_tau(const TimeSeries& x, const ModelSpec& model, PenaltyId penalty,
                                 int max_cpts, std::optional<int> min_seg_len = std::nullopt,
                                 const NhppSettings& nhpp = {}) {
    if (max_cpts < 0) throw invalid_input("max_cpts must be nonnegative");
    const int n = x.n();
    const int min_len = min_seg_len.value_or(model.min_segment_length());

    std::vector<int> current;
    double current_value = search_detail::inf;
    try {
        current_value = penalty_value(penalty, fit_model(x, ChangepointSet::empty(n), model, nhpp));
    } catch (const std::exception&) {
    }

    while (static_cast<int>(current.size()) < max_cpts) {
        double best_value = current_value;
        int best_t = -1;
        for (int t = 2; t <= n; ++t) {
            if (std::find(current.begin(), current.end(), t) != current.end()) continue;
            std::vector<int> tau = current;
            tau.insert(std::upper_bound(tau.begin(), tau.end(), t), t);
            bool spaced = true;
            int last = 1;
            for (int v : tau) {
                if (v - last < min_len) {
                    spaced = false;
                    break;
                }
                last = v;
            }
            if (!spaced || n + 1 - last < min_len) continue;
            try {
                const double v = penalty_value(penalty, fit_model(x, ChangepointSet(tau, n), model, nhpp));
                if (v < best_value) {
                    best_value = v;
                    best_t = t;
                }
            } catch (const std::exception&) {
            }
        }
        if (best_t < 0) break;
        current.insert(std::upper_bound(current.begin(), current.end(), best_t), best_t);
        current_value = best_value;
    }
    return ChangepointSet(current, n);
}

// ---------------------------------------------------------------------------
// Wild binary segmentation
// ---------------------------------------------------------------------------

struct WbsConfig {
    int num_intervals = 5000;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (num_intervals < 1) throw invalid_input("num_intervals must be >= 1");
    }
};

/// CUSUM-ranked candidates from random sub-intervals; the returned set is
/// the prefix (in decreasing |CUSUM| order, skipping spacing conflicts)
/// that minimizes the MBIC-penalized meanshift objective.
inline ChangepointSet wbs_tau(const TimeSeries& x, const WbsConfig& config,
                              int min_seg_len = 2) {
    config.validate();
    const int n = x.n();
    if (n < 4) throw invalid_input("wbs requires n >= 4");
    const search_detail::PrefixSums ps(x);
    Rng rng(config.rng_seed);

    // position b (1-based, split after b) -> max |CUSUM| seen
    std::map<int, double> candidate_score;
    auto scan_interval = [&](int s, int e) {
        const double len = static_cast<double>(e - s + 1);
        const double total = ps.sum[static_cast<std::size_t>(e)] - ps.sum[static_cast<std::size_t>(s - 1)];
        for (int b = s; b < e; ++b) {
            const double n1 = static_cast<double>(b - s + 1);
            const double n2 = static_cast<double>(e - b);
            const double left = ps.sum[static_cast<std::size_t>(b)] - ps.sum[static_cast<std::size_t>(s - 1)];
            const double right = total - left;
            const double c = std::sqrt(n2 / (len * n1)) * left - std::sqrt(n1 / (len * n2)) * right;
            const double score = std::fabs(c);
            auto [it, inserted] = candidate_score.try_emplace(b + 1, score);
            if (!inserted && score > it->second) it->second = score;
        }
    };

    scan_interval(1, n);
    for (int i = 0; i < config.num_intervals; ++i) {
        const int a = rng.uniform_int(1, n);
        const int b = rng.uniform_int(1, n);
        if (a == b) continue;
        scan_interval(std::min(a, b), std::max(a, b));
    }

    std::vector<std::pair<int, double>> ranked(candidate_score.begin(), candidate_score.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    auto objective = [&](const std::vector<int>& tau) {
        try {
            return penalty_value(PenaltyId::MBIC,
                                 fit_meanshift(x, ChangepointSet(tau, n), Distribution::normal));
        } catch (const std::exception&) {
            return search_detail::inf;
        }
    };

    std::vector<int> selected;
    std::vector<int> best_tau;
    double best_value = objective({});
    for (const auto& [t, score] : ranked) {
        bool spaced = t - 1 >= min_seg_len && n + 1 - t >= min_seg_len;
        for (int v : selected) {
            if (std::abs(v - t) < min_seg_len) {
                spaced = false;
                break;
            }
        }
        if (!spaced) continue;
        selected.insert(std::upper_bound(selected.begin(), selected.end(), t), t);
        const double v = objective(selected);
        if (v < best_value) {
            best_value = v;
            best_tau = selected;
        }
    }
    return ChangepointSet(best_tau, n);
}

} // namespace cptseg
