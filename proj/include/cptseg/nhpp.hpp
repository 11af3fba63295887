#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "cptseg/core.hpp"
#include "cptseg/rng.hpp"
#include "cptseg/types.hpp"

namespace cptseg {

/// Indices t with y_t above the threshold w.
struct ExceedanceSet {
    double threshold;
    std::vector<int> indices; // sorted, 1-based
};

/// Gamma(shape, rate) priors for the Weibull shape alpha and scale beta.
struct GammaHyperparams {
    double alpha_shape = 1.0;
    double alpha_rate = 1.0;
    double beta_shape = 1.0;
    double beta_rate = 1.0;

    void validate() const {
        if (!(alpha_shape > 0.0 && alpha_rate > 0.0 && beta_shape > 0.0 && beta_rate > 0.0))
            throw invalid_input("Gamma hyperparameters must be strictly positive");
    }
};

/// MAP parameters of one region.
struct NhppRegionParams {
    double alpha;
    double beta;
    double log_lik;
    double log_post;
};

struct NhppFitOptions {
    int restarts = 5;
    int max_iterations = 2000;
    double simplex_tolerance = 1e-8;
    std::uint64_t restart_seed = 20240819; // fixed: region fits are deterministic
};

/// z_w(y) = { t : y_t > w }; the threshold defaults to the series mean.
inline ExceedanceSet exceedances(const TimeSeries& x, std::optional<double> threshold = std::nullopt) {
    const double w = threshold.value_or(x.mean());
    ExceedanceSet z{w, {}};
    for (int t = 1; t <= x.n(); ++t)
        if (x.value(t) > w) z.indices.push_back(t);
    return z;
}

namespace nhpp_detail {

/// Weibull intensity on the global time axis: lambda(t) = (a/b)(t/b)^(a-1),
/// cumulative Lambda(t) = (t/b)^a.
inline double log_intensity(double alpha, double beta, double t) {
    return std::log(alpha) - alpha * std::log(beta) + (alpha - 1.0) * std::log(t);
}

inline double cumulative(double alpha, double beta, double t) {
    return std::exp(alpha * (std::log(t) - std::log(beta)));
}

/// Region log-likelihood over [s, e): event terms minus the exposure
/// Lambda(e) - Lambda(s).
inline double region_log_lik(double alpha, double beta, const std::vector<int>& events,
                             int begin, int end) {
    double ll = 0.0;
    for (int t : events) ll += log_intensity(alpha, beta, static_cast<double>(t));
    ll -= cumulative(alpha, beta, static_cast<double>(end)) -
          cumulative(alpha, beta, static_cast<double>(begin));
    return ll;
}

inline double gamma_log_density(double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

inline double region_log_prior(double alpha, double beta, const GammaHyperparams& hyper) {
    return gamma_log_density(alpha, hyper.alpha_shape, hyper.alpha_rate) +
           gamma_log_density(beta, hyper.beta_shape, hyper.beta_rate);
}

/// Derivative-free Nelder-Mead minimization, dimension 1 or 2.
/// Returns false when the simplex fails to contract below tol.
inline bool nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double>& x, double step, double tol, int max_iter) {
    const std::size_t d = x.size();
    std::vector<std::vector<double>> pts(d + 1, x);
    for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += step;
    std::vector<double> vals(d + 1);
    for (std::size_t i = 0; i <= d; ++i) vals[i] = f(pts[i]);

    auto diameter = [&]() {
        double dia = 0.0;
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                dia = std::max(dia, std::fabs(pts[i][k] - pts[0][k]));
        return dia;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        // order: pts[0] best, pts[d] worst
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t k = i + 1; k <= d; ++k)
                if (vals[k] < vals[i]) {
                    std::swap(vals[i], vals[k]);
                    std::swap(pts[i], pts[k]);
                }
        if (diameter() < tol) {
            x = pts[0];
            return true;
        }
        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k] / static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> p(d);
            for (std::size_t k = 0; k < d; ++k)
                p[k] = centroid[k] + coef * (pts[d][k] - centroid[k]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < vals[0]) {
            const auto expanded = blend(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                pts[d] = expanded;
                vals[d] = fe;
            } else {
                pts[d] = reflected;
                vals[d] = fr;
            }
        } else if (fr < vals[d - 1]) {
            pts[d] = reflected;
            vals[d] = fr;
        } else {
            const auto contracted = blend(fr < vals[d] ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, vals[d])) {
                pts[d] = contracted;
                vals[d] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t k = 0; k < d; ++k)
                        pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    return false;
}

} // namespace nhpp_detail

/// Region log-posterior (up to the evidence constant):
/// Weibull-NHPP log-likelihood plus Gamma log-priors.
inline double nhpp_region_log_posterior(double alpha, double beta, const std::vector<int>& events,
                                        int begin, int end, const GammaHyperparams& hyper) {
    return nhpp_detail::region_log_lik(alpha, beta, events, begin, end) +
           nhpp_detail::region_log_prior(alpha, beta, hyper);
}

/// MAP estimate for one region by simplex search in (ln alpha, ln beta),
/// restarted from jittered moment-based starts.  `fixed_alpha` restricts
/// the search to beta (used for the homogeneous special case).
inline NhppRegionParams nhpp_map_region(const std::vector<int>& events, int begin, int end,
                                        const GammaHyperparams& hyper,
                                        const NhppFitOptions& opts = {},
                                        std::optional<double> fixed_alpha = std::nullopt) {
    hyper.validate();
    const double span = static_cast<double>(end - begin);
    const int k = static_cast<int>(events.size());
    const double beta0 = span / std::max(k, 1);

    Rng rng(opts.restart_seed);
    bool converged = false;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;

    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> x;
        if (fixed_alpha) {
            x = {std::log(beta0)};
        } else {
            x = {0.0, std::log(beta0)}; // alpha start 1
        }
        if (r > 0)
            for (double& c : x) c += rng.uniform(-1.0, 1.0);

        auto objective = [&](const std::vector<double>& p) {
            const double alpha = fixed_alpha ? *fixed_alpha : std::exp(p[0]);
            const double beta = std::exp(fixed_alpha ? p[0] : p[1]);
            if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha <= 0.0 || beta <= 0.0)
                return std::numeric_limits<double>::infinity();
            const double lp = nhpp_region_log_posterior(alpha, beta, events, begin, end, hyper);
            return std::isfinite(lp) ? -lp : std::numeric_limits<double>::infinity();
        };

        if (nhpp_detail::nelder_mead(objective, x, 0.5, opts.simplex_tolerance,
                                     opts.max_iterations)) {
            converged = true;
            const double v = objective(x);
            if (v < best_obj) {
                best_obj = v;
                best_x = x;
            }
        }
    }
    if (!converged) throw algorithm_error("NHPP optimization failed");

    const double alpha = fixed_alpha ? *fixed_alpha : std::exp(best_x[0]);
    const double beta = std::exp(fixed_alpha ? best_x[0] : best_x[1]);
    const double ll = nhpp_detail::region_log_lik(alpha, beta, events, begin, end);
    const double lp = nhpp_detail::region_log_prior(alpha, beta, hyper);
    return {alpha, beta, ll, ll + lp};
}

/// Non-homogeneous Poisson process model on threshold exceedances:
/// per-region Weibull intensity fit by MAP under Gamma priors.
inline ModelFit fit_nhpp(const TimeSeries& x, const ChangepointSet& tau,
                         std::optional<double> threshold = std::nullopt,
                         const GammaHyperparams& hyper = {},
                         const NhppFitOptions& opts = {}) {
    if (tau.n() != x.n()) throw invalid_input("tau refers to a different series length");
    hyper.validate();
    const auto z = exceedances(x, threshold);
    const auto bounds = tau.boundaries();
    const int num_regions = tau.m() + 1;

    ModelFit fit{x, tau, {"param_alpha", "param_beta", "logPost", "logLik"}, {}, {},
                 std::vector<double>(static_cast<std::size_t>(x.n()), 0.0),
                 "nhpp", 2, 0, 0.0, 0.0};
    fit.model_params = {{"param_threshold", z.threshold}};

    double total_ll = 0.0, total_lp = 0.0;
    for (int j = 0; j < num_regions; ++j) {
        const int lo = bounds[static_cast<std::size_t>(j)], hi = bounds[static_cast<std::size_t>(j) + 1];
        std::vector<int> events;
        for (int t : z.indices)
            if (t >= lo && t < hi) events.push_back(t);
        const auto params = nhpp_map_region(events, lo, hi, hyper, opts);
        fit.region_params.push_back({params.alpha, params.beta, params.log_post, params.log_lik});
        total_ll += params.log_lik;
        total_lp += params.log_post - params.log_lik;
        for (int t = lo; t < hi; ++t)
            fit.fitted_values[static_cast<std::size_t>(t - 1)] =
                std::exp(nhpp_detail::log_intensity(params.alpha, params.beta, static_cast<double>(t)));
    }
    fit.log_lik = total_ll;
    fit.log_prior = total_lp;
    return fit;
}

/// Sum of region Gamma log-priors at the MAP; only defined for NHPP fits.
inline double log_prior(const ModelFit& fit) {
    if (!fit.log_prior.has_value()) throw invalid_input("log_prior requires an NHPP fit");
    return *fit.log_prior;
}

} // namespace cptseg
