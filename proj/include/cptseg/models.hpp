#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cptseg/core.hpp"
#include "cptseg/types.hpp"

namespace cptseg {

enum class ModelFamily { meanshift, lmshift, meanvar, nhpp };
enum class Distribution { normal, lognormal, poisson };

/// Which parametric segment model to fit.  `degree` applies to lmshift
/// (trendshift is degree 1); `ar1` adds AR(1) lagged errors and is valid
/// for meanshift-normal and lmshift.
struct ModelSpec {
    ModelFamily family = ModelFamily::meanshift;
    Distribution distribution = Distribution::normal;
    int degree = 1;
    bool ar1 = false;

    std::string name() const {
        switch (family) {
        case ModelFamily::meanshift:
            switch (distribution) {
            case Distribution::normal: return ar1 ? "meanshift_norm_ar1" : "meanshift_norm";
            case Distribution::lognormal: return "meanshift_lnorm";
            case Distribution::poisson: return "meanshift_pois";
            }
            break;
        case ModelFamily::lmshift:
            if (degree == 1) return ar1 ? "trendshift_ar1" : "trendshift";
            return ar1 ? "lmshift_ar1" : "lmshift";
        case ModelFamily::meanvar: return "meanvar";
        case ModelFamily::nhpp: return "nhpp";
        }
        return "unknown";
    }

    static ModelSpec parse(const std::string& id) {
        if (id == "meanshift_norm") return {ModelFamily::meanshift, Distribution::normal, 1, false};
        if (id == "meanshift_norm_ar1") return {ModelFamily::meanshift, Distribution::normal, 1, true};
        if (id == "meanshift_lnorm") return {ModelFamily::meanshift, Distribution::lognormal, 1, false};
        if (id == "meanshift_pois") return {ModelFamily::meanshift, Distribution::poisson, 1, false};
        if (id == "trendshift") return {ModelFamily::lmshift, Distribution::normal, 1, false};
        if (id == "trendshift_ar1") return {ModelFamily::lmshift, Distribution::normal, 1, true};
        if (id == "lmshift") return {ModelFamily::lmshift, Distribution::normal, 2, false};
        if (id == "lmshift_ar1") return {ModelFamily::lmshift, Distribution::normal, 2, true};
        if (id == "meanvar") return {ModelFamily::meanvar, Distribution::normal, 1, false};
        if (id == "nhpp") return {ModelFamily::nhpp, Distribution::normal, 1, false};
        throw invalid_input("unknown model identifier: " + id);
    }

    /// Shortest region an algorithm may propose for this model.  Models
    /// with a fitted Gaussian variance need length-2 regions to keep the
    /// profiled likelihood away from zero-variance blowups; count-based
    /// models tolerate singletons.  Polynomial fits additionally need
    /// degree+1 points per region.
    int min_segment_length() const {
        switch (family) {
        case ModelFamily::meanshift:
            return distribution == Distribution::poisson ? 1 : 2;
        case ModelFamily::lmshift: return std::max(2, degree + 1);
        case ModelFamily::meanvar: return 2;
        case ModelFamily::nhpp: return 1;
        }
        return 1;
    }
};

namespace detail {

inline constexpr double ln_2pi = 1.8378770664093453; // ln(2*pi)

/// A residual sum of squares at rounding-noise scale relative to the data
/// is an exact fit; the Gaussian likelihood is unbounded there.
inline bool negligible_sse(double sse, double sum_sq) {
    return !(sse > 1e-20 * std::max(sum_sq, 1e-300));
}

/// Maximized Gaussian log-likelihood with pooled variance:
/// -n/2 (ln sigma_hat^2 + 1 + ln 2pi).
inline double gaussian_pooled_loglik(int n, double sigma_hat_sq) {
    return -0.5 * n * (std::log(sigma_hat_sq) + 1.0 + ln_2pi);
}

/// AR(1) Gaussian log-likelihood of a residual series at a given phi:
/// n-1 decorrelated innovation terms plus the stationary first-observation
/// term, with the innovation variance profiled out by its MLE.
inline double ar1_loglik(const std::vector<double>& resid, double phi) {
    const int n = static_cast<int>(resid.size());
    if (n < 2) throw invalid_input("AR(1) likelihood needs n >= 2");
    if (!(std::fabs(phi) < 1.0)) throw algorithm_error("degenerate autocorrelation: |phi| >= 1");
    double ss = (1.0 - phi * phi) * resid[0] * resid[0];
    for (int t = 1; t < n; ++t) {
        const double u = resid[static_cast<std::size_t>(t)] - phi * resid[static_cast<std::size_t>(t - 1)];
        ss += u * u;
    }
    const double sigma_sq = ss / n;
    if (!(sigma_sq > 0.0)) throw algorithm_error("degenerate variance");
    return gaussian_pooled_loglik(n, sigma_sq) + 0.5 * std::log(1.0 - phi * phi);
}

/// Lag-1 sample autocorrelation of a residual series.
inline double lag1_autocorrelation(const std::vector<double>& resid) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < resid.size(); ++t) {
        den += resid[t] * resid[t];
        if (t > 0) num += resid[t] * resid[t - 1];
    }
    if (!(den > 0.0)) throw algorithm_error("degenerate variance");
    return num / den;
}

struct Ar1Result {
    double phi;
    double log_lik;
};

inline Ar1Result estimate_ar1(const std::vector<double>& resid) {
    double phi = lag1_autocorrelation(resid);
    // |phi| < 1 up to ties; clamp the boundary away to keep the
    // stationary term finite.
    const double cap = 1.0 - 1e-12;
    if (phi > cap) phi = cap;
    if (phi < -cap) phi = -cap;
    return {phi, ar1_loglik(resid, phi)};
}

/// Least-squares polynomial coefficients of degree p for points
/// (0, y_0), (1, y_1), ..., solved by Gaussian elimination on the normal
/// equations (p is small).
inline std::vector<double> polyfit(const std::vector<double>& y, int degree) {
    const int k = degree + 1;
    const int len = static_cast<int>(y.size());
    std::vector<std::vector<double>> a(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k + 1), 0.0));
    // power sums S_r = sum t^r and moment sums sum t^r y_t
    std::vector<double> power_sums(static_cast<std::size_t>(2 * degree + 1), 0.0);
    std::vector<double> moments(static_cast<std::size_t>(k), 0.0);
    for (int t = 0; t < len; ++t) {
        double tp = 1.0;
        for (int r = 0; r <= 2 * degree; ++r) {
            power_sums[static_cast<std::size_t>(r)] += tp;
            if (r < k) moments[static_cast<std::size_t>(r)] += tp * y[static_cast<std::size_t>(t)];
            tp *= t;
        }
    }
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j)
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                power_sums[static_cast<std::size_t>(i + j)];
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = moments[static_cast<std::size_t>(i)];
    }
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r)
            if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::fabs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
                pivot = r;
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
        if (std::fabs(a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)]) < 1e-300)
            throw algorithm_error("underdetermined region");
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                             a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int c = col; c <= k; ++c)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
        }
    }
    std::vector<double> beta(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        beta[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] /
                                            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    return beta;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Model fits
// ---------------------------------------------------------------------------

/// Region-wise constant mean with a pooled variance (normal / lognormal)
/// or region rate (poisson), optionally with AR(1) errors (normal only).
inline ModelFit fit_meanshift(const TimeSeries& x, const ChangepointSet& tau,
                              Distribution distribution = Distribution::normal,
                              bool ar1 = false) {
    if (tau.n() != x.n()) throw invalid_input("tau refers to a different series length");
    if (ar1 && distribution != Distribution::normal)
        throw invalid_input("AR(1) errors require the normal meanshift model");
    const int n = x.n();

    std::vector<double> work(x.values());
    if (distribution == Distribution::lognormal) {
        for (double& v : work) {
            if (!(v > 0.0)) throw invalid_input("lognormal meanshift requires y > 0");
            v = std::log(v);
        }
    } else if (distribution == Distribution::poisson) {
        for (double v : work) {
            if (v < 0.0 || std::fabs(v - std::round(v)) > 1e-9)
                throw invalid_input("poisson meanshift requires nonnegative integer y");
        }
    }

    const auto bounds = tau.boundaries();
    const int num_regions = tau.m() + 1;
    std::vector<double> mu(static_cast<std::size_t>(num_regions), 0.0);
    std::vector<double> fitted_work(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < num_regions; ++j) {
        const int lo = bounds[static_cast<std::size_t>(j)], hi = bounds[static_cast<std::size_t>(j) + 1];
        double s = 0.0;
        for (int i = lo; i < hi; ++i) s += work[static_cast<std::size_t>(i - 1)];
        mu[static_cast<std::size_t>(j)] = s / (hi - lo);
        for (int i = lo; i < hi; ++i) fitted_work[static_cast<std::size_t>(i - 1)] = mu[static_cast<std::size_t>(j)];
    }

    ModelFit fit{x, tau, {"param_mu"}, {}, {}, {}, "", 1, 0, 0.0, std::nullopt};
    for (double m : mu) fit.region_params.push_back({m});

    if (distribution == Distribution::poisson) {
        double ll = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double y = std::round(x.value(i));
            const double lambda = fitted_work[static_cast<std::size_t>(i - 1)];
            if (lambda > 0.0) ll += y * std::log(lambda) - lambda;
            // lambda == 0 forces y == 0 in the region: the pmf is 1, term 0.
            ll -= std::lgamma(y + 1.0);
        }
        fit.fitted_values = fitted_work;
        fit.model_name = "meanshift_pois";
        fit.num_model_params = 0;
        fit.log_lik = ll;
        return fit;
    }

    std::vector<double> resid(static_cast<std::size_t>(n));
    double sse = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        resid[static_cast<std::size_t>(i)] = work[static_cast<std::size_t>(i)] - fitted_work[static_cast<std::size_t>(i)];
        sse += resid[static_cast<std::size_t>(i)] * resid[static_cast<std::size_t>(i)];
        sum_sq += work[static_cast<std::size_t>(i)] * work[static_cast<std::size_t>(i)];
    }
    if (detail::negligible_sse(sse, sum_sq)) throw algorithm_error("degenerate variance");
    const double sigma_hat_sq = sse / n;

    if (ar1) {
        const auto est = detail::estimate_ar1(resid);
        double ss = (1.0 - est.phi * est.phi) * resid[0] * resid[0];
        for (int t = 1; t < n; ++t) {
            const double u = resid[static_cast<std::size_t>(t)] - est.phi * resid[static_cast<std::size_t>(t - 1)];
            ss += u * u;
        }
        fit.model_params = {{"param_sigma_hatsq", ss / n}, {"param_phi", est.phi}};
        fit.num_model_params = 2;
        fit.log_lik = est.log_lik;
        fit.fitted_values = fitted_work;
        fit.model_name = "meanshift_norm_ar1";
        return fit;
    }

    fit.model_params = {{"param_sigma_hatsq", sigma_hat_sq}};
    fit.num_model_params = 1;
    fit.log_lik = detail::gaussian_pooled_loglik(n, sigma_hat_sq);
    if (distribution == Distribution::lognormal) {
        // true lognormal density: Jacobian of the log transform
        for (int i = 1; i <= n; ++i) fit.log_lik -= std::log(x.value(i));
        std::vector<double> fitted(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) fitted[static_cast<std::size_t>(i)] = std::exp(fitted_work[static_cast<std::size_t>(i)]);
        fit.fitted_values = std::move(fitted);
        fit.model_name = "meanshift_lnorm";
    } else {
        fit.fitted_values = fitted_work;
        fit.model_name = "meanshift_norm";
    }
    return fit;
}

/// Region-wise ordinary-least-squares polynomial of degree p in the
/// region-local time index (starting at 0), pooled variance, optional
/// AR(1) errors.  trendshift is the degree-1 case.
inline ModelFit fit_lmshift(const TimeSeries& x, const ChangepointSet& tau, int degree,
                            bool ar1 = false) {
    if (tau.n() != x.n()) throw invalid_input("tau refers to a different series length");
    if (degree < 0) throw invalid_input("polynomial degree must be nonnegative");
    const int n = x.n();
    const auto bounds = tau.boundaries();
    const int num_regions = tau.m() + 1;

    std::vector<std::string> names;
    for (int d = 0; d <= degree; ++d) names.push_back("param_beta" + std::to_string(d));

    ModelFit fit{x, tau, names, {}, {}, std::vector<double>(static_cast<std::size_t>(n), 0.0),
                 "", degree + 1, 0, 0.0, std::nullopt};

    for (int j = 0; j < num_regions; ++j) {
        const int lo = bounds[static_cast<std::size_t>(j)], hi = bounds[static_cast<std::size_t>(j) + 1];
        if (hi - lo < degree + 1) throw invalid_input("underdetermined region");
        std::vector<double> y;
        y.reserve(static_cast<std::size_t>(hi - lo));
        for (int i = lo; i < hi; ++i) y.push_back(x.value(i));
        const auto beta = detail::polyfit(y, degree);
        fit.region_params.push_back(beta);
        for (int i = lo; i < hi; ++i) {
            const double t = static_cast<double>(i - lo);
            double v = 0.0, tp = 1.0;
            for (int d = 0; d <= degree; ++d) {
                v += beta[static_cast<std::size_t>(d)] * tp;
                tp *= t;
            }
            fit.fitted_values[static_cast<std::size_t>(i - 1)] = v;
        }
    }

    std::vector<double> resid(static_cast<std::size_t>(n));
    double sse = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        resid[static_cast<std::size_t>(i)] = x.values()[static_cast<std::size_t>(i)] - fit.fitted_values[static_cast<std::size_t>(i)];
        sse += resid[static_cast<std::size_t>(i)] * resid[static_cast<std::size_t>(i)];
        sum_sq += x.values()[static_cast<std::size_t>(i)] * x.values()[static_cast<std::size_t>(i)];
    }
    if (detail::negligible_sse(sse, sum_sq)) throw algorithm_error("degenerate variance");
    const double sigma_hat_sq = sse / n;

    const bool trend = (degree == 1);
    if (ar1) {
        const auto est = detail::estimate_ar1(resid);
        double ss = (1.0 - est.phi * est.phi) * resid[0] * resid[0];
        for (int t = 1; t < n; ++t) {
            const double u = resid[static_cast<std::size_t>(t)] - est.phi * resid[static_cast<std::size_t>(t - 1)];
            ss += u * u;
        }
        fit.model_params = {{"param_sigma_hatsq", ss / n}, {"param_phi", est.phi}};
        fit.num_model_params = 2;
        fit.log_lik = est.log_lik;
        fit.model_name = trend ? "trendshift_ar1" : "lmshift_ar1";
    } else {
        fit.model_params = {{"param_sigma_hatsq", sigma_hat_sq}};
        fit.num_model_params = 1;
        fit.log_lik = detail::gaussian_pooled_loglik(n, sigma_hat_sq);
        fit.model_name = trend ? "trendshift" : "lmshift";
    }
    return fit;
}

inline ModelFit fit_trendshift(const TimeSeries& x, const ChangepointSet& tau, bool ar1 = false) {
    return fit_lmshift(x, tau, 1, ar1);
}

/// Region-wise mean and region-wise sample variance (divisor ell-1);
/// the log-likelihood is the sum of per-region normal log-densities at
/// the region parameters.
inline ModelFit fit_meanvar(const TimeSeries& x, const ChangepointSet& tau) {
    if (tau.n() != x.n()) throw invalid_input("tau refers to a different series length");
    const int n = x.n();
    const auto bounds = tau.boundaries();
    const int num_regions = tau.m() + 1;

    ModelFit fit{x, tau, {"param_mu", "param_sigma_hatsq"}, {}, {},
                 std::vector<double>(static_cast<std::size_t>(n), 0.0),
                 "meanvar", 2, 0, 0.0, std::nullopt};

    double ll = 0.0;
    for (int j = 0; j < num_regions; ++j) {
        const int lo = bounds[static_cast<std::size_t>(j)], hi = bounds[static_cast<std::size_t>(j) + 1];
        const int len = hi - lo;
        if (len < 2) throw invalid_input("meanvar requires every region length >= 2");
        double s = 0.0, sum_sq = 0.0;
        for (int i = lo; i < hi; ++i) {
            s += x.value(i);
            sum_sq += x.value(i) * x.value(i);
        }
        const double mu = s / len;
        double ss = 0.0;
        for (int i = lo; i < hi; ++i) {
            const double d = x.value(i) - mu;
            ss += d * d;
        }
        if (detail::negligible_sse(ss, sum_sq)) throw algorithm_error("degenerate variance");
        const double var = ss / (len - 1);
        fit.region_params.push_back({mu, var});
        for (int i = lo; i < hi; ++i) fit.fitted_values[static_cast<std::size_t>(i - 1)] = mu;
        // sum of N(mu, var) log-densities over the region
        ll += -0.5 * len * (std::log(var) + detail::ln_2pi) - 0.5 * ss / var;
    }
    fit.log_lik = ll;
    return fit;
}

/// Log-likelihood of a fit plus the metadata the penalties consume.
inline LogLikSummary log_likelihood(const ModelFit& fit) {
    return LogLikSummary(fit.log_lik, fit.num_params_per_region, fit.num_model_params,
                         fit.data.n(), fit.tau, fit.log_prior);
}

} // namespace cptseg
