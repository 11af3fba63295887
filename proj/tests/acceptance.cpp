// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL/SKIP line per criterion.  Dataset-gated checks
// look for CSVs under CPTSEG_DATA_DIR (or ./data) and are skipped when the
// files are absent.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cptseg/cptseg.hpp"

using namespace cptseg;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Report {
    Outcome outcome;
    std::string detail;
};

Report pass(std::string detail = "") { return {Outcome::pass, std::move(detail)}; }
Report fail(std::string detail) { return {Outcome::fail, std::move(detail)}; }
Report skip(std::string detail) { return {Outcome::skip, std::move(detail)}; }

std::optional<fs::path> data_file(const std::string& name) {
    std::vector<fs::path> roots;
    if (const char* env = std::getenv("CPTSEG_DATA_DIR")) roots.emplace_back(env);
    roots.emplace_back("data");
    roots.emplace_back("../data");
    roots.emplace_back("../../data");
    for (const auto& root : roots) {
        const fs::path candidate = root / name;
        if (fs::exists(candidate)) return candidate;
    }
    return std::nullopt;
}

bool close(double value, double target, double tol) { return std::fabs(value - target) <= tol; }

// --------------------------------------------------------------------------
// 1. PELT oracle equivalence
// --------------------------------------------------------------------------
Report criterion_pelt_oracle() {
    Rng rng(20250901);
    int checked = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const int n = rng.uniform_int(8, 12);
        const int breaks = rng.uniform_int(0, 2);
        std::vector<double> v;
        double level = 0.0;
        int next_break = breaks > 0 ? rng.uniform_int(3, n - 2) : n + 1;
        for (int i = 1; i <= n; ++i) {
            if (i == next_break) {
                level += rng.uniform(1.5, 4.0) * (rng.bernoulli(0.5) ? 1 : -1);
                next_break = (breaks > 1 && i < n - 2) ? rng.uniform_int(i + 2, n - 1) : n + 1;
            }
            v.push_back(level + rng.normal(0, 1.0));
        }
        const TimeSeries x(v);

        const ModelSpec meanshift{ModelFamily::meanshift};
        const ModelSpec meanvar{ModelFamily::meanvar};
        const auto fast_ms = pelt_tau(x, meanshift, PenaltyId::BIC);
        const auto oracle_ms =
            exact_search_tau(x, meanshift, PenaltyId::BIC, n - 1, meanshift.min_segment_length());
        if (fast_ms.tau() != oracle_ms.tau()) {
            std::ostringstream os;
            os << "meanshift/BIC mismatch at seed " << seed;
            return fail(os.str());
        }
        const auto fast_mv = pelt_tau(x, meanvar, PenaltyId::MBIC);
        const auto oracle_mv =
            exact_search_tau(x, meanvar, PenaltyId::MBIC, n - 1, meanvar.min_segment_length());
        if (fast_mv.tau() != oracle_mv.tau()) {
            std::ostringstream os;
            os << "meanvar/MBIC mismatch at seed " << seed;
            return fail(os.str());
        }
        ++checked;
    }
    return pass(std::to_string(checked) + " instances matched for both model/penalty pairs");
}

// --------------------------------------------------------------------------
// 2. Likelihood closed form vs density-sum oracle
// --------------------------------------------------------------------------
Report criterion_likelihood_closed_form() {
    Rng rng(20250902);
    for (int seed = 0; seed < 100; ++seed) {
        const int n = rng.uniform_int(6, 200);
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(rng.normal(rng.uniform(-3, 3), rng.uniform(0.3, 2.5)));
        const TimeSeries x(v);
        std::vector<int> tau;
        for (int t = 3; t <= n - 2; ++t)
            if (rng.bernoulli(0.03) && (tau.empty() || t - tau.back() >= 2)) tau.push_back(t);
        const auto fit = fit_meanshift(x, ChangepointSet(tau, n));

        double sigma_sq = fit.model_params[0].second;
        double oracle = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double e = x.value(i) - fit.fitted_values[static_cast<std::size_t>(i - 1)];
            oracle += -0.5 * (std::log(sigma_sq) + std::log(2.0 * 3.14159265358979323846)) -
                      e * e / (2.0 * sigma_sq);
        }
        if (std::fabs(fit.log_lik - oracle) > 1e-9 * std::max(1.0, std::fabs(oracle)))
            return fail("closed form deviates at seed " + std::to_string(seed));
    }
    return pass("100 seeds within 1e-9 relative");
}

// --------------------------------------------------------------------------
// 3. Penalty hand values
// --------------------------------------------------------------------------
Report criterion_penalty_hand_values() {
    const LogLikSummary mdl_ll(0.0, 1, 1, 100, ChangepointSet({51}, 100));
    const double mdl = penalty_value(PenaltyId::MDL, mdl_ll);
    if (!close(mdl, 17.7276, 1e-3)) return fail("MDL structural part = " + std::to_string(mdl));

    const double mbic = penalty_value(PenaltyId::MBIC, mdl_ll);
    if (!close(mbic, 12.4292, 1e-3)) return fail("MBIC structural part = " + std::to_string(mbic));

    const LogLikSummary hqc_ll(0.0, 1, 1, 100, ChangepointSet({34, 67}, 100));
    const double hqc = penalty_value(PenaltyId::HQC, hqc_ll);
    if (!close(hqc, 6.1090, 1e-3)) return fail("HQC structural part = " + std::to_string(hqc));

    const double ll_value = -77.5;
    const LogLikSummary null_ll(ll_value, 2, 1, 64, ChangepointSet({}, 64));
    const LogLikSummary null_nhpp(ll_value, 2, 0, 64, ChangepointSet({}, 64), -4.0);
    for (PenaltyId id : {PenaltyId::AIC, PenaltyId::BIC, PenaltyId::SIC, PenaltyId::HQC,
                         PenaltyId::MBIC, PenaltyId::MDL}) {
        if (penalty_value(id, null_ll) != -2.0 * ll_value)
            return fail("nonzero structural part at m=0 for " + penalty_name(id));
    }
    if (penalty_value(PenaltyId::BMDL, null_nhpp) != -2.0 * ll_value)
        return fail("nonzero structural part at m=0 for BMDL");
    return pass("MDL 17.7276, MBIC 12.4292, HQC 6.1090, all penalties zero at m=0");
}

// --------------------------------------------------------------------------
// 4. CET reproduction (dataset-gated)
// --------------------------------------------------------------------------
Report criterion_cet() {
    const auto path = data_file("cet_annual.csv");
    if (!path)
        return skip("cet_annual.csv not found (set CPTSEG_DATA_DIR); criteria 1-3 and 5-8 still gate");
    TimeSeries raw = csv::read_series(path->string(), "year", "value");

    // keep observations through the year 2020
    std::vector<double> values;
    std::vector<std::string> labels;
    for (int i = 1; i <= raw.n(); ++i) {
        if (std::stoi(raw.label(i)) > 2020) break;
        values.push_back(raw.value(i));
        labels.push_back(raw.label(i));
    }
    TimeSeries x(values, labels);
    std::vector<int> tau;
    for (int i = 1; i <= x.n(); ++i) {
        const int year = std::stoi(x.label(i));
        if (year == 1700 || year == 1739 || year == 1988) tau.push_back(i);
    }
    if (tau.size() != 3) return fail("expected the years 1700/1739/1988 in the series");
    const ChangepointSet cpts(tau, x.n());

    const auto trend = fit_trendshift(x, cpts);
    double sigma_sq = trend.model_params[0].second;
    const double bic = penalty_value(PenaltyId::BIC, trend);
    const double mdl = penalty_value(PenaltyId::MDL, trend);
    std::ostringstream os;
    os << "sigma^2=" << sigma_sq << " logLik=" << trend.log_lik << " BIC=" << bic
       << " MDL=" << mdl;

    if (!close(sigma_sq, 0.290, 0.005)) return fail("sigma^2 off: " + os.str());
    if (!close(trend.log_lik, -289.86, 0.5)) return fail("logLik off: " + os.str());
    if (!close(bic, 650.41, 1.0)) return fail("BIC off: " + os.str());
    if (!close(mdl, 652.75, 1.0)) return fail("MDL off: " + os.str());

    const auto trend_ar1 = fit_trendshift(x, cpts, true);
    double phi = 0.0;
    for (const auto& [k, v] : trend_ar1.model_params)
        if (k == "param_phi") phi = v;
    if (!close(phi, 0.055, 0.01)) return fail("phi off: " + std::to_string(phi));
    return pass(os.str());
}

// --------------------------------------------------------------------------
// 5. PELT-optimality ordering
// --------------------------------------------------------------------------
Report criterion_pelt_ordering() {
    Rng rng(20250905);
    for (int series = 0; series < 50; ++series) {
        const int n = 20 + rng.uniform_int(0, 40);
        const int true_break = rng.uniform_int(n / 3, 2 * n / 3);
        std::vector<double> v;
        for (int i = 1; i <= n; ++i)
            v.push_back((i < true_break ? 0.0 : rng.uniform(2.0, 6.0) > 4.0 ? 5.0 : 4.0) +
                        rng.normal(0, 1.0));
        const TimeSeries x(v);
        const ModelSpec model{ModelFamily::meanvar};

        double pelt_value = 0.0;
        try {
            pelt_value = penalty_value(PenaltyId::MBIC,
                                       fit_meanvar(x, pelt_tau(x, model, PenaltyId::MBIC)));
        } catch (const std::exception&) {
            return fail("pelt failed on series " + std::to_string(series));
        }

        auto check = [&](const std::vector<int>& tau) {
            try {
                const double v2 = penalty_value(PenaltyId::MBIC, fit_meanvar(x, ChangepointSet(tau, n)));
                return pelt_value <= v2 + 1e-9;
            } catch (const std::exception&) {
                return true; // infeasible candidates are outside the search space
            }
        };
        if (!check({true_break})) return fail("true tau beat pelt on series " + std::to_string(series));
        for (int r = 0; r < 20; ++r) {
            std::vector<int> tau;
            const int m = rng.uniform_int(0, 4);
            int guard = 0;
            while (static_cast<int>(tau.size()) < m && ++guard < 100) {
                const int t = rng.uniform_int(2, n);
                bool ok = t - 1 >= 2 && n + 1 - t >= 2;
                for (int u : tau)
                    if (std::abs(u - t) < 2) ok = false;
                if (ok) tau.insert(std::upper_bound(tau.begin(), tau.end(), t), t);
            }
            if (!check(tau)) return fail("random tau beat pelt on series " + std::to_string(series));
        }
    }
    return pass("zero violations over 50 series x 21 candidates");
}

// --------------------------------------------------------------------------
// 6. GA behavior
// --------------------------------------------------------------------------
Report criterion_ga() {
    // (a) determinism
    {
        Rng rng(20250906);
        std::vector<double> v;
        for (int i = 1; i <= 50; ++i) v.push_back((i < 26 ? 0.0 : 10.0) + rng.normal(0, 1.0));
        const TimeSeries x(v);
        GaConfig config;
        config.maxiter = 50;
        config.run = 25;
        config.rng_seed = 424242;
        const auto a = ga_run(x, ModelSpec{}, PenaltyId::BIC, config);
        const auto b = ga_run(x, ModelSpec{}, PenaltyId::BIC, config);
        if (a.best_tau.tau() != b.best_tau.tau() || a.trace_best != b.trace_best)
            return fail("GA is not deterministic under a fixed seed");
        // (b) nondecreasing best trace
        for (std::size_t g = 1; g < a.trace_best.size(); ++g)
            if (a.trace_best[g] < a.trace_best[g - 1]) return fail("best-fitness trace decreased");
    }

    // (c) GA matches PELT's fitness on clean steps
    int matched = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(5000 + seed);
        std::vector<double> v;
        for (int i = 1; i <= 50; ++i) v.push_back((i < 26 ? 0.0 : 10.0) + rng.normal(0, 1.0));
        const TimeSeries x(v);
        const double target =
            penalty_value(PenaltyId::BIC, fit_meanshift(x, pelt_tau(x, ModelSpec{}, PenaltyId::BIC)));
        GaConfig config;
        config.maxiter = 200;
        config.run = 50;
        config.rng_seed = static_cast<std::uint64_t>(seed) + 1;
        const auto info = ga_run(x, ModelSpec{}, PenaltyId::BIC, config);
        if (std::fabs(-info.best_fitness - target) <= 1e-6) ++matched;
    }
    if (matched < 95)
        return fail("GA matched PELT on only " + std::to_string(matched) + "/100 seeds");
    return pass("deterministic, monotone, matched PELT on " + std::to_string(matched) +
                "/100 seeds");
}

// --------------------------------------------------------------------------
// 7. Seeding benchmark
// --------------------------------------------------------------------------
Report criterion_seeding() {
    int good = 0;
    for (int seed = 0; seed < 10; ++seed) {
        SimSpec spec;
        spec.rng_seed = 909000 + static_cast<std::uint64_t>(seed);
        auto trend_region = [](int length, double intercept, double slope, double sd) {
            SimRegion r;
            r.length = length;
            r.distribution = SimDistribution::trend;
            r.intercept = intercept;
            r.slope = slope;
            r.sd = sd;
            return r;
        };
        spec.regions = {trend_region(100, 0.0, 0.08, 2.0), trend_region(100, 18.0, 0.05, 2.0),
                        trend_region(100, 32.0, 0.12, 2.0), trend_region(100, 55.0, 0.02, 2.0)};
        const auto [x, truth] = simulate(spec);

        auto run_with = [&](SeedingStrategy strategy) {
            GaConfig config;
            config.maxiter = 1000;
            config.run = 100;
            config.rng_seed = 31337 + static_cast<std::uint64_t>(seed);
            config.seeding = strategy;
            return ga_run(x, ModelSpec{}, PenaltyId::BIC, config);
        };
        const auto uniform = run_with(SeedingStrategy::uniform_half);
        const auto build = run_with(SeedingStrategy::build_informed);
        const auto logn = run_with(SeedingStrategy::log_informed);

        const bool informed_stopped = build.generations < 1000 && logn.generations < 1000;
        const bool informed_better = build.best_fitness >= uniform.best_fitness &&
                                     logn.best_fitness >= uniform.best_fitness;
        if (informed_stopped && informed_better) ++good;
    }
    if (good < 8) return fail("informed seeding won on only " + std::to_string(good) + "/10 seeds");
    return pass("informed seeding stopped early and scored at least as well on " +
                std::to_string(good) + "/10 seeds");
}

// --------------------------------------------------------------------------
// 8. NHPP suite
// --------------------------------------------------------------------------
Report criterion_nhpp() {
    // posterior identity per region
    {
        Rng rng(20250908);
        std::vector<double> v;
        for (int i = 0; i < 300; ++i) v.push_back(rng.normal(i < 150 ? 0.0 : 1.0, 1.0));
        const TimeSeries x(v);
        const auto fit = fit_nhpp(x, ChangepointSet({151}, 300));
        for (const auto& row : fit.region_params) {
            const double prior = nhpp_detail::gamma_log_density(row[0], 1, 1) +
                                 nhpp_detail::gamma_log_density(row[1], 1, 1);
            if (std::fabs(row[2] - (row[3] + prior)) > 1e-9 * std::max(1.0, std::fabs(row[2])))
                return fail("logPost != logLik + log-prior");
        }
    }

    // alpha fixed at 1: MAP matches the 1-D grid oracle
    {
        Rng rng(20250918);
        for (int rep = 0; rep < 5; ++rep) {
            const int end = 1 + rng.uniform_int(50, 400);
            std::vector<int> events;
            for (int t = 1; t < end; ++t)
                if (rng.bernoulli(0.25)) events.push_back(t);
            const GammaHyperparams hyper;
            const auto map = nhpp_map_region(events, 1, end, hyper, {}, 1.0);
            const double k = static_cast<double>(events.size());
            const double span = static_cast<double>(end - 1);
            const double analytic = 0.5 * (-k + std::sqrt(k * k + 4.0 * span));
            if (std::fabs(map.beta - analytic) > 1e-6)
                return fail("fixed-alpha MAP beta " + std::to_string(map.beta) + " vs analytic " +
                            std::to_string(analytic));
        }
    }

    // consistency on data simulated from a Weibull NHPP
    const double alpha_true = 0.8;
    const double beta_true = 6.606; // calibrated for ~340 events over n = 10000
    int within = 0;
    int enough_events = 0;
    for (int seed = 0; seed < 10; ++seed) {
        Rng rng(777000 + static_cast<std::uint64_t>(seed));
        const int n = 10000;
        std::vector<int> events;
        for (int t = 1; t <= n; ++t) {
            const double delta = nhpp_detail::cumulative(alpha_true, beta_true, t + 1.0) -
                                 nhpp_detail::cumulative(alpha_true, beta_true, static_cast<double>(t));
            if (rng.bernoulli(1.0 - std::exp(-delta))) events.push_back(t);
        }
        if (static_cast<int>(events.size()) >= 300) ++enough_events;
        GammaHyperparams flat{1.0, 0.01, 1.0, 0.01};
        const auto map = nhpp_map_region(events, 1, n + 1, flat);
        if (std::fabs(map.alpha - alpha_true) <= 0.1 * alpha_true) ++within;
    }
    if (enough_events < 10) return fail("simulation produced fewer than 300 events");
    if (within < 8) return fail("alpha recovered within 10% on only " + std::to_string(within) + "/10 seeds");
    return pass("posterior identity, fixed-alpha oracle, alpha within 10% on " +
                std::to_string(within) + "/10 seeds");
}

// --------------------------------------------------------------------------
// 9. Published fitness values (dataset-gated)
// --------------------------------------------------------------------------
Report criterion_published_values() {
    const auto mlb = data_file("mlb_bavg.csv");
    const auto bogota = data_file("bogota_pm.csv");
    if (!mlb && !bogota) return skip("mlb_bavg.csv / bogota_pm.csv not found; optional checks");

    std::ostringstream os;
    if (mlb) {
        const auto x = csv::read_series(mlb->string(), "year", "value");
        const auto result = segment(x, "pelt", ModelSpec{ModelFamily::meanvar}, PenaltyId::MBIC);
        if (!close(result.fitness_value, -744.8353, 1e-3))
            return fail("PELT meanvar MBIC fitness = " + std::to_string(result.fitness_value));
        const double manual =
            penalty_value(PenaltyId::MBIC, fit_meanvar(x, ChangepointSet({49}, x.n())));
        if (!close(manual, -700.8384, 1e-3))
            return fail("meanvar MBIC at tau=49 = " + std::to_string(manual));
        GaConfig config;
        config.maxiter = 500;
        config.run = 50;
        config.rng_seed = 1;
        const auto ga_info = ga_run(x, ModelSpec{}, PenaltyId::MDL, config);
        if (std::fabs(-ga_info.best_fitness - (-735.2082)) > 0.10 * 735.2082)
            return fail("GA MDL best = " + std::to_string(-ga_info.best_fitness));
        os << "MLB values reproduced";
    }
    if (bogota) {
        const auto x = csv::read_series(bogota->string(), "date", "value");
        const auto fit = fit_nhpp(x, ChangepointSet({379, 820, 1026}, x.n()), 37.0);
        const double alpha0 = fit.region_params[0][0];
        if (std::fabs(alpha0 - 0.711) > 0.10 * 0.711)
            return fail("Bogota region alpha = " + std::to_string(alpha0));
        os << (mlb ? "; " : "") << "Bogota alpha reproduced";
    }
    return pass(os.str());
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Report()> run;
    };
    const std::vector<Entry> criteria = {
        {1, "PELT oracle equivalence", criterion_pelt_oracle},
        {2, "likelihood closed form", criterion_likelihood_closed_form},
        {3, "penalty hand values", criterion_penalty_hand_values},
        {4, "CET reproduction", criterion_cet},
        {5, "PELT-optimality ordering", criterion_pelt_ordering},
        {6, "GA behavior", criterion_ga},
        {7, "seeding benchmark", criterion_seeding},
        {8, "NHPP suite", criterion_nhpp},
        {9, "published fitness values", criterion_published_values},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Report report{Outcome::fail, "unhandled exception"};
        try {
            report = entry.run();
        } catch (const std::exception& e) {
            report = fail(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* label = report.outcome == Outcome::pass ? "PASS"
                            : report.outcome == Outcome::skip ? "SKIP"
                                                              : "FAIL";
        std::printf("[%s] criterion %d (%s): %s  [%.2fs]\n", label, entry.id, entry.name,
                    report.detail.c_str(), elapsed);
        if (report.outcome == Outcome::fail) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all runnable criteria passed\n");
    return 0;
}
