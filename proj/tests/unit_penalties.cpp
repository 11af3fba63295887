#include <catch_amalgamated.hpp>

#include <cmath>

#include "cptseg/models.hpp"
#include "cptseg/penalties.hpp"
#include "cptseg/rng.hpp"
#include "cptseg/types.hpp"

using namespace cptseg;

namespace {

constexpr double ln_2pi = 1.8378770664093453;

LogLikSummary summary(double value, int a, int b, int n, std::vector<int> tau,
                      std::optional<double> log_prior = std::nullopt) {
    return LogLikSummary(value, a, b, n, ChangepointSet(std::move(tau), n), log_prior);
}

TimeSeries random_series(Rng& rng, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(rng.normal(0.0, 1.0));
    return TimeSeries(std::move(v));
}

std::vector<int> random_tau(Rng& rng, int n, int m, int min_len) {
    std::vector<int> tau;
    int guard = 0;
    while (static_cast<int>(tau.size()) < m && ++guard < 2000) {
        const int t = rng.uniform_int(2, n);
        bool ok = t - 1 >= min_len && n + 1 - t >= min_len;
        for (int v : tau)
            if (std::abs(v - t) < min_len) ok = false;
        if (ok) tau.insert(std::upper_bound(tau.begin(), tau.end(), t), t);
    }
    return tau;
}

} // namespace

TEST_CASE("structural hand values") {
    // MDL: n=100, m=1, ell=(50,50), a=1, b=1:
    //   0.5 (ln 50 + ln 50) + 2 ln 1 + 0 + 3 ln 100 = 17.7276
    CHECK(penalty_value(PenaltyId::MDL, summary(0.0, 1, 1, 100, {51})) ==
          Catch::Approx(17.7276).margin(1e-3));
    // MBIC: 3 ln 100 + 2 ln 0.5 = 12.4292
    CHECK(penalty_value(PenaltyId::MBIC, summary(0.0, 1, 1, 100, {51})) ==
          Catch::Approx(12.4292).margin(1e-3));
    // HQC: m=2 -> 4 ln ln 100 = 6.1090
    CHECK(penalty_value(PenaltyId::HQC, summary(0.0, 1, 1, 100, {34, 67})) ==
          Catch::Approx(6.1090).margin(1e-3));
}

TEST_CASE("every penalty has zero structural part at m = 0") {
    const double ll = -123.456;
    for (PenaltyId id : {PenaltyId::AIC, PenaltyId::BIC, PenaltyId::SIC, PenaltyId::HQC,
                         PenaltyId::MBIC, PenaltyId::MDL}) {
        CHECK(penalty_value(id, summary(ll, 1, 1, 50, {})) == -2.0 * ll);
    }
    CHECK(penalty_value(PenaltyId::BMDL, summary(ll, 2, 0, 50, {}, -3.0)) == -2.0 * ll);
}

TEST_CASE("SIC is a bit-for-bit alias of BIC") {
    Rng rng(211);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = rng.uniform_int(5, 300);
        const auto ll = summary(rng.normal(0, 100), rng.uniform_int(1, 3), rng.uniform_int(0, 2),
                                n, random_tau(rng, n, rng.uniform_int(0, 4), 1));
        CHECK(penalty_value(PenaltyId::SIC, ll) == penalty_value(PenaltyId::BIC, ll));
    }
}

TEST_CASE("MDL edge cases") {
    // m = 1: 2 ln m = 0 and the tau sum is empty
    const auto one = summary(0.0, 2, 0, 40, {21});
    const double expected = 1.0 * (std::log(20.0) + std::log(20.0)) + 2.0 * std::log(40.0);
    CHECK(penalty_value(PenaltyId::MDL, one) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("penalty part is monotone under refinement for AIC/BIC/MBIC") {
    Rng rng(223);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = rng.uniform_int(10, 200);
        auto coarse = random_tau(rng, n, 1 + rng.uniform_int(0, 2), 1);
        auto fine = coarse;
        const int t = rng.uniform_int(2, n);
        if (std::find(fine.begin(), fine.end(), t) != fine.end()) continue;
        fine.insert(std::upper_bound(fine.begin(), fine.end(), t), t);
        for (PenaltyId id : {PenaltyId::AIC, PenaltyId::BIC, PenaltyId::MBIC}) {
            // structural parts isolated by zero log-likelihood
            const double p_coarse = penalty_value(id, summary(0.0, 1, 1, n, coarse));
            const double p_fine = penalty_value(id, summary(0.0, 1, 1, n, fine));
            CHECK(p_fine > p_coarse);
        }
    }
}

TEST_CASE("BMDL requires an NHPP log-prior") {
    REQUIRE_THROWS_WITH(penalty_value(PenaltyId::BMDL, summary(-10.0, 2, 0, 30, {11})),
                        Catch::Matchers::ContainsSubstring("BMDL requires NHPP"));
    // with a log-prior the value follows the MDL + prior formula
    const auto ll = summary(-10.0, 2, 0, 30, {11}, -2.5);
    const double mdl_part = penalty_value(PenaltyId::MDL, summary(0.0, 2, 0, 30, {11}));
    CHECK(penalty_value(PenaltyId::BMDL, ll) ==
          Catch::Approx(mdl_part - 2.0 * (-2.5) + 20.0).epsilon(1e-12));
}

TEST_CASE("HQC needs n >= 3") {
    REQUIRE_THROWS_AS(penalty_value(PenaltyId::HQC, summary(0.0, 1, 1, 2, {2})), invalid_input);
}

TEST_CASE("decomposition rejects position-dependent penalties") {
    REQUIRE_THROWS_WITH(pelt_decomposition(PenaltyId::MDL, ModelSpec{}, 100),
                        Catch::Matchers::ContainsSubstring("not segment-additive"));
    REQUIRE_THROWS_WITH(pelt_decomposition(PenaltyId::BMDL, ModelSpec{ModelFamily::nhpp}, 100),
                        Catch::Matchers::ContainsSubstring("not segment-additive"));
}

TEST_CASE("BIC per-changepoint constant for meanshift is 2 ln n") {
    // derived as penalty_value difference between m and m+1
    const int n = 128;
    const auto decomp = pelt_decomposition(PenaltyId::BIC, ModelSpec{}, n);
    CHECK(decomp.per_changepoint == Catch::Approx(2.0 * std::log(128.0)).epsilon(1e-12));
    const double p1 = penalty_value(PenaltyId::BIC, summary(0.0, 1, 1, n, {40}));
    const double p2 = penalty_value(PenaltyId::BIC, summary(0.0, 1, 1, n, {40, 80}));
    CHECK(p2 - p1 == Catch::Approx(decomp.per_changepoint).epsilon(1e-12));
}

TEST_CASE("MBIC decomposition for meanvar") {
    const int n = 200;
    const auto decomp = pelt_decomposition(PenaltyId::MBIC, ModelSpec{ModelFamily::meanvar}, n);
    CHECK(decomp.per_changepoint == Catch::Approx(3.0 * std::log(200.0)).epsilon(1e-12));
    CHECK(decomp.segment_extra(50) == Catch::Approx(std::log(0.25)).epsilon(1e-12));
    CHECK(decomp.segment_extra(200) == 0.0);
}

TEST_CASE("decomposition exactness on fitted models") {
    Rng rng(227);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = rng.uniform_int(20, 200);
        const auto x = random_series(rng, n);
        const int m = 1 + rng.uniform_int(0, 5);
        const auto tau = random_tau(rng, n, m, 3);
        if (tau.empty()) continue;
        const bool use_meanvar = rng.bernoulli(0.5);
        const ModelSpec model =
            use_meanvar ? ModelSpec{ModelFamily::meanvar} : ModelSpec{ModelFamily::meanshift};
        const ChangepointSet cpts(tau, n);
        const auto fit = use_meanvar ? fit_meanvar(x, cpts) : fit_meanshift(x, cpts);

        // per-segment -2 lnL contributions
        const auto bounds = cpts.boundaries();
        std::vector<double> seg_costs;
        if (use_meanvar) {
            for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
                const auto& p = fit.region_params[j];
                const int len = bounds[j + 1] - bounds[j];
                double ll_j = 0.0;
                for (int i = bounds[j]; i < bounds[j + 1]; ++i) {
                    const double e = x.value(i) - p[0];
                    ll_j += -0.5 * (std::log(p[1]) + ln_2pi) - e * e / (2.0 * p[1]);
                }
                (void)len;
                seg_costs.push_back(-2.0 * ll_j);
            }
        } else {
            const double sigma_sq = fit.model_params[0].second;
            for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
                double cost = 0.0;
                for (int i = bounds[j]; i < bounds[j + 1]; ++i) {
                    const double e = x.value(i) - fit.fitted_values[static_cast<std::size_t>(i - 1)];
                    cost += e * e / sigma_sq + std::log(sigma_sq) + ln_2pi;
                }
                seg_costs.push_back(cost);
            }
        }

        for (PenaltyId id : {PenaltyId::AIC, PenaltyId::BIC, PenaltyId::HQC, PenaltyId::MBIC}) {
            const auto decomp = pelt_decomposition(id, model, n);
            double total = decomp.constant + decomp.per_changepoint * cpts.m();
            for (std::size_t j = 0; j < seg_costs.size(); ++j)
                total += seg_costs[j] + decomp.segment_extra(bounds[j + 1] - bounds[j]);
            const double direct = penalty_value(id, fit);
            CHECK(std::fabs(total - direct) <= 1e-9 * std::max(1.0, std::fabs(direct)));
        }
    }
}

TEST_CASE("penalty identifiers are bit-exact") {
    for (const char* id : {"AIC", "BIC", "SIC", "HQC", "MBIC", "MDL", "BMDL"})
        CHECK(penalty_name(parse_penalty(id)) == id);
    REQUIRE_THROWS_AS(parse_penalty("bic"), invalid_input);
}
