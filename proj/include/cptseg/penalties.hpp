#pragma once

#include <cmath>
#include <string>

#include "cptseg/core.hpp"
#include "cptseg/models.hpp"
#include "cptseg/types.hpp"

namespace cptseg {

enum class PenaltyId { AIC, BIC, SIC, HQC, MBIC, MDL, BMDL };

inline std::string penalty_name(PenaltyId id) {
    switch (id) {
    case PenaltyId::AIC: return "AIC";
    case PenaltyId::BIC: return "BIC";
    case PenaltyId::SIC: return "SIC";
    case PenaltyId::HQC: return "HQC";
    case PenaltyId::MBIC: return "MBIC";
    case PenaltyId::MDL: return "MDL";
    case PenaltyId::BMDL: return "BMDL";
    }
    return "?";
}

inline PenaltyId parse_penalty(const std::string& id) {
    if (id == "AIC") return PenaltyId::AIC;
    if (id == "BIC") return PenaltyId::BIC;
    if (id == "SIC") return PenaltyId::SIC;
    if (id == "HQC") return PenaltyId::HQC;
    if (id == "MBIC") return PenaltyId::MBIC;
    if (id == "MDL") return PenaltyId::MDL;
    if (id == "BMDL") return PenaltyId::BMDL;
    throw invalid_input("unknown penalty identifier: " + id);
}

namespace detail {

/// Structural MDL part:
///   (a/2) * sum_j ln(ell_j) + 2 ln m + sum_{j=2}^{m} ln(tau_j) + (2+b) ln n.
/// Natural logarithms throughout.  Only defined for m >= 1.
inline double mdl_structural(const LogLikSummary& ll) {
    const int m = ll.tau.m();
    const double n = static_cast<double>(ll.nobs);
    double p = 0.0;
    for (int len : region_lengths(ll.tau))
        p += 0.5 * ll.num_params_per_region * std::log(static_cast<double>(len));
    p += 2.0 * std::log(static_cast<double>(m));
    const auto& tau = ll.tau.tau();
    for (int j = 2; j <= m; ++j) p += std::log(static_cast<double>(tau[static_cast<std::size_t>(j - 1)]));
    p += (2.0 + ll.num_model_params) * std::log(n);
    return p;
}

} // namespace detail

/// The penalized objective f(tau, M) = P_f(tau, n) - 2 ln L.
/// Every penalty's structural part P_f is 0 when m = 0.
inline double penalty_value(PenaltyId id, const LogLikSummary& ll) {
    if (id == PenaltyId::BMDL && !ll.log_prior.has_value())
        throw invalid_input("BMDL requires NHPP");
    const int m = ll.tau.m();
    const double minus_2ll = -2.0 * ll.value;
    if (m == 0) return minus_2ll;

    const double n = static_cast<double>(ll.nobs);
    double p = 0.0;
    switch (id) {
    case PenaltyId::AIC:
        p = 2.0 * ll.df;
        break;
    case PenaltyId::BIC:
    case PenaltyId::SIC:
        p = ll.df * std::log(n);
        break;
    case PenaltyId::HQC:
        if (ll.nobs < 3) throw invalid_input("HQC requires n >= 3");
        p = 2.0 * m * std::log(std::log(n));
        break;
    case PenaltyId::MBIC: {
        p = 3.0 * m * std::log(n);
        for (int len : region_lengths(ll.tau)) p += std::log(len / n);
        break;
    }
    case PenaltyId::MDL:
        p = detail::mdl_structural(ll);
        break;
    case PenaltyId::BMDL:
        p = detail::mdl_structural(ll) - 2.0 * *ll.log_prior;
        break;
    }
    return p + minus_2ll;
}

/// Convenience: evaluate a penalty directly on a fitted model.
inline double penalty_value(PenaltyId id, const ModelFit& fit) {
    return penalty_value(id, log_likelihood(fit));
}

/// Additive decomposition of a penalty for dynamic-programming searches:
///   f(tau) = sum_j [ -2 lnL_j + segment_extra(ell_j) ] + per_changepoint * m + constant.
/// Exact for m >= 1 (m = 0 follows the zero-penalty convention).
struct PeltDecomposition {
    double per_changepoint; // beta
    double constant;        // m-independent part of P_f
    bool mbic_segment_term; // emit ln(ell/n) per segment
    int n;

    double segment_extra(int seg_len) const {
        return mbic_segment_term ? std::log(static_cast<double>(seg_len) / n) : 0.0;
    }
};

/// Map a penalty into PELT's segment-additive form for a model family.
/// MDL and BMDL depend on changepoint positions and cannot be decomposed.
inline PeltDecomposition pelt_decomposition(PenaltyId id, const ModelSpec& model, int n) {
    if (id == PenaltyId::MDL || id == PenaltyId::BMDL)
        throw invalid_input("not segment-additive: " + penalty_name(id));
    // a+1 parameters per added changepoint under the df rule (a new region
    // plus the changepoint location itself).
    int a = 0, b = 0;
    switch (model.family) {
    case ModelFamily::meanshift:
        a = 1;
        b = model.ar1 ? 2 : (model.distribution == Distribution::poisson ? 0 : 1);
        break;
    case ModelFamily::lmshift:
        a = model.degree + 1;
        b = model.ar1 ? 2 : 1;
        break;
    case ModelFamily::meanvar:
        a = 2;
        b = 0;
        break;
    case ModelFamily::nhpp:
        a = 2;
        b = 0;
        break;
    }
    const double ln_n = std::log(static_cast<double>(n));
    switch (id) {
    case PenaltyId::AIC:
        return {2.0 * (a + 1), 2.0 * (a + b), false, n};
    case PenaltyId::BIC:
    case PenaltyId::SIC:
        return {(a + 1) * ln_n, (a + b) * ln_n, false, n};
    case PenaltyId::HQC:
        if (n < 3) throw invalid_input("HQC requires n >= 3");
        return {2.0 * std::log(ln_n), 0.0, false, n};
    case PenaltyId::MBIC:
        return {3.0 * ln_n, 0.0, true, n};
    default:
        break;
    }
    throw invalid_input("not segment-additive: " + penalty_name(id));
}

} // namespace cptseg
