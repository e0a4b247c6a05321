#pragma once

#include "stoptree/normal.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace stoptree {

/// The tail approximation below is asymptotic; it is documented to behave
/// well down to samples of about this size. Callers working on smaller
/// nodes must not evaluate it (the split layer substitutes a sentinel).
inline constexpr std::size_t kMinApproxSampleSize = 20;

/// Sample size and covariate dimension entering the scaled-statistic tail
/// approximation and its Bonferroni correction.
struct PValueParams {
    std::size_t n = 0; ///< node sample size, >= 20
    std::size_t d = 1; ///< covariate dimension, >= 1
};

/// k times iterated natural logarithm, ln_1 = ln, ln_2 = ln ln, ...
inline double iterated_log(double x, unsigned k) {
    double v = x;
    for (unsigned i = 0; i < k; ++i) {
        if (!(v > 0.0)) {
            throw std::domain_error("iterated_log: argument leaves the domain");
        }
        v = std::log(v);
    }
    return v;
}

namespace detail {

inline void check_pvalue_params(const PValueParams& p) {
    if (p.n < kMinApproxSampleSize) {
        throw std::domain_error("p-value approximation requires n >= 20");
    }
    if (p.d < 1) {
        throw std::domain_error("p-value approximation requires d >= 1");
    }
}

/// (ln_3 n + ln 2) / sqrt(2 ln_2 n). Defined for n > e^e; guaranteed by the
/// n >= 20 floor.
inline double drift_term(double n) {
    const double ll = iterated_log(n, 2);
    return (std::log(ll) + std::log(2.0)) / std::sqrt(2.0 * ll);
}

/// Exponent 2 ln(n/2) of the cdf power.
inline double cdf_power(double n) {
    return 2.0 * std::log(0.5 * n);
}

} // namespace detail

/// Tail approximation p_n(u) for the scaled max statistic of a single
/// covariate: 1 - Phi(sqrt(u) - drift)^(2 ln(n/2)).
///
/// Evaluated as -expm1(power * log1p(-tail)) so small p-values keep full
/// relative accuracy. Strictly decreasing in u, with values in [0, 1].
inline double p_value_approx(double u, const PValueParams& params) {
    detail::check_pvalue_params(params);
    if (!(u >= 0.0)) {
        throw std::domain_error("p_value_approx: u must be >= 0");
    }
    const double n = static_cast<double>(params.n);
    const double z = std::sqrt(u) - detail::drift_term(n);
    const double tail = 0.5 * std::erfc(z * kInvSqrt2); // 1 - Phi(z)
    if (tail >= 1.0) {
        return 1.0;
    }
    return -std::expm1(detail::cdf_power(n) * std::log1p(-tail));
}

/// Bonferroni bound d * p_n(u) over d covariates. Deliberately not clamped
/// to one: downstream sums and reports use the raw value.
inline double bonferroni_p(double u, const PValueParams& params) {
    return static_cast<double>(params.d) * p_value_approx(u, params);
}

/// Critical value u_eps solving d * p_n(u_eps) = eps, in closed form:
/// (drift + Phi^{-1}((1 - eps/d)^{1/(2 ln(n/2))}))^2.
inline double critical_value(double eps, const PValueParams& params) {
    detail::check_pvalue_params(params);
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::domain_error("critical_value: eps must lie strictly in (0,1)");
    }
    const double frac = eps / static_cast<double>(params.d);
    if (!(frac < 1.0)) {
        throw std::domain_error("critical_value: eps/d must be below 1");
    }
    const double n = static_cast<double>(params.n);
    const double q = std::exp(std::log1p(-frac) / detail::cdf_power(n));
    const double root = detail::drift_term(n) + std_normal_quantile(q);
    if (!(root >= 0.0)) {
        throw std::domain_error("critical_value: eps too loose for this n and d");
    }
    return root * root;
}

/// Penalty multiplier of sigma^2 in the single-split acceptance inequality
/// mse1 - mse2 - penalty * sigma2 > 0.
enum class PenaltyKind { pvalue, cp, bic };

inline double penalty_constant(PenaltyKind kind, const PValueParams& params, double eps = 0.05) {
    switch (kind) {
    case PenaltyKind::cp:
        return 2.0;
    case PenaltyKind::bic:
        if (params.n < 1) {
            throw std::domain_error("penalty_constant: bic requires n >= 1");
        }
        return std::log(static_cast<double>(params.n));
    case PenaltyKind::pvalue:
        return critical_value(eps, params);
    }
    throw std::logic_error("penalty_constant: unknown kind");
}

} // namespace stoptree
