#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

#include "weakfactor/random.hpp"

namespace weakfactor {

/// Draws from the standard one-sided alpha-stable law, E[exp(-uS)] = exp(-u^alpha).
///
/// Chambers-Mallows-Stuck transformation with skewness 1, which for alpha < 1
/// reduces to Kanter's representation
///   S = sin(aU) / sin(U)^(1/a) * (sin((1-a)U) / E)^((1-a)/a),
/// with U ~ Uniform(0, pi) and E ~ Exp(1). Evaluated in log space so that
/// small alpha does not overflow intermediate powers.
template <random_source R>
double sample_one_sided_stable(double alpha, R& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("one-sided stable: alpha must lie in (0, 1), got " +
                                std::to_string(alpha));
    }
    const double u = std::numbers::pi * rng.uniform();
    const double e = rng.exponential();
    const double log_s = std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
                         (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(e));
    return std::exp(log_s);
}

/// Positive tempered stable law PTS(alpha, c, lambda):
///   log E[exp(-uV)] = c * Gamma(-alpha) * ((lambda + u)^alpha - lambda^alpha).
struct PtsParams {
    double alpha = 0.5;
    double c = 1.0;
    double lambda = 1.0;

    /// lambda = 1 - alpha and c = lambda^(1-alpha) / Gamma(1-alpha), so that E[V] = Var[V] = 1.
    static PtsParams unit_moments(double alpha) {
        PtsParams p;
        p.alpha = alpha;
        p.lambda = 1.0 - alpha;
        p.c = std::pow(p.lambda, 1.0 - alpha) / std::tgamma(1.0 - alpha);
        p.validate();
        return p;
    }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("PTS: alpha must lie in (0, 1)");
        if (!(c > 0.0)) throw std::domain_error("PTS: c must be positive");
        if (!(lambda > 0.0)) throw std::domain_error("PTS: lambda must be positive");
    }

    // Law of the subordinator over a time step of length `dt` (c scales linearly).
    PtsParams over_time(double dt) const {
        PtsParams p = *this;
        p.c *= dt;
        return p;
    }

    double log_laplace(double u) const {
        return c * std::tgamma(-alpha) * (std::pow(lambda + u, alpha) - std::pow(lambda, alpha));
    }

    double laplace(double u) const { return std::exp(log_laplace(u)); }

    // First two cumulants, from differentiating log_laplace at u = 0.
    double mean() const { return c * std::tgamma(1.0 - alpha) * std::pow(lambda, alpha - 1.0); }
    double variance() const { return c * std::tgamma(2.0 - alpha) * std::pow(lambda, alpha - 2.0); }

    // Probability that one stable proposal survives the exp(-lambda S) tilt.
    double acceptance_rate() const {
        return std::exp(c * std::tgamma(-alpha) * std::pow(lambda, alpha));
    }

    // S = scale * S0 has Laplace transform exp(c Gamma(-alpha) u^alpha).
    double stable_scale() const {
        return std::pow(-c * std::tgamma(-alpha), 1.0 / alpha);
    }
};

struct PtsDraw {
    double value;
    std::size_t proposals;
};

/// Exact PTS draw by exponential tilting: propose from the matching one-sided
/// stable law and accept with probability exp(-lambda S).
template <random_source R>
PtsDraw draw_pts(const PtsParams& params, R& rng) {
    params.validate();
    const double scale = params.stable_scale();
    for (std::size_t proposals = 1;; ++proposals) {
        const double s = scale * sample_one_sided_stable(params.alpha, rng);
        if (rng.uniform() <= std::exp(-params.lambda * s)) return {s, proposals};
    }
}

template <random_source R>
double sample_pts(const PtsParams& params, R& rng) {
    return draw_pts(params, rng).value;
}

}  // namespace weakfactor
