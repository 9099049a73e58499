#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "weakfactor/spectra.hpp"

namespace weakfactor {

// How the slowly varying factor g(d) of the perturbation d^tau g(d) is chosen.
enum class GRule {
    sigma2_loglog,  // tail eigenvalue mass times sqrt(log log d)
    loglog,         // sqrt(log log d)
    median_eigen,   // median of all d eigenvalues (zeros included)
    explicit_value  // EstimatorConfig::g_value
};

struct EstimatorConfig {
    double tau = 0.5;
    int r_max = 20;
    double gamma = 0.05;
    // g(d) for the correlation-based ratio estimator, multiplied by g_scale.
    GRule g_rule = GRule::loglog;
    double g_value = 1.0;
    double g_scale = 1.0;
    // Ratio margin of the median-tuned comparison estimator.
    double pelger_gamma = 0.2;

    void validate() const {
        if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("EstimatorConfig: tau must lie in (0, 1)");
        if (r_max < 1) throw std::invalid_argument("EstimatorConfig: r_max must be >= 1");
        if (!(gamma > 0.0)) throw std::invalid_argument("EstimatorConfig: gamma must be positive");
        if (!(pelger_gamma > 0.0)) throw std::invalid_argument("EstimatorConfig: pelger_gamma must be positive");
        if (!(g_scale >= 0.0)) throw std::invalid_argument("EstimatorConfig: g_scale must be nonnegative");
        if (g_rule == GRule::explicit_value && !(g_value >= 0.0))
            throw std::invalid_argument("EstimatorConfig: g_value must be nonnegative");
    }

    bool operator==(const EstimatorConfig&) const = default;
};

// The five factor-number estimates of one replication.
struct EstimateSet {
    int bn = 0;
    int p_cor = 0;
    int pc_p1 = 0;
    int pelger = 0;
    int onatski = 0;

    static constexpr std::array<std::string_view, 5> names{"bn", "p_cor", "pc_p1", "pelger", "onatski"};

    std::array<int, 5> as_array() const { return {bn, p_cor, pc_p1, pelger, onatski}; }

    bool operator==(const EstimateSet&) const = default;
};

// ---------------------------------------------------------------------------
// Building blocks

/// max{ j <= r_max : lambda_j > threshold }, with max of the empty set = 0.
inline int count_above(const Spectrum& spectrum, double threshold, int r_max) {
    int best = 0;
    for (int j = 1; j <= r_max; ++j)
        if (spectrum.at(static_cast<std::size_t>(j - 1)) > threshold) best = j;
    return best;
}

/// Noise-level estimate sigma2_hat = (1/d) * sum of eigenvalues r_max + 1 through d,
/// i.e. the average per-component variance left after r_max principal components.
inline double tail_mass(const Spectrum& spectrum, int r_max) {
    if (spectrum.d < 1) return 0.0;
    double s = 0.0;
    for (std::size_t k = static_cast<std::size_t>(r_max); k < spectrum.values.size(); ++k) s += spectrum.values[k];
    return s / static_cast<double>(spectrum.d);
}

inline double sqrt_log_log(Eigen::Index d) {
    if (d < 3) throw std::domain_error("log log d requires d >= 3, got d = " + std::to_string(d));
    return std::sqrt(std::log(std::log(static_cast<double>(d))));
}

/// Median of the d eigenvalues, counting the zeros beyond rank.
inline double median_eigenvalue(const Spectrum& spectrum) {
    std::vector<double> v = spectrum.padded();
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double g_of(GRule rule, const Spectrum& spectrum, const EstimatorConfig& config) {
    switch (rule) {
        case GRule::sigma2_loglog: return tail_mass(spectrum, config.r_max) * sqrt_log_log(spectrum.d);
        case GRule::loglog: return sqrt_log_log(spectrum.d);
        case GRule::median_eigen: return median_eigenvalue(spectrum);
        case GRule::explicit_value: return config.g_value;
    }
    return 0.0;
}

/// Perturbed eigenvalue ratios
///   ER_j = (lambda_j + p) / (lambda_{j+1} + p),  j = 1 .. min(r_max, d - 1),
/// with 0/0 := 1 and x/0 := +inf for x > 0.
inline std::vector<double> er_statistics(const Spectrum& spectrum, double perturbation, int r_max) {
    if (perturbation < 0.0) throw std::invalid_argument("er_statistics: perturbation must be nonnegative");
    const int last = static_cast<int>(std::min<Eigen::Index>(r_max, spectrum.d - 1));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(last, 0)));
    for (int j = 1; j <= last; ++j) {
        const double num = spectrum.at(static_cast<std::size_t>(j - 1)) + perturbation;
        const double den = spectrum.at(static_cast<std::size_t>(j)) + perturbation;
        if (den > 0.0) out.push_back(num / den);
        else out.push_back(num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Estimators

/// Eigenvalue thresholding at d^tau * sigma2_hat * sqrt(log log d) on the covariance spectrum.
/// `g_multiplier` rescales g(d) (sensitivity studies).
inline int estimate_bn(const Spectrum& spectrum, const EstimatorConfig& config, double g_multiplier = 1.0) {
    const double g = g_multiplier * g_of(GRule::sigma2_loglog, spectrum, config);
    const double threshold = std::pow(static_cast<double>(spectrum.d), config.tau) * g;
    return count_above(spectrum, threshold, config.r_max);
}

/// max{ j <= r_max : ER_j > 1 + gamma } with perturbation d^tau * g_value.
inline int estimate_perturbed_ratio(const Spectrum& spectrum, const EstimatorConfig& config, double g_value,
                                    double gamma) {
    if (g_value < 0.0) throw std::invalid_argument("estimate_perturbed_ratio: g must be nonnegative");
    const double perturbation = std::pow(static_cast<double>(spectrum.d), config.tau) * g_value;
    const auto er = er_statistics(spectrum, perturbation, config.r_max);
    int best = 0;
    for (std::size_t k = 0; k < er.size(); ++k)
        if (er[k] > 1.0 + gamma) best = static_cast<int>(k) + 1;
    return best;
}

inline int estimate_perturbed_ratio(const Spectrum& spectrum, const EstimatorConfig& config, double g_value) {
    return estimate_perturbed_ratio(spectrum, config, g_value, config.gamma);
}

/// The correlation-based ratio estimator with the configured g rule.
inline int estimate_p_cor(const Spectrum& correlation, const EstimatorConfig& config) {
    return estimate_perturbed_ratio(correlation, config, config.g_scale * g_of(config.g_rule, correlation, config));
}

/// PC_p1: threshold sigma2_hat (1 + d/n) log(dn / (d + n)) on the covariance spectrum.
inline int estimate_pc_p1(const Spectrum& spectrum, int r_max) {
    if (spectrum.d < 1 || spectrum.n < 1) throw std::invalid_argument("estimate_pc_p1: empty spectrum");
    const double d = static_cast<double>(spectrum.d);
    const double n = static_cast<double>(spectrum.n);
    const double threshold = tail_mass(spectrum, r_max) * (1.0 + d / n) * std::log(d * n / (d + n));
    return count_above(spectrum, threshold, r_max);
}

/// Ratio estimator on the correlation spectrum with g = median eigenvalue and gamma = pelger_gamma.
inline int estimate_pelger(const Spectrum& correlation, const EstimatorConfig& config) {
    return estimate_perturbed_ratio(correlation, config, median_eigenvalue(correlation), config.pelger_gamma);
}

/// Eigenvalue-difference thresholding with the edge-distribution calibration
/// of delta:
///   1. j = r_max + 1.
///   2. OLS slope of lambda_j..lambda_{j+4} on (j-1)^{2/3}..(j+3)^{2/3}; delta = 2 |slope|.
///   3. r = max{ k <= r_max : lambda_k - lambda_{k+1} >= delta } (0 if none).
///   4. j = r + 1; repeat from 2 until j is unchanged, at most 8 times.
inline int estimate_onatski_ed(const Spectrum& spectrum, int r_max) {
    if (r_max < 1) throw std::invalid_argument("estimate_onatski_ed: r_max must be >= 1");
    if (spectrum.d < r_max + 5) {
        throw std::invalid_argument("estimate_onatski_ed: need at least r_max + 5 = " + std::to_string(r_max + 5) +
                                    " eigenvalues, spectrum has d = " + std::to_string(spectrum.d));
    }
    constexpr int kWindow = 5;
    constexpr int kMaxIterations = 8;

    auto calibrate = [&](int j) {
        std::array<double, kWindow> x{}, y{};
        double mx = 0.0, my = 0.0;
        for (int k = 0; k < kWindow; ++k) {
            x[k] = std::pow(static_cast<double>(j - 1 + k), 2.0 / 3.0);
            y[k] = spectrum.at(static_cast<std::size_t>(j - 1 + k));
            mx += x[k];
            my += y[k];
        }
        mx /= kWindow;
        my /= kWindow;
        double sxy = 0.0, sxx = 0.0;
        for (int k = 0; k < kWindow; ++k) {
            sxy += (x[k] - mx) * (y[k] - my);
            sxx += (x[k] - mx) * (x[k] - mx);
        }
        return 2.0 * std::abs(sxy / sxx);
    };

    auto threshold_gaps = [&](double delta) {
        int best = 0;
        for (int k = 1; k <= r_max; ++k) {
            const double gap = spectrum.at(static_cast<std::size_t>(k - 1)) - spectrum.at(static_cast<std::size_t>(k));
            if (gap >= delta) best = k;
        }
        return best;
    };

    int j = r_max + 1;
    int estimate = 0;
    for (int it = 0; it < kMaxIterations; ++it) {
        estimate = threshold_gaps(calibrate(j));
        if (estimate + 1 == j) break;
        j = estimate + 1;
    }
    return estimate;
}

/// All five estimators for one replication. Both spectra must come from the same increments.
inline EstimateSet estimate_all(const Spectrum& covariance, const Spectrum& correlation, const EstimatorConfig& config) {
    if (covariance.source != SpectrumSource::covariance || correlation.source != SpectrumSource::correlation)
        throw std::invalid_argument("estimate_all: spectra passed in the wrong roles");
    if (covariance.d != correlation.d || covariance.n != correlation.n)
        throw std::invalid_argument("estimate_all: spectra have different shapes");
    EstimateSet e;
    e.bn = estimate_bn(covariance, config);
    e.p_cor = estimate_p_cor(correlation, config);
    e.pc_p1 = estimate_pc_p1(covariance, config.r_max);
    e.pelger = estimate_pelger(correlation, config);
    e.onatski = estimate_onatski_ed(correlation, config.r_max);
    return e;
}

}  // namespace weakfactor
