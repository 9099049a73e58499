#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weakfactor/error.hpp"
#include "weakfactor/montecarlo.hpp"
#include "weakfactor/parallel.hpp"
#include "weakfactor/processes.hpp"
#include "weakfactor/random.hpp"
#include "weakfactor/spectra.hpp"

// Desk-scale scaling studies of spectral-norm bounds for realized covariance
// matrices. Universal constants are unobservable, so every study reports
// observed/envelope ratios and log-log slopes rather than raw bound checks.

namespace weakfactor::bounds {

struct GridPoint {
    Eigen::Index d = 0;
    Eigen::Index n = 0;
};

struct ScalingPoint {
    Eigen::Index d = 0;
    Eigen::Index n = 0;
    int index = 0;            // eigenvalue index j for eigen_scaling_study, else 0
    double observed = 0.0;    // median over replications
    double envelope = 0.0;    // theoretical rate at (d, n), constant omitted
    double ratio = 0.0;       // observed / envelope
    std::vector<double> samples;  // per-replication statistic, replication order
};

struct SlopeFit {
    std::string label;
    double slope = 0.0;
    double band_lo = 0.0;  // bootstrap 2.5% quantile
    double band_hi = 0.0;  // bootstrap 97.5% quantile
    double target = 0.0;   // reference exponent or upper bound (study-specific)
};

struct ScalingStudyResult {
    std::vector<ScalingPoint> points;
    std::vector<SlopeFit> slopes;

    double ratio_spread() const {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& p : points) {
            lo = std::min(lo, p.ratio);
            hi = std::max(hi, p.ratio);
        }
        return points.empty() ? 0.0 : hi / lo;
    }

    const ScalingPoint* find(Eigen::Index d, Eigen::Index n, int index = 0) const {
        for (const auto& p : points)
            if (p.d == d && p.n == n && p.index == index) return &p;
        return nullptr;
    }

    const SlopeFit* slope(const std::string& label) const {
        for (const auto& s : slopes)
            if (s.label == label) return &s;
        return nullptr;
    }
};

struct StudyOptions {
    int replications = 200;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    double theta = 1.5;
    double phi = 0.1;
    int bootstrap = 200;
};

// ---------------------------------------------------------------------------
// Small statistics helpers

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

// OLS slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto k = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// Log-log slope of median statistic against `axis` (d or n) over the given
/// points, with a percentile bootstrap band from resampling replications.
inline SlopeFit fit_loglog_slope(std::string label, const std::vector<const ScalingPoint*>& points, bool against_d,
                                 int bootstrap, std::uint64_t seed, double target = 0.0) {
    if (points.size() < 2) throw std::invalid_argument("fit_loglog_slope: need at least two grid points");
    std::vector<double> x, y;
    for (const auto* p : points) {
        x.push_back(std::log(static_cast<double>(against_d ? p->d : p->n)));
        y.push_back(std::log(p->observed));
    }
    SlopeFit fit;
    fit.label = std::move(label);
    fit.target = target;
    fit.slope = ols_slope(x, y);

    random_stream rng(seed, 0xB007u);
    std::vector<double> boot;
    boot.reserve(static_cast<std::size_t>(bootstrap));
    std::vector<double> resample;
    for (int b = 0; b < bootstrap; ++b) {
        std::vector<double> yb;
        for (const auto* p : points) {
            resample.resize(p->samples.size());
            for (auto& v : resample) v = p->samples[rng.below(p->samples.size())];
            yb.push_back(std::log(median(resample)));
        }
        boot.push_back(ols_slope(x, yb));
    }
    if (boot.empty()) {
        fit.band_lo = fit.band_hi = fit.slope;
    } else {
        std::sort(boot.begin(), boot.end());
        auto quantile = [&](double q) {
            const double pos = q * static_cast<double>(boot.size() - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto hi = std::min(lo + 1, boot.size() - 1);
            return boot[lo] + (pos - static_cast<double>(lo)) * (boot[hi] - boot[lo]);
        };
        fit.band_lo = quantile(0.025);
        fit.band_hi = quantile(0.975);
    }
    return fit;
}

namespace detail {

// Stream id for replication r of grid point g.
constexpr std::uint64_t study_stream(std::size_t grid_index, std::size_t replication) {
    return (static_cast<std::uint64_t>(grid_index + 1) << 32) | static_cast<std::uint64_t>(replication);
}

inline Eigen::MatrixXd toeplitz(Eigen::Index d, double phi) {
    Eigen::MatrixXd t(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) t(j, k) = std::pow(phi, static_cast<double>(std::abs(j - k)));
    return t;
}

inline double symmetric_spectral_norm(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw computation_error("spectral norm: eigensolver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

// Largest d for which concentration_study forms the d x d difference matrix.
inline constexpr Eigen::Index kConcentrationMaxDimension = 400;

// Probability level of the concentration envelope: with u = ln 4 the bound
// holds with probability at least 1 - 2e^{-u} = 1/2, matching a median.
inline const double kConcentrationU = std::log(4.0);

inline double concentration_envelope(Eigen::Index d, Eigen::Index n, double lambda, double u = kConcentrationU) {
    const double q = (static_cast<double>(d) + u) / static_cast<double>(n);
    return lambda * (q + std::sqrt(q));
}

inline double jump_norm_envelope(Eigen::Index d, Eigen::Index n, double lambda) {
    const double dd = static_cast<double>(d);
    const double m = static_cast<double>(std::min(d, n));
    const double log_d = std::log(dd);
    return lambda * log_d * log_d * (dd / static_cast<double>(n) * std::log(m) + std::log(m) * std::log(m));
}

/// Concentration of [Z, Z]^n_1 around [Z, Z]_1 = theta * Toeplitz(phi) for the
/// continuous idiosyncratic model Z = sqrt(theta) A W. Per grid point records
/// the median spectral-norm error (`samples`) and, separately, the Frobenius
/// error (see `frobenius_samples`). The envelope uses
/// Lambda = theta * ||Toeplitz(phi)||.
struct ConcentrationResult : ScalingStudyResult {
    std::vector<std::vector<double>> frobenius_samples;  // parallel to points
};

inline ConcentrationResult concentration_study(const std::vector<GridPoint>& grid, const StudyOptions& options) {
    if (grid.empty()) throw std::invalid_argument("concentration_study: empty grid");
    if (options.replications < 1) throw std::invalid_argument("concentration_study: replications must be >= 1");
    IdiosyncraticSpec spec;
    spec.kind = IdiosyncraticSpec::Kind::wiener;
    spec.theta = options.theta;
    spec.phi = options.phi;
    spec.validate();

    ConcentrationResult result;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto [d, n] = grid[g];
        if (d > kConcentrationMaxDimension) {
            throw std::length_error("concentration_study: d = " + std::to_string(d) + " exceeds the cap " +
                                    std::to_string(kConcentrationMaxDimension));
        }
        if (d < 1 || n < 1) throw std::invalid_argument("concentration_study: empty grid point");
        const Eigen::MatrixXd target = spec.theta * detail::toeplitz(d, spec.phi);
        const double lambda = std::max(detail::symmetric_spectral_norm(target), 1e-300);

        const auto reps = static_cast<std::size_t>(options.replications);
        std::vector<double> spectral(reps), frobenius(reps);
        parallel_for(reps, options.workers, [&](std::size_t r) {
            random_stream rng(options.seed, detail::study_stream(g, r));
            const IncrementMatrix z = idiosyncratic_increments(spec, n, d, rng);
            const Eigen::MatrixXd diff = realized_covariance(z) - target;
            spectral[r] = detail::symmetric_spectral_norm(diff);
            frobenius[r] = diff.norm();
        });

        ScalingPoint p;
        p.d = d;
        p.n = n;
        p.observed = median(spectral);
        p.envelope = concentration_envelope(d, n, lambda);
        p.ratio = p.observed / p.envelope;
        p.samples = std::move(spectral);
        result.points.push_back(std::move(p));
        result.frobenius_samples.push_back(std::move(frobenius));
    }
    return result;
}

/// Ratio median_error(d, n) / median_error(d, 4n); nullopt if either point is missing.
inline std::optional<double> shrink_factor(const ScalingStudyResult& result, Eigen::Index d, Eigen::Index n) {
    const auto* a = result.find(d, n);
    const auto* b = result.find(d, 4 * n);
    if (!a || !b || b->observed <= 0.0) return std::nullopt;
    return a->observed / b->observed;
}

struct NormGrowth {
    SlopeFit spectral;
    SlopeFit frobenius;
};

/// Growth in d, at fixed n, of the spectral and the Frobenius concentration error.
inline NormGrowth norm_growth_comparison(const std::vector<Eigen::Index>& d_grid, Eigen::Index n,
                                         const StudyOptions& options) {
    std::vector<GridPoint> grid;
    for (auto d : d_grid) grid.push_back({d, n});
    ConcentrationResult conc = concentration_study(grid, options);

    std::vector<ScalingPoint> frob_points;
    for (std::size_t k = 0; k < conc.points.size(); ++k) {
        ScalingPoint p = conc.points[k];
        p.samples = conc.frobenius_samples[k];
        p.observed = median(p.samples);
        frob_points.push_back(std::move(p));
    }
    std::vector<const ScalingPoint*> sp, fp;
    for (const auto& p : conc.points) sp.push_back(&p);
    for (const auto& p : frob_points) fp.push_back(&p);
    return {fit_loglog_slope("spectral_d_slope", sp, true, options.bootstrap, options.seed),
            fit_loglog_slope("frobenius_d_slope", fp, true, options.bootstrap, options.seed)};
}

/// ||[Z, Z]^n_1|| for the NTS idiosyncratic model (largest eigenvalue via the
/// Gram route), against the rate
///   Lambda log^2 d ((d/n) log(d ^ n) + log^2(d ^ n)),  Lambda = theta.
/// Adds one d-slope fit per n that appears with at least two d values.
inline ScalingStudyResult jump_norm_study(const std::vector<GridPoint>& grid, double alpha,
                                          const StudyOptions& options) {
    if (grid.empty()) throw std::invalid_argument("jump_norm_study: empty grid");
    IdiosyncraticSpec spec;
    spec.kind = IdiosyncraticSpec::Kind::nts;
    spec.alpha = alpha;
    spec.theta = options.theta;
    spec.phi = options.phi;
    spec.validate();

    ScalingStudyResult result;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto [d, n] = grid[g];
        const auto reps = static_cast<std::size_t>(options.replications);
        std::vector<double> norms(reps);
        parallel_for(reps, options.workers, [&](std::size_t r) {
            random_stream rng(options.seed, detail::study_stream(g, r));
            norms[r] = realized_spectrum(idiosyncratic_increments(spec, n, d, rng)).at(0);
        });
        ScalingPoint p;
        p.d = d;
        p.n = n;
        p.observed = median(norms);
        p.envelope = jump_norm_envelope(d, n, spec.theta);
        p.ratio = p.observed / p.envelope;
        p.samples = std::move(norms);
        result.points.push_back(std::move(p));
    }

    std::vector<Eigen::Index> ns;
    for (const auto& p : result.points)
        if (std::find(ns.begin(), ns.end(), p.n) == ns.end()) ns.push_back(p.n);
    for (auto n : ns) {
        std::vector<const ScalingPoint*> at_n;
        for (const auto& p : result.points)
            if (p.n == n) at_n.push_back(&p);
        if (at_n.size() >= 2) {
            result.slopes.push_back(fit_loglog_slope("d_slope@n=" + std::to_string(n), at_n, true,
                                                     options.bootstrap, options.seed));
        }
    }
    return result;
}

// Strength exponents compared against for eigenvalues 1..6 and the bound for j = 7.
inline const std::vector<double>& relevant_strengths() {
    static const std::vector<double> s{1.0, 0.85, 0.75, 2.0 / 3.0, 2.0 / 3.0, 0.6};
    return s;
}

/// Growth of lambda_j([Y, Y]^n_1) in d for the full factor model with Wiener
/// factors. Slopes "j=1".."j=6" target the loading strengths; "j=7" carries
/// the bound tau + 0.15 as its target.
inline ScalingStudyResult eigen_scaling_study(const std::vector<Eigen::Index>& d_grid, Eigen::Index n,
                                              const StudyOptions& options, double tau = 0.5) {
    if (d_grid.size() < 2) throw std::invalid_argument("eigen_scaling_study: need at least two d values");
    constexpr int kLeading = 7;

    ScalingStudyResult result;
    for (std::size_t g = 0; g < d_grid.size(); ++g) {
        ModelConfig config;
        config.n = n;
        config.d = d_grid[g];
        config.factor_kind = FactorKind::wiener;
        config.idio.kind = IdiosyncraticSpec::Kind::wiener;
        config.idio.theta = options.theta;
        config.idio.phi = options.phi;

        const auto reps = static_cast<std::size_t>(options.replications);
        std::vector<std::array<double, kLeading>> leading(reps);
        parallel_for(reps, options.workers, [&](std::size_t r) {
            random_stream rng(options.seed, detail::study_stream(g, r));
            const Spectrum s = realized_spectrum(simulate_observations(config, rng));
            for (int j = 0; j < kLeading; ++j) leading[r][static_cast<std::size_t>(j)] = s.at(static_cast<std::size_t>(j));
        });
        for (int j = 0; j < kLeading; ++j) {
            ScalingPoint p;
            p.d = config.d;
            p.n = n;
            p.index = j + 1;
            for (const auto& row : leading) p.samples.push_back(row[static_cast<std::size_t>(j)]);
            p.observed = median(p.samples);
            p.envelope = std::pow(static_cast<double>(config.d),
                                  j < 6 ? relevant_strengths()[static_cast<std::size_t>(j)] : tau);
            p.ratio = p.observed / p.envelope;
            result.points.push_back(std::move(p));
        }
    }
    for (int j = 1; j <= kLeading; ++j) {
        std::vector<const ScalingPoint*> pts;
        for (const auto& p : result.points)
            if (p.index == j) pts.push_back(&p);
        const double target = j <= 6 ? relevant_strengths()[static_cast<std::size_t>(j - 1)] : tau + 0.15;
        result.slopes.push_back(
            fit_loglog_slope("j=" + std::to_string(j), pts, true, options.bootstrap, options.seed, target));
    }
    return result;
}

}  // namespace weakfactor::bounds
