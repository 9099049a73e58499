#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weakfactor/random.hpp"
#include "weakfactor/stable.hpp"

namespace weakfactor {

// Per-interval increments: rows are components (assets, factors), columns are
// the n observation intervals of [0, 1].
using IncrementMatrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Brownian and normal tempered stable increments

template <random_source R>
IncrementMatrix wiener_increments(Eigen::Index rows, Eigen::Index n, R& rng) {
    if (rows < 1 || n < 1) throw std::invalid_argument("wiener_increments: empty shape");
    const double sd = std::sqrt(1.0 / static_cast<double>(n));
    IncrementMatrix out(rows, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < rows; ++j) out(j, i) = sd * rng.normal();
    return out;
}

// Normal variance mixture: out(j, i) = sqrt(variances(j, i)) * zeta(j, i) with
// zeta i.i.d. standard normal.
template <random_source R>
IncrementMatrix mix_normal(const Eigen::MatrixXd& variances, R& rng) {
    if (variances.size() == 0) throw std::invalid_argument("mix_normal: empty shape");
    IncrementMatrix out(variances.rows(), variances.cols());
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
        for (Eigen::Index j = 0; j < out.rows(); ++j) {
            const double v = variances(j, i);
            if (v < 0.0) throw std::invalid_argument("mix_normal: negative variance");
            out(j, i) = std::sqrt(v) * rng.normal();
        }
    }
    return out;
}

// How the PTS subordinator is shared across the components of L.
enum class SubordinatorCoupling {
    independent,  // each component is its own one-dimensional NTS process
    common        // one subordinator draw per interval drives all d components
};

/// Increments of a d-dimensional symmetric NTS Levy process with unit-moment
/// subordinator on the grid i/n: L_{1/n} ~ sqrt(V_n) zeta, V_n ~ PTS(alpha, c/n, lambda).
template <random_source R>
IncrementMatrix nts_increments(double alpha, Eigen::Index n, Eigen::Index d, R& rng,
                               SubordinatorCoupling coupling = SubordinatorCoupling::independent) {
    if (n < 1 || d < 1) throw std::invalid_argument("nts_increments: empty shape");
    const PtsParams step = PtsParams::unit_moments(alpha).over_time(1.0 / static_cast<double>(n));
    Eigen::MatrixXd variances(d, n);
    if (coupling == SubordinatorCoupling::common) {
        for (Eigen::Index i = 0; i < n; ++i) variances.col(i).setConstant(sample_pts(step, rng));
    } else {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) variances(j, i) = sample_pts(step, rng);
    }
    return mix_normal(variances, rng);
}

// ---------------------------------------------------------------------------
// Stochastic-volatility factors

struct SvFactorParams {
    int r = 9;
    double mu = 0.03;
    double a = -5.0 / 16.0;
    double b = 1.0 / 8.0;
    double kappa = 1.0 / 40.0;
    double rho = -0.3;

    void validate() const {
        if (r < 1) throw std::invalid_argument("SvFactorParams: r must be positive");
        if (!(kappa > 0.0)) throw std::invalid_argument("SvFactorParams: kappa must be positive");
        if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("SvFactorParams: |rho| must be <= 1");
    }

    double stationary_variance() const { return 1.0 / (2.0 * kappa); }

    bool operator==(const SvFactorParams&) const = default;
};

struct SvFactorPath {
    IncrementMatrix increments;    // r x n
    Eigen::VectorXd initial_state; // log-volatility driver at t = 0, per factor
};

/// Simulates r independent factors
///   dF = mu dt + sigma (rho dB + sqrt(1 - rho^2) dW),  sigma = exp(a + b x),
///   dx = -kappa x dt + dB,  x_0 ~ N(0, 1/(2 kappa)).
///
/// On each sub-step the pair (OU innovation, Brownian increment of B) is drawn
/// from its exact joint Gaussian law, so x follows the exact OU transition
/// while F takes an Euler step driven by the same B shocks (leverage). The
/// path runs on n * refinement sub-steps and is aggregated to n increments.
template <random_source R>
SvFactorPath simulate_sv_factors(const SvFactorParams& params, Eigen::Index n, int refinement, R& rng) {
    params.validate();
    if (n < 1) throw std::invalid_argument("simulate_sv_factors: n must be positive");
    if (refinement < 1) throw std::invalid_argument("simulate_sv_factors: refinement must be >= 1");

    const double dt = 1.0 / (static_cast<double>(n) * refinement);
    const double decay = std::exp(-params.kappa * dt);
    const double ou_var = (1.0 - decay * decay) / (2.0 * params.kappa);
    const double cross = (1.0 - decay) / params.kappa;  // Cov(OU innovation, dB)
    const double loading = cross / dt;
    const double residual_sd = std::sqrt(std::max(0.0, ou_var - cross * cross / dt));
    const double sqrt_dt = std::sqrt(dt);
    const double rho_perp = std::sqrt(1.0 - params.rho * params.rho);

    SvFactorPath path{IncrementMatrix::Zero(params.r, n), Eigen::VectorXd(params.r)};
    for (int j = 0; j < params.r; ++j) {
        double x = std::sqrt(params.stationary_variance()) * rng.normal();
        path.initial_state(j) = x;
        for (Eigen::Index i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = 0; k < refinement; ++k) {
                const double sigma = std::exp(params.a + params.b * x);
                const double db = sqrt_dt * rng.normal();
                const double dw = sqrt_dt * rng.normal();
                acc += params.mu * dt + sigma * (params.rho * db + rho_perp * dw);
                x = decay * x + loading * db + residual_sd * rng.normal();
            }
            path.increments(j, i) = acc;
        }
    }
    return path;
}

// ---------------------------------------------------------------------------
// Sparse weak-factor loadings

// Number of nonzero loadings in one column: round(d^exponent) or round(ln d).
struct ColumnRule {
    enum class Kind { power, log };
    Kind kind = Kind::power;
    double exponent = 1.0;

    static ColumnRule power(double e) { return {Kind::power, e}; }
    static ColumnRule log() { return {Kind::log, 0.0}; }

    Eigen::Index count(Eigen::Index d) const {
        const double x = static_cast<double>(d);
        const double raw = kind == Kind::log ? std::log(x) : std::pow(x, exponent);
        return static_cast<Eigen::Index>(std::lround(raw));  // ties away from zero
    }

    // Growth exponent of the column's squared norm in d (0 for the log column).
    double strength() const { return kind == Kind::log ? 0.0 : exponent; }

    bool operator==(const ColumnRule&) const = default;
};

inline std::vector<ColumnRule> default_column_rules() {
    return {ColumnRule::power(1.0),       ColumnRule::power(0.85),      ColumnRule::power(0.75),
            ColumnRule::power(2.0 / 3.0), ColumnRule::power(2.0 / 3.0), ColumnRule::power(0.6),
            ColumnRule::power(1.0 / 3.0), ColumnRule::power(0.25),      ColumnRule::log()};
}

struct LoadingSpec {
    Eigen::Index d = 100;
    std::vector<ColumnRule> rules = default_column_rules();
    double entry_mean = 1.0;
    double entry_sd = 1.0;

    std::vector<Eigen::Index> column_sizes() const {
        std::vector<Eigen::Index> out;
        out.reserve(rules.size());
        for (const auto& rule : rules) out.push_back(rule.count(d));
        return out;
    }

    // Number of columns whose strength exceeds tau.
    int relevant_count(double tau) const {
        int r = 0;
        for (std::size_t j = 0; j < rules.size(); ++j)
            if (rules[j].strength() > tau) r = static_cast<int>(j) + 1;
        return r;
    }
};

/// d x r loading matrix; column j has exactly d_j nonzero N(mean, sd^2) entries
/// at row positions drawn uniformly without replacement.
template <random_source R>
Eigen::MatrixXd generate_loadings(const LoadingSpec& spec, R& rng) {
    if (spec.d < 3) throw std::invalid_argument("generate_loadings: d must be >= 3");
    if (spec.rules.empty()) throw std::invalid_argument("generate_loadings: no columns");
    const auto sizes = spec.column_sizes();
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(spec.d, static_cast<Eigen::Index>(sizes.size()));
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(spec.d));
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        const Eigen::Index dj = sizes[j];
        if (dj > spec.d || dj < 0) {
            throw std::invalid_argument("generate_loadings: column " + std::to_string(j + 1) + " needs " +
                                        std::to_string(dj) + " nonzeros but d = " + std::to_string(spec.d));
        }
        std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        for (Eigen::Index k = 0; k < dj; ++k) {
            const auto pick = k + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(spec.d - k)));
            std::swap(rows[static_cast<std::size_t>(k)], rows[static_cast<std::size_t>(pick)]);
            beta(rows[static_cast<std::size_t>(k)], static_cast<Eigen::Index>(j)) =
                spec.entry_mean + spec.entry_sd * rng.normal();
        }
    }
    return beta;
}

// ---------------------------------------------------------------------------
// Idiosyncratic component

struct IdiosyncraticSpec {
    enum class Kind { wiener, nts };
    Kind kind = Kind::wiener;
    double alpha = 0.5;  // only used for nts
    double theta = 1.5;
    double phi = 0.1;
    SubordinatorCoupling coupling = SubordinatorCoupling::independent;  // only used for nts

    void validate() const {
        if (!(theta >= 0.0)) throw std::invalid_argument("IdiosyncraticSpec: theta must be nonnegative");
        if (!(phi >= 0.0 && phi < 1.0)) throw std::invalid_argument("IdiosyncraticSpec: phi must lie in [0, 1)");
        if (kind == Kind::nts && !(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("IdiosyncraticSpec: alpha must lie in (0, 1)");
    }

    bool operator==(const IdiosyncraticSpec&) const = default;
};

/// In-place multiplication of every column by the lower-triangular A with
/// A A^T = (phi^|j-k|), via x_1 = e_1, x_j = phi x_{j-1} + sqrt(1 - phi^2) e_j.
inline void apply_ar1_mixing(Eigen::Ref<Eigen::MatrixXd> m, double phi) {
    if (phi == 0.0) return;
    const double innovation = std::sqrt(1.0 - phi * phi);
    for (Eigen::Index j = 1; j < m.rows(); ++j)
        m.row(j) = phi * m.row(j - 1) + innovation * m.row(j);
}

/// Increments of Z = sqrt(theta) A L, with A applied by apply_ar1_mixing.
template <random_source R>
IncrementMatrix idiosyncratic_increments(const IdiosyncraticSpec& spec, Eigen::Index n, Eigen::Index d, R& rng) {
    spec.validate();
    IncrementMatrix z = spec.kind == IdiosyncraticSpec::Kind::wiener ? wiener_increments(d, n, rng)
                                                                     : nts_increments(spec.alpha, n, d, rng, spec.coupling);
    apply_ar1_mixing(z, spec.phi);
    z *= std::sqrt(spec.theta);
    return z;
}

// dY = beta dF + dZ.
inline IncrementMatrix assemble_observations(const Eigen::MatrixXd& loadings,
                                             const IncrementMatrix& factor_increments,
                                             const IncrementMatrix& idio_increments) {
    if (loadings.cols() != factor_increments.rows() || loadings.rows() != idio_increments.rows() ||
        factor_increments.cols() != idio_increments.cols()) {
        throw std::invalid_argument("assemble_observations: shape mismatch (loadings " +
                                    std::to_string(loadings.rows()) + "x" + std::to_string(loadings.cols()) +
                                    ", factors " + std::to_string(factor_increments.rows()) + "x" +
                                    std::to_string(factor_increments.cols()) + ", idiosyncratic " +
                                    std::to_string(idio_increments.rows()) + "x" +
                                    std::to_string(idio_increments.cols()) + ")");
    }
    IncrementMatrix y = idio_increments;
    y.noalias() += loadings * factor_increments;
    return y;
}

}  // namespace weakfactor
