#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weakfactor/error.hpp"
#include "weakfactor/estimators.hpp"
#include "weakfactor/parallel.hpp"
#include "weakfactor/processes.hpp"
#include "weakfactor/random.hpp"
#include "weakfactor/spectra.hpp"

namespace weakfactor {

enum class FactorKind { sv, wiener };

// Full generative and estimation setup of one Monte Carlo experiment.
struct ModelConfig {
    Eigen::Index n = 78;
    Eigen::Index d = 500;
    FactorKind factor_kind = FactorKind::sv;
    SvFactorParams sv{};
    int refinement = 1;
    IdiosyncraticSpec idio{};
    EstimatorConfig estimator{};
    int replications = 1000;
    std::uint64_t master_seed = 1;
    int true_r_tau = 6;

    void validate() const {
        if (n < 2) throw config_error("n", "must be >= 2");
        if (d < 3) throw config_error("d", "must be >= 3");
        if (replications < 1) throw config_error("replications", "must be >= 1");
        if (refinement < 1) throw config_error("refinement", "must be >= 1");
        if (!(idio.theta >= 0.0)) throw config_error("theta", "must be nonnegative");
        if (!(idio.phi >= 0.0 && idio.phi < 1.0)) throw config_error("phi", "must lie in [0, 1)");
        if (idio.kind == IdiosyncraticSpec::Kind::nts && !(idio.alpha > 0.0 && idio.alpha < 1.0))
            throw config_error("alpha", "must lie in (0, 1)");
        if (!(sv.kappa > 0.0)) throw config_error("sv_kappa", "must be positive");
        if (!(std::abs(sv.rho) <= 1.0)) throw config_error("sv_rho", "must lie in [-1, 1]");
        const auto& e = estimator;
        if (!(e.tau > 0.0 && e.tau < 1.0)) throw config_error("tau", "must lie in (0, 1)");
        if (e.r_max < 1) throw config_error("r_max", "must be >= 1");
        if (d < e.r_max + 5) throw config_error("d", "must be >= r_max + 5 for the eigenvalue-difference estimator");
        if (!(e.gamma > 0.0)) throw config_error("gamma", "must be positive");
        if (!(e.pelger_gamma > 0.0)) throw config_error("pelger_gamma", "must be positive");
        if (!(e.g_scale >= 0.0)) throw config_error("g_scale", "must be nonnegative");
        if (!(e.g_value >= 0.0)) throw config_error("g_value", "must be nonnegative");
        if (true_r_tau < 0) throw config_error("true_r_tau", "must be nonnegative");
    }

    bool operator==(const ModelConfig&) const = default;
};

/// Draws one synthetic market: fresh loadings, factor path and idiosyncratic
/// path (in that order from `rng`), returning dY (d x n).
template <random_source R>
IncrementMatrix simulate_observations(const ModelConfig& config, R& rng) {
    LoadingSpec loading_spec;
    loading_spec.d = config.d;
    const Eigen::MatrixXd beta = generate_loadings(loading_spec, rng);
    const auto r = static_cast<int>(beta.cols());

    IncrementMatrix factors;
    if (config.factor_kind == FactorKind::sv) {
        SvFactorParams sv = config.sv;
        sv.r = r;
        factors = simulate_sv_factors(sv, config.n, config.refinement, rng).increments;
    } else {
        factors = wiener_increments(r, config.n, rng);
    }
    const IncrementMatrix idio = idiosyncratic_increments(config.idio, config.n, config.d, rng);
    return assemble_observations(beta, factors, idio);
}

/// Estimates for replication `index`, a pure function of (config, index).
/// A degenerate draw is retried once on a fresh sub-stream.
inline EstimateSet run_replication(const ModelConfig& config, std::uint64_t index) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        random_stream rng(config.master_seed, replication_stream(index, attempt));
        try {
            const IncrementMatrix y = simulate_observations(config, rng);
            const Spectrum cov = realized_spectrum(y);
            const Spectrum cor = realized_correlation_spectrum(y);
            return estimate_all(cov, cor, config.estimator);
        } catch (const degenerate_input_error&) {
            if (attempt >= 1) throw;
        }
    }
}

struct EstimatorSummary {
    double mean = 0.0;
    double prob_hit = 0.0;

    bool operator==(const EstimatorSummary&) const = default;
};

struct MCReport {
    ModelConfig config;
    std::array<EstimatorSummary, 5> summary{};  // ordered as EstimateSet::names
    int replications = 0;                        // successful replications
    int failed = 0;
    std::vector<EstimateSet> per_replication;   // successful, in index order

    const EstimatorSummary& operator[](std::string_view estimator) const {
        for (std::size_t k = 0; k < EstimateSet::names.size(); ++k)
            if (EstimateSet::names[k] == estimator) return summary[k];
        throw std::out_of_range("unknown estimator '" + std::string(estimator) + "'");
    }
};

/// Mean and P(estimate == true_r) per estimator, folded in index order.
inline std::array<EstimatorSummary, 5> summarize(const std::vector<EstimateSet>& sets, int true_r) {
    std::array<EstimatorSummary, 5> out{};
    if (sets.empty()) return out;
    std::array<long long, 5> sums{}, hits{};
    for (const auto& s : sets) {
        const auto v = s.as_array();
        for (std::size_t k = 0; k < v.size(); ++k) {
            sums[k] += v[k];
            hits[k] += v[k] == true_r ? 1 : 0;
        }
    }
    const double count = static_cast<double>(sets.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].mean = static_cast<double>(sums[k]) / count;
        out[k].prob_hit = static_cast<double>(hits[k]) / count;
    }
    return out;
}

struct ExecutionOptions {
    unsigned workers = 0;  // 0: hardware concurrency
};

/// Runs config.replications replications and aggregates them. The report
/// does not depend on the worker count. Aborts when more than 1% of the
/// replications fail even after resampling.
inline MCReport run_experiment(const ModelConfig& config, const ExecutionOptions& exec = {}) {
    config.validate();
    const auto count = static_cast<std::size_t>(config.replications);
    std::vector<std::optional<EstimateSet>> slots(count);
    parallel_for(count, exec.workers, [&](std::size_t i) {
        try {
            slots[i] = run_replication(config, i);
        } catch (const degenerate_input_error&) {
            slots[i].reset();
        }
    });

    MCReport report;
    report.config = config;
    report.per_replication.reserve(count);
    for (const auto& slot : slots) {
        if (slot) report.per_replication.push_back(*slot);
        else ++report.failed;
    }
    if (static_cast<double>(report.failed) > 0.01 * static_cast<double>(count)) {
        throw computation_error("experiment aborted: " + std::to_string(report.failed) + " of " +
                                std::to_string(count) + " replications failed");
    }
    report.replications = static_cast<int>(report.per_replication.size());
    report.summary = summarize(report.per_replication, config.true_r_tau);
    return report;
}

enum class SweepParameter { gamma, g_scale, theta, phi };

inline std::string_view to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::gamma: return "gamma";
        case SweepParameter::g_scale: return "g_scale";
        case SweepParameter::theta: return "theta";
        case SweepParameter::phi: return "phi";
    }
    return "?";
}

inline ModelConfig with_parameter(ModelConfig config, SweepParameter p, double value) {
    switch (p) {
        case SweepParameter::gamma: config.estimator.gamma = value; break;
        case SweepParameter::g_scale: config.estimator.g_scale = value; break;
        case SweepParameter::theta: config.idio.theta = value; break;
        case SweepParameter::phi: config.idio.phi = value; break;
    }
    return config;
}

/// One report per grid value. Every grid point reuses the base master seed,
/// so the points are compared on common random numbers.
inline std::vector<MCReport> run_sweep(const ModelConfig& base, SweepParameter parameter,
                                       const std::vector<double>& grid, const ExecutionOptions& exec = {}) {
    if (grid.empty()) throw config_error("grid", "sweep grid must be nonempty");
    std::vector<MCReport> out;
    out.reserve(grid.size());
    for (double value : grid) out.push_back(run_experiment(with_parameter(base, parameter, value), exec));
    return out;
}

}  // namespace weakfactor
