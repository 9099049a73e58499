#pragma once

// Property checks for the spectral kernel, shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "weakfactor/processes.hpp"
#include "weakfactor/random.hpp"
#include "weakfactor/spectra.hpp"

namespace spectral_checks {

// Largest |library - dense| / lambda_max over `shapes` random (d, n) pairs with
// d, n <= 50. The library takes the smaller Gram form; the oracle decomposes
// the larger one, so each shape compares the two routes.
inline double worst_gram_discrepancy(int shapes, std::uint64_t seed) {
    weakfactor::random_stream rng(seed, 0);
    double worst = 0.0;
    for (int s = 0; s < shapes; ++s) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(50));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(50));
        const Eigen::MatrixXd x = weakfactor::wiener_increments(d, n, rng);
        const auto lib = weakfactor::realized_spectrum(x);
        const Eigen::MatrixXd big = d >= n ? Eigen::MatrixXd(x * x.transpose()) : Eigen::MatrixXd(x.transpose() * x);
        const auto dense = oracle::full_eigenvalues(big);
        const double scale = std::max(dense.front(), 1e-300);
        for (std::size_t k = 0; k < dense.size(); ++k)
            worst = std::max(worst, std::abs(lib.at(k) - dense[k]) / scale);
        if (lib.values.size() != static_cast<std::size_t>(std::min(d, n))) return INFINITY;
    }
    return worst;
}

// Largest |trace - d| / d of correlation spectra over random shapes.
inline double worst_correlation_trace_error(int shapes, std::uint64_t seed) {
    weakfactor::random_stream rng(seed, 1);
    double worst = 0.0;
    for (int s = 0; s < shapes; ++s) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(80));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(80));
        const auto spec = weakfactor::realized_correlation_spectrum(weakfactor::wiener_increments(d, n, rng));
        worst = std::max(worst, std::abs(spec.trace() - static_cast<double>(d)) / static_cast<double>(d));
    }
    return worst;
}

// Largest eigenvalue change (relative to lambda_max) of the correlation
// spectrum under positive row rescaling, and against the dense correlation
// matrix built entry by entry.
inline double worst_scaling_discrepancy(int shapes, std::uint64_t seed) {
    weakfactor::random_stream rng(seed, 2);
    double worst = 0.0;
    for (int s = 0; s < shapes; ++s) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(40));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(40));
        const Eigen::MatrixXd x = weakfactor::wiener_increments(d, n, rng);
        Eigen::VectorXd c(d);
        for (Eigen::Index j = 0; j < d; ++j) c(j) = std::exp(4.0 * (rng.uniform() - 0.5));
        const Eigen::MatrixXd y = c.asDiagonal() * x;

        const auto a = weakfactor::realized_correlation_spectrum(x);
        const auto b = weakfactor::realized_correlation_spectrum(y);
        const Eigen::MatrixXd cov = oracle::naive_covariance(x);
        Eigen::MatrixXd cor(d, d);
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k) cor(j, k) = cov(j, k) / std::sqrt(cov(j, j) * cov(k, k));
        const auto dense = oracle::full_eigenvalues(cor);
        const double scale = dense.front();
        for (std::size_t k = 0; k < dense.size(); ++k) {
            worst = std::max(worst, std::abs(a.at(k) - b.at(k)) / scale);
            worst = std::max(worst, std::abs(a.at(k) - std::max(dense[k], 0.0)) / scale);
        }
    }
    return worst;
}

}  // namespace spectral_checks
