#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weakfactor/error.hpp"
#include "weakfactor/processes.hpp"

namespace weakfactor {

enum class SpectrumSource { covariance, correlation };

// Descending eigenvalues of a realized covariance or correlation matrix.
// Only the min(d, n) possibly nonzero eigenvalues are stored; the remaining
// d - min(d, n) are zero and are supplied on demand by `at` and `padded`.
struct Spectrum {
    std::vector<double> values;
    SpectrumSource source = SpectrumSource::covariance;
    Eigen::Index d = 0;
    Eigen::Index n = 0;

    // Zero-based: at(0) is the largest eigenvalue. Zero past the stored values.
    double at(std::size_t k) const { return k < values.size() ? values[k] : 0.0; }

    // Exactly d values.
    std::vector<double> padded() const {
        const auto len = static_cast<std::size_t>(std::max<Eigen::Index>(d, 0));
        std::vector<double> out(len, 0.0);
        std::copy_n(values.begin(), std::min(len, values.size()), out.begin());
        return out;
    }

    double trace() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

struct SpectralOptions {
    // realized_covariance refuses to materialize d x d beyond this.
    Eigen::Index max_dimension = 4000;
    // Eigenvalues below clamp_relative * lambda_max (in magnitude) are solver noise.
    double clamp_relative = 1e-10;
};

/// [Y, Y]^n_1 = dY dY^T, symmetrized.
inline Eigen::MatrixXd realized_covariance(const IncrementMatrix& increments, const SpectralOptions& options = {}) {
    if (increments.rows() > options.max_dimension) {
        throw std::length_error("realized_covariance: d = " + std::to_string(increments.rows()) +
                                " exceeds the cap " + std::to_string(options.max_dimension));
    }
    const Eigen::Index d = increments.rows();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(increments);
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov;
}

namespace detail {

inline std::vector<double> symmetric_eigenvalues_descending(const Eigen::MatrixXd& lower_filled,
                                                            const SpectralOptions& options) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lower_filled, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw computation_error("symmetric eigensolver failed to converge on a " +
                                std::to_string(lower_filled.rows()) + "x" + std::to_string(lower_filled.cols()) +
                                " Gram matrix");
    }
    const Eigen::VectorXd& ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    const double tolerance = options.clamp_relative * std::max(std::abs(out.front()), 1e-300);
    for (double& v : out) {
        if (v < -tolerance) {
            throw computation_error("eigensolver returned " + std::to_string(v) +
                                    " for a positive semidefinite matrix (largest eigenvalue " +
                                    std::to_string(out.front()) + ")");
        }
        v = std::max(v, 0.0);
    }
    return out;
}

}  // namespace detail

/// Spectrum of dY dY^T. When d > n the n x n Gram matrix dY^T dY is
/// decomposed instead; both share their nonzero eigenvalues.
inline Spectrum realized_spectrum(const IncrementMatrix& increments, const SpectralOptions& options = {}) {
    const Eigen::Index d = increments.rows();
    const Eigen::Index n = increments.cols();
    Spectrum s;
    s.d = d;
    s.n = n;
    s.source = SpectrumSource::covariance;
    if (d == 0 || n == 0) return s;

    Eigen::MatrixXd gram;
    if (d <= n) {
        gram = Eigen::MatrixXd::Zero(d, d);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(increments);
    } else {
        gram = Eigen::MatrixXd::Zero(n, n);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(increments.transpose());
    }
    s.values = detail::symmetric_eigenvalues_descending(gram, options);
    return s;
}

/// Diagonal of [Y, Y]^n_1.
inline Eigen::VectorXd realized_variances(const IncrementMatrix& increments) {
    return increments.rowwise().squaredNorm();
}

/// Spectrum of R = diag^{-1/2} [Y, Y] diag^{-1/2}, computed from the
/// row-standardized increments so the Gram route still applies.
inline Spectrum realized_correlation_spectrum(const IncrementMatrix& increments,
                                              const SpectralOptions& options = {}) {
    const Eigen::VectorXd rv = realized_variances(increments);
    for (Eigen::Index j = 0; j < rv.size(); ++j) {
        if (!(rv(j) > 0.0)) {
            throw degenerate_input_error("realized correlation undefined: component " + std::to_string(j) +
                                         " has zero realized variance");
        }
    }
    const IncrementMatrix scaled = rv.cwiseSqrt().cwiseInverse().asDiagonal() * increments;
    Spectrum s = realized_spectrum(scaled, options);
    s.source = SpectrumSource::correlation;
    return s;
}

}  // namespace weakfactor
