#include <cstdio>

#include "weakfactor/weakfactor.hpp"

int main() {
    using namespace weakfactor;

    // One simulated panel and the five estimates computed from it.
    ModelConfig config;
    config.n = 78;
    config.d = 500;
    random_stream rng(config.master_seed, replication_stream(0));
    const IncrementMatrix y = simulate_observations(config, rng);
    const EstimateSet est = estimate_all(realized_spectrum(y), realized_correlation_spectrum(y), config.estimator);
    const auto values = est.as_array();
    for (std::size_t k = 0; k < values.size(); ++k)
        std::printf("%-8s %d\n", std::string(EstimateSet::names[k]).c_str(), values[k]);

    // A short Monte Carlo run of the same configuration.
    config.replications = 50;
    const MCReport report = run_experiment(config);
    for (std::size_t k = 0; k < EstimateSet::names.size(); ++k) {
        std::printf("%-8s mean %.2f  P(r = %d) %.2f\n", std::string(EstimateSet::names[k]).c_str(),
                    report.summary[k].mean, config.true_r_tau, report.summary[k].prob_hit);
    }
}
