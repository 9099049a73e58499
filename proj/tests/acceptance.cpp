// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// values printed underneath. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "sampler_stats.hpp"
#include "spectral_checks.hpp"
#include "weakfactor/weakfactor.hpp"

using namespace weakfactor;

namespace {

// Pinned tolerances.
constexpr int kTableReplications = 300;
constexpr std::uint64_t kSeed = 20240601;
constexpr double kMeanTolerance = 0.2;
constexpr double kProbTolerance = 0.07;
constexpr int kSamplerDraws = 100000;
constexpr double kSamplerSe = 4.0;
constexpr double kLaplaceSe = 3.0;
constexpr double kKsBound = 0.01;
constexpr double kGramTolerance = 1e-10;
constexpr double kTraceTolerance = 1e-6;
constexpr double kScalingTolerance = 1e-10;
constexpr int kStudyReplications = 200;
constexpr double kSpreadBound = 5.0;
constexpr double kShrinkLo = 1.7, kShrinkHi = 2.3;
constexpr double kJumpSlopeBound = 1.15;
constexpr double kSlopeTolerance = 0.15;
constexpr double kSevenSlopeBound = 0.65;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

// ---------------------------------------------------------------------------

struct CellTarget {
    std::string estimator;
    double mean;
    double prob;  // negative: not checked
};

void check_cell(Outcome& o, const char* preset, Eigen::Index n, Eigen::Index d, const std::vector<CellTarget>& targets) {
    ModelConfig c = find_table_preset(preset)->base;
    c.n = n;
    c.d = d;
    c.replications = kTableReplications;
    c.master_seed = kSeed;
    const auto t0 = std::chrono::steady_clock::now();
    const MCReport r = run_experiment(c);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& t : targets) {
        const auto& s = r[t.estimator];
        const bool mean_ok = std::abs(s.mean - t.mean) <= kMeanTolerance;
        const bool prob_ok = t.prob < 0.0 || std::abs(s.prob_hit - t.prob) <= kProbTolerance;
        std::string line = std::string(preset) + " n=" + std::to_string(n) + " d=" + std::to_string(d) + " " +
                           t.estimator + fmt(": mean %.3f (target %.2f)", s.mean, t.mean);
        if (t.prob >= 0.0) line += fmt(", P %.3f (target %.2f)", s.prob_hit, t.prob);
        o.check(mean_ok && prob_ok, line);
    }
    o.details.push_back(fmt("     %.0f replications in %.1f s", r.replications, secs));
}

Outcome table_reproduction() {
    Outcome o;
    check_cell(o, "table5", 78, 500, {{"p_cor", 6.00, 1.00}});
    check_cell(o, "table1", 390, 1000, {{"p_cor", 5.75, 0.71}, {"bn", 4.94, -1.0}});
    check_cell(o, "table2", 78, 1000,
               {{"p_cor", 5.70, 0.73}, {"pc_p1", 6.31, 0.38}, {"pelger", 5.83, 0.79}, {"onatski", 5.79, 0.71}});
    return o;
}

Outcome sampler_correctness() {
    Outcome o;
    const double ks = sampler_stats::half_stable_ks(kSamplerDraws, kSeed);
    o.check(ks < kKsBound, fmt("alpha=0.5 stable KS distance %.5f < %.2f", ks, kKsBound));
    const auto lap = sampler_stats::half_stable_laplace(kSamplerDraws, kSeed);
    o.check(lap.z() < kLaplaceSe, fmt("alpha=0.5 stable E[exp(-S)] %.5f vs %.5f (%.2f SE)", lap.estimate, lap.expected, lap.z()));
    for (double alpha : {0.25, 0.5, 0.75}) {
        const auto m = sampler_stats::pts_moments(PtsParams::unit_moments(alpha), kSamplerDraws, kSeed);
        o.check(m.mean.z() < kSamplerSe && m.variance.z() < kSamplerSe,
                fmt("PTS alpha=%.2f mean %.4f (%.2f SE), variance %.4f", alpha, m.mean.estimate, m.mean.z(),
                    m.variance.estimate) +
                    fmt(" (%.2f SE)", m.variance.z()));
        const double us[] = {0.5, 1.0, 2.0};
        for (std::size_t k = 0; k < m.laplace.size(); ++k) {
            o.check(m.laplace[k].z() < kLaplaceSe, fmt("PTS alpha=%.2f Laplace at u=%.1f: %.5f vs %.5f", alpha, us[k],
                                                       m.laplace[k].estimate, m.laplace[k].expected) +
                                                       fmt(" (%.2f SE)", m.laplace[k].z()));
        }
    }
    return o;
}

Outcome spectral_kernel() {
    Outcome o;
    const double gram = spectral_checks::worst_gram_discrepancy(200, kSeed);
    o.check(gram < kGramTolerance, fmt("Gram equivalence over 200 shapes: worst relative gap %.2e", gram));
    const double trace = spectral_checks::worst_correlation_trace_error(200, kSeed);
    o.check(trace < kTraceTolerance, fmt("correlation trace: worst |tr - d| / d = %.2e", trace));
    const double scaling = spectral_checks::worst_scaling_discrepancy(200, kSeed);
    o.check(scaling < kScalingTolerance, fmt("diagonal-scaling invariance: worst gap %.2e", scaling));
    return o;
}

Outcome estimator_oracles() {
    Outcome o;
    for (const auto& c : oracle::estimator_cases()) {
        const int brute = c.oracle(), lib = c.library();
        o.check(brute == c.expected && lib == c.expected,
                c.name + ": expected " + std::to_string(c.expected) + ", brute force " + std::to_string(brute) +
                    ", library " + std::to_string(lib));
    }
    return o;
}

Outcome scaling_studies() {
    Outcome o;
    bounds::StudyOptions opts;
    opts.replications = kStudyReplications;
    opts.seed = kSeed;

    std::vector<bounds::GridPoint> grid;
    for (Eigen::Index d : {50, 100, 200, 400})
        for (Eigen::Index n : {d / 4, d, 4 * d}) grid.push_back({d, n});
    grid.push_back({100, 1600});
    const auto conc = bounds::concentration_study(grid, opts);
    o.check(conc.ratio_spread() < kSpreadBound, fmt("concentration ratio spread %.3f < %.0f", conc.ratio_spread(), kSpreadBound));
    const double shrink = bounds::shrink_factor(conc, 100, 400).value_or(0.0);
    o.check(shrink >= kShrinkLo && shrink <= kShrinkHi,
            fmt("concentration shrink d=100, n 400 -> 1600: %.3f in [%.1f, %.1f]", shrink, kShrinkLo, kShrinkHi));
    o.details.push_back(fmt("     (n 100 -> 400 at d/n = 1: %.3f, not part of the check)",
                            bounds::shrink_factor(conc, 100, 100).value_or(0.0)));

    const auto jump = bounds::jump_norm_study({{100, 390}, {400, 390}, {1600, 390}}, 0.5, opts);
    const auto* js = jump.slope("d_slope@n=390");
    o.check(js && js->slope <= kJumpSlopeBound,
            fmt("jump-norm slope in d at n=390: %.3f [%.3f, %.3f] <= 1.15", js->slope, js->band_lo, js->band_hi));

    const auto eig = bounds::eigen_scaling_study({100, 300, 1000, 3000}, 390, opts);
    for (int j = 1; j <= 6; ++j) {
        const auto* s = eig.slope("j=" + std::to_string(j));
        o.check(std::abs(s->slope - s->target) <= kSlopeTolerance,
                fmt("eigenvalue %.0f slope %.3f [%.3f, %.3f]", j, s->slope, s->band_lo, s->band_hi) +
                    fmt(" vs %.3f +- 0.15", s->target));
    }
    const auto* s7 = eig.slope("j=7");
    o.check(s7->slope <= kSevenSlopeBound, fmt("eigenvalue 7 slope %.3f [%.3f, %.3f] <= 0.65", s7->slope, s7->band_lo, s7->band_hi));
    return o;
}

Outcome determinism() {
    Outcome o;
    ModelConfig c = find_table_preset("table3")->base;
    c.n = 78;
    c.d = 200;
    c.replications = 40;
    c.master_seed = kSeed;
    std::vector<std::string> csvs;
    for (unsigned w : {1u, 2u, 4u, 7u}) {
        std::ostringstream out;
        csv::write(out, cli::table_report("det", {run_experiment(c, {w})}));
        csvs.push_back(out.str());
    }
    bool same = true;
    for (const auto& s : csvs) same = same && s == csvs.front();
    o.check(same, "table CSV identical for 1, 2, 4 and 7 workers (" + std::to_string(csvs.front().size()) + " bytes)");

    std::vector<std::string> sweeps;
    for (unsigned w : {1u, 3u}) {
        std::ostringstream out;
        csv::write(out, cli::sweep_report("det", SweepParameter::theta, {1.0, 2.0},
                                          {{run_sweep(c, SweepParameter::theta, {1.0, 2.0}, {w})}}));
        sweeps.push_back(out.str());
    }
    o.check(sweeps[0] == sweeps[1], "sweep CSV identical for 1 and 3 workers");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"1 table reproduction", table_reproduction},
        {"2 sampler correctness", sampler_correctness},
        {"3 spectral kernel", spectral_kernel},
        {"4 estimator oracles", estimator_oracles},
        {"5 scaling studies", scaling_studies},
        {"6 determinism", determinism},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.name, secs);
        for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
