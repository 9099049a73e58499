#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "weakfactor/config_io.hpp"
#include "weakfactor/presets.hpp"

using namespace weakfactor;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "weakfactor");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

const char* kMinimal = "n = 26\nd = 100\nfactor_kind = wiener\nidio_kind = wiener\nreplications = 10\nseed = 1\n";

}  // namespace

TEST(ConfigIo, RoundTripsEveryPreset) {
    for (const auto& t : table_presets())
        for (const auto& cell : t.cells()) EXPECT_EQ(parse_config_string(serialize_config(cell)), cell) << t.id;
    for (const auto& f : figure_presets())
        for (const auto& panel : f.panels) EXPECT_EQ(parse_config_string(serialize_config(panel)), panel) << f.id;
}

TEST(ConfigIo, RoundTripsAwkwardDoubles) {
    ModelConfig c;
    c.idio.phi = 0.1 + 0.2;
    c.estimator.gamma = 1.0 / 3.0;
    c.master_seed = 18446744073709551615ull;
    EXPECT_EQ(parse_config_string(serialize_config(c)), c);
}

TEST(ConfigIo, CommentsBlankLinesAndDefaults) {
    const auto c = parse_config_string("# header\n\n n = 40   # trailing\nd=200\n");
    EXPECT_EQ(c.n, 40);
    EXPECT_EQ(c.d, 200);
    EXPECT_EQ(c.idio.theta, ModelConfig{}.idio.theta);
}

TEST(ConfigIo, ErrorsNameTheKey) {
    auto key_of = [](const std::string& text) {
        try {
            parse_config_string(text);
        } catch (const config_error& e) {
            return e.key();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(key_of("bogus = 1\n"), "bogus");
    EXPECT_EQ(key_of("n = abc\n"), "n");
    EXPECT_EQ(key_of("phi = 1.0\n"), "phi");
    EXPECT_EQ(key_of("idio_kind = levy\n"), "idio_kind");
    EXPECT_EQ(key_of("n = 30\nn = 40\n"), "n");
    EXPECT_EQ(key_of("seed = -4\n"), "seed");
    EXPECT_EQ(key_of("just text\n"), "line 1");
}

TEST(ConfigIo, SchemaListsEveryKeyOnce) {
    const auto keys = config_keys();
    std::set<std::string> unique(keys.begin(), keys.end());
    EXPECT_EQ(unique.size(), keys.size());
    EXPECT_TRUE(unique.count("theta"));
    EXPECT_TRUE(unique.count("g_scale"));
}

TEST(Presets, IdsAndGrids) {
    const std::vector<std::string> expected{"table1", "table2", "table3", "table4", "table5", "table6",
                                            "table7", "table8", "fig1",   "fig2",   "fig3",   "fig4"};
    EXPECT_EQ(preset_ids(), expected);
    const auto* t2 = find_table_preset("table2");
    ASSERT_NE(t2, nullptr);
    EXPECT_EQ(t2->cells().size(), 12u);
    EXPECT_EQ(t2->base.idio.kind, IdiosyncraticSpec::Kind::nts);
    EXPECT_EQ(t2->base.idio.alpha, 0.25);
    EXPECT_EQ(t2->base.factor_kind, FactorKind::sv);
    const auto* t5 = find_table_preset("table5");
    EXPECT_EQ(t5->base.factor_kind, FactorKind::wiener);
    EXPECT_EQ(t5->base.idio.kind, IdiosyncraticSpec::Kind::wiener);
    const auto* f3 = find_figure_preset("fig3");
    ASSERT_NE(f3, nullptr);
    EXPECT_EQ(f3->parameter, SweepParameter::theta);
    EXPECT_EQ(f3->panels.size(), 2u);
    for (const auto& p : f3->panels) {
        EXPECT_EQ(p.n, 78);
        EXPECT_EQ(p.d, 500);
        EXPECT_EQ(p.idio.alpha, 0.75);
    }
    EXPECT_NE(std::find(f3->grid.begin(), f3->grid.end(), 1.5), f3->grid.end());
    EXPECT_EQ(find_table_preset("table9"), nullptr);
}

TEST(Csv, NumberFormattingAndQuoting) {
    EXPECT_EQ(csv::number(5.734999), "5.735");
    EXPECT_EQ(csv::number(1.0), "1");
    EXPECT_EQ(csv::number(1234567.0), "1.23457e+06");
    EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    csv::Table t;
    t.header = {"a", "b"};
    EXPECT_THROW(t.add({"1"}), std::logic_error);
}

TEST(Cli, ListPresetsBothSpellings) {
    for (const auto& args : {std::vector<std::string>{"list-presets"}, std::vector<std::string>{"--list-presets"}}) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 0);
        for (const auto& id : preset_ids()) EXPECT_NE(r.out.find(id + " "), std::string::npos) << id;
    }
}

TEST(Cli, SimulateWritesFiveRows) {
    const auto path = write_temp("wf_minimal.cfg", kMinimal);
    const auto r = run({"simulate", "--config", path, "--workers", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 6u);
    EXPECT_EQ(l[0], "run_id,factor_kind,idio_kind,alpha,n,d,estimator,mean_rhat,prob_hit,replications,seed,timestamp");
    EXPECT_EQ(l[1].rfind("simulate,wiener,wiener,,26,100,bn,", 0), 0u) << l[1];
}

TEST(Cli, SimulateIsReproducibleApartFromTimestamp) {
    const auto path = write_temp("wf_minimal.cfg", kMinimal);
    auto strip = [](const std::string& text) {
        std::string out;
        for (const auto& l : lines(text)) out += l.substr(0, l.rfind(',')) + "\n";
        return out;
    };
    const auto a = run({"simulate", "--config", path, "--workers", "1"});
    const auto b = run({"simulate", "--config", path, "--workers", "3"});
    EXPECT_EQ(strip(a.out), strip(b.out));
}

TEST(Cli, SimulateRejectsBadPhiWithUsageExit) {
    const auto path = write_temp("wf_badphi.cfg", std::string(kMinimal) + "phi = 1.0\n");
    const auto r = run({"simulate", "--config", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("phi"), std::string::npos);
    EXPECT_NE(r.err.find("[0, 1)"), std::string::npos);
}

TEST(Cli, MissingConfigAndUnknownFlags) {
    EXPECT_EQ(run({"simulate", "--config", "/nonexistent/x.cfg"}).code, 2);
    EXPECT_EQ(run({"simulate"}).code, 2);
    EXPECT_EQ(run({"table", "--preset", "table1", "--bogus"}).code, 2);
    EXPECT_EQ(run({"table", "--preset", "table99"}).code, 2);
    EXPECT_EQ(run({"sweep", "--preset", "table1"}).code, 2);
    EXPECT_EQ(run({"bounds", "--study", "nonsense"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, TableGridArithmetic) {
    const auto r = run({"table", "--preset", "table5", "--reps", "2", "--seed", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 61u);
    EXPECT_EQ(l[0], "table_id,factor_kind,idio_kind,alpha,n,d,estimator,mean_rhat,prob_hit,replications,seed");
    EXPECT_EQ(l[1].rfind("table5,wiener,wiener,,26,100,bn,", 0), 0u);
    EXPECT_EQ(l[1].substr(l[1].size() - 4), ",2,9");
}

TEST(Cli, SweepSinglePointMatchesSimulate) {
    const auto r = run({"sweep", "--preset", "fig2", "--grid", "0.05", "--reps", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 1u + 8u * 5u);
    EXPECT_NE(l[1].find(",gamma,0.05,bn,"), std::string::npos) << l[1];

    ModelConfig c = find_figure_preset("fig2")->panels[0];
    c.replications = 3;
    const auto report = run_experiment(c);
    const auto expected_mean = csv::number(report["bn"].mean);
    EXPECT_NE(l[1].find(",bn," + expected_mean + ","), std::string::npos) << l[1];
}

TEST(Cli, BoundsEmitsPointsAndSummary) {
    const auto r = run({"bounds", "--study", "concentration", "--grid", "10:20,10:80", "--reps", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    EXPECT_EQ(l[0], "study,row_type,label,d,n,index,observed,envelope,ratio,slope,band_lo,band_hi,target");
    EXPECT_EQ(l[1].rfind("concentration,point,,10,20,0,", 0), 0u);
    EXPECT_NE(r.out.find("concentration,summary,ratio_spread,"), std::string::npos);
    EXPECT_NE(r.out.find("concentration,summary,shrink@10:20,"), std::string::npos);
    EXPECT_EQ(run({"bounds", "--study", "concentration", "--grid", "500:10"}).code, 2);
    EXPECT_EQ(run({"bounds", "--study", "concentration", "--grid", "ten"}).code, 2);
}

TEST(Cli, OutWritesCsvAndManifest) {
    const auto cfg = write_temp("wf_minimal.cfg", kMinimal);
    const auto out = (std::filesystem::temp_directory_path() / "wf_out.csv").string();
    std::filesystem::remove(out);
    const auto r = run({"simulate", "--config", cfg, "--out", out, "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream csv_in(out);
    std::string header;
    std::getline(csv_in, header);
    EXPECT_EQ(header.rfind("run_id,", 0), 0u);
    std::ifstream man(out + ".manifest.json");
    const auto j = nlohmann::json::parse(man);
    EXPECT_EQ(j["command"], "simulate");
    EXPECT_EQ(j["seed"], 3);
    EXPECT_EQ(j["source"], cfg);
    EXPECT_EQ(run({"simulate", "--config", cfg, "--out", "/nonexistent/dir/x.csv"}).code, 2);
}
