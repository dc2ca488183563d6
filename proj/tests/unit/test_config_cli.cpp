#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dmrisk/calibration.hpp"
#include "dmrisk/config.hpp"
#include "dmrisk/error.hpp"
#include "dmrisk/pipeline.hpp"

using namespace dmrisk;
namespace fs = std::filesystem;

namespace {

const std::string kSource = DMRISK_SOURCE_DIR;

const char* kTiny = R"(seed = 11
[problem]
p = 0.95
aggregation = { type = "sum" }
distortion = { family = "smooth", a = 0.1 }
central = "C0"
candidates = ["C1", "C2", "C3"]

[[problem.marginals]]
type = "inverse_gaussian"
mu = 1.0
lambda = 0.5

[[problem.marginals]]
type = "inverse_gaussian"
mu = 1.0
lambda = 1.2

[copulas.C0]
family = "gaussian"
correlation = 0.7

[copulas.C1]
family = "t"
nu = 1.0
correlation = 0.7

[copulas.C2]
family = "clayton"
theta = 0.7565

[copulas.C3]
family = "gumbel"
theta = 1.7095

[sa]
a = 0.6
samples = 4000
t_min = 3
t_max = 6
kde_points = 200
kde_samples = 20000

[saa]
samples = 20000
h = 0.25
k_star = 2

[benchmark]
copula = "C0"
samples = 20000
batches = 10
)";

std::string temp_file(const std::string& name, const std::string& body) {
    const fs::path dir = fs::path(::testing::TempDir()) / "dmrisk_cli";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << body;
    return p.string();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DMRISK_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    return nlohmann::json::parse(in);
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Config, ShippedConfigsLoad) {
    for (const auto* name : {"example1.toml", "finance.toml", "cyber.toml"}) {
        const auto cfg = load_config(kSource + "/configs/" + name);
        const auto spec = build_spec(cfg);
        EXPECT_NO_THROW(spec.validate()) << name;
        EXPECT_FALSE(cfg.hash.empty());
    }
    const auto ex1 = load_config(kSource + "/configs/example1.toml");
    EXPECT_EQ(build_spec(ex1).K(), 5);
    EXPECT_EQ(ex1.sa.samples, 100'000u);
    EXPECT_DOUBLE_EQ(ex1.sa.a, 0.6);
}

TEST(Config, UnknownKeysAreRejected) {
    const auto path = temp_file("unknown.toml", replace(kTiny, "[sa]\n", "[sa]\nbogus = 1\n"));
    try {
        load_config(path);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("sa.bogus"), std::string::npos) << e.what();
    }
    const auto top = temp_file("unknown_top.toml", std::string("colour = 3\n") + kTiny);
    EXPECT_THROW(load_config(top), InputError);
}

TEST(Config, TypeAndReferenceErrors) {
    EXPECT_THROW(load_config(temp_file("bad_type.toml", replace(kTiny, "a = 0.6", "a = \"fast\""))), InputError);
    EXPECT_THROW(load_config(temp_file("bad_ref.toml", replace(kTiny, "central = \"C0\"", "central = \"C9\""))), InputError);
    EXPECT_THROW(load_config(temp_file("bad_syntax.toml", "seed = = 3\n")), InputError);
    EXPECT_THROW(load_config(temp_file("missing.toml", replace(kTiny, "lambda = 0.5\n", ""))), InputError);
}

TEST(Config, JsonAndTomlAgree) {
    const auto toml = load_config(temp_file("agree.toml", kTiny));
    const auto json = load_config(temp_file("agree.json", toml.doc.dump()));
    EXPECT_EQ(toml.hash, json.hash);
    EXPECT_EQ(toml.sa.samples, json.sa.samples);
}

TEST(Config, Overrides) {
    auto cfg = load_config(temp_file("over.toml", kTiny));
    apply_overrides(cfg, 99u, 1, std::string("elsewhere"), 1234u);
    EXPECT_EQ(cfg.seed, 99u);
    EXPECT_EQ(cfg.output, "elsewhere");
    EXPECT_EQ(cfg.sa.samples, 1234u);
    EXPECT_EQ(cfg.saa.samples, 1234u);
    EXPECT_EQ(cfg.benchmark->samples, 1234u);
}

TEST(Benchmark, IndependentUniformsMatchConvolution) {
    // X1 + X2 has density s on [0,1] and 2 - s on [1,2]; upper tail beyond
    // v = 2 - sqrt(2(1-p)) has mass 1 - p and mean 2 - (2/3) sqrt(2(1-p)).
    const double p = 0.95;
    const double avar = 2.0 - 2.0 / 3.0 * std::sqrt(2.0 * (1.0 - p));
    const auto r = benchmark_avar({Uniform(0.0, 1.0), Uniform(0.0, 1.0)}, IndependenceCopula(2), SumAggregation{}, p,
                                  1'000'000, 5);
    EXPECT_NEAR(r.avar, avar, 0.01);
    EXPECT_GT(r.se, 0.0);
    EXPECT_LT(r.se, 0.01);
}

TEST(Cli, ExitCodes) {
    const auto good = temp_file("cli_good.toml", kTiny);
    const std::string out = (fs::path(::testing::TempDir()) / "dmrisk_cli" / "out_codes").string();
    EXPECT_EQ(run_cli("solve --config " + good + " --out " + out), 0);
    EXPECT_TRUE(fs::exists(out + "/report.json"));
    EXPECT_TRUE(fs::exists(out + "/sa_trace.csv"));
    EXPECT_TRUE(fs::exists(out + "/saa_grid.csv"));
    EXPECT_TRUE(fs::exists(out + "/manifest.json"));
    EXPECT_EQ(run_cli("solve"), 2);
    EXPECT_EQ(run_cli("frobnicate --config " + good), 2);
    EXPECT_EQ(run_cli("solve --config /nonexistent/cfg.toml"), 2);
    const auto unknown = temp_file("cli_unknown.toml", replace(kTiny, "[saa]\n", "[saa]\nspeed = 2\n"));
    EXPECT_EQ(run_cli("solve --config " + unknown + " --out " + out), 2);
    // a solver failure: more grid points than allowed
    const auto cap = temp_file("cli_cap.toml", replace(kTiny, "h = 0.25", "h = 0.01\nmax_grid = 10"));
    EXPECT_EQ(run_cli("solve --config " + cap + " --out " + out), 4);
}

TEST(Cli, CalibrateInverseGaussian) {
    const auto x = sample(InverseGaussian(1.5, 0.8), 5000, 3);
    const auto y = sample(InverseGaussian(0.7, 2.0), 5000, 4);
    std::ostringstream csv;
    csv.precision(17);
    csv << "a,b\n";
    for (std::size_t k = 0; k < x.size(); ++k) csv << x[k] << "," << y[k] << "\n";
    const auto data = temp_file("ig.csv", csv.str());
    const auto cfg = temp_file("ig.toml", "[calibrate]\nkind = \"inverse_gaussian\"\ndata = \"" + data + "\"\n");
    const std::string out = (fs::path(::testing::TempDir()) / "dmrisk_cli" / "out_ig").string();
    ASSERT_EQ(run_cli("calibrate --config " + cfg + " --out " + out), 0);
    const auto j = read_json(out + "/calibration.json");
    EXPECT_NEAR(j["marginals"][0]["mu"].get<double>(), 1.5, 0.075);
    EXPECT_NEAR(j["marginals"][0]["lambda"].get<double>(), 0.8, 0.04);
    EXPECT_NEAR(j["marginals"][1]["mu"].get<double>(), 0.7, 0.035);
    EXPECT_NEAR(j["marginals"][1]["lambda"].get<double>(), 2.0, 0.1);

    const auto bad = temp_file("bad.csv", "a,b\n1.0,2.0\n1.5,oops\n");
    const auto badcfg = temp_file("bad.toml", "[calibrate]\nkind = \"inverse_gaussian\"\ndata = \"" + bad + "\"\n");
    EXPECT_EQ(run_cli("calibrate --config " + badcfg + " --out " + out), 2);
    const auto neg = temp_file("neg.csv", "a,b\n1.0,2.0\n-1.5,1.0\n1.2,0.9\n");
    const auto negcfg = temp_file("neg.toml", "[calibrate]\nkind = \"inverse_gaussian\"\ndata = \"" + neg + "\"\n");
    EXPECT_EQ(run_cli("calibrate --config " + negcfg + " --out " + out), 3);
}

TEST(Cli, SolveIsDeterministic) {
    const auto cfg = temp_file("det.toml", kTiny);
    const std::string a = (fs::path(::testing::TempDir()) / "dmrisk_cli" / "det_a").string();
    const std::string b = (fs::path(::testing::TempDir()) / "dmrisk_cli" / "det_b").string();
    ASSERT_EQ(run_cli("solve --config " + cfg + " --out " + a), 0);
    ASSERT_EQ(run_cli("solve --config " + cfg + " --out " + b), 0);
    EXPECT_EQ(strip_timing(read_json(a + "/report.json")), strip_timing(read_json(b + "/report.json")));
    ASSERT_EQ(run_cli("solve --config " + cfg + " --out " + b + " --seed 12"), 0);
    EXPECT_NE(strip_timing(read_json(a + "/report.json")), strip_timing(read_json(b + "/report.json")));
}
