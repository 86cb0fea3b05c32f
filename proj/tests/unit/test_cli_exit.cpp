// Runs the robreg binary and checks exit codes and output files.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "robreg/app/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args, const fs::path& cwd) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" ROBREG_CLI_PATH "' " + args + " 2>&1";
    Outcome o;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return o;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) o.out += buf;
    const int status = pclose(p);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("robreg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
};

const std::string kMinimal = ROBREG_CONFIG_DIR "/minimal.yaml";

} // namespace

TEST_F(Cli, MinimalRunWritesOneRow) {
    fs::copy_file(kMinimal, dir / "minimal.yaml");
    const auto o = run("run minimal.yaml", dir);
    ASSERT_EQ(o.code, 0) << o.out;
    const auto text = slurp(dir / "minimal.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_EQ(robreg::app::read_results_file((dir / "minimal.csv").string()).size(), 1u);
}

TEST_F(Cli, RerunIsByteIdentical) {
    fs::copy_file(kMinimal, dir / "minimal.yaml");
    ASSERT_EQ(run("--threads 2 run minimal.yaml --no-timing", dir).code, 0);
    const auto first = slurp(dir / "minimal.csv");
    ASSERT_EQ(run("--threads 1 run minimal.yaml --no-timing", dir).code, 0);
    EXPECT_EQ(slurp(dir / "minimal.csv"), first);
}

TEST_F(Cli, SeedOverrideChangesSeeds) {
    fs::copy_file(kMinimal, dir / "minimal.yaml");
    ASSERT_EQ(run("run minimal.yaml --no-timing", dir).code, 0);
    const auto a = slurp(dir / "minimal.csv");
    ASSERT_EQ(run("--seed-override 8 run minimal.yaml --no-timing", dir).code, 0);
    EXPECT_NE(slurp(dir / "minimal.csv"), a);
}

TEST_F(Cli, ContaminationSweepRowCount) {
    // Shortened T grid; the row count is 2 alphas x 3 algorithms x |t_grid| x 15.
    std::string text = slurp(ROBREG_CONFIG_DIR "/alpha_sweep.yaml");
    const std::string grid = "t_grid: [1024, 2048, 4096, 8192, 16384, 32768, 65536]";
    text.replace(text.find(grid), grid.size(), "t_grid: [256, 512]");
    spit(dir / "sweep.yaml", text);
    const auto o = run("run sweep.yaml", dir);
    ASSERT_EQ(o.code, 0) << o.out;
    const auto rows = robreg::app::read_results_file((dir / "alpha_sweep.csv").string());
    EXPECT_EQ(rows.size(), 2u * 3 * 2 * 15);

    const auto p = run("plot alpha_sweep.csv fig.svg --y excess_risk", dir);
    ASSERT_EQ(p.code, 0) << p.out;
    EXPECT_TRUE(fs::exists(dir / "fig_alpha0.01.svg"));
    EXPECT_TRUE(fs::exists(dir / "fig_alpha0.7.svg"));
    const auto svg = slurp(dir / "fig_alpha0.7.svg");
    ASSERT_EQ(run("plot alpha_sweep.csv fig.svg --y excess_risk", dir).code, 0);
    EXPECT_EQ(slurp(dir / "fig_alpha0.7.svg"), svg);
}

TEST_F(Cli, BadConfigIsUsageErrorWithAnchor) {
    std::string text = slurp(kMinimal);
    text.replace(text.find("repeats: 1"), 10, "repeats: 1\nbogus: 3");
    spit(dir / "bad.yaml", text);
    const auto o = run("run bad.yaml", dir);
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.out.find("bad.yaml:18:"), std::string::npos) << o.out;
}

TEST_F(Cli, MissingConfigIsUsageError) { EXPECT_EQ(run("run nope.yaml", dir).code, 2); }

TEST_F(Cli, UnwritableOutputIsRuntimeError) {
    std::string text = slurp(kMinimal);
    // The parent of the output path is a regular file.
    text.replace(text.find("output_path: minimal.csv"), 24, "output_path: c.yaml/out.csv");
    spit(dir / "c.yaml", text);
    EXPECT_EQ(run("run c.yaml", dir).code, 1);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("", dir).code, 2);
    EXPECT_EQ(run("frobnicate", dir).code, 2);
    EXPECT_EQ(run("--threads many run x.yaml", dir).code, 2);
    EXPECT_EQ(run("demo nosuchdemo", dir).code, 2);
    EXPECT_EQ(run("plot only_one_arg.csv", dir).code, 2);
}

TEST_F(Cli, Demos) {
    const auto e = run("demo example21 --C 10 --alpha 0.5 --T 20000 --seeds 5", dir);
    EXPECT_EQ(e.code, 0) << e.out;
    EXPECT_NE(e.out.find("predicted_biased_optimum=6\n"), std::string::npos) << e.out;
    EXPECT_NE(e.out.find("passed=1"), std::string::npos);
    const auto i = run("demo indistinguishable --T 100000", dir);
    EXPECT_EQ(i.code, 0) << i.out;
    EXPECT_NE(i.out.find("tv_distance_empirical="), std::string::npos);
    const auto d = run("demo decomposition --n-mc 20000", dir);
    EXPECT_EQ(d.code, 0) << d.out;
    EXPECT_NE(d.out.find("within=20"), std::string::npos);
}

TEST_F(Cli, PlotErrors) {
    spit(dir / "empty.csv", "run_id,algorithm,alpha,T,seed,est_error,excess_risk,excess_risk_se,bound,wall_ms\n");
    EXPECT_EQ(run("plot empty.csv o.svg", dir).code, 2);
    spit(dir / "short.csv", "run_id,algorithm,alpha,T\n0,a,0.1,10\n");
    const auto o = run("plot short.csv o.svg", dir);
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.out.find("est_error"), std::string::npos) << o.out;
    EXPECT_EQ(run("plot missing.csv o.svg", dir).code, 2);
    EXPECT_EQ(run("plot empty.csv o.svg --y nonsense", dir).code, 2);
}

TEST_F(Cli, PlotSingleAlgorithm) {
    spit(dir / "one.csv",
         "run_id,algorithm,alpha,T,seed,est_error,excess_risk,excess_risk_se,bound,wall_ms\n"
         "0,solo,0.1,100,1,0.5,0.1,0.01,,\n1,solo,0.1,200,2,0.25,0.05,0.01,,\n");
    ASSERT_EQ(run("plot one.csv one.svg", dir).code, 0);
    const auto svg = slurp(dir / "one.svg");
    EXPECT_NE(svg.find(">solo</text>"), std::string::npos);
    EXPECT_EQ(svg.find("<polyline"), svg.rfind("<polyline"));
}
