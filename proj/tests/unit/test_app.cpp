#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "robreg/app/config.hpp"
#include "robreg/app/csv.hpp"
#include "robreg/app/svg_plot.hpp"
#include "robreg/app/sweep.hpp"

using namespace robreg;
using namespace robreg::app;

namespace {

const char* kConfig = R"(spec:
  d: 3
  D: 1.5
  w_star_seed: 42
  feature: {variant: signed_basis}
  noise: {variant: uniform_symmetric, sigma: 0.1}
  corruption:
    alpha: 0.2
    conditional: {variant: point_mass, M: 1000.0}
  rho: 0.3333333333333333
  known_mean: [0, 0, 0]
algorithms:
  - algorithm: huber_known_mean
    huber: {derivation: bounded}
  - algorithm: huber_streaming_mean
    label: centered
    huber: {derivation: subgaussian, kappa: 1.0}
    eta0: 2.5
    trace_stride: 10
  - algorithm: huber_uniform
    huber: {derivation: explicit, radius: 3.2}
    ball: {D: 1.0}
  - algorithm: l2_sgd
    lambda: 0.4
t_grid: [100, 200, 400]
alphas: [0.0, 0.2, 0.7]
repeats: 2
base_seed: 99
n_mc: 5000
output_path: out.csv
)";

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

ResultRow row(std::string alg, double alpha, std::size_t T, double err, double risk) {
    ResultRow r;
    r.algorithm = std::move(alg);
    r.alpha = alpha;
    r.T = T;
    r.est_error = err;
    r.excess_risk = risk;
    return r;
}

} // namespace

TEST(Config, ParsesAllSections) {
    const auto cfg = parse_config(kConfig);
    EXPECT_EQ(cfg.spec.d, 3);
    EXPECT_EQ(cfg.spec.w_star.size(), 3);
    EXPECT_LE(cfg.spec.w_star.norm(), 1.5);
    ASSERT_EQ(cfg.algorithms.size(), 4u);
    EXPECT_EQ(cfg.algorithms[0].label, "huber_known_mean");
    EXPECT_EQ(cfg.algorithms[1].label, "centered");
    EXPECT_EQ(cfg.algorithms[1].huber.rule, RadiusRule::subgaussian);
    EXPECT_EQ(cfg.algorithms[2].huber.radius, 3.2);
    EXPECT_EQ(cfg.t_grid, (std::vector<std::size_t>{100, 200, 400}));
    EXPECT_EQ(cfg.repeats, 2u);
    EXPECT_EQ(cfg.base_seed, 99u);
}

TEST(Config, RoundTrip) {
    const auto a = parse_config(kConfig);
    const auto text = serialize_config(a);
    const auto b = parse_config(text);
    EXPECT_EQ(a, b);
    EXPECT_EQ(serialize_config(b), text);
}

TEST(Config, RoundTripOtherVariants) {
    std::string text = kConfig;
    text = replace(text, "feature: {variant: signed_basis}",
                   "feature: {variant: gaussian, mean: [0.1, 0, 0], covariance: [[1, 0.2, 0], [0.2, 1, 0], [0, 0, 0.5]]}");
    text = replace(text, "noise: {variant: uniform_symmetric, sigma: 0.1}",
                   "noise: {variant: discrete_symmetric, values: [0.05, 0.1], probs: [0.25, 0.75]}");
    text = replace(text, "{variant: point_mass, M: 1000.0}", "{variant: gaussian, s: 3.3}");
    text = replace(text, "  known_mean: [0, 0, 0]\n", "");
    const auto a = parse_config(text);
    EXPECT_EQ(a, parse_config(serialize_config(a)));
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line(replace(kConfig, "  rho: 0.3333333333333333", "  rho: 0.33\n  colour: red")), 11);
    EXPECT_EQ(error_line(replace(kConfig, "t_grid: [100, 200, 400]", "t_grid: [100, 400, 200]")), 25);
    EXPECT_EQ(error_line(replace(kConfig, "repeats: 2", "repeats: 0")), 27);
    EXPECT_EQ(error_line(replace(kConfig, "algorithm: l2_sgd", "algorithm: adam")), 23);
    EXPECT_EQ(error_line(replace(kConfig, "    lambda: 0.4", "    lambda: 0.4\n    T: 10")), 25);
    EXPECT_GT(error_line("spec: [unclosed"), 0);
}

TEST(Config, RejectsInvalidCells) {
    // rho = 0 leaves lambda undefined for the 1/(lambda t) methods.
    EXPECT_THROW(parse_config(replace(kConfig, "rho: 0.3333333333333333", "rho: 0")), ConfigError);
    EXPECT_THROW(parse_config(replace(kConfig, "alphas: [0.0, 0.2, 0.7]", "alphas: [1.0]")), ConfigError);
    EXPECT_THROW(parse_config(replace(kConfig, "label: centered", "label: \"has space\"")), ConfigError);
    EXPECT_THROW(parse_config(replace(kConfig, "w_star_seed: 42", "w_star: [2, 0, 0]")), ConfigError);
}

TEST(Config, AnchoredMessage) {
    const ConfigError e("bad", 3, 7);
    EXPECT_EQ(e.anchored("x.yaml"), "x.yaml:3:7: bad");
}

TEST(Config, ResolveOptimizerFillsCellValues) {
    const auto cfg = parse_config(kConfig);
    const auto spec = cell_spec(cfg, 0.7);
    EXPECT_EQ(spec.alpha(), 0.7);
    const auto km = resolve_optimizer(cfg.algorithms[0], spec, 400);
    EXPECT_EQ(km.T, 400u);
    EXPECT_DOUBLE_EQ(km.lambda, 0.3 * spec.rho);
    EXPECT_DOUBLE_EQ(km.huber.radius, 6 * 1.5 + 0.1);
    EXPECT_EQ(km.ball.radius(), 1.5);
    const auto un = resolve_optimizer(cfg.algorithms[2], spec, 400);
    EXPECT_EQ(un.ball.radius(), 1.0);
    EXPECT_EQ(un.huber.radius, 3.2);
    EXPECT_EQ(resolve_optimizer(cfg.algorithms[3], spec, 100).lambda, 0.4);
}

TEST(Seeds, InjectiveOverTenThousandCells) {
    std::set<std::uint64_t> seen;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t al = 0; al < 5; ++al)
            for (std::size_t t = 0; t < 10; ++t)
                for (std::size_t r = 0; r < 50; ++r) seen.insert(run_seed(7, a, al, t, r));
    EXPECT_EQ(seen.size(), 10000u);
}

TEST(Seeds, GridOrderAndIds) {
    const auto cfg = parse_config(kConfig);
    const auto grid = enumerate_grid(cfg);
    ASSERT_EQ(grid.size(), 4u * 3 * 3 * 2);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(grid[i].run_id, i);
    EXPECT_EQ(grid[1].repeat, 1u);
    EXPECT_EQ(grid[2].t_index, 1u);
    EXPECT_EQ(grid[6].alpha_index, 1u);
    EXPECT_EQ(grid[18].algorithm_index, 1u);
    EXPECT_EQ(grid[5].seed, run_seed(99, 0, 0, 2, 1));
}

TEST(Csv, HeaderColumns) {
    EXPECT_EQ(csv_header(), (std::vector<std::string>{"run_id", "algorithm", "alpha", "T", "seed", "est_error",
                                                      "excess_risk", "excess_risk_se", "bound", "wall_ms"}));
}

TEST(Csv, ExactRoundTrip) {
    std::mt19937_64 rng(1);
    std::vector<ResultRow> rows;
    const double specials[] = {0.0, -0.0, 1e-310, std::numeric_limits<double>::min(),
                               std::numeric_limits<double>::max(), 0.1, 1.0 / 3.0, -2.5e-17};
    for (std::size_t i = 0; i < 200; ++i) {
        ResultRow r;
        r.run_id = i;
        r.algorithm = i % 2 ? "l2_sgd" : "huber_known_mean";
        r.alpha = std::bit_cast<double>(rng() >> 2) ;
        if (!std::isfinite(r.alpha)) r.alpha = 0.5;
        r.T = rng() % 100000;
        r.seed = rng();
        r.est_error = std::uniform_real_distribution<double>(0, 1)(rng);
        r.excess_risk = specials[i % std::size(specials)];
        r.excess_risk_se = std::ldexp(std::uniform_real_distribution<double>(0, 1)(rng), -40);
        if (i % 3) r.bound = std::exp(std::uniform_real_distribution<double>(-30, 30)(rng));
        if (i % 5) r.wall_ms = 1.0 / (i + 1);
        rows.push_back(r);
    }
    std::stringstream ss;
    write_results(ss, rows);
    const auto back = read_results(ss);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i].alpha), std::bit_cast<std::uint64_t>(rows[i].alpha));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i].excess_risk),
                  std::bit_cast<std::uint64_t>(rows[i].excess_risk));
        EXPECT_EQ(back[i], rows[i]);
    }
}

TEST(Csv, LineEndingsAndDigits) {
    std::stringstream ss;
    auto r = row("x", 0.1, 10, 1.0 / 3.0, 0.0);
    write_results(ss, {r});
    const std::string text = ss.str();
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
    EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(format_double(2.0), "2");
}

TEST(Csv, SchemaErrors) {
    std::stringstream empty;
    EXPECT_THROW(read_results(empty), CsvSchemaError);
    std::stringstream missing("run_id,algorithm,alpha,T,seed,est_error\n");
    try {
        read_results(missing);
        FAIL();
    } catch (const CsvSchemaError& e) {
        EXPECT_EQ(e.missing(), (std::vector<std::string>{"excess_risk", "excess_risk_se", "bound", "wall_ms"}));
    }
    std::stringstream bad(
        "run_id,algorithm,alpha,T,seed,est_error,excess_risk,excess_risk_se,bound,wall_ms\n0,a,zero,1,1,1,1,1,,\n");
    EXPECT_THROW(read_results(bad), CsvSchemaError);
    std::stringstream header_only("run_id,algorithm,alpha,T,seed,est_error,excess_risk,excess_risk_se,bound,wall_ms\n");
    EXPECT_TRUE(read_results(header_only).empty());
}

TEST(Csv, AtomicWriteLeavesNoTemporary) {
    const auto dir = std::filesystem::temp_directory_path() / "robreg_csv_atomic";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "r.csv").string();
    write_results_atomic(path, {row("a", 0.1, 5, 1, 2)});
    write_results_atomic(path, {row("b", 0.1, 5, 1, 2), row("b", 0.1, 6, 1, 2)});
    EXPECT_EQ(read_results_file(path).size(), 2u);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
    EXPECT_EQ(files, 1u);
    std::filesystem::remove_all(dir);
}

TEST(Sweep, MinimalConfigOneRow) {
    std::string text = kConfig;
    const auto cfg0 = parse_config(text);
    ExperimentConfig cfg = cfg0;
    cfg.algorithms.resize(1);
    cfg.t_grid = {100};
    cfg.alphas = {0.2};
    cfg.repeats = 1;
    const auto rows = run_sweep(cfg, {1, false});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].bound.has_value());
    EXPECT_FALSE(rows[0].wall_ms.has_value());
    EXPECT_GE(rows[0].est_error, 0.0);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
    const auto cfg = parse_config(kConfig);
    const auto one = run_sweep(cfg, {1, false});
    const auto four = run_sweep(cfg, {4, false});
    ASSERT_EQ(one.size(), 72u);
    EXPECT_EQ(one, four);
    for (const auto& r : one) {
        const bool baseline = r.algorithm == "centered" || r.algorithm == "l2_sgd";
        EXPECT_EQ(r.bound.has_value(), !baseline) << r.algorithm;
        EXPECT_GE(r.excess_risk, -3 * r.excess_risk_se);
    }
}

TEST(Plot, SingleCurveSingleLegend) {
    std::vector<ResultRow> rows;
    for (std::size_t T : {100, 200, 400})
        for (int s = 0; s < 3; ++s) rows.push_back(row("only", 0.3, T, 1.0 / T + 0.001 * s, 0.5 / T));
    const auto files = build_plots(rows, "/tmp/x.svg", {});
    ASSERT_EQ(files.size(), 1u);
    EXPECT_EQ(files[0].path, "/tmp/x.svg");
    EXPECT_EQ(files[0].curves, 1u);
    const auto& svg = files[0].svg;
    auto count = [&](const std::string& needle) {
        std::size_t n = 0;
        for (auto p = svg.find(needle); p != std::string::npos; p = svg.find(needle, p + 1)) ++n;
        return n;
    };
    EXPECT_EQ(count("<polyline"), 1u);
    EXPECT_EQ(count("<polygon"), 1u);
    EXPECT_EQ(count(">only</text>"), 1u);
    EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
}

TEST(Plot, OneFilePerAlphaDeterministic) {
    std::vector<ResultRow> rows;
    for (double alpha : {0.01, 0.7})
        for (const char* alg : {"a", "b", "c"})
            for (std::size_t T : {1024, 2048, 4096})
                for (int s = 0; s < 2; ++s) rows.push_back(row(alg, alpha, T, 1.0 / (T + s), 1.0 / T));
    const auto first = build_plots(rows, "out/fig.svg", {PlotMetric::excess_risk, true, true});
    const auto again = build_plots(rows, "out/fig.svg", {PlotMetric::excess_risk, true, true});
    ASSERT_EQ(first.size(), 2u);
    EXPECT_EQ(first[0].path, "out/fig_alpha0.01.svg");
    EXPECT_EQ(first[1].path, "out/fig_alpha0.7.svg");
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(first[i].curves, 3u);
        EXPECT_EQ(first[i].svg, again[i].svg);
    }
}
