#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sawei/errors.hpp"
#include "sawei/experiment.hpp"
#include "sawei/trace_io.hpp"

using namespace sawei;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = SAWEI_TEST_DATA_DIR;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sawei_experiment_" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentConfig small_experiment(const fs::path& out) {
    ExperimentConfig cfg;
    TaskSpec sphere;
    sphere.name = "sphere_2d";
    sphere.function = FunctionId::sphere;
    TaskSpec rastrigin;
    rastrigin.name = "rastrigin_2d";
    rastrigin.function = FunctionId::rastrigin;
    cfg.tasks = {sphere, rastrigin};
    cfg.schedules = {{"sawei", schedule::Sawei{}, std::nullopt},
                     {"wei_0", parse_schedule("wei:0"), std::nullopt},
                     {"switch", parse_schedule("switch_ei_pi:0.5"), std::nullopt}};
    cfg.seeds = {0, 1, 2, 3, 4};
    cfg.run_config.init_design.size = 3;
    cfg.run_config.bo_budget = 4;
    cfg.run_config.search.n_random = 100;
    cfg.run_config.search.n_local_starts = 2;
    cfg.output_dir = out;
    cfg.workers = 4;
    return cfg;
}

AggregateCurve curve(const std::string& task, const std::string& schedule, std::vector<double> regret) {
    AggregateCurve c;
    c.task = task;
    c.schedule = schedule;
    c.iqm_log10_regret = regret;
    c.iqm_regret = std::move(regret);
    return c;
}

std::size_t index_of(const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

std::size_t count_files(const fs::path& dir, const std::string& ext) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        n += e.path().extension() == ext;
    }
    return n;
}

}  // namespace

TEST(RunExperiment, CountsArtifactsAndIsReproducible) {
    const auto out = scratch("counts");
    const auto cfg = small_experiment(out / "a");
    const auto result = run_experiment(cfg);
    EXPECT_EQ(result.runs.size(), 30u);
    EXPECT_EQ(result.aborted(), 0u);
    EXPECT_EQ(result.curves.size(), 6u);
    EXPECT_EQ(count_files(out / "a" / "traces", ".csv"), 30u);
    EXPECT_EQ(count_files(out / "a" / "aggregates", ".json"), 6u);
    for (const auto& c : result.curves) {
        EXPECT_EQ(c.runs, 5u);
        EXPECT_EQ(c.iqm_regret.size(), 4u);
    }

    const auto manifest = json::parse(read_text_file(result.manifest));
    EXPECT_EQ(manifest.at("runs").size(), 30u);
    EXPECT_TRUE(manifest.at("aborted").empty());

    // Same config, different worker count and directory: identical traces.
    auto again = cfg;
    again.output_dir = out / "b";
    again.workers = 1;
    (void)run_experiment(again);
    for (const auto& e : fs::directory_iterator(out / "a" / "traces")) {
        EXPECT_EQ(read_text_file(e.path()), read_text_file(out / "b" / "traces" / e.path().filename()))
            << e.path().filename();
    }
    for (const auto& e : fs::directory_iterator(out / "a" / "aggregates")) {
        EXPECT_EQ(read_text_file(e.path()),
                  read_text_file(out / "b" / "aggregates" / e.path().filename()));
    }
}

TEST(RunExperiment, AggregateIsIqmOverSeeds) {
    const auto out = scratch("iqm");
    auto cfg = small_experiment(out);
    cfg.tasks.resize(1);
    cfg.schedules.resize(1);
    const auto result = run_experiment(cfg);
    ASSERT_EQ(result.curves.size(), 1u);
    std::vector<double> finals;
    for (const auto& r : result.runs) {
        finals.push_back(r.final_regret);
    }
    std::sort(finals.begin(), finals.end());
    // Five seeds: drop one from each side.
    EXPECT_NEAR(result.curves[0].final_iqm_regret, (finals[1] + finals[2] + finals[3]) / 3.0,
                1e-12 * (1 + finals[3]));
}

TEST(Ranks, TotalOrderGivesOneAndTwo) {
    const std::vector<AggregateCurve> curves{
        curve("t1", "a", {0.1, 0.1, 0.1}), curve("t1", "b", {0.2, 0.2, 0.2}),
        curve("t2", "a", {0.1, 0.1, 0.1}), curve("t2", "b", {0.2, 0.2, 0.2})};
    const auto r = ranks_per_step(curves);
    ASSERT_EQ(r.steps, 3u);
    const auto a = index_of(r.schedules, "a");
    const auto b = index_of(r.schedules, "b");
    for (std::size_t step = 0; step < 3; ++step) {
        EXPECT_EQ(r.mean_ranks[step][a], 1.0);
        EXPECT_EQ(r.mean_ranks[step][b], 2.0);
    }
}

TEST(Ranks, TiesShareAverageRank) {
    const std::vector<AggregateCurve> curves{curve("t1", "a", {0.3}), curve("t1", "b", {0.3}),
                                             curve("t1", "c", {0.1})};
    const auto r = ranks_per_step(curves);
    EXPECT_EQ(r.task_ranks[0][0][index_of(r.schedules, "a")], 2.5);
    EXPECT_EQ(r.task_ranks[0][0][index_of(r.schedules, "b")], 2.5);
    EXPECT_EQ(r.task_ranks[0][0][index_of(r.schedules, "c")], 1.0);

    const auto pair = ranks_per_step({curve("t", "x", {1.0}), curve("t", "y", {1.0})});
    EXPECT_EQ(pair.task_ranks[0][0][0], 1.5);
    EXPECT_EQ(pair.task_ranks[0][0][1], 1.5);
}

TEST(Ranks, FinalTableIsIqmOverTasks) {
    // Per-task final ranks A:[1,2], B:[2,1], C:[3,3]; the IQM of two values is their mean.
    const std::vector<AggregateCurve> curves{
        curve("t1", "A", {5.0, 0.1}), curve("t1", "B", {5.0, 0.2}), curve("t1", "C", {5.0, 0.3}),
        curve("t2", "A", {5.0, 0.2}), curve("t2", "B", {5.0, 0.1}), curve("t2", "C", {5.0, 0.3})};
    const auto r = ranks_per_step(curves);
    EXPECT_EQ(r.final_ranks[index_of(r.schedules, "A")], 1.5);
    EXPECT_EQ(r.final_ranks[index_of(r.schedules, "B")], 1.5);
    EXPECT_EQ(r.final_ranks[index_of(r.schedules, "C")], 3.0);
    // Everything tied at the first step.
    for (const double v : r.mean_ranks[0]) {
        EXPECT_EQ(v, 2.0);
    }
}

TEST(Ranks, SumWithoutTies) {
    std::vector<AggregateCurve> curves;
    const std::vector<std::string> names{"a", "b", "c", "d", "e"};
    for (std::size_t s = 0; s < names.size(); ++s) {
        curves.push_back(curve("t", names[s], {double((s * 3) % 5), double((s * 2) % 5)}));
    }
    const auto r = ranks_per_step(curves);
    for (std::size_t step = 0; step < 2; ++step) {
        double sum = 0.0;
        for (const double v : r.task_ranks[0][step]) {
            sum += v;
        }
        EXPECT_EQ(sum, 15.0);
    }
}

TEST(Ranks, MismatchedGridsThrow) {
    EXPECT_THROW((void)ranks_per_step({curve("t", "a", {1, 2}), curve("t", "b", {1})}), GridMismatch);
    EXPECT_THROW((void)ranks_per_step({curve("t1", "a", {1}), curve("t1", "b", {1}), curve("t2", "a", {1})}),
                 GridMismatch);
    EXPECT_THROW((void)ranks_per_step({}), GridMismatch);
}

TEST(Sweep, DefaultGridSize) {
    EXPECT_EQ(AblationGrid{}.size(), 36u);
    const auto g = AblationGrid::from_json(json::parse(R"({"delta_alpha": [0.1], "epsilon": [0.5, 1]})"));
    EXPECT_EQ(g.size(), 6u);
}

TEST(Sweep, MinMaxNormalize) {
    EXPECT_EQ(min_max_normalize({2.0, 4.0, 6.0}), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(min_max_normalize({3.0, 3.0}), (std::vector<double>{0.0, 0.0}));
}

TEST(Sweep, SingleCellMatchesPlainExperiment) {
    const auto out = scratch("sweep");
    auto base = small_experiment(out / "sweep");
    base.tasks.resize(1);
    base.seeds = {0, 1};
    AblationGrid grid;
    grid.delta_alpha = {0.25};
    grid.attitude_modes = {AttitudeMode::inc_change};
    grid.epsilon = {0.5};
    const auto sweep = ablation_sweep(base, grid);
    ASSERT_EQ(sweep.combos.size(), 1u);
    EXPECT_EQ(sweep.combos[0].name, "sawei_da0.25_inc_change_eps0.5");
    EXPECT_TRUE(fs::exists(out / "sweep" / "sweep_summary.csv"));

    auto plain = base;
    plain.output_dir = out / "plain";
    plain.run_config.controller.delta_alpha = 0.25;
    plain.run_config.controller.attitude_mode = AttitudeMode::inc_change;
    plain.run_config.controller.epsilon = 0.5;
    plain.schedules = {{"sawei", schedule::Sawei{}, std::nullopt}};
    const auto reference = run_experiment(plain);

    ASSERT_EQ(sweep.experiment.runs.size(), reference.runs.size());
    for (std::size_t i = 0; i < reference.runs.size(); ++i) {
        EXPECT_EQ(read_text_file(out / "sweep" / sweep.experiment.runs[i].trace_file),
                  read_text_file(out / "plain" / reference.runs[i].trace_file));
    }
    EXPECT_EQ(sweep.experiment.curves[0].iqm_regret, reference.curves[0].iqm_regret);
}

TEST(Config, ParsesJsonSchema) {
    const auto cfg = ExperimentConfig::load(kData / "tiny_experiment.json");
    ASSERT_EQ(cfg.tasks.size(), 2u);
    EXPECT_EQ(cfg.tasks[0].name, "sphere_2d");
    EXPECT_EQ(cfg.tasks[1].name, "grid20");
    EXPECT_EQ(cfg.tasks[1].table, kData / "grid20.csv");
    EXPECT_EQ(cfg.schedules.size(), 2u);
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0, 1}));
    EXPECT_EQ(cfg.run_config.init_design.size, 4u);
    EXPECT_EQ(cfg.run_config.bo_budget, 6u);
    EXPECT_EQ(cfg.run_config.search.n_random, 200u);

    const auto round = ExperimentConfig::from_json(cfg.to_json());
    EXPECT_EQ(round.to_json(), cfg.to_json());

    const auto seeds = ExperimentConfig::from_json(json::parse(
        R"({"tasks": [{"function": "sphere", "dimension": 3, "instances": 2}],
            "schedules": ["sawei", {"type": "wei:0.5", "name": "half", "controller": {"epsilon": 0.5}}],
            "seeds": {"count": 3, "start": 10}})"));
    EXPECT_EQ(seeds.seeds, (std::vector<std::uint64_t>{10, 11, 12}));
    EXPECT_EQ(seeds.tasks[0].instance_ids(), (std::vector<std::uint64_t>{1, 2}));
    EXPECT_EQ(seeds.schedules[1].name, "half");
    ASSERT_TRUE(seeds.schedules[1].controller);
    EXPECT_EQ(seeds.schedules[1].controller->epsilon, 0.5);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW((void)ExperimentConfig::from_json(json::parse(R"({"tasks": []})")), std::exception);
    EXPECT_THROW((void)ExperimentConfig::from_json(json::parse(
                     R"({"tasks": [{"function": "nope"}], "schedules": ["sawei"], "seeds": [0]})")),
                 UnknownFunction);
    EXPECT_THROW((void)ExperimentConfig::from_json(json::parse(
                     R"({"tasks": [{"function": "sphere"}], "schedules": ["bogus"], "seeds": [0]})")),
                 std::exception);
    EXPECT_THROW((void)ExperimentConfig::from_json(json::parse(
                     R"({"tasks": [{"function": "sphere"}], "schedules": ["sawei"], "seeds": "x"})")),
                 ParseError);
}

TEST(Config, SeedOffsetFromEnvironment) {
    auto cfg = small_experiment("unused");
    ::setenv("SAWEI_SEED_OFFSET", "100", 1);
    apply_seed_offset(cfg);
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{100, 101, 102, 103, 104}));
    ::setenv("SAWEI_SEED_OFFSET", "abc", 1);
    EXPECT_THROW(apply_seed_offset(cfg), ParseError);
    ::unsetenv("SAWEI_SEED_OFFSET");
    apply_seed_offset(cfg);
    EXPECT_EQ(cfg.seeds.front(), 100u);
}

TEST(Naming, SanitizeKeepsSafeCharacters) {
    EXPECT_EQ(sanitize_name("switch_ei_pi:0.5"), "switch_ei_pi-0.5");
    EXPECT_EQ(sanitize_name("a b/c"), "a_b_c");
}
