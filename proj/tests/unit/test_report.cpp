#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sawei/errors.hpp"
#include "sawei/experiment.hpp"
#include "sawei/report.hpp"
#include "sawei/svg.hpp"
#include "sawei/trace_io.hpp"

using namespace sawei;
namespace fs = std::filesystem;

namespace {

fs::path run_small(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sawei_report_" + name);
    fs::remove_all(dir);
    ExperimentConfig cfg;
    TaskSpec task;
    task.name = "sphere_2d";
    task.function = FunctionId::sphere;
    cfg.tasks = {task};
    cfg.schedules = {{"sawei", schedule::Sawei{}, std::nullopt},
                     {"switch_ei_pi-0.5", parse_schedule("switch_ei_pi:0.5"), std::nullopt}};
    cfg.seeds = {0, 1, 2};
    cfg.run_config.init_design.size = 3;
    cfg.run_config.bo_budget = 8;
    cfg.run_config.search.n_random = 100;
    cfg.output_dir = dir;
    cfg.workers = 2;
    (void)run_experiment(cfg);
    return dir;
}

}  // namespace

TEST(Report, MissingManifestThrows) {
    const auto dir = fs::temp_directory_path() / "sawei_report_empty";
    fs::remove_all(dir);
    fs::create_directories(dir);
    EXPECT_THROW((void)emit_report(dir, false), MissingManifest);
    write_text_file(dir / "manifest.json", R"({"schedules": [], "tasks": []})");
    EXPECT_THROW((void)emit_report(dir, false), MissingManifest);
}

TEST(Report, RegenerationIsIdentical) {
    const auto dir = run_small("regen");
    const auto first = emit_report(dir, true);
    std::vector<std::string> contents;
    for (const auto& f : first.files) {
        contents.push_back(read_text_file(f));
    }
    const auto second = emit_report(dir, true);
    ASSERT_EQ(first.files, second.files);
    for (std::size_t i = 0; i < first.files.size(); ++i) {
        EXPECT_EQ(read_text_file(second.files[i]), contents[i]) << first.files[i];
    }
    for (const char* name : {"ranks_per_step.csv", "final_ranks.csv", "final_regret_summary.csv",
                             "alpha_drift.csv", "ubr_switch_diagnostic.csv", "ranks_per_step.svg",
                             "sphere_2d_ubr.svg", "sphere_2d_alpha.svg", "sphere_2d_log_regret.svg"}) {
        EXPECT_TRUE(fs::exists(dir / "report" / name)) << name;
    }
}

TEST(Report, RankChartHasOnePointPerStep) {
    const auto dir = run_small("svg");
    const auto out = emit_report(dir, true);
    EXPECT_EQ(out.ranks.steps, 8u);
    const auto svg_text = read_text_file(dir / "report" / "ranks_per_step.svg");
    const std::regex series("<g class=\"series\"[^>]*data-points=\"(\\d+)\"");
    std::size_t n = 0;
    for (auto it = std::sregex_iterator(svg_text.begin(), svg_text.end(), series);
         it != std::sregex_iterator(); ++it) {
        EXPECT_EQ((*it)[1].str(), "8");
        ++n;
    }
    EXPECT_EQ(n, 2u);
    // The csv has a header plus one row per step.
    const auto csv = read_text_file(dir / "report" / "ranks_per_step.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}

TEST(Report, SwitchDiagnosticMarksSwitchIteration) {
    const auto dir = run_small("switch");
    (void)emit_report(dir, true);
    const auto diag = read_text_file(dir / "report" / "ubr_switch_diagnostic.csv");
    // floor(0.5 * 8) = 4 BO steps after 3 initial points.
    EXPECT_NE(diag.find("switch_ei_pi-0.5,0,4,7,"), std::string::npos) << diag;
    EXPECT_EQ(diag.find("sawei,"), std::string::npos);
    const auto ubr = read_text_file(dir / "report" / "sphere_2d_ubr.svg");
    EXPECT_NE(ubr.find("switch switch_ei_pi-0.5"), std::string::npos);
}

TEST(SwitchStep, FloorOfFraction) {
    EXPECT_EQ(switch_step(0.25, 256), 64u);
    EXPECT_EQ(switch_step(0.5, 7), 3u);
    EXPECT_EQ(switch_step(0.0, 10), 0u);
}

TEST(Svg, NanBreaksPolyline) {
    svg::LineChart chart{"t", "x", "y", {{"s", {1.0, 2.0, std::nan(""), 3.0, 4.0}}}, {}};
    const auto text = svg::render(chart);
    std::size_t polylines = 0;
    for (std::size_t p = text.find("<polyline"); p != std::string::npos; p = text.find("<polyline", p + 1)) {
        ++polylines;
    }
    EXPECT_EQ(polylines, 2u);
    // Only finite values count as points.
    EXPECT_NE(text.find("data-points=\"4\""), std::string::npos);
    EXPECT_EQ(text, svg::render(chart));
}
