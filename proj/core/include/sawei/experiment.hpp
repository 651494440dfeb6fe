#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sawei/bo_loop.hpp"
#include "sawei/controller.hpp"
#include "sawei/objective.hpp"
#include "sawei/objectives.hpp"

namespace sawei {

// One benchmark task: a synthetic function over one or more instances, or a
// tabular benchmark file. Instances are pooled when aggregating.
struct TaskSpec {
    std::string name;
    std::optional<FunctionId> function;
    std::size_t dimension = 2;
    std::vector<std::uint64_t> instances{1};
    std::filesystem::path table;

    [[nodiscard]] std::vector<std::unique_ptr<Objective>> objectives() const;
    [[nodiscard]] std::vector<std::uint64_t> instance_ids() const;
};

struct ScheduleEntry {
    std::string name;
    SchedulePolicy policy;
    std::optional<ControllerConfig> controller;
};

struct ExperimentConfig {
    std::vector<TaskSpec> tasks;
    std::vector<ScheduleEntry> schedules;
    std::vector<std::uint64_t> seeds;
    RunConfig run_config;
    std::filesystem::path output_dir;
    std::size_t workers = 1;

    void validate() const;

    /// Relative table paths resolve against `base_dir`.
    static ExperimentConfig from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir = {});
    static ExperimentConfig load(const std::filesystem::path& path);
    [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
[[nodiscard]] ControllerConfig controller_from_json(const nlohmann::json& j,
                                                    ControllerConfig base = {});

// Reads SAWEI_SEED_OFFSET (default 0) and adds it to every seed.
void apply_seed_offset(ExperimentConfig& config);

// Per-step IQM (over seeds x instances) of one schedule on one task.
struct AggregateCurve {
    std::string task;
    std::string schedule;
    std::vector<double> iqm_regret;
    std::vector<double> iqm_log10_regret;
    double final_iqm_regret = 0.0;
    double final_iqm_log10_regret = 0.0;
    std::size_t runs = 0;

    [[nodiscard]] nlohmann::json to_json() const;
    static AggregateCurve from_json(const nlohmann::json& j);
};

struct RunRecord {
    std::string task;
    std::uint64_t instance = 1;
    std::string schedule;
    std::uint64_t seed = 0;
    std::filesystem::path trace_file;
    std::filesystem::path summary_file;
    bool ok = false;
    std::string error;
    std::size_t adjust_events = 0;
    double final_regret = 0.0;
    double wall_seconds = 0.0;
};

struct ExperimentResult {
    std::vector<RunRecord> runs;
    std::vector<AggregateCurve> curves;
    std::filesystem::path manifest;

    [[nodiscard]] std::size_t aborted() const;
};

[[nodiscard]] std::string sanitize_name(const std::string& name);

/// Runs every task x instance x schedule x seed combination on
/// `config.workers` threads, writing one trace CSV and summary JSON per run,
/// one aggregate JSON per (task, schedule) and a manifest. Aborted runs are
/// listed in the manifest and left out of the aggregates.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct RankReport {
    std::vector<std::string> tasks;
    std::vector<std::string> schedules;
    std::size_t steps = 0;
    // [task][step][schedule]
    std::vector<std::vector<std::vector<double>>> task_ranks;
    // [step][schedule], averaged over tasks
    std::vector<std::vector<double>> mean_ranks;
    // IQM over tasks of the final-step rank, per schedule
    std::vector<double> final_ranks;
};

/// Ranks schedules per task and step by IQM regret (ties share the mean
/// rank). Throws GridMismatch if step grids differ or a (task, schedule)
/// curve is missing.
[[nodiscard]] RankReport ranks_per_step(const std::vector<AggregateCurve>& curves);

struct AblationGrid {
    std::vector<double> delta_alpha{0.05, 0.1, 0.25};
    std::vector<AttitudeMode> attitude_modes{AttitudeMode::last, AttitudeMode::inc_change,
                                             AttitudeMode::last_adjust};
    std::vector<double> epsilon{0.05, 0.1, 0.5, 1.0};

    [[nodiscard]] std::size_t size() const {
        return delta_alpha.size() * attitude_modes.size() * epsilon.size();
    }
    static AblationGrid from_json(const nlohmann::json& j);
};

struct SweepCombo {
    std::string name;
    double delta_alpha;
    AttitudeMode attitude_mode;
    double epsilon;
    // task -> IQM final log10 regret and its min-max normalized value
    std::map<std::string, double> final_log10_regret;
    std::map<std::string, double> normalized;
    double mean_normalized = 0.0;
};

struct SweepResult {
    ExperimentResult experiment;
    std::vector<SweepCombo> combos;
};

// Min-max normalization; all zeros when the values are constant.
[[nodiscard]] std::vector<double> min_max_normalize(const std::vector<double>& values);

/// SAWEI over every grid combination; writes sweep_summary.csv/json next to
/// the experiment artifacts.
SweepResult ablation_sweep(const ExperimentConfig& base, const AblationGrid& grid);

}  // namespace sawei
