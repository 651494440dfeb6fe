#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sawei/controller.hpp"
#include "sawei/design.hpp"
#include "sawei/gp.hpp"
#include "sawei/objective.hpp"
#include "sawei/search.hpp"

namespace sawei {

// Evaluated points with their values and the running incumbent.
class ObservationHistory {
public:
    explicit ObservationHistory(Eigen::Index dimension);

    // Returns true when the new value strictly improves the incumbent.
    bool add(const Eigen::VectorXd& point, double value);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] Eigen::MatrixXd points() const;
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t incumbent_index() const noexcept { return incumbent_; }
    [[nodiscard]] double f_min() const noexcept { return f_min_; }
    [[nodiscard]] Eigen::VectorXd incumbent() const;
    [[nodiscard]] Dataset dataset() const;

private:
    Eigen::Index dimension_;
    std::vector<Eigen::VectorXd> points_;
    std::vector<double> values_;
    std::size_t incumbent_ = 0;
    double f_min_ = 0.0;
};

struct IncumbentInfo {
    std::size_t index;
    double f_min;
};

// First-occurrence argmin over the history values.
[[nodiscard]] IncumbentInfo update_incumbent(const ObservationHistory& history);

struct InitDesign {
    DesignKind kind = DesignKind::sobol;
    std::size_t size = 8;
};

struct RunConfig {
    InitDesign init_design;
    std::size_t bo_budget = 50;
    SchedulePolicy schedule = schedule::Sawei{};
    ControllerConfig controller;
    GpConfig gp;
    SearchBudget search;
    double ucb_beta = 1.0;
    double hedge_eta = 1.0;
    // Seeds each refit with the previous optimum as its first start.
    bool warm_start_gp = true;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class Phase { init, bo };

struct TraceRow {
    std::size_t iteration = 0;
    Phase phase = Phase::init;
    Eigen::VectorXd point;
    double y = 0.0;
    double incumbent = 0.0;
    double regret = 0.0;
    double log10_regret = 0.0;
    double ubr_raw = std::numeric_limits<double>::quiet_NaN();
    double ubr_smoothed = std::numeric_limits<double>::quiet_NaN();
    // WEI weight used for this proposal (nan when the AF is not a WEI).
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double a_explore = std::numeric_limits<double>::quiet_NaN();
    double a_exploit = std::numeric_limits<double>::quiet_NaN();
    bool adjusted = false;

    // Telemetry kept in memory and in the JSON summary only.
    double alpha_next = std::numeric_limits<double>::quiet_NaN();
    double gradient = std::numeric_limits<double>::quiet_NaN();
    double max_abs_gradient = std::numeric_limits<double>::quiet_NaN();
    double explore_acc = std::numeric_limits<double>::quiet_NaN();
    double exploit_acc = std::numeric_limits<double>::quiet_NaN();
    std::string acquisition;
    double wall_seconds = 0.0;
};

struct RunTrace {
    std::string objective;
    std::string schedule;
    std::uint64_t seed = 0;
    std::size_t init_size = 0;
    std::size_t bo_budget = 0;
    std::vector<TraceRow> rows;
    std::optional<std::string> failure;

    [[nodiscard]] bool complete() const noexcept {
        return !failure && rows.size() == init_size + bo_budget;
    }
    [[nodiscard]] std::size_t adjust_events() const;
    [[nodiscard]] double final_regret() const;
};

[[nodiscard]] double log10_regret(double regret, bool tabular);

/// Runs BO under the configured schedule. A FitError aborts the run; the trace
/// then carries the rows produced so far and `failure` is set.
[[nodiscard]] RunTrace run_bo(const Objective& objective, const RunConfig& config);

}  // namespace sawei
