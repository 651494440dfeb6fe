#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "sawei/acquisition.hpp"
#include "sawei/gp.hpp"
#include "sawei/search.hpp"

namespace sawei {

enum class AttitudeMode { last, inc_change, last_adjust };
enum class ExploitTerm { pi, wei_term };

[[nodiscard]] std::string to_string(AttitudeMode mode);
[[nodiscard]] std::string to_string(ExploitTerm term);
[[nodiscard]] AttitudeMode parse_attitude_mode(const std::string& text);
[[nodiscard]] ExploitTerm parse_exploit_term(const std::string& text);

struct ControllerConfig {
    double initial_alpha = 0.5;
    double epsilon = 0.1;
    double delta_alpha = 0.1;
    std::size_t horizon = 1;
    std::size_t window = 7;
    AttitudeMode attitude_mode = AttitudeMode::last;
    ExploitTerm exploit_term = ExploitTerm::pi;
    bool adjust_enabled = true;

    void validate() const;
};

// Owned by a single run.
struct ControllerState {
    ControllerConfig config;
    double alpha = 0.5;
    std::vector<double> ubr_raw;
    std::vector<double> ubr_smoothed;
    double max_abs_gradient = 0.0;
    double last_gradient = 0.0;
    double explore_acc = 0.0;
    double exploit_acc = 0.0;

    static ControllerState initial(const ControllerConfig& config);
};

struct AttitudeRecord {
    double a_explore;
    double a_exploit;
};

/// min over history of UCB minus the minimum LCB over the space.
[[nodiscard]] double compute_ubr(const PosteriorModel& model, const Eigen::MatrixXd& history_points,
                                 const SearchSpace& space, double coefficient,
                                 const SearchBudget& budget, Rng& rng);

/// Interquartile mean of the last `window` values: sort, drop floor(k/4) from
/// each end, average the rest.
[[nodiscard]] double smooth_iqm(std::span<const double> series, std::size_t window = 7);

// Appends a raw UBR value and its smoothed counterpart.
void observe_ubr(ControllerState& state, double ubr);

/// Updates the running maximum with the latest n-step gradient of the smoothed
/// UBR and reports whether |g| <= epsilon * max. False until n + 1 smoothed
/// values exist or while the maximum is still zero.
bool gradient_converged(ControllerState& state);

void record_attitude(ControllerState& state, double a_explore, double a_exploit,
                     bool incumbent_changed);

/// Moves alpha against the tracked attitude: up by delta when exploration
/// dominated, down otherwise (ties count as exploitation). Clamped to [0, 1].
double adjust_alpha(ControllerState& state);

[[nodiscard]] AttitudeRecord attitude_terms(double mean, double std, double f_min, ExploitTerm term);

// Hand-crafted and adaptive schedules for the acquisition function.
namespace schedule {
struct Sawei {};
struct Static {
    double alpha = 0.5;
};
struct Steps {
    double alpha_from = 0.5;
    double alpha_to = 1.0;
    int n_steps = 5;
};
struct SwitchEiPi {
    double fraction = 0.5;
};
struct Pulse {
    std::vector<double> cycle{0.1, 0.3, 0.5, 0.7, 0.9};
};
struct Portfolio {};
// Single acquisition function for the whole run (EI, PI or LCB baselines).
struct Fixed {
    AcquisitionSpec spec;
};
}  // namespace schedule

using SchedulePolicy = std::variant<schedule::Sawei, schedule::Static, schedule::Steps,
                                    schedule::SwitchEiPi, schedule::Pulse, schedule::Portfolio,
                                    schedule::Fixed>;

void validate(const SchedulePolicy& policy);

/// Grammar: sawei | static:<a> | wei:<a> | steps:<from>:<to>[:<n>] |
/// switch_ei_pi:<fraction> | pulse | portfolio | ei | pi | lcb
[[nodiscard]] SchedulePolicy parse_schedule(const std::string& text);
[[nodiscard]] std::string schedule_name(const SchedulePolicy& policy);

/// Acquisition function for BO iteration t (0-based) out of T. SAWEI yields
/// WEI at `controller_alpha`.
[[nodiscard]] AcquisitionSpec schedule_alpha(const SchedulePolicy& policy, std::size_t t,
                                             std::size_t total, double controller_alpha = 0.5);

}  // namespace sawei
