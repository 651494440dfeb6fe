#include "sawei/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "sawei/detail/overloaded.hpp"

namespace sawei {

namespace {

using detail::Overloaded;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid number '" + text + "' in schedule '" + context + "'");
    }
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string to_string(AttitudeMode mode) {
    switch (mode) {
        case AttitudeMode::last:
            return "last";
        case AttitudeMode::inc_change:
            return "inc_change";
        case AttitudeMode::last_adjust:
            return "last_adjust";
    }
    return "last";
}

std::string to_string(ExploitTerm term) { return term == ExploitTerm::pi ? "pi" : "wei_term"; }

AttitudeMode parse_attitude_mode(const std::string& text) {
    if (text == "last") return AttitudeMode::last;
    if (text == "inc_change") return AttitudeMode::inc_change;
    if (text == "last_adjust") return AttitudeMode::last_adjust;
    throw std::invalid_argument("unknown attitude mode '" + text + "'");
}

ExploitTerm parse_exploit_term(const std::string& text) {
    if (text == "pi") return ExploitTerm::pi;
    if (text == "wei_term") return ExploitTerm::wei_term;
    throw std::invalid_argument("unknown exploit term '" + text + "'");
}

void ControllerConfig::validate() const {
    if (!(initial_alpha >= 0.0 && initial_alpha <= 1.0)) {
        throw std::invalid_argument("initial alpha must lie in [0, 1]");
    }
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
    if (!(delta_alpha > 0.0 && delta_alpha < 1.0)) {
        throw std::invalid_argument("delta_alpha must lie in (0, 1)");
    }
    if (horizon < 1 || window < 1) {
        throw std::invalid_argument("horizon and window must be positive");
    }
}

ControllerState ControllerState::initial(const ControllerConfig& config) {
    config.validate();
    ControllerState s;
    s.config = config;
    s.alpha = config.initial_alpha;
    return s;
}

double compute_ubr(const PosteriorModel& model, const Eigen::MatrixXd& history_points,
                   const SearchSpace& space, double coefficient, const SearchBudget& budget,
                   Rng& rng) {
    if (history_points.cols() == 0) {
        throw std::invalid_argument("compute_ubr needs a nonempty history");
    }
    Eigen::VectorXd mean, std;
    model.predict(history_points, mean, std);
    const double min_ucb = (mean.array() + coefficient * std.array()).minCoeff();
    const double min_lcb = minimize_lcb(model, space, coefficient, history_points, budget, rng);
    return min_ucb - min_lcb;
}

double smooth_iqm(std::span<const double> series, std::size_t window) {
    if (series.empty() || window == 0) {
        throw std::invalid_argument("smooth_iqm needs a nonempty series and window");
    }
    const std::size_t k = std::min(window, series.size());
    std::vector<double> values(series.end() - static_cast<std::ptrdiff_t>(k), series.end());
    std::sort(values.begin(), values.end());
    const std::size_t drop = k / 4;
    double sum = 0.0;
    for (std::size_t i = drop; i < k - drop; ++i) {
        sum += values[i];
    }
    return sum / static_cast<double>(k - 2 * drop);
}

void observe_ubr(ControllerState& state, double ubr) {
    state.ubr_raw.push_back(ubr);
    state.ubr_smoothed.push_back(smooth_iqm(state.ubr_raw, state.config.window));
}

bool gradient_converged(ControllerState& state) {
    const std::size_t n = state.config.horizon;
    const auto& r = state.ubr_smoothed;
    if (r.size() < n + 1) {
        return false;
    }
    const double g = r.back() - r[r.size() - 1 - n];
    state.last_gradient = g;
    state.max_abs_gradient = std::max(state.max_abs_gradient, std::abs(g));
    if (state.max_abs_gradient <= 0.0) {
        return false;
    }
    return std::abs(g) <= state.config.epsilon * state.max_abs_gradient;
}

void record_attitude(ControllerState& state, double a_explore, double a_exploit,
                     bool incumbent_changed) {
    switch (state.config.attitude_mode) {
        case AttitudeMode::last:
            state.explore_acc = a_explore;
            state.exploit_acc = a_exploit;
            break;
        case AttitudeMode::inc_change:
            if (incumbent_changed) {
                state.explore_acc = 0.0;
                state.exploit_acc = 0.0;
            }
            state.explore_acc += a_explore;
            state.exploit_acc += a_exploit;
            break;
        case AttitudeMode::last_adjust:
            state.explore_acc += a_explore;
            state.exploit_acc += a_exploit;
            break;
    }
}

double adjust_alpha(ControllerState& state) {
    const double delta = state.config.delta_alpha;
    if (state.explore_acc > state.exploit_acc) {
        state.alpha = std::min(1.0, state.alpha + delta);
    } else {
        state.alpha = std::max(0.0, state.alpha - delta);
    }
    if (state.config.attitude_mode == AttitudeMode::last_adjust) {
        state.explore_acc = 0.0;
        state.exploit_acc = 0.0;
    }
    return state.alpha;
}

AttitudeRecord attitude_terms(double mean, double std, double f_min, ExploitTerm term) {
    if (std < kSigmaFloor) {
        const double pi = mean <= f_min ? 1.0 : 0.0;
        return {0.0, term == ExploitTerm::pi ? pi : 0.0};
    }
    const double z = (f_min - mean) / std;
    const auto n = standard_normal(z);
    const double exploit = term == ExploitTerm::pi ? n.cdf : z * std * n.cdf;
    return {std * n.pdf, exploit};
}

void validate(const SchedulePolicy& policy) {
    std::visit(Overloaded{
                   [](const schedule::Static& s) {
                       if (!(s.alpha >= 0.0 && s.alpha <= 1.0)) {
                           throw std::invalid_argument("static alpha must lie in [0, 1]");
                       }
                   },
                   [](const schedule::Steps& s) {
                       if (s.n_steps < 1 || !(s.alpha_from >= 0.0 && s.alpha_from <= 1.0) ||
                           !(s.alpha_to >= 0.0 && s.alpha_to <= 1.0)) {
                           throw std::invalid_argument("invalid steps schedule");
                       }
                   },
                   [](const schedule::SwitchEiPi& s) {
                       if (!(s.fraction > 0.0 && s.fraction < 1.0)) {
                           throw std::invalid_argument("switch fraction must lie in (0, 1)");
                       }
                   },
                   [](const schedule::Pulse& p) {
                       if (p.cycle.empty()) {
                           throw std::invalid_argument("pulse cycle must be nonempty");
                       }
                   },
                   [](const schedule::Fixed& f) {
                       if (std::holds_alternative<Portfolio>(f.spec)) {
                           throw std::invalid_argument("use the portfolio schedule for GP-Hedge");
                       }
                   },
                   [](const auto&) {},
               },
               policy);
}

SchedulePolicy parse_schedule(const std::string& text) {
    const auto parts = split(text, ':');
    const std::string& head = parts.front();
    auto arg = [&](std::size_t i) { return parse_double(parts.at(i), text); };
    SchedulePolicy policy;
    if (head == "sawei" && parts.size() == 1) {
        policy = schedule::Sawei{};
    } else if ((head == "static" || head == "wei") && parts.size() == 2) {
        policy = schedule::Static{arg(1)};
    } else if (head == "steps" && (parts.size() == 3 || parts.size() == 4)) {
        schedule::Steps s{arg(1), arg(2), 5};
        if (parts.size() == 4) {
            s.n_steps = static_cast<int>(arg(3));
        }
        policy = s;
    } else if (head == "switch_ei_pi" && parts.size() == 2) {
        policy = schedule::SwitchEiPi{arg(1)};
    } else if (head == "pulse" && parts.size() == 1) {
        policy = schedule::Pulse{};
    } else if (head == "portfolio" && parts.size() == 1) {
        policy = schedule::Portfolio{};
    } else if (head == "ei" && parts.size() == 1) {
        policy = schedule::Fixed{Ei{}};
    } else if (head == "pi" && parts.size() == 1) {
        policy = schedule::Fixed{Pi{}};
    } else if (head == "lcb" && parts.size() == 1) {
        policy = schedule::Fixed{Lcb{}};
    } else {
        throw std::invalid_argument("unknown schedule '" + text + "'");
    }
    validate(policy);
    return policy;
}

std::string schedule_name(const SchedulePolicy& policy) {
    return std::visit(
        Overloaded{
            [](const schedule::Sawei&) { return std::string("sawei"); },
            [](const schedule::Static& s) { return "wei:" + num(s.alpha); },
            [](const schedule::Steps& s) {
                std::string name = "steps:" + num(s.alpha_from) + ":" + num(s.alpha_to);
                return s.n_steps == 5 ? name : name + ":" + std::to_string(s.n_steps);
            },
            [](const schedule::SwitchEiPi& s) { return "switch_ei_pi:" + num(s.fraction); },
            [](const schedule::Pulse&) { return std::string("pulse"); },
            [](const schedule::Portfolio&) { return std::string("portfolio"); },
            [](const schedule::Fixed& f) {
                if (std::holds_alternative<Ei>(f.spec)) return std::string("ei");
                if (std::holds_alternative<Pi>(f.spec)) return std::string("pi");
                return std::string("lcb");
            },
        },
        policy);
}

AcquisitionSpec schedule_alpha(const SchedulePolicy& policy, std::size_t t, std::size_t total,
                               double controller_alpha) {
    if (total == 0 || t >= total) {
        throw std::out_of_range("schedule_alpha requires 0 <= t < T");
    }
    return std::visit(
        Overloaded{
            [&](const schedule::Sawei&) -> AcquisitionSpec { return Wei{controller_alpha}; },
            [](const schedule::Static& s) -> AcquisitionSpec { return Wei{s.alpha}; },
            [&](const schedule::Steps& s) -> AcquisitionSpec {
                if (s.n_steps == 1) {
                    return Wei{s.alpha_from};
                }
                const auto n = static_cast<std::size_t>(s.n_steps);
                const std::size_t segment = std::min(n - 1, t * n / total);
                const double frac = static_cast<double>(segment) / static_cast<double>(n - 1);
                return Wei{s.alpha_from + (s.alpha_to - s.alpha_from) * frac};
            },
            [&](const schedule::SwitchEiPi& s) -> AcquisitionSpec {
                const auto switch_at =
                    static_cast<std::size_t>(std::floor(s.fraction * static_cast<double>(total)));
                if (t < switch_at) {
                    return Ei{};
                }
                return Pi{};
            },
            [&](const schedule::Pulse& p) -> AcquisitionSpec {
                return Wei{p.cycle[t % p.cycle.size()]};
            },
            [](const schedule::Portfolio&) -> AcquisitionSpec { return Portfolio{}; },
            [](const schedule::Fixed& f) -> AcquisitionSpec { return f.spec; },
        },
        policy);
}

}  // namespace sawei
