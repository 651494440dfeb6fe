#include "sawei/bo_loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sawei/acquisition.hpp"
#include "sawei/errors.hpp"
#include "sawei/rng.hpp"

namespace sawei {

namespace {

enum Stream : std::uint64_t { kDesign = 1, kFit = 2, kPropose = 3, kUbr = 4, kHedge = 5 };

std::optional<double> wei_alpha(const AcquisitionSpec& spec) {
    if (const auto* w = std::get_if<Wei>(&spec)) {
        return w->alpha;
    }
    if (const auto* e = std::get_if<Ei>(&spec); e && e->xi == 0.0) {
        return 0.5;
    }
    return std::nullopt;
}

BatchUtility make_utility(const PosteriorModel& model, const AcquisitionSpec& spec, double f_min,
                          double coefficient) {
    return [&model, spec, f_min, coefficient](const Eigen::MatrixXd& points) {
        Eigen::VectorXd mean, std;
        model.predict(points, mean, std);
        Eigen::VectorXd out(points.cols());
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            out(i) = utility(spec, mean(i), std(i), f_min, coefficient);
        }
        return out;
    };
}

Eigen::Index find_row(const SearchSpace& space, const Eigen::VectorXd& point) {
    for (Eigen::Index j = 0; j < space.table_size(); ++j) {
        if (space.table().col(j) == point) {
            return j;
        }
    }
    return -1;
}

}  // namespace

ObservationHistory::ObservationHistory(Eigen::Index dimension) : dimension_(dimension) {}

bool ObservationHistory::add(const Eigen::VectorXd& point, double value) {
    if (point.size() != dimension_) {
        throw std::invalid_argument("point dimension does not match the history");
    }
    points_.push_back(point);
    values_.push_back(value);
    if (values_.size() == 1 || value < f_min_) {
        incumbent_ = values_.size() - 1;
        f_min_ = value;
        return true;
    }
    return false;
}

Eigen::MatrixXd ObservationHistory::points() const {
    Eigen::MatrixXd m(dimension_, static_cast<Eigen::Index>(points_.size()));
    for (std::size_t i = 0; i < points_.size(); ++i) {
        m.col(static_cast<Eigen::Index>(i)) = points_[i];
    }
    return m;
}

Eigen::VectorXd ObservationHistory::incumbent() const {
    if (points_.empty()) {
        throw std::logic_error("empty history has no incumbent");
    }
    return points_[incumbent_];
}

Dataset ObservationHistory::dataset() const {
    return {points(), Eigen::Map<const Eigen::VectorXd>(values_.data(),
                                                        static_cast<Eigen::Index>(values_.size()))};
}

IncumbentInfo update_incumbent(const ObservationHistory& history) {
    if (history.empty()) {
        throw std::invalid_argument("update_incumbent needs a nonempty history");
    }
    const auto& v = history.values();
    const auto it = std::min_element(v.begin(), v.end());
    return {static_cast<std::size_t>(it - v.begin()), *it};
}

void RunConfig::validate() const {
    if (init_design.size < 2) {
        throw std::invalid_argument("initial design needs at least two points");
    }
    if (bo_budget < 1) {
        throw std::invalid_argument("bo_budget must be positive");
    }
    sawei::validate(schedule);
    controller.validate();
    gp.validate();
    search.validate();
    if (!(ucb_beta > 0.0) || !(hedge_eta > 0.0)) {
        throw std::invalid_argument("ucb_beta and hedge_eta must be positive");
    }
}

std::size_t RunTrace::adjust_events() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return r.adjusted; }));
}

double RunTrace::final_regret() const {
    return rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().regret;
}

double log10_regret(double regret, bool tabular) {
    if (tabular && regret == 0.0) {
        return -10000.0;
    }
    return std::log10(std::max(regret, 1e-12));
}

RunTrace run_bo(const Objective& objective, const RunConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const SearchSpace& space = objective.space();
    const Eigen::Index d = space.dimension();
    const bool tabular = objective.is_tabular();
    const bool is_sawei = std::holds_alternative<schedule::Sawei>(config.schedule);
    const bool is_portfolio = std::holds_alternative<schedule::Portfolio>(config.schedule);
    const std::uint64_t seed = config.seed;

    RunTrace trace;
    trace.objective = objective.name();
    trace.schedule = schedule_name(config.schedule);
    trace.seed = seed;
    trace.init_size = config.init_design.size;
    trace.bo_budget = config.bo_budget;

    ObservationHistory history(d);
    std::vector<bool> evaluated_rows(space.is_discrete() ? space.table_size() : 0, false);

    auto record = [&](Phase phase, const Eigen::VectorXd& x, double y) {
        const bool improved = history.add(x, y);
        if (space.is_discrete()) {
            if (const auto row = find_row(space, x); row >= 0) {
                evaluated_rows[static_cast<std::size_t>(row)] = true;
            }
        }
        TraceRow r;
        r.iteration = trace.rows.size();
        r.phase = phase;
        r.point = x;
        r.y = y;
        r.incumbent = history.f_min();
        r.regret = history.f_min() - objective.optimum();
        r.log10_regret = log10_regret(r.regret, tabular);
        trace.rows.push_back(std::move(r));
        return improved;
    };

    try {
        const Eigen::MatrixXd design =
            initial_design(space, config.init_design.kind, config.init_design.size,
                           derive_seed({seed, kDesign}));
        for (Eigen::Index j = 0; j < design.cols(); ++j) {
            const Eigen::VectorXd x = design.col(j);
            record(Phase::init, x, objective.evaluate(x));
            trace.rows.back().wall_seconds = elapsed();
        }

        ControllerState state = ControllerState::initial(config.controller);
        HedgeState hedge = default_portfolio(config.hedge_eta);
        PosteriorModel model = fit(history.dataset(), config.gp, derive_seed({seed, kFit, history.size()}));

        for (std::size_t t = 1; t <= config.bo_budget; ++t) {
            const AcquisitionSpec spec =
                schedule_alpha(config.schedule, t - 1, config.bo_budget, state.alpha);
            const double coefficient =
                beta_t({static_cast<std::size_t>(d), t, config.ucb_beta});
            const double f_min = history.f_min();
            const Eigen::MatrixXd seeds = history.points();

            SearchSpace proposal_space = space;
            if (space.is_discrete()) {
                std::vector<Eigen::Index> open;
                for (std::size_t i = 0; i < evaluated_rows.size(); ++i) {
                    if (!evaluated_rows[i]) {
                        open.push_back(static_cast<Eigen::Index>(i));
                    }
                }
                if (!open.empty()) {
                    proposal_space = space.subset(open);
                }
            }

            Eigen::VectorXd x_next;
            std::string acquisition;
            std::vector<Eigen::VectorXd> nominees;
            if (is_portfolio) {
                for (std::size_t arm = 0; arm < hedge.arms.size(); ++arm) {
                    Rng rng(derive_seed({seed, kPropose, t, arm}));
                    nominees.push_back(maximize(make_utility(model, hedge.arms[arm], f_min, coefficient),
                                                proposal_space, config.search, seeds, rng)
                                           .point);
                }
                Rng rng(derive_seed({seed, kHedge, t}));
                const std::size_t chosen = hedge_select(hedge, rng);
                x_next = nominees[chosen];
                acquisition = describe(hedge.arms[chosen]);
            } else {
                Rng rng(derive_seed({seed, kPropose, t}));
                x_next = maximize(make_utility(model, spec, f_min, coefficient), proposal_space,
                                  config.search, seeds, rng)
                             .point;
                acquisition = describe(spec);
            }

            // Attitude comes from the posterior that proposed x_next.
            const Prediction pred = model.predict(x_next);
            const AttitudeRecord attitude =
                attitude_terms(pred.mean, pred.std, f_min, config.controller.exploit_term);
            const double alpha_used = is_portfolio ? std::numeric_limits<double>::quiet_NaN()
                                                   : wei_alpha(spec).value_or(
                                                         std::numeric_limits<double>::quiet_NaN());

            const bool improved = record(Phase::bo, x_next, objective.evaluate(x_next));
            record_attitude(state, attitude.a_explore, attitude.a_exploit, improved);

            model = fit(history.dataset(), config.gp, derive_seed({seed, kFit, history.size()}),
                        config.warm_start_gp ? std::optional(model.hyperparameters())
                                             : std::nullopt);

            if (is_portfolio) {
                std::vector<double> rewards;
                rewards.reserve(nominees.size());
                for (const auto& x : nominees) {
                    rewards.push_back(-model.standardized_mean(x));
                }
                hedge = hedge_update(std::move(hedge), rewards);
            }

            Rng ubr_rng(derive_seed({seed, kUbr, t}));
            const double ubr =
                compute_ubr(model, history.points(), space, coefficient, config.search, ubr_rng);
            observe_ubr(state, ubr);
            const bool converged = gradient_converged(state);
            bool adjusted = false;
            if (converged && is_sawei && config.controller.adjust_enabled) {
                adjust_alpha(state);
                adjusted = true;
            }

            TraceRow& row = trace.rows.back();
            row.ubr_raw = ubr;
            row.ubr_smoothed = state.ubr_smoothed.back();
            row.alpha = alpha_used;
            row.alpha_next = is_sawei ? state.alpha : alpha_used;
            row.a_explore = attitude.a_explore;
            row.a_exploit = attitude.a_exploit;
            row.adjusted = adjusted;
            row.gradient = state.ubr_smoothed.size() > config.controller.horizon
                               ? state.last_gradient
                               : std::numeric_limits<double>::quiet_NaN();
            row.max_abs_gradient = state.max_abs_gradient;
            row.explore_acc = state.explore_acc;
            row.exploit_acc = state.exploit_acc;
            row.acquisition = std::move(acquisition);
            row.wall_seconds = elapsed();
        }
    } catch (const FitError& e) {
        trace.failure = std::string("FitError: ") + e.what();
    }
    return trace;
}

}  // namespace sawei
