#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sawei/controller.hpp"

using namespace sawei;

namespace {

// Independent sort-trim-mean on the trailing window.
double brute_iqm(const std::vector<double>& series, std::size_t window) {
    const std::size_t k = std::min(window, series.size());
    std::vector<double> tail(series.end() - static_cast<long>(k), series.end());
    std::sort(tail.begin(), tail.end());
    const std::size_t cut = static_cast<std::size_t>(std::floor(0.25 * static_cast<double>(k)));
    long double sum = 0;
    for (std::size_t i = cut; i + cut < k; ++i) {
        sum += tail[i];
    }
    return static_cast<double>(sum / static_cast<long double>(k - 2 * cut));
}

ControllerState state_with(AttitudeMode mode) {
    ControllerConfig c;
    c.attitude_mode = mode;
    return ControllerState::initial(c);
}

PosteriorModel bumpy_posterior() {
    Dataset data{Eigen::MatrixXd(1, 4), Eigen::VectorXd(4)};
    data.points << 0.1, 0.35, 0.6, 0.9;
    data.values << 2.0, 2.6, 2.2, 3.0;
    Hyperparameters hp;
    hp.log_lengthscales = Eigen::VectorXd::Constant(1, std::log(0.12));
    hp.log_signal_variance = 0.0;
    return condition(data, hp);
}

}  // namespace

TEST(SmoothIqm, HandExamples) {
    EXPECT_DOUBLE_EQ(smooth_iqm(std::vector<double>{7, 1, 3, 5, 9, 2, 6}), 4.6);
    EXPECT_DOUBLE_EQ(smooth_iqm(std::vector<double>{1, 2, 9}), 4.0);
    EXPECT_EQ(smooth_iqm(std::vector<double>(12, 3.25)), 3.25);
    // Only the trailing window counts.
    EXPECT_DOUBLE_EQ(smooth_iqm(std::vector<double>{100, 100, 7, 1, 3, 5, 9, 2, 6}), 4.6);
}

TEST(SmoothIqm, MatchesBruteForceOnRandomSeries) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n01;
    std::uniform_int_distribution<int> len(1, 40);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> s(static_cast<std::size_t>(len(rng)));
        for (auto& v : s) {
            v = std::exp(n01(rng));
        }
        for (std::size_t w : {std::size_t{1}, std::size_t{4}, std::size_t{7}, std::size_t{13}}) {
            EXPECT_NEAR(smooth_iqm(s, w), brute_iqm(s, w), 1e-12);
        }
    }
}

TEST(SmoothIqm, PermutationInvariantWithinWindow) {
    std::vector<double> a{4, 8, 1, 6, 2, 9, 3};
    const double ref = smooth_iqm(a);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(a.begin(), a.end(), rng);
        EXPECT_EQ(smooth_iqm(a), ref);
    }
}

TEST(GradientConverged, ThresholdAgainstMaximum) {
    auto s = ControllerState::initial({});
    s.ubr_smoothed = {1.0, 1.05};
    s.max_abs_gradient = 0.8;
    EXPECT_TRUE(gradient_converged(s));  // 0.05 <= 0.08
    s.ubr_smoothed = {1.0, 1.09};
    EXPECT_FALSE(gradient_converged(s));  // 0.09 > 0.08
    EXPECT_NEAR(s.last_gradient, 0.09, 1e-12);
}

TEST(GradientConverged, FirstGradientNeverTriggers) {
    auto s = ControllerState::initial({});
    observe_ubr(s, 2.0);
    EXPECT_FALSE(gradient_converged(s));
    observe_ubr(s, 1.0);
    EXPECT_FALSE(gradient_converged(s));
    EXPECT_GT(s.max_abs_gradient, 0.0);
}

TEST(GradientConverged, FlatStartDoesNotTrigger) {
    auto s = ControllerState::initial({});
    for (int i = 0; i < 5; ++i) {
        observe_ubr(s, 1.0);
        EXPECT_FALSE(gradient_converged(s));
    }
}

TEST(GradientConverged, MaximumIsMonotone) {
    auto s = ControllerState::initial({});
    std::mt19937_64 rng(2);
    std::exponential_distribution<double> e;
    double prev = 0.0;
    for (int i = 0; i < 50; ++i) {
        observe_ubr(s, e(rng));
        (void)gradient_converged(s);
        EXPECT_GE(s.max_abs_gradient, prev);
        prev = s.max_abs_gradient;
        EXPECT_EQ(s.ubr_raw.size(), s.ubr_smoothed.size());
    }
}

TEST(GradientConverged, UsesHorizonDifference) {
    ControllerConfig c;
    c.horizon = 3;
    auto s = ControllerState::initial(c);
    s.ubr_smoothed = {5.0, 9.0, 9.0, 4.0};
    EXPECT_FALSE(gradient_converged(s));
    EXPECT_EQ(s.last_gradient, -1.0);
}

TEST(RecordAttitude, TrackingModes) {
    auto last = state_with(AttitudeMode::last);
    record_attitude(last, 0.1, 0.2, false);
    record_attitude(last, 0.3, 0.1, false);
    EXPECT_EQ(last.explore_acc, 0.3);
    EXPECT_EQ(last.exploit_acc, 0.1);

    auto adjust = state_with(AttitudeMode::last_adjust);
    record_attitude(adjust, 0.1, 0.2, false);
    record_attitude(adjust, 0.3, 0.1, false);
    EXPECT_NEAR(adjust.explore_acc, 0.4, 1e-15);
    EXPECT_NEAR(adjust.exploit_acc, 0.3, 1e-15);
    (void)adjust_alpha(adjust);
    EXPECT_EQ(adjust.explore_acc, 0.0);
    EXPECT_EQ(adjust.exploit_acc, 0.0);

    auto inc = state_with(AttitudeMode::inc_change);
    record_attitude(inc, 0.1, 0.2, false);
    record_attitude(inc, 0.3, 0.1, true);
    EXPECT_EQ(inc.explore_acc, 0.3);
    EXPECT_EQ(inc.exploit_acc, 0.1);
    record_attitude(inc, 0.2, 0.2, false);
    EXPECT_NEAR(inc.explore_acc, 0.5, 1e-15);
}

TEST(AdjustAlpha, DirectionAndClamping) {
    auto s = ControllerState::initial({});
    s.explore_acc = 0.3;
    s.exploit_acc = 0.2;
    EXPECT_DOUBLE_EQ(adjust_alpha(s), 0.6);

    s.alpha = 0.05;
    s.explore_acc = 0.1;
    s.exploit_acc = 0.9;
    EXPECT_EQ(adjust_alpha(s), 0.0);

    s.alpha = 1.0;
    s.explore_acc = 0.9;
    s.exploit_acc = 0.1;
    EXPECT_EQ(adjust_alpha(s), 1.0);

    s.alpha = 0.5;
    s.explore_acc = 0.4;
    s.exploit_acc = 0.4;
    EXPECT_DOUBLE_EQ(adjust_alpha(s), 0.4);
}

TEST(AdjustAlpha, DirectionInvariantUnderCommonScaling) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        auto a = ControllerState::initial({});
        a.explore_acc = u(rng);
        a.exploit_acc = u(rng);
        auto b = a;
        const double c = std::exp(8.0 * (u(rng) - 0.5));
        b.explore_acc *= c;
        b.exploit_acc *= c;
        EXPECT_EQ(adjust_alpha(a), adjust_alpha(b));
    }
}

TEST(AttitudeTerms, ReferenceValues) {
    const auto pi = attitude_terms(1.0, 1.0, 1.0, ExploitTerm::pi);
    EXPECT_NEAR(pi.a_explore, 0.398942280401432678, 1e-15);
    EXPECT_EQ(pi.a_exploit, 0.5);
    EXPECT_GT(pi.a_exploit, pi.a_explore);

    const auto wt = attitude_terms(1.0, 1.0, 1.0, ExploitTerm::wei_term);
    EXPECT_EQ(wt.a_exploit, 0.0);
    EXPECT_GT(wt.a_explore, wt.a_exploit);

    // z = 3
    const auto z3 = attitude_terms(0.0, 1.0, 3.0, ExploitTerm::pi);
    EXPECT_NEAR(z3.a_exploit, 0.998650101968369905, 1e-15);
    EXPECT_NEAR(z3.a_explore, 0.00443184841193800718, 1e-16);
}

TEST(ComputeUbr, GridOracleForBothTerms) {
    const auto model = bumpy_posterior();
    const double coefficient = 1.5;
    Eigen::MatrixXd history(1, 4);
    history << 0.1, 0.35, 0.6, 0.9;
    double ucb_hist = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < history.cols(); ++j) {
        const auto p = model.predict(Eigen::VectorXd(history.col(j)));
        ucb_hist = std::min(ucb_hist, p.mean + coefficient * p.std);
    }
    double lcb_grid = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 10000; ++i) {
        const auto p = model.predict(Eigen::VectorXd::Constant(1, i / 10000.0));
        lcb_grid = std::min(lcb_grid, p.mean - coefficient * p.std);
    }
    Rng rng(4);
    const double ubr = compute_ubr(model, history, SearchSpace::unit_cube(1), coefficient, {}, rng);
    EXPECT_NEAR(ubr, ucb_hist - lcb_grid, 1e-2);
    EXPECT_GT(ubr, 0.0);
}

TEST(ComputeUbr, CollapsedBoundsGiveZero) {
    // With a zero coefficient UCB = LCB = mean; the space is the history itself,
    // so it contains the minimizer of the mean.
    const auto model = bumpy_posterior();
    Eigen::MatrixXd history(1, 4);
    history << 0.1, 0.35, 0.6, 0.9;
    Rng rng(0);
    const double ubr = compute_ubr(model, history, SearchSpace::discrete(history), 0.0, {}, rng);
    EXPECT_EQ(ubr, 0.0);
}

TEST(ComputeUbr, NonNegativeWithTinyBudget) {
    const auto model = bumpy_posterior();
    Eigen::MatrixXd history(1, 4);
    history << 0.1, 0.35, 0.6, 0.9;
    SearchBudget tiny;
    tiny.n_random = 1;
    tiny.local_steps = 1;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        EXPECT_GE(compute_ubr(model, history, SearchSpace::unit_cube(1), 3.0, tiny, rng), -1e-9);
    }
}

TEST(Schedules, SwitchEiPiBoundary) {
    const SchedulePolicy p = schedule::SwitchEiPi{0.25};
    EXPECT_TRUE(std::holds_alternative<Ei>(schedule_alpha(p, 63, 256)));
    EXPECT_TRUE(std::holds_alternative<Pi>(schedule_alpha(p, 64, 256)));
    EXPECT_TRUE(std::holds_alternative<Ei>(schedule_alpha(p, 0, 256)));
    EXPECT_TRUE(std::holds_alternative<Pi>(schedule_alpha(p, 255, 256)));
}

TEST(Schedules, StepsSegments) {
    const SchedulePolicy p = schedule::Steps{0.5, 1.0, 5};
    EXPECT_EQ(std::get<Wei>(schedule_alpha(p, 45, 100)).alpha, 0.75);
    const std::vector<double> expected{0.5, 0.625, 0.75, 0.875, 1.0};
    for (std::size_t t = 0; t < 100; ++t) {
        EXPECT_EQ(std::get<Wei>(schedule_alpha(p, t, 100)).alpha, expected[t / 20]) << t;
    }
}

TEST(Schedules, PulseCycle) {
    const SchedulePolicy p = schedule::Pulse{};
    EXPECT_EQ(std::get<Wei>(schedule_alpha(p, 7, 20)).alpha, 0.5);
    const std::vector<double> cycle{0.1, 0.3, 0.5, 0.7, 0.9};
    for (std::size_t t = 0; t < 20; ++t) {
        EXPECT_EQ(std::get<Wei>(schedule_alpha(p, t, 20)).alpha, cycle[t % 5]);
    }
}

TEST(Schedules, SaweiAndStaticYieldWei) {
    EXPECT_EQ(std::get<Wei>(schedule_alpha(schedule::Sawei{}, 3, 10, 0.7)).alpha, 0.7);
    EXPECT_EQ(std::get<Wei>(schedule_alpha(schedule::Static{0.2}, 3, 10, 0.7)).alpha, 0.2);
    EXPECT_TRUE(std::holds_alternative<Portfolio>(schedule_alpha(schedule::Portfolio{}, 0, 10)));
    EXPECT_THROW((void)schedule_alpha(schedule::Sawei{}, 10, 10), std::out_of_range);
}

TEST(Schedules, ParseAndName) {
    for (const std::string text :
         {"sawei", "wei:0.5", "wei:0", "steps:0.5:1", "switch_ei_pi:0.5", "pulse", "portfolio", "ei",
          "pi", "lcb"}) {
        EXPECT_EQ(schedule_name(parse_schedule(text)), text);
    }
    EXPECT_EQ(schedule_name(parse_schedule("static:1")), "wei:1");
    EXPECT_EQ(schedule_name(parse_schedule("steps:0:1:3")), "steps:0:1:3");
    EXPECT_THROW((void)parse_schedule("wei:1.5"), std::invalid_argument);
    EXPECT_THROW((void)parse_schedule("switch_ei_pi:x"), std::invalid_argument);
    EXPECT_THROW((void)parse_schedule("annealing"), std::invalid_argument);
}

TEST(ControllerConfig, Validation) {
    ControllerConfig c;
    c.epsilon = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.delta_alpha = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.window = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_EQ(parse_attitude_mode("inc_change"), AttitudeMode::inc_change);
    EXPECT_THROW((void)parse_exploit_term("ucb"), std::invalid_argument);
}
