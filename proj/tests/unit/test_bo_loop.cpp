#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sawei/bo_loop.hpp"
#include "sawei/objectives.hpp"
#include "sawei/trace_io.hpp"

using namespace sawei;

namespace {

RunConfig small_config(SchedulePolicy policy, std::uint64_t seed = 0) {
    RunConfig rc;
    rc.init_design.size = 5;
    rc.bo_budget = 10;
    rc.schedule = std::move(policy);
    rc.search.n_random = 300;
    rc.seed = seed;
    return rc;
}

std::string csv_of(const RunTrace& trace) {
    std::ostringstream o;
    write_trace_csv(trace, o);
    return o.str();
}

}  // namespace

TEST(History, IncumbentIsFirstOccurrenceArgmin) {
    ObservationHistory h(1);
    EXPECT_TRUE(h.add(Eigen::VectorXd::Constant(1, 0.1), 3.0));
    EXPECT_TRUE(h.add(Eigen::VectorXd::Constant(1, 0.2), 1.0));
    EXPECT_FALSE(h.add(Eigen::VectorXd::Constant(1, 0.3), 2.0));
    EXPECT_EQ(update_incumbent(h).index, 1u);
    EXPECT_EQ(update_incumbent(h).f_min, 1.0);

    ObservationHistory tie(1);
    tie.add(Eigen::VectorXd::Constant(1, 0.1), 2.0);
    tie.add(Eigen::VectorXd::Constant(1, 0.2), 1.0);
    EXPECT_FALSE(tie.add(Eigen::VectorXd::Constant(1, 0.3), 1.0));
    EXPECT_EQ(update_incumbent(tie).index, 1u);
    EXPECT_EQ(tie.incumbent_index(), 1u);
    EXPECT_EQ(tie.incumbent()(0), 0.2);
}

TEST(LogRegret, SentinelOnlyForExactTabularHits) {
    EXPECT_EQ(log10_regret(0.0, true), -10000.0);
    EXPECT_EQ(log10_regret(0.0, false), -12.0);
    EXPECT_EQ(log10_regret(1e-20, true), -12.0);
    EXPECT_NEAR(log10_regret(0.01, false), -2.0, 1e-15);
}

TEST(RunBo, TraceShapeAndInvariants) {
    const auto f = make_synthetic("rastrigin", 2, 1);
    const auto trace = run_bo(f, small_config(schedule::Sawei{}));
    ASSERT_TRUE(trace.complete()) << trace.failure.value_or("");
    ASSERT_EQ(trace.rows.size(), 15u);
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const auto& r = trace.rows[i];
        EXPECT_EQ(r.iteration, i);
        EXPECT_EQ(r.phase, i < 5 ? Phase::init : Phase::bo);
        EXPECT_TRUE(f.space().contains(r.point));
        EXPECT_GE(r.regret, 0.0);
        if (i > 0) {
            EXPECT_LE(r.incumbent, trace.rows[i - 1].incumbent);
        }
        if (r.phase == Phase::bo) {
            EXPECT_GE(r.ubr_raw, -1e-9);
            EXPECT_TRUE(std::isfinite(r.ubr_smoothed));
            EXPECT_GE(r.alpha, 0.0);
            EXPECT_LE(r.alpha, 1.0);
            EXPECT_GE(r.a_explore, 0.0);
        } else {
            EXPECT_TRUE(std::isnan(r.ubr_raw));
            EXPECT_FALSE(r.adjusted);
        }
    }
}

TEST(RunBo, DeterministicForSeed) {
    const auto f = make_synthetic("sphere", 2, 1);
    const auto a = run_bo(f, small_config(schedule::Sawei{}, 4));
    const auto b = run_bo(f, small_config(schedule::Sawei{}, 4));
    EXPECT_EQ(csv_of(a), csv_of(b));
    const auto c = run_bo(f, small_config(schedule::Sawei{}, 5));
    EXPECT_NE(csv_of(a), csv_of(c));
}

TEST(RunBo, StaticHalfEqualsSaweiWithoutAdjustment) {
    const auto f = make_synthetic("rosenbrock", 2, 1);
    auto sawei = small_config(schedule::Sawei{}, 2);
    sawei.controller.adjust_enabled = false;
    const auto a = run_bo(f, sawei);
    const auto b = run_bo(f, small_config(schedule::Static{0.5}, 2));
    EXPECT_EQ(csv_of(a), csv_of(b));
    EXPECT_EQ(a.adjust_events(), 0u);
}

TEST(RunBo, EveryScheduleCompletes) {
    const auto f = make_synthetic("katsuura", 2, 1);
    for (const char* text :
         {"sawei", "wei:0", "wei:1", "steps:0.5:1", "switch_ei_pi:0.5", "pulse", "portfolio", "ei",
          "pi", "lcb"}) {
        const auto trace = run_bo(f, small_config(parse_schedule(text), 1));
        EXPECT_TRUE(trace.complete()) << text;
        for (std::size_t i = 5; i < trace.rows.size(); ++i) {
            EXPECT_FALSE(trace.rows[i].acquisition.empty()) << text;
        }
    }
}

TEST(RunBo, SwitchScheduleChangesAcquisitionAtBoundary) {
    const auto f = make_synthetic("sphere", 2, 1);
    const auto trace = run_bo(f, small_config(parse_schedule("switch_ei_pi:0.5"), 0));
    ASSERT_TRUE(trace.complete());
    // floor(0.5 * 10) = 5 EI steps, then PI.
    for (std::size_t t = 0; t < 10; ++t) {
        EXPECT_EQ(trace.rows[5 + t].acquisition.rfind(t < 5 ? "EI" : "PI", 0), 0u) << t;
    }
}

TEST(RunBo, AdjustedRowsMoveAlphaByDelta) {
    const auto f = make_synthetic("sphere", 2, 1);
    auto rc = small_config(schedule::Sawei{}, 0);
    rc.bo_budget = 25;
    const auto trace = run_bo(f, rc);
    ASSERT_TRUE(trace.complete());
    for (const auto& r : trace.rows) {
        if (r.adjusted) {
            EXPECT_LE(std::abs(r.gradient), rc.controller.epsilon * r.max_abs_gradient + 1e-15);
            const double expected = std::clamp(
                r.alpha + (r.explore_acc > r.exploit_acc ? 1.0 : -1.0) * rc.controller.delta_alpha, 0.0,
                1.0);
            EXPECT_NEAR(r.alpha_next, expected, 1e-12);
        } else if (r.phase == Phase::bo) {
            EXPECT_EQ(r.alpha_next, r.alpha);
        }
    }
}

TEST(RunConfig, ValidationRejectsBadSettings) {
    RunConfig rc;
    rc.bo_budget = 0;
    EXPECT_THROW(rc.validate(), std::invalid_argument);
    rc = {};
    rc.ucb_beta = 0.0;
    EXPECT_THROW(rc.validate(), std::invalid_argument);
    rc = {};
    rc.init_design.size = 0;
    EXPECT_THROW(rc.validate(), std::invalid_argument);
}
