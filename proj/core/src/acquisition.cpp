#include "sawei/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "sawei/detail/overloaded.hpp"
#include "sawei/errors.hpp"

namespace sawei {

namespace {

using detail::Overloaded;

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double incumbent_target(double f_min, double xi) { return f_min - xi * std::abs(f_min); }

}  // namespace

NormalDensity standard_normal(double z) noexcept {
    return {kInvSqrt2Pi * std::exp(-0.5 * z * z), 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0)};
}

double eval_wei(double mean, double std, double f_min, double alpha) noexcept {
    if (std < kSigmaFloor) {
        return 0.0;
    }
    const double z = (f_min - mean) / std;
    const auto n = standard_normal(z);
    return alpha * z * std * n.cdf + (1.0 - alpha) * std * n.pdf;
}

double eval_ei(double mean, double std, double f_min, double xi) noexcept {
    // Same expression as WEI(0.5) scaled by two, so the two agree exactly.
    return 2.0 * eval_wei(mean, std, incumbent_target(f_min, xi), 0.5);
}

double eval_pi(double mean, double std, double f_min, double xi) noexcept {
    const double target = incumbent_target(f_min, xi);
    if (std < kSigmaFloor) {
        return mean <= target ? 1.0 : 0.0;
    }
    return standard_normal((target - mean) / std).cdf;
}

double beta_t(const ConfidenceCoefficient& c) {
    const double t = static_cast<double>(c.iteration);
    const double arg = static_cast<double>(c.dimension) * t * t / c.beta;
    if (!(c.beta > 0.0) || !(arg >= 1.0)) {
        throw DomainError("beta_t requires d * t^2 / beta >= 1");
    }
    return 2.0 * std::log(arg);
}

ConfidenceBounds eval_bounds(double mean, double std, double coefficient) noexcept {
    return {mean + coefficient * std, mean - coefficient * std};
}

double utility(const AcquisitionSpec& spec, double mean, double std, double f_min,
               double lcb_coefficient) {
    return std::visit(
        Overloaded{
            [&](const Wei& w) { return eval_wei(mean, std, f_min, w.alpha); },
            [&](const Ei& e) { return eval_ei(mean, std, f_min, e.xi); },
            [&](const Pi& p) { return eval_pi(mean, std, f_min, p.xi); },
            [&](const Lcb& l) {
                return -eval_bounds(mean, std, l.coefficient.value_or(lcb_coefficient)).lcb;
            },
            [](const Portfolio&) -> double {
                throw std::logic_error("portfolio has no closed-form utility");
            },
        },
        spec);
}

std::string describe(const AcquisitionSpec& spec) {
    return std::visit(
        Overloaded{
            [](const Wei& w) { return "WEI(" + format_number(w.alpha) + ")"; },
            [](const Ei& e) {
                return e.xi == 0.0 ? std::string("EI") : "EI(xi=" + format_number(e.xi) + ")";
            },
            [](const Pi& p) {
                return p.xi == 0.0 ? std::string("PI") : "PI(xi=" + format_number(p.xi) + ")";
            },
            [](const Lcb& l) {
                return l.coefficient ? "LCB(" + format_number(*l.coefficient) + ")"
                                     : std::string("LCB(beta_t)");
            },
            [](const Portfolio&) { return std::string("Portfolio"); },
        },
        spec);
}

void HedgeState::validate() const {
    if (arms.size() < 2 || gains.size() != arms.size()) {
        throw std::invalid_argument("hedge portfolio needs >= 2 arms with one gain each");
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("hedge eta must be positive");
    }
    if (!std::all_of(gains.begin(), gains.end(), [](double g) { return std::isfinite(g); })) {
        throw std::invalid_argument("hedge gains must be finite");
    }
}

std::vector<double> HedgeState::probabilities() const {
    std::vector<double> p(gains.size());
    const double top = *std::max_element(gains.begin(), gains.end());
    double total = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        p[i] = std::exp(eta * (gains[i] - top));
        total += p[i];
    }
    for (auto& v : p) {
        v /= total;
    }
    return p;
}

HedgeState default_portfolio(double eta) {
    HedgeState state;
    for (double xi : {0.0, 0.01, 0.1}) {
        state.arms.emplace_back(Ei{xi});
    }
    for (double xi : {0.0, 0.01, 0.1}) {
        state.arms.emplace_back(Pi{xi});
    }
    for (double k : {0.1, 1.0, 2.0}) {
        state.arms.emplace_back(Lcb{k});
    }
    state.gains.assign(state.arms.size(), 0.0);
    state.eta = eta;
    return state;
}

std::size_t hedge_select(const HedgeState& state, Rng& rng) {
    const auto p = state.probabilities();
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cumulative += p[i];
        if (u < cumulative) {
            return i;
        }
    }
    return p.size() - 1;
}

HedgeState hedge_update(HedgeState state, const std::vector<double>& rewards) {
    if (rewards.size() != state.gains.size()) {
        throw std::invalid_argument("hedge_update needs one reward per arm");
    }
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        if (!std::isfinite(rewards[i])) {
            throw std::invalid_argument("hedge rewards must be finite");
        }
        state.gains[i] += rewards[i];
    }
    return state;
}

}  // namespace sawei
