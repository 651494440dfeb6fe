#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sawei/rng.hpp"

namespace sawei {

// Below this predictive std the improvement-based utilities take their
// degenerate values.
inline constexpr double kSigmaFloor = 1e-12;

struct NormalDensity {
    double pdf;
    double cdf;
};

[[nodiscard]] NormalDensity standard_normal(double z) noexcept;

// Single-AF definitions. Offsets `xi` shift the incumbent to
// f_min - xi * |f_min| (used by the portfolio arms).
struct Wei {
    double alpha = 0.5;
};
struct Ei {
    double xi = 0.0;
};
struct Pi {
    double xi = 0.0;
};
// Maximizes -(mean - k * std). Without a fixed coefficient the BO loop uses beta_t.
struct Lcb {
    std::optional<double> coefficient;
};
struct Portfolio {};

using AcquisitionSpec = std::variant<Wei, Ei, Pi, Lcb, Portfolio>;

[[nodiscard]] std::string describe(const AcquisitionSpec& spec);

/// Weighted EI: alpha * z*s*Phi(z) + (1 - alpha) * s*phi(z), z = (f_min - mean) / s.
[[nodiscard]] double eval_wei(double mean, double std, double f_min, double alpha) noexcept;
[[nodiscard]] double eval_ei(double mean, double std, double f_min, double xi = 0.0) noexcept;
[[nodiscard]] double eval_pi(double mean, double std, double f_min, double xi = 0.0) noexcept;

struct ConfidenceCoefficient {
    std::size_t dimension;
    std::size_t iteration;
    double beta = 1.0;
};

// 2 ln(d t^2 / beta). Throws DomainError when d t^2 / beta < 1.
[[nodiscard]] double beta_t(const ConfidenceCoefficient& c);

struct ConfidenceBounds {
    double ucb;
    double lcb;
};

[[nodiscard]] ConfidenceBounds eval_bounds(double mean, double std, double coefficient) noexcept;

/// Utility to maximize for a non-portfolio spec. `lcb_coefficient` is used
/// by Lcb specs without a fixed coefficient. Throws std::logic_error for Portfolio.
[[nodiscard]] double utility(const AcquisitionSpec& spec, double mean, double std, double f_min,
                             double lcb_coefficient);

// GP-Hedge bookkeeping over a fixed set of arms.
struct HedgeState {
    std::vector<AcquisitionSpec> arms;
    std::vector<double> gains;
    double eta = 1.0;

    // Throws std::invalid_argument on < 2 arms, eta <= 0 or non-finite gains.
    void validate() const;
    [[nodiscard]] std::vector<double> probabilities() const;
};

// Nine arms: EI and PI with xi in {0, 0.01, 0.1}, LCB with coefficients {0.1, 1, 2}.
[[nodiscard]] HedgeState default_portfolio(double eta = 1.0);

[[nodiscard]] std::size_t hedge_select(const HedgeState& state, Rng& rng);
[[nodiscard]] HedgeState hedge_update(HedgeState state, const std::vector<double>& rewards);

}  // namespace sawei
