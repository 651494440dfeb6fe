#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace sawei {

// Training data for the surrogate. Points are stored column-wise (d x n) and
// are expected to be normalized to the unit cube.
struct Dataset {
    Eigen::MatrixXd points;
    Eigen::VectorXd values;

    [[nodiscard]] Eigen::Index size() const noexcept { return values.size(); }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return points.rows(); }

    // Throws std::invalid_argument on mismatched sizes, empty data, non-finite
    // values or coordinates outside [0, 1].
    void validate() const;
};

struct Interval {
    double lower;
    double upper;
};

inline constexpr double kJitterFloor = 1e-10;
inline constexpr double kJitterCeiling = 1e-4;

struct GpConfig {
    double noise_variance = kJitterFloor;
    int fit_restarts = 5;
    Interval lengthscale_bounds{1e-3, 10.0};
    Interval variance_bounds{1e-3, 1e3};
    int max_iterations = 60;

    void validate() const;
};

// Parameters in log space: one log-lengthscale per dimension followed by the
// log signal variance.
struct Hyperparameters {
    Eigen::VectorXd log_lengthscales;
    double log_signal_variance = 0.0;

    [[nodiscard]] Eigen::VectorXd packed() const;
    static Hyperparameters unpack(const Eigen::VectorXd& theta);
    bool operator==(const Hyperparameters&) const = default;
};

/// Matérn-5/2 covariance at ARD-scaled distance r.
[[nodiscard]] double kernel_matern52(double r, double signal_variance) noexcept;

/// Kernel matrix between the columns of a and b.
[[nodiscard]] Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                            const Hyperparameters& hp);

/// Log marginal likelihood of `values` (used as given, zero prior mean) under
/// the Matérn-5/2 kernel plus `noise_variance` on the diagonal.
///
/// When `gradient` is non-null it receives d(LML)/d(packed hyperparameters).
/// Throws NumericalError if the kernel matrix is not positive definite.
[[nodiscard]] double log_marginal_likelihood(const Eigen::MatrixXd& points,
                                             const Eigen::VectorXd& values,
                                             const Hyperparameters& hp, double noise_variance,
                                             Eigen::VectorXd* gradient = nullptr);

struct Prediction {
    double mean;
    double std;
};

// Immutable fitted Gaussian process. Safe to share across threads.
class PosteriorModel {
public:
    [[nodiscard]] Prediction predict(const Eigen::VectorXd& x) const;

    // Batched prediction for the columns of `points`.
    void predict(const Eigen::MatrixXd& points, Eigen::VectorXd& mean, Eigen::VectorXd& std) const;

    // Posterior mean in the internal standardized output units.
    [[nodiscard]] double standardized_mean(const Eigen::VectorXd& x) const;

    [[nodiscard]] const Hyperparameters& hyperparameters() const noexcept { return hp_; }
    [[nodiscard]] double noise_variance() const noexcept { return noise_; }
    [[nodiscard]] double log_marginal_likelihood() const noexcept { return lml_; }
    [[nodiscard]] double output_mean() const noexcept { return y_mean_; }
    [[nodiscard]] double output_scale() const noexcept { return y_scale_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return points_.rows(); }
    [[nodiscard]] Eigen::Index size() const noexcept { return points_.cols(); }

private:
    friend PosteriorModel fit(const Dataset&, const GpConfig&, std::uint64_t,
                              const std::optional<Hyperparameters>&);
    friend PosteriorModel condition(const Dataset&, const Hyperparameters&, double);

    Eigen::MatrixXd points_;
    Eigen::MatrixXd scaled_points_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd weights_;
    Hyperparameters hp_;
    Eigen::VectorXd inv_lengthscales_;
    double signal_variance_ = 1.0;
    double noise_ = kJitterFloor;
    double lml_ = 0.0;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
};

/// Fits hyperparameters by multi-start maximization of the log marginal
/// likelihood on standardized outputs. `warm_start`, if given, replaces the
/// default first start. Deterministic in (data, config, seed, warm_start).
///
/// Throws FitError when the kernel matrix cannot be factorized at any jitter.
[[nodiscard]] PosteriorModel fit(const Dataset& data, const GpConfig& config, std::uint64_t seed,
                                 const std::optional<Hyperparameters>& warm_start = std::nullopt);

/// Conditions a GP with fixed hyperparameters on `data` (no fitting).
[[nodiscard]] PosteriorModel condition(const Dataset& data, const Hyperparameters& hp,
                                       double noise_variance = kJitterFloor);

}  // namespace sawei
