#include "sawei/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sawei/errors.hpp"
#include "sawei/rng.hpp"

namespace sawei {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;
constexpr double kLog2Pi = 1.83787706640934548356065947281;

struct Standardized {
    Eigen::VectorXd values;
    double mean = 0.0;
    double scale = 1.0;
};

Standardized standardize(const Eigen::VectorXd& y) {
    Standardized s;
    s.mean = y.mean();
    const double var = (y.array() - s.mean).square().mean();
    s.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    s.values = (y.array() - s.mean) / s.scale;
    return s;
}

// Pairwise kernel matrix on scaled points plus the per-pair radial factor
// needed for the lengthscale gradient.
Eigen::MatrixXd training_kernel(const Eigen::MatrixXd& scaled, double signal_variance,
                                Eigen::MatrixXd* radial_factor) {
    const Eigen::Index n = scaled.cols();
    Eigen::MatrixXd k(n, n);
    if (radial_factor) {
        radial_factor->resize(n, n);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = signal_variance;
        if (radial_factor) {
            (*radial_factor)(j, j) = signal_variance * 5.0 / 3.0;
        }
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double r = (scaled.col(i) - scaled.col(j)).norm();
            const double e = std::exp(-kSqrt5 * r);
            const double v = signal_variance * (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * e;
            k(i, j) = v;
            k(j, i) = v;
            if (radial_factor) {
                const double f = signal_variance * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * e;
                (*radial_factor)(i, j) = f;
                (*radial_factor)(j, i) = f;
            }
        }
    }
    return k;
}

Eigen::VectorXd inverse_lengthscales(const Hyperparameters& hp) {
    return (-hp.log_lengthscales.array()).exp().matrix();
}

// Factorizes k + noise*I, escalating the noise by 10x up to the ceiling.
// Returns the noise used or a negative value if every attempt failed.
double factorize(const Eigen::MatrixXd& k, double noise, Eigen::LLT<Eigen::MatrixXd>& llt) {
    const double ceiling = std::max(kJitterCeiling, noise);
    for (double jitter = noise; jitter <= ceiling * (1.0 + 1e-12); jitter *= 10.0) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) {
            return jitter;
        }
    }
    return -1.0;
}

struct Bounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

Bounds log_bounds(const GpConfig& config, Eigen::Index d) {
    Bounds b{Eigen::VectorXd(d + 1), Eigen::VectorXd(d + 1)};
    b.lower.head(d).setConstant(std::log(config.lengthscale_bounds.lower));
    b.upper.head(d).setConstant(std::log(config.lengthscale_bounds.upper));
    b.lower(d) = std::log(config.variance_bounds.lower);
    b.upper(d) = std::log(config.variance_bounds.upper);
    return b;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Objective in the unconstrained coordinates u, theta = lo + (hi - lo) * sigmoid(u).
class NegativeLml {
public:
    NegativeLml(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, const Bounds& bounds,
                double noise)
        : points_(points), y_(y), bounds_(bounds), noise_(noise) {}

    Eigen::VectorXd to_theta(const Eigen::VectorXd& u) const {
        Eigen::VectorXd theta(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            theta(i) = bounds_.lower(i) + (bounds_.upper(i) - bounds_.lower(i)) * sigmoid(u(i));
        }
        return theta;
    }

    Eigen::VectorXd to_u(const Eigen::VectorXd& theta) const {
        Eigen::VectorXd u(theta.size());
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            double p = (theta(i) - bounds_.lower(i)) / (bounds_.upper(i) - bounds_.lower(i));
            p = std::clamp(p, 1e-6, 1.0 - 1e-6);
            u(i) = std::log(p / (1.0 - p));
        }
        return u;
    }

    // Returns +inf when no jitter level makes the kernel matrix factorizable.
    double operator()(const Eigen::VectorXd& u, Eigen::VectorXd& grad_u) const {
        const Eigen::VectorXd theta = to_theta(u);
        const auto hp = Hyperparameters::unpack(theta);
        Eigen::VectorXd grad_theta;
        double value = std::numeric_limits<double>::infinity();
        for (double jitter = noise_; jitter <= std::max(kJitterCeiling, noise_) * (1.0 + 1e-12);
             jitter *= 10.0) {
            try {
                value = -log_marginal_likelihood(points_, y_, hp, jitter, &grad_theta);
                break;
            } catch (const NumericalError&) {
            }
        }
        if (!std::isfinite(value)) {
            grad_u = Eigen::VectorXd::Zero(u.size());
            return std::numeric_limits<double>::infinity();
        }
        grad_u.resize(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double s = sigmoid(u(i));
            grad_u(i) = -grad_theta(i) * (bounds_.upper(i) - bounds_.lower(i)) * s * (1.0 - s);
        }
        return value;
    }

private:
    const Eigen::MatrixXd& points_;
    const Eigen::VectorXd& y_;
    const Bounds& bounds_;
    double noise_;
};

struct LocalOptimum {
    Eigen::VectorXd u;
    double value;
};

// BFGS with Armijo backtracking.
LocalOptimum bfgs(const NegativeLml& f, Eigen::VectorXd u, int max_iterations) {
    const Eigen::Index n = u.size();
    Eigen::VectorXd g;
    double fx = f(u, g);
    if (!std::isfinite(fx)) {
        return {u, fx};
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g_new;
    for (int iter = 0; iter < max_iterations; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() < 1e-6) {
            break;
        }
        Eigen::VectorXd p = -h * g;
        double slope = g.dot(p);
        if (slope >= 0.0) {
            h.setIdentity();
            p = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd u_new;
        double f_new = fx;
        for (int k = 0; k < 30; ++k) {
            u_new = u + step * p;
            f_new = f(u_new, g_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
        const Eigen::VectorXd s = u_new - u;
        const Eigen::VectorXd y = g_new - g;
        const double ys = y.dot(s);
        const double improvement = fx - f_new;
        u = u_new;
        g = g_new;
        fx = f_new;
        if (ys > 1e-12) {
            const double rho = 1.0 / ys;
            const Eigen::MatrixXd i_rsy = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            h = i_rsy * h * i_rsy.transpose() + rho * s * s.transpose();
        }
        if (improvement <= 1e-10 * (1.0 + std::abs(fx))) {
            break;
        }
    }
    return {u, fx};
}

}  // namespace

void Dataset::validate() const {
    if (values.size() == 0) {
        throw std::invalid_argument("Dataset is empty");
    }
    if (points.cols() != values.size()) {
        throw std::invalid_argument("Dataset points and values differ in length");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("Dataset contains non-finite values");
    }
    if (!points.allFinite() || (points.array() < 0.0).any() || (points.array() > 1.0).any()) {
        throw std::invalid_argument("Dataset points must lie in the unit cube");
    }
}

void GpConfig::validate() const {
    if (!(noise_variance >= kJitterFloor)) {
        throw std::invalid_argument("noise_variance must be at least the jitter floor");
    }
    if (fit_restarts < 1) {
        throw std::invalid_argument("fit_restarts must be positive");
    }
    for (const auto& iv : {lengthscale_bounds, variance_bounds}) {
        if (!(iv.lower > 0.0) || !(iv.upper >= iv.lower)) {
            throw std::invalid_argument("hyperparameter bounds must be nonempty and positive");
        }
    }
}

Eigen::VectorXd Hyperparameters::packed() const {
    Eigen::VectorXd theta(log_lengthscales.size() + 1);
    theta.head(log_lengthscales.size()) = log_lengthscales;
    theta(log_lengthscales.size()) = log_signal_variance;
    return theta;
}

Hyperparameters Hyperparameters::unpack(const Eigen::VectorXd& theta) {
    Hyperparameters hp;
    hp.log_lengthscales = theta.head(theta.size() - 1);
    hp.log_signal_variance = theta(theta.size() - 1);
    return hp;
}

double kernel_matern52(double r, double signal_variance) noexcept {
    return signal_variance * (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * std::exp(-kSqrt5 * r);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const Hyperparameters& hp) {
    const Eigen::VectorXd inv = inverse_lengthscales(hp);
    const double sv = std::exp(hp.log_signal_variance);
    Eigen::MatrixXd k(a.cols(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.cols(); ++i) {
            const double r = ((a.col(i) - b.col(j)).array() * inv.array()).matrix().norm();
            k(i, j) = kernel_matern52(r, sv);
        }
    }
    return k;
}

double log_marginal_likelihood(const Eigen::MatrixXd& points, const Eigen::VectorXd& values,
                               const Hyperparameters& hp, double noise_variance,
                               Eigen::VectorXd* gradient) {
    const Eigen::Index n = points.cols();
    const Eigen::Index d = points.rows();
    const Eigen::VectorXd inv = inverse_lengthscales(hp);
    const Eigen::MatrixXd scaled = inv.asDiagonal() * points;
    const double sv = std::exp(hp.log_signal_variance);

    Eigen::MatrixXd radial;
    Eigen::MatrixXd k = training_kernel(scaled, sv, gradient ? &radial : nullptr);
    Eigen::MatrixXd kn = k;
    kn.diagonal().array() += noise_variance;
    Eigen::LLT<Eigen::MatrixXd> llt(kn);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("kernel matrix is not positive definite");
    }
    const Eigen::VectorXd alpha = llt.solve(values);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double lml = -0.5 * values.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * kLog2Pi;

    if (gradient) {
        Eigen::MatrixXd w = alpha * alpha.transpose();
        w -= llt.solve(Eigen::MatrixXd::Identity(n, n));
        gradient->resize(d + 1);
        for (Eigen::Index dim = 0; dim < d; ++dim) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index i = j + 1; i < n; ++i) {
                    const double diff = scaled(dim, i) - scaled(dim, j);
                    acc += w(i, j) * radial(i, j) * diff * diff;
                }
            }
            // Off-diagonal pairs appear twice in the trace; the 1/2 cancels.
            (*gradient)(dim) = acc;
        }
        (*gradient)(d) = 0.5 * (w.array() * k.array()).sum();
    }
    return lml;
}

Prediction PosteriorModel::predict(const Eigen::VectorXd& x) const {
    Eigen::VectorXd mean, std;
    predict(Eigen::MatrixXd(x), mean, std);
    return {mean(0), std(0)};
}

void PosteriorModel::predict(const Eigen::MatrixXd& points, Eigen::VectorXd& mean,
                             Eigen::VectorXd& std) const {
    const Eigen::MatrixXd q = inv_lengthscales_.asDiagonal() * points;
    Eigen::MatrixXd r2 = (-2.0 * scaled_points_.transpose()) * q;
    r2.colwise() += scaled_points_.colwise().squaredNorm().transpose();
    r2.rowwise() += q.colwise().squaredNorm();
    Eigen::MatrixXd ks = r2.unaryExpr([sv = signal_variance_](double v) {
        return kernel_matern52(std::sqrt(std::max(v, 0.0)), sv);
    });
    mean = (ks.transpose() * weights_).array() * y_scale_ + y_mean_;
    llt_.matrixL().solveInPlace(ks);
    const Eigen::ArrayXd var = signal_variance_ - ks.colwise().squaredNorm().transpose().array();
    std = var.max(0.0).sqrt() * y_scale_;
}

double PosteriorModel::standardized_mean(const Eigen::VectorXd& x) const {
    return (predict(x).mean - y_mean_) / y_scale_;
}

PosteriorModel condition(const Dataset& data, const Hyperparameters& hp, double noise_variance) {
    data.validate();
    if (hp.log_lengthscales.size() != data.dimension()) {
        throw std::invalid_argument("hyperparameter dimension does not match data");
    }
    PosteriorModel model;
    const Standardized s = standardize(data.values);
    model.points_ = data.points;
    model.hp_ = hp;
    model.inv_lengthscales_ = inverse_lengthscales(hp);
    model.signal_variance_ = std::exp(hp.log_signal_variance);
    model.scaled_points_ = model.inv_lengthscales_.asDiagonal() * data.points;
    model.y_mean_ = s.mean;
    model.y_scale_ = s.scale;

    const Eigen::MatrixXd k = training_kernel(model.scaled_points_, model.signal_variance_, nullptr);
    const double jitter = factorize(k, std::max(noise_variance, kJitterFloor), model.llt_);
    if (jitter < 0.0) {
        throw FitError("Cholesky factorization failed at maximum jitter");
    }
    model.noise_ = jitter;
    model.weights_ = model.llt_.solve(s.values);
    const double log_det = 2.0 * model.llt_.matrixLLT().diagonal().array().log().sum();
    model.lml_ = -0.5 * s.values.dot(model.weights_) - 0.5 * log_det -
                 0.5 * static_cast<double>(data.size()) * kLog2Pi;
    return model;
}

PosteriorModel fit(const Dataset& data, const GpConfig& config, std::uint64_t seed,
                   const std::optional<Hyperparameters>& warm_start) {
    data.validate();
    config.validate();
    const Eigen::Index d = data.dimension();
    const Standardized s = standardize(data.values);
    const Bounds bounds = log_bounds(config, d);
    const NegativeLml objective(data.points, s.values, bounds, config.noise_variance);

    Eigen::VectorXd first(d + 1);
    if (warm_start && warm_start->log_lengthscales.size() == d) {
        first = warm_start->packed();
    } else {
        first.head(d).setConstant(std::log(0.5));
        first(d) = 0.0;
    }
    first = first.cwiseMax(bounds.lower).cwiseMin(bounds.upper);

    Rng rng(derive_seed({seed, 0x6770u}));
    Eigen::VectorXd best_theta = first;
    double best_value = std::numeric_limits<double>::infinity();
    for (int start = 0; start < config.fit_restarts; ++start) {
        Eigen::VectorXd theta0 = first;
        if (start > 0) {
            for (Eigen::Index i = 0; i <= d; ++i) {
                theta0(i) = bounds.lower(i) + (bounds.upper(i) - bounds.lower(i)) * uniform01(rng);
            }
        }
        const LocalOptimum opt = bfgs(objective, objective.to_u(theta0), config.max_iterations);
        if (opt.value < best_value) {
            best_value = opt.value;
            best_theta = objective.to_theta(opt.u);
        }
    }
    return condition(data, Hyperparameters::unpack(best_theta), config.noise_variance);
}

}  // namespace sawei
