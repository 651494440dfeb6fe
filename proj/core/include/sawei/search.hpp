#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "sawei/gp.hpp"
#include "sawei/rng.hpp"

namespace sawei {

// Search domain. Optimization always happens in normalized coordinates: the
// unit cube for continuous spaces, the normalized table rows for discrete ones.
class SearchSpace {
public:
    static SearchSpace continuous(Eigen::VectorXd lower, Eigen::VectorXd upper);
    static SearchSpace unit_cube(Eigen::Index dimension);
    // Rows are columns of `table`, already normalized to [0, 1].
    static SearchSpace discrete(Eigen::MatrixXd table);

    [[nodiscard]] bool is_discrete() const noexcept { return discrete_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return lower_.size(); }
    [[nodiscard]] const Eigen::MatrixXd& table() const noexcept { return table_; }
    [[nodiscard]] Eigen::Index table_size() const noexcept { return table_.cols(); }
    [[nodiscard]] const Eigen::VectorXd& lower() const noexcept { return lower_; }
    [[nodiscard]] const Eigen::VectorXd& upper() const noexcept { return upper_; }

    [[nodiscard]] Eigen::VectorXd to_box(const Eigen::VectorXd& unit) const;
    [[nodiscard]] Eigen::VectorXd to_unit(const Eigen::VectorXd& box) const;
    [[nodiscard]] bool contains(const Eigen::VectorXd& unit) const;

    // Discrete space restricted to the given table columns.
    [[nodiscard]] SearchSpace subset(const std::vector<Eigen::Index>& rows) const;

private:
    bool discrete_ = false;
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
    Eigen::MatrixXd table_;
};

struct SearchBudget {
    int n_random = 2000;
    int n_local_starts = 5;
    int local_steps = 10;
    double step_scale = 0.1;

    void validate() const;
};

// Scores the columns of a d x m matrix; higher is better.
using BatchUtility = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

struct Candidate {
    Eigen::VectorXd point;
    double value;
};

/// Random sampling plus seed points, followed by Gaussian local search from
/// the best few candidates. Discrete spaces are enumerated exhaustively.
/// Ties go to the earliest candidate in evaluation order.
[[nodiscard]] Candidate maximize(const BatchUtility& af, const SearchSpace& space,
                                 const SearchBudget& budget, const Eigen::MatrixXd& seed_points,
                                 Rng& rng);

/// Minimum of mean - coefficient * std over the searched candidates and the
/// history points, so the result never exceeds the history minimum.
[[nodiscard]] double minimize_lcb(const PosteriorModel& model, const SearchSpace& space,
                                  double coefficient, const Eigen::MatrixXd& history_points,
                                  const SearchBudget& budget, Rng& rng);

}  // namespace sawei
