#include "sawei/search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sawei {

SearchSpace SearchSpace::continuous(Eigen::VectorXd lower, Eigen::VectorXd upper) {
    if (lower.size() == 0 || lower.size() != upper.size()) {
        throw std::invalid_argument("search space bounds must be nonempty and of equal size");
    }
    if (!(lower.array() < upper.array()).all()) {
        throw std::invalid_argument("search space needs lower < upper in every dimension");
    }
    SearchSpace s;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
}

SearchSpace SearchSpace::unit_cube(Eigen::Index dimension) {
    return continuous(Eigen::VectorXd::Zero(dimension), Eigen::VectorXd::Ones(dimension));
}

SearchSpace SearchSpace::discrete(Eigen::MatrixXd table) {
    if (table.cols() == 0 || table.rows() == 0) {
        throw std::invalid_argument("discrete search space needs a nonempty table");
    }
    if (!table.allFinite() || (table.array() < 0.0).any() || (table.array() > 1.0).any()) {
        throw std::invalid_argument("discrete table rows must be normalized to [0, 1]");
    }
    SearchSpace s;
    s.discrete_ = true;
    s.lower_ = Eigen::VectorXd::Zero(table.rows());
    s.upper_ = Eigen::VectorXd::Ones(table.rows());
    s.table_ = std::move(table);
    return s;
}

Eigen::VectorXd SearchSpace::to_box(const Eigen::VectorXd& unit) const {
    return lower_.array() + unit.array() * (upper_ - lower_).array();
}

Eigen::VectorXd SearchSpace::to_unit(const Eigen::VectorXd& box) const {
    return (box - lower_).array() / (upper_ - lower_).array();
}

bool SearchSpace::contains(const Eigen::VectorXd& unit) const {
    if (unit.size() != dimension()) {
        return false;
    }
    if (!discrete_) {
        return (unit.array() >= 0.0).all() && (unit.array() <= 1.0).all();
    }
    for (Eigen::Index j = 0; j < table_.cols(); ++j) {
        if (table_.col(j) == unit) {
            return true;
        }
    }
    return false;
}

SearchSpace SearchSpace::subset(const std::vector<Eigen::Index>& rows) const {
    if (!discrete_) {
        throw std::logic_error("subset requires a discrete search space");
    }
    Eigen::MatrixXd t(table_.rows(), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.col(static_cast<Eigen::Index>(i)) = table_.col(rows[i]);
    }
    return discrete(std::move(t));
}

void SearchBudget::validate() const {
    if (n_random < 1 || n_local_starts < 1 || local_steps < 1 || !(step_scale > 0.0)) {
        throw std::invalid_argument("search budget entries must be positive");
    }
}

Candidate maximize(const BatchUtility& af, const SearchSpace& space, const SearchBudget& budget,
                   const Eigen::MatrixXd& seed_points, Rng& rng) {
    budget.validate();
    if (space.is_discrete()) {
        const Eigen::VectorXd values = af(space.table());
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < values.size(); ++i) {
            if (values(i) > values(best)) {
                best = i;
            }
        }
        return {space.table().col(best), values(best)};
    }

    const Eigen::Index d = space.dimension();
    const Eigen::Index n_seed = seed_points.size() > 0 ? seed_points.cols() : 0;
    Eigen::MatrixXd candidates(d, budget.n_random + n_seed);
    for (Eigen::Index j = 0; j < budget.n_random; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            candidates(i, j) = uniform01(rng);
        }
    }
    if (n_seed > 0) {
        candidates.rightCols(n_seed) = seed_points.cwiseMax(0.0).cwiseMin(1.0);
    }
    const Eigen::VectorXd values = af(candidates);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(candidates.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

    Candidate best{candidates.col(order.front()), values(order.front())};

    const auto k = static_cast<Eigen::Index>(
        std::min<std::size_t>(static_cast<std::size_t>(budget.n_local_starts), order.size()));
    Eigen::MatrixXd current(d, k);
    Eigen::VectorXd current_values(k);
    Eigen::VectorXd steps = Eigen::VectorXd::Constant(k, budget.step_scale);
    for (Eigen::Index i = 0; i < k; ++i) {
        current.col(i) = candidates.col(order[static_cast<std::size_t>(i)]);
        current_values(i) = values(order[static_cast<std::size_t>(i)]);
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd proposals(d, k);
    for (int step = 0; step < budget.local_steps; ++step) {
        for (Eigen::Index j = 0; j < k; ++j) {
            for (Eigen::Index i = 0; i < d; ++i) {
                proposals(i, j) = std::clamp(current(i, j) + steps(j) * gauss(rng), 0.0, 1.0);
            }
        }
        const Eigen::VectorXd proposal_values = af(proposals);
        for (Eigen::Index j = 0; j < k; ++j) {
            if (proposal_values(j) > current_values(j)) {
                current.col(j) = proposals.col(j);
                current_values(j) = proposal_values(j);
                if (proposal_values(j) > best.value) {
                    best = {proposals.col(j), proposal_values(j)};
                }
            } else {
                steps(j) *= 0.5;
            }
        }
    }
    return best;
}

double minimize_lcb(const PosteriorModel& model, const SearchSpace& space, double coefficient,
                    const Eigen::MatrixXd& history_points, const SearchBudget& budget, Rng& rng) {
    const BatchUtility negative_lcb = [&](const Eigen::MatrixXd& points) {
        Eigen::VectorXd mean, std;
        model.predict(points, mean, std);
        return Eigen::VectorXd(-(mean.array() - coefficient * std.array()));
    };
    const Candidate best = maximize(negative_lcb, space, budget, history_points, rng);
    double lowest = -best.value;
    if (history_points.size() > 0) {
        lowest = std::min(lowest, -negative_lcb(history_points).maxCoeff());
    }
    return lowest;
}

}  // namespace sawei
