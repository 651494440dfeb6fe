#pragma once

#include <string>

#include <Eigen/Core>

#include "sawei/search.hpp"

namespace sawei {

// Black-box function to minimize, evaluated in normalized coordinates.
class Objective {
public:
    virtual ~Objective() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual const SearchSpace& space() const = 0;
    [[nodiscard]] virtual double evaluate(const Eigen::VectorXd& unit_point) const = 0;
    // Known optimal value; regret is measured against it.
    [[nodiscard]] virtual double optimum() const = 0;
    // Tabular objectives can hit their optimum exactly (log regret sentinel).
    [[nodiscard]] virtual bool is_tabular() const { return false; }
};

}  // namespace sawei
