#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sawei/objective.hpp"
#include "sawei/search.hpp"

namespace sawei {

enum class FunctionId { sphere, rosenbrock, rastrigin, schwefel, katsuura, gallagher101 };

[[nodiscard]] std::string to_string(FunctionId id);
// Throws UnknownFunction.
[[nodiscard]] FunctionId parse_function_id(const std::string& text);
[[nodiscard]] const std::vector<FunctionId>& all_functions();

// Shifted and rotated synthetic function on [-5, 5]^d with f_opt = 0.
class SyntheticObjective final : public Objective {
public:
    SyntheticObjective(FunctionId id, std::size_t dimension, std::uint64_t instance);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] const SearchSpace& space() const override { return space_; }
    [[nodiscard]] double evaluate(const Eigen::VectorXd& unit_point) const override;
    [[nodiscard]] double optimum() const override { return 0.0; }

    // Evaluation in the original [-5, 5]^d coordinates.
    [[nodiscard]] double evaluate_box(const Eigen::VectorXd& x) const;

    [[nodiscard]] FunctionId id() const noexcept { return id_; }
    [[nodiscard]] std::uint64_t instance() const noexcept { return instance_; }
    [[nodiscard]] const Eigen::VectorXd& x_opt() const noexcept { return x_opt_; }
    [[nodiscard]] Eigen::VectorXd x_opt_unit() const { return space_.to_unit(x_opt_); }
    [[nodiscard]] const Eigen::MatrixXd& rotation() const noexcept { return rotation_; }

private:
    FunctionId id_;
    std::uint64_t instance_;
    SearchSpace space_;
    Eigen::VectorXd x_opt_;
    Eigen::MatrixXd rotation_;
    // gallagher101 peaks: locations (columns), weights and diagonal precisions.
    Eigen::MatrixXd peaks_;
    Eigen::VectorXd peak_weights_;
    Eigen::MatrixXd peak_precisions_;
};

// Throws UnknownFunction for unsupported ids, std::invalid_argument for d < 1
// or instance < 1.
[[nodiscard]] SyntheticObjective make_synthetic(const std::string& id, std::size_t dimension,
                                                std::uint64_t instance);

// Finite candidate table; proposals are restricted to its rows.
class TabularObjective final : public Objective {
public:
    TabularObjective(std::string name, std::vector<std::string> parameters, Eigen::MatrixXd raw,
                     Eigen::VectorXd values);

    [[nodiscard]] std::string name() const override { return name_; }
    [[nodiscard]] const SearchSpace& space() const override { return space_; }
    // Exact-match lookup; throws std::invalid_argument for points off the table.
    [[nodiscard]] double evaluate(const Eigen::VectorXd& unit_point) const override;
    [[nodiscard]] double optimum() const override { return best_; }
    [[nodiscard]] bool is_tabular() const override { return true; }

    [[nodiscard]] const std::vector<std::string>& parameters() const noexcept { return parameters_; }
    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
    [[nodiscard]] const Eigen::MatrixXd& raw_table() const noexcept { return raw_; }

private:
    std::string name_;
    std::vector<std::string> parameters_;
    Eigen::MatrixXd raw_;
    Eigen::VectorXd values_;
    SearchSpace space_;
    std::map<std::vector<double>, double> lookup_;
    double best_;
};

/// Loads a table from CSV (header of parameter names, last column `objective`)
/// or JSON ({"columns": [..., "objective"], "rows": [[...], ...]}).
/// Throws ParseError (with row/column context) or EmptyTable.
[[nodiscard]] TabularObjective load_tabular(const std::filesystem::path& path);

}  // namespace sawei
