#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sawei/search.hpp"

namespace sawei {

enum class DesignKind { sobol, lhs, uniform };

[[nodiscard]] std::string to_string(DesignKind kind);
[[nodiscard]] DesignKind parse_design_kind(const std::string& text);

/// `size` distinct points (columns) in normalized coordinates. Sobol' points
/// are scrambled with a seeded random digital shift. On a discrete space the
/// kind is ignored and `size` distinct table rows are drawn without replacement.
[[nodiscard]] Eigen::MatrixXd initial_design(const SearchSpace& space, DesignKind kind,
                                             std::size_t size, std::uint64_t seed);

// Table row indices backing initial_design on a discrete space.
[[nodiscard]] std::vector<Eigen::Index> initial_rows(const SearchSpace& space, std::size_t size,
                                                     std::uint64_t seed);

}  // namespace sawei
