#pragma once

#include <span>
#include <vector>

namespace sawei {

/// Interquartile mean: sort, drop floor(k/4) values from each end, average the rest.
/// Throws std::invalid_argument on empty input.
[[nodiscard]] double iqm(std::span<const double> values);

/// 1-based ranks in ascending order; tied values share their mean rank.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> values);

}  // namespace sawei
