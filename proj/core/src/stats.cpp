#include "sawei/stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sawei {

double iqm(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("iqm of an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    const std::size_t drop = k / 4;
    double sum = 0.0;
    for (std::size_t i = drop; i < k - drop; ++i) {
        sum += sorted[i];
    }
    return sum / static_cast<double>(k - 2 * drop);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

}  // namespace sawei
