#include "sawei/design.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <boost/random/sobol.hpp>

#include "sawei/rng.hpp"

namespace sawei {

std::string to_string(DesignKind kind) {
    switch (kind) {
        case DesignKind::sobol:
            return "sobol";
        case DesignKind::lhs:
            return "lhs";
        case DesignKind::uniform:
            return "uniform";
    }
    return "sobol";
}

DesignKind parse_design_kind(const std::string& text) {
    if (text == "sobol") return DesignKind::sobol;
    if (text == "lhs") return DesignKind::lhs;
    if (text == "uniform") return DesignKind::uniform;
    throw std::invalid_argument("unknown initial design kind '" + text + "'");
}

std::vector<Eigen::Index> initial_rows(const SearchSpace& space, std::size_t size,
                                       std::uint64_t seed) {
    if (!space.is_discrete()) {
        throw std::logic_error("initial_rows requires a discrete search space");
    }
    const auto n = static_cast<std::size_t>(space.table_size());
    if (size > n) {
        throw std::invalid_argument("initial design larger than the candidate table");
    }
    std::vector<Eigen::Index> rows(n);
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    Rng rng(derive_seed({seed, 0x7461u}));
    // Partial Fisher-Yates with the portable uniform01.
    for (std::size_t i = 0; i < size; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - i));
        std::swap(rows[i], rows[std::min(j, n - 1)]);
    }
    rows.resize(size);
    return rows;
}

Eigen::MatrixXd initial_design(const SearchSpace& space, DesignKind kind, std::size_t size,
                               std::uint64_t seed) {
    if (size < 2) {
        throw std::invalid_argument("initial design needs at least two points");
    }
    if (space.is_discrete()) {
        const auto rows = initial_rows(space, size, seed);
        Eigen::MatrixXd points(space.dimension(), static_cast<Eigen::Index>(size));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            points.col(static_cast<Eigen::Index>(i)) = space.table().col(rows[i]);
        }
        return points;
    }

    const Eigen::Index d = space.dimension();
    const auto n = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd points(d, n);
    Rng rng(derive_seed({seed, 0x646fu, static_cast<std::uint64_t>(kind)}));
    switch (kind) {
        case DesignKind::sobol: {
            boost::random::sobol gen(static_cast<std::size_t>(d));
            std::vector<std::uint64_t> shift(static_cast<std::size_t>(d));
            for (auto& s : shift) {
                s = rng();
            }
            // boost starts at index 1; prepend the origin so prefixes of length 2^m are nets.
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index i = 0; i < d; ++i) {
                    const std::uint64_t raw = j == 0 ? 0u : gen();
                    const std::uint64_t v = raw ^ shift[static_cast<std::size_t>(i)];
                    points(i, j) = static_cast<double>(v >> 11) * 0x1.0p-53;
                }
            }
            break;
        }
        case DesignKind::lhs: {
            std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < d; ++i) {
                std::iota(perm.begin(), perm.end(), Eigen::Index{0});
                for (std::size_t k = perm.size() - 1; k > 0; --k) {
                    const auto j = std::min(
                        k, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(k + 1)));
                    std::swap(perm[k], perm[j]);
                }
                for (Eigen::Index j = 0; j < n; ++j) {
                    points(i, j) = (static_cast<double>(perm[static_cast<std::size_t>(j)]) +
                                    uniform01(rng)) /
                                   static_cast<double>(n);
                }
            }
            break;
        }
        case DesignKind::uniform:
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index i = 0; i < d; ++i) {
                    points(i, j) = uniform01(rng);
                }
            }
            break;
    }
    return points;
}

}  // namespace sawei
