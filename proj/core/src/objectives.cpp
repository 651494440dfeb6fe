#include "sawei/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "sawei/errors.hpp"
#include "sawei/rng.hpp"
#include "sawei/trace_io.hpp"

namespace sawei {

namespace {

constexpr double kBoxHalfWidth = 5.0;
constexpr int kGallagherPeaks = 101;

double schwefel_g(double u) { return u * std::sin(std::sqrt(std::abs(u))); }

// Maximizer of u sin(sqrt(u)) on [-500, 500], refined by Newton on g'(u) = 0.
double schwefel_peak() {
    double u = 420.968746;
    for (int i = 0; i < 20; ++i) {
        const double s = std::sqrt(u);
        const double g1 = std::sin(s) + 0.5 * s * std::cos(s);
        const double g2 = 0.75 * std::cos(s) / s - 0.25 * std::sin(s);
        u -= g1 / g2;
    }
    return u;
}

Eigen::MatrixXd random_rotation(Eigen::Index d, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            a(i, j) = gauss(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        if (r(i, i) < 0.0) {
            q.col(i) *= -1.0;
        }
    }
    return q;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_cell(const std::string& s, std::size_t row, std::size_t col) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(v)) {
        return v;
    }
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                     ": not a finite number: '" + s + "'");
}

}  // namespace

std::string to_string(FunctionId id) {
    switch (id) {
        case FunctionId::sphere:
            return "sphere";
        case FunctionId::rosenbrock:
            return "rosenbrock";
        case FunctionId::rastrigin:
            return "rastrigin";
        case FunctionId::schwefel:
            return "schwefel";
        case FunctionId::katsuura:
            return "katsuura";
        case FunctionId::gallagher101:
            return "gallagher101";
    }
    return "sphere";
}

const std::vector<FunctionId>& all_functions() {
    static const std::vector<FunctionId> ids{FunctionId::sphere,   FunctionId::rosenbrock,
                                             FunctionId::rastrigin, FunctionId::schwefel,
                                             FunctionId::katsuura,  FunctionId::gallagher101};
    return ids;
}

FunctionId parse_function_id(const std::string& text) {
    for (auto id : all_functions()) {
        if (to_string(id) == text) {
            return id;
        }
    }
    throw UnknownFunction("unknown benchmark function '" + text + "'");
}

SyntheticObjective::SyntheticObjective(FunctionId id, std::size_t dimension, std::uint64_t instance)
    : id_(id), instance_(instance) {
    if (dimension < 1) {
        throw std::invalid_argument("synthetic objective needs d >= 1");
    }
    if (instance < 1) {
        throw std::invalid_argument("instance ids start at 1");
    }
    const auto d = static_cast<Eigen::Index>(dimension);
    space_ = SearchSpace::continuous(Eigen::VectorXd::Constant(d, -kBoxHalfWidth),
                                     Eigen::VectorXd::Constant(d, kBoxHalfWidth));
    Rng rng(derive_seed({static_cast<std::uint64_t>(id), dimension, instance, 0x626f62u}));
    x_opt_.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        x_opt_(i) = -4.0 + 8.0 * uniform01(rng);
    }
    rotation_ = random_rotation(d, rng);

    if (id_ == FunctionId::gallagher101) {
        peaks_.resize(d, kGallagherPeaks);
        peak_weights_.resize(kGallagherPeaks);
        peak_precisions_.resize(d, kGallagherPeaks);
        peaks_.col(0) = x_opt_;
        peak_weights_(0) = 10.0;
        std::vector<double> conditions(kGallagherPeaks - 1);
        for (int j = 0; j < kGallagherPeaks - 1; ++j) {
            conditions[static_cast<std::size_t>(j)] = std::pow(1000.0, 2.0 * j / 99.0);
        }
        for (std::size_t k = conditions.size() - 1; k > 0; --k) {
            std::swap(conditions[k], conditions[std::min(k, static_cast<std::size_t>(
                                                                uniform01(rng) * (k + 1)))]);
        }
        for (int p = 0; p < kGallagherPeaks; ++p) {
            if (p > 0) {
                for (Eigen::Index i = 0; i < d; ++i) {
                    peaks_(i, p) = -4.9 + 9.8 * uniform01(rng);
                }
                peak_weights_(p) = 1.1 + 8.0 * (p - 1) / 99.0;
            }
            const double cond = p == 0 ? 1000.0 : conditions[static_cast<std::size_t>(p - 1)];
            std::vector<double> diag(static_cast<std::size_t>(d));
            for (Eigen::Index i = 0; i < d; ++i) {
                const double e = d > 1 ? 0.5 * static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
                diag[static_cast<std::size_t>(i)] = std::pow(cond, e) / std::pow(cond, 0.25);
            }
            for (std::size_t k = diag.size() - 1; k > 0; --k) {
                std::swap(diag[k],
                          diag[std::min(k, static_cast<std::size_t>(uniform01(rng) * (k + 1)))]);
            }
            for (Eigen::Index i = 0; i < d; ++i) {
                peak_precisions_(i, p) = diag[static_cast<std::size_t>(i)];
            }
        }
    }
}

std::string SyntheticObjective::name() const {
    return to_string(id_) + "_" + std::to_string(space_.dimension()) + "d_i" +
           std::to_string(instance_);
}

double SyntheticObjective::evaluate(const Eigen::VectorXd& unit_point) const {
    return evaluate_box(space_.to_box(unit_point));
}

double SyntheticObjective::evaluate_box(const Eigen::VectorXd& x) const {
    const Eigen::Index d = x_opt_.size();
    if (x.size() != d) {
        throw std::invalid_argument("point dimension does not match the objective");
    }
    const double dd = static_cast<double>(d);
    switch (id_) {
        case FunctionId::sphere:
            return (rotation_ * (x - x_opt_)).squaredNorm();
        case FunctionId::rosenbrock: {
            const double c = std::max(1.0, std::sqrt(dd) / 8.0);
            const Eigen::VectorXd w = (c * (rotation_ * (x - x_opt_))).array() + 1.0;
            if (d == 1) {
                return (w(0) - 1.0) * (w(0) - 1.0);
            }
            double f = 0.0;
            for (Eigen::Index i = 0; i + 1 < d; ++i) {
                const double a = w(i) * w(i) - w(i + 1);
                f += 100.0 * a * a + (w(i) - 1.0) * (w(i) - 1.0);
            }
            return f;
        }
        case FunctionId::rastrigin: {
            const Eigen::VectorXd z = rotation_ * (x - x_opt_);
            double cos_sum = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                cos_sum += std::cos(2.0 * std::numbers::pi * z(i));
            }
            return 10.0 * (dd - cos_sum) + z.squaredNorm();
        }
        case FunctionId::schwefel: {
            static const double peak = schwefel_peak();
            static const double peak_value = schwefel_g(peak);
            const Eigen::VectorXd z = rotation_ * (x - x_opt_);
            double f = 0.0;
            double penalty = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                const double u = 100.0 * z(i) + peak;
                const double clipped = std::clamp(u, -500.0, 500.0);
                f += std::max(0.0, peak_value - schwefel_g(clipped));
                const double excess = std::abs(u) - std::abs(clipped);
                penalty += excess * excess;
            }
            return f / dd + 0.01 * penalty;
        }
        case FunctionId::katsuura: {
            const Eigen::VectorXd z = rotation_ * (x - x_opt_);
            double product = 1.0;
            const double exponent = 10.0 / std::pow(dd, 1.2);
            for (Eigen::Index i = 0; i < d; ++i) {
                double s = 0.0;
                double scale = 2.0;
                for (int j = 1; j <= 32; ++j, scale *= 2.0) {
                    const double v = scale * z(i);
                    s += std::abs(v - std::nearbyint(v)) / scale;
                }
                product *= std::pow(1.0 + static_cast<double>(i + 1) * s, exponent);
            }
            const double c = 10.0 / (dd * dd);
            return std::max(0.0, c * product - c);
        }
        case FunctionId::gallagher101: {
            double best = 0.0;
            for (int p = 0; p < kGallagherPeaks; ++p) {
                const Eigen::VectorXd z = rotation_ * (x - peaks_.col(p));
                const double q = (z.array().square() * peak_precisions_.col(p).array()).sum();
                best = std::max(best, peak_weights_(p) * std::exp(-q / (2.0 * dd)));
            }
            return (10.0 - best) * (10.0 - best);
        }
    }
    throw std::logic_error("unhandled function id");
}

SyntheticObjective make_synthetic(const std::string& id, std::size_t dimension,
                                  std::uint64_t instance) {
    return SyntheticObjective(parse_function_id(id), dimension, instance);
}

TabularObjective::TabularObjective(std::string name, std::vector<std::string> parameters,
                                   Eigen::MatrixXd raw, Eigen::VectorXd values)
    : name_(std::move(name)),
      parameters_(std::move(parameters)),
      raw_(std::move(raw)),
      values_(std::move(values)) {
    if (values_.size() == 0 || raw_.cols() == 0) {
        throw EmptyTable("table '" + name_ + "' has no rows");
    }
    if (raw_.cols() != values_.size() || raw_.rows() != static_cast<Eigen::Index>(parameters_.size()) ||
        raw_.rows() == 0) {
        throw std::invalid_argument("table dimensions are inconsistent");
    }
    Eigen::MatrixXd unit(raw_.rows(), raw_.cols());
    for (Eigen::Index i = 0; i < raw_.rows(); ++i) {
        const double lo = raw_.row(i).minCoeff();
        const double hi = raw_.row(i).maxCoeff();
        for (Eigen::Index j = 0; j < raw_.cols(); ++j) {
            unit(i, j) = hi > lo ? (raw_(i, j) - lo) / (hi - lo) : 0.5;
        }
    }
    for (Eigen::Index j = 0; j < unit.cols(); ++j) {
        std::vector<double> key(unit.col(j).data(), unit.col(j).data() + unit.rows());
        if (!lookup_.emplace(std::move(key), values_(j)).second) {
            throw ParseError("table '" + name_ + "': duplicate configuration at data row " +
                             std::to_string(j + 1));
        }
    }
    space_ = SearchSpace::discrete(std::move(unit));
    best_ = values_.minCoeff();
}

double TabularObjective::evaluate(const Eigen::VectorXd& unit_point) const {
    const std::vector<double> key(unit_point.data(), unit_point.data() + unit_point.size());
    const auto it = lookup_.find(key);
    if (it == lookup_.end()) {
        throw std::invalid_argument("point is not a row of table '" + name_ + "'");
    }
    return it->second;
}

TabularObjective load_tabular(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const std::string name = path.stem().string();
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ": " + e.what());
        }
        if (!j.contains("columns") || !j.contains("rows") || !j["columns"].is_array() ||
            !j["rows"].is_array()) {
            throw ParseError(path.string() + ": expected 'columns' and 'rows' arrays");
        }
        for (const auto& c : j["columns"]) {
            header.push_back(c.get<std::string>());
        }
        std::size_t r = 0;
        for (const auto& row : j["rows"]) {
            ++r;
            if (!row.is_array() || row.size() != header.size()) {
                throw ParseError(path.string() + ": row " + std::to_string(r) + ": expected " +
                                 std::to_string(header.size()) + " values");
            }
            std::vector<double> values;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (!row[c].is_number() || !std::isfinite(row[c].get<double>())) {
                    throw ParseError(path.string() + ": row " + std::to_string(r) + ", column " +
                                     std::to_string(c + 1) + ": not a finite number");
                }
                values.push_back(row[c].get<double>());
            }
            rows.push_back(std::move(values));
        }
    } else {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
        }
        header = split_line(line);
        std::size_t r = 0;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            ++r;
            const auto fields = split_line(line);
            if (fields.size() != header.size()) {
                throw ParseError(path.string() + ": row " + std::to_string(r) + ": expected " +
                                 std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
            }
            std::vector<double> values;
            for (std::size_t c = 0; c < fields.size(); ++c) {
                try {
                    values.push_back(parse_cell(fields[c], r, c + 1));
                } catch (const ParseError& e) {
                    throw ParseError(path.string() + ": " + e.what());
                }
            }
            rows.push_back(std::move(values));
        }
    }

    if (header.size() < 2 || header.back() != "objective") {
        throw ParseError(path.string() +
                         ": header must list parameters followed by an 'objective' column");
    }
    if (rows.empty()) {
        throw EmptyTable(path.string() + ": table has no rows");
    }
    const auto d = static_cast<Eigen::Index>(header.size() - 1);
    Eigen::MatrixXd raw(d, static_cast<Eigen::Index>(rows.size()));
    Eigen::VectorXd values(static_cast<Eigen::Index>(rows.size()));
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        std::vector<double> config(rows[j].begin(), rows[j].end() - 1);
        if (const auto [it, fresh] = seen.emplace(config, j + 1); !fresh) {
            throw ParseError(path.string() + ": row " + std::to_string(j + 1) +
                             " duplicates the configuration of row " + std::to_string(it->second));
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            raw(i, static_cast<Eigen::Index>(j)) = rows[j][static_cast<std::size_t>(i)];
        }
        values(static_cast<Eigen::Index>(j)) = rows[j].back();
    }
    header.pop_back();
    return TabularObjective(name, std::move(header), std::move(raw), std::move(values));
}

}  // namespace sawei
