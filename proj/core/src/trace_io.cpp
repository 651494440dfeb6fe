#include "sawei/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sawei/errors.hpp"

namespace sawei {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_field(const std::string& s) {
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    // strtod rather than stod: subnormal values must parse, not throw.
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw std::invalid_argument("not a number: " + s);
    }
    return v;
}

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
    out << kTraceColumns << '\n';
    for (const auto& r : trace.rows) {
        out << r.iteration << ',' << (r.phase == Phase::init ? "init" : "bo") << ','
            << format_double(r.y) << ',' << format_double(r.incumbent) << ','
            << format_double(r.regret) << ',' << format_double(r.log10_regret) << ','
            << format_double(r.ubr_raw) << ',' << format_double(r.ubr_smoothed) << ','
            << format_double(r.alpha) << ',' << format_double(r.a_explore) << ','
            << format_double(r.a_exploit) << ',' << (r.adjusted ? 1 : 0) << '\n';
    }
}

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
    std::ostringstream out;
    write_trace_csv(trace, out);
    write_text_file(path, out.str());
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kTraceColumns) {
        throw ParseError(path.string() + ": unexpected trace header");
    }
    std::vector<TraceRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 12) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 12 fields");
        }
        try {
            TraceRow r;
            r.iteration = std::stoul(f[0]);
            r.phase = f[1] == "init" ? Phase::init : Phase::bo;
            r.y = parse_field(f[2]);
            r.incumbent = parse_field(f[3]);
            r.regret = parse_field(f[4]);
            r.log10_regret = parse_field(f[5]);
            r.ubr_raw = parse_field(f[6]);
            r.ubr_smoothed = parse_field(f[7]);
            r.alpha = parse_field(f[8]);
            r.a_explore = parse_field(f[9]);
            r.a_exploit = parse_field(f[10]);
            r.adjusted = f[11] == "1";
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

nlohmann::json run_summary(const RunTrace& trace) {
    nlohmann::json j;
    j["objective"] = trace.objective;
    j["schedule"] = trace.schedule;
    j["seed"] = trace.seed;
    j["init_size"] = trace.init_size;
    j["bo_budget"] = trace.bo_budget;
    j["evaluations"] = trace.rows.size();
    j["complete"] = trace.complete();
    j["failure"] = trace.failure ? nlohmann::json(*trace.failure) : nlohmann::json(nullptr);
    j["final_regret"] = number_or_null(trace.final_regret());
    j["final_log10_regret"] =
        trace.rows.empty() ? nlohmann::json(nullptr) : number_or_null(trace.rows.back().log10_regret);
    j["adjust_events"] = trace.adjust_events();
    auto alpha = nlohmann::json::array();
    auto events = nlohmann::json::array();
    auto acquisitions = nlohmann::json::array();
    for (const auto& r : trace.rows) {
        if (r.phase != Phase::bo) {
            continue;
        }
        alpha.push_back(number_or_null(r.alpha));
        acquisitions.push_back(r.acquisition);
        if (r.adjusted) {
            events.push_back({{"iteration", r.iteration},
                              {"gradient", number_or_null(r.gradient)},
                              {"max_abs_gradient", number_or_null(r.max_abs_gradient)},
                              {"alpha_before", number_or_null(r.alpha)},
                              {"alpha_after", number_or_null(r.alpha_next)},
                              {"explore_acc", number_or_null(r.explore_acc)},
                              {"exploit_acc", number_or_null(r.exploit_acc)}});
        }
    }
    j["alpha_trajectory"] = std::move(alpha);
    j["acquisitions"] = std::move(acquisitions);
    j["adjust_log"] = std::move(events);
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace sawei
