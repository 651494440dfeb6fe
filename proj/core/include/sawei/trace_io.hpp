#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sawei/bo_loop.hpp"

namespace sawei {

// Column order of the per-run trace CSV.
inline constexpr const char* kTraceColumns =
    "iteration,phase,y,incumbent,regret,log10_regret,ubr_raw,ubr_smoothed,alpha,a_explore,"
    "a_exploit,adjusted";

// Shortest round-trip decimal ("%.17g"); nan for missing values.
[[nodiscard]] std::string format_double(double v);

void write_trace_csv(const RunTrace& trace, std::ostream& out);
void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);

// CSV columns only; telemetry that is not serialized stays default.
[[nodiscard]] std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

// Final regret, adjust-event count, alpha trajectory and controller telemetry.
[[nodiscard]] nlohmann::json run_summary(const RunTrace& trace);

void write_text_file(const std::filesystem::path& path, const std::string& content);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace sawei
