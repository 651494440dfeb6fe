#pragma once

#include <filesystem>
#include <vector>

#include "sawei/experiment.hpp"

namespace sawei {

struct ReportOutput {
    RankReport ranks;
    std::vector<std::filesystem::path> files;
};

/// Reads the manifest, aggregates and traces under `dir` and writes CSV tables
/// (and SVG charts when `plots` is set) to `dir`/report. Throws
/// MissingManifest when the manifest is absent or lists no schedules.
ReportOutput emit_report(const std::filesystem::path& dir, bool plots);

// First BO step (0-based) that runs PI under an EI->PI switch of `fraction`.
[[nodiscard]] std::size_t switch_step(double fraction, std::size_t bo_budget);

}  // namespace sawei
