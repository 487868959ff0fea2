#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pilotwave/config.hpp"

namespace pilotwave {

struct RunResult {
    /// Rows of summary.csv in emission order.
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<std::filesystem::path> files;

    /// Value for `key`; std::out_of_range when absent.
    [[nodiscard]] const std::string& value(const std::string& key) const;
};

/// Runs the configured experiment and writes its CSV files plus summary.csv
/// into config.output_dir (created if needed).  Outputs depend only on the
/// configuration, never on the worker count.
RunResult run_experiment(const RunConfig& config);

}  // namespace pilotwave
