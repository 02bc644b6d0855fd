#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qhlab/config.hpp"

namespace qhlab {

inline constexpr const char* kVersion = "qhlab 0.3.0";

struct RunOptions {
    Command command = Command::simulate;
    std::string config_text;
    std::string config_path;  // echoed in the manifest only
    std::optional<std::uint64_t> seed;
    std::filesystem::path out_root = "runs";
    unsigned threads = 1;
    bool print_summary = true;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 validation/domain error, 2 numeric failure
    std::filesystem::path dir;  // empty on failure (partial outputs are removed)
    std::vector<std::string> outputs;  // relative to dir
    std::vector<std::string> flags;
    std::vector<std::string> summary;  // lines of the summary table
    std::string error;
};

RunResult run(const RunOptions& o);

}  // namespace qhlab
