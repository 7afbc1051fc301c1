#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace msd {

inline constexpr const char* kToolVersion = "0.1.0";

/// Envelope every CLI command emits: tool version, the subcommand, the full
/// effective configuration, the command-specific payload, and any warnings.
struct ReportEnvelope {
    std::string command;
    nlohmann::json config_echo;
    nlohmann::json results;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

/// Flatten a report into CSV. Tabular payloads (arrays of uniform objects
/// under a "rows" key) become one table; everything else becomes key,value
/// lines.
std::string report_to_csv(const ReportEnvelope& report);

}  // namespace msd
