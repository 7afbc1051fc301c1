#include "msd/report.hpp"

#include <sstream>

namespace msd {

using nlohmann::json;

json ReportEnvelope::to_json() const {
    json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["config_echo"] = config_echo;
    j["results"] = results;
    j["warnings"] = warnings;
    return j;
}

namespace {

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
        }
    } else if (j.is_array()) {
        int idx = 0;
        for (const auto& value : j) {
            flatten(value, prefix + "[" + std::to_string(idx++) + "]", out);
        }
    } else {
        out << prefix << ',' << j.dump() << '\n';
    }
}

bool write_table(const json& rows, std::ostringstream& out) {
    if (!rows.is_array() || rows.empty() || !rows.front().is_object()) return false;
    std::vector<std::string> columns;
    for (const auto& [key, value] : rows.front().items()) {
        (void)value;
        columns.push_back(key);
    }
    for (size_t i = 0; i < columns.size(); ++i) {
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
    for (const auto& row : rows) {
        for (size_t i = 0; i < columns.size(); ++i) {
            out << (row.contains(columns[i]) ? row[columns[i]].dump() : "");
            out << (i + 1 < columns.size() ? "," : "\n");
        }
    }
    return true;
}

}  // namespace

std::string report_to_csv(const ReportEnvelope& report) {
    std::ostringstream out;
    if (report.results.contains("rows") && write_table(report.results["rows"], out)) {
        return out.str();
    }
    flatten(report.results, "", out);
    return out.str();
}

}  // namespace msd
