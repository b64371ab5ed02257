#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace qam::cli {

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;

/// Runs the qam command line; args exclude the program name. Data goes to
/// files or `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

/// "lo:hi:n" per axis, comma separated; points in row-major order, last axis fastest.
[[nodiscard]] std::vector<std::vector<double>> parse_grid(const std::string& text);

/// Adds tool, version and an ISO-8601 UTC timestamp (SOURCE_DATE_EPOCH when set).
void stamp_report(nlohmann::json& report);
void write_report(const nlohmann::json& report, const std::string& path, std::ostream& out);

}  // namespace qam::cli
