#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shapeci/regression.hpp"
#include "shapeci/rkd.hpp"
#include "shapeci/sim.hpp"

namespace shapeci::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kInfeasible = 3,
    kNumericalFailure = 4,
    kConfigError = 5,
};

/// `key = value` lines; '#' starts a comment line. Duplicate keys and
/// lines without '=' are ConfigErrors.
std::map<std::string, std::string> parse_key_values(std::istream& in);

struct AnalyzeConfig {
    RkdConfig rkd;
    std::string schedule_kind = "piecewise"; ///< "piecewise" or "ceiling"
    double slope = 0.0;                      ///< ceiling schedule
    double ceiling = 0.0;                    ///< ceiling schedule
    double slope_left = 0.0;                 ///< piecewise schedule
    double slope_right = 0.0;                ///< piecewise schedule
    double kink = 0.0;                       ///< piecewise schedule
    std::string format = "json";
    std::size_t band_points = 0;
    std::string band_output;
    std::string input;
    std::string output;

    KinkSchedule schedule() const;
    /// Effective configuration as ordered key/value text (output path excluded).
    std::vector<std::pair<std::string, std::string>> effective() const;
};

struct SimulateConfig {
    SimDesign design;
    std::vector<std::size_t> k_values{4};
    std::string output;

    std::vector<std::pair<std::string, std::string>> effective() const;
};

/// Strict parsers: unknown keys, malformed values and inconsistent settings
/// raise ConfigError.
AnalyzeConfig parse_analyze_config(std::istream& in);
SimulateConfig parse_simulate_config(std::istream& in);

/// CSV with header `x,y`; throws InputError naming the line.
Dataset read_xy_csv(std::istream& in);

/// Serialized analyze report (JSON or CSV per cfg.format).
std::string render_analyze_report(const AnalyzeConfig& cfg, const std::vector<RkdReport>& reports);

int cmd_analyze(const std::string& config_path, const std::optional<std::string>& data_path,
                const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_path, std::ostream& out,
                 std::ostream& err);
int cmd_lp_solve(const std::string& problem_path, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace shapeci::cli
