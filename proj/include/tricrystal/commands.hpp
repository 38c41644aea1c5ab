#ifndef TRICRYSTAL_COMMANDS_HPP
#define TRICRYSTAL_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tricrystal/run_config.hpp"

namespace tricrystal {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitVerification = 3 };

/// Environment variable overriding out.dir.
inline constexpr const char* kOutDirEnv = "TRICRYSTAL_OUT_DIR";

struct SimulateOptions {
    /// Continue each chain from the checkpoint in the output directory.
    bool resume = false;
    /// Stop after this many total sweeps per chain (0: run to completion).
    std::uint64_t stop_at_sweep = 0;
};

std::filesystem::path resolve_out_dir(const RunConfig& cfg);

/// Runs the configured chains and writes samples CSV, checkpoints and
/// summary.json. Returns an ExitCode.
int cmd_simulate(const std::filesystem::path& config, const SimulateOptions& options, std::ostream& out,
                 std::ostream& err);

/// Identity and inequality suites; writes verify_report.json.
int cmd_verify(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Beta (and optional m) grid; writes scan.csv and scan_summary.json.
int cmd_scan(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Names of the samples CSV columns, in order.
const std::vector<std::string>& sample_columns();

/// Lines of `text` with every "# wall_clock=" line removed.
std::string strip_wall_clock(const std::string& text);

}  // namespace tricrystal

#endif  // TRICRYSTAL_COMMANDS_HPP
