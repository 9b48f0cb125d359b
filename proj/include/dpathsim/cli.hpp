#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace dpathsim::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

inline constexpr const char* kSeedEnvVar = "DPATHSIM_SEED";

// Entry point behind the `dpathsim` binary. Subcommands:
//   ecdf <trace> -o <csv>
//   models synth -o <dir>
//   simulate <config|config-dir> -o <dir> [--seed N]
//   compare <dirA> <dirB> -o <csv>
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_ecdf(const std::filesystem::path& trace, const std::filesystem::path& out_csv, std::ostream& out,
             std::ostream& err);

int cmd_models_synth(const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

// Seed precedence: `seed_flag`, then $DPATHSIM_SEED, then the config file.
int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                 std::optional<std::uint64_t> seed_flag, std::ostream& out, std::ostream& err);

int cmd_compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err);

}  // namespace dpathsim::cli
