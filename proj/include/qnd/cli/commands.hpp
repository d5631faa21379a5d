#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qnd/cli/run_document.hpp"

namespace qnd::cli {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_parse = 2,
    exit_geometry = 3,
    exit_validation = 4,
};

/// Command-line overrides shared by the document-driven commands.
struct Overrides {
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<int> points_per_stage;
    std::optional<std::string> output;
    std::optional<int> precision;
    std::optional<CouplingParams> coupling;
};

inline constexpr int default_precision = 12;
inline constexpr int default_points_per_stage = 5;
/// Environment variable supplying the default Monte Carlo seed.
inline constexpr const char* seed_environment_variable = "QND_SEED";

/// Each command writes CSV to `csv` and a short human-readable summary to
/// `log`, and throws DocumentError / GeometryError / ValidationError on bad
/// input. run_cli() maps those to exit codes.
void cmd_intensity(const RunDocument& doc, std::ostream& csv, std::ostream& log);
void cmd_scan(const RunDocument& doc, std::ostream& csv, std::ostream& log);
void cmd_pattern(const RunDocument& doc, std::ostream& csv, std::ostream& log);
void cmd_minimum(double alpha, ModeKind probe, std::ostream& csv, std::ostream& log);

/// Apply command-line overrides (and the seed environment variable) to a document.
RunDocument apply_overrides(RunDocument doc, const Overrides& overrides);

/// Parse "p/q" or a decimal.
double parse_ratio(const std::string& text);

/// Parse "d0=..,Ep=..,hbar=..,gs=..,detuning=..,kappa=.." (missing keys keep defaults).
CouplingParams parse_coupling_flag(const std::string& text);

/// Entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qnd::cli
