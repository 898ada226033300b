// commands.hpp — the scatter / current / design / figure subcommands.

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace nrdot::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;

struct CommandOptions {
    int threads{1};
};

struct SweepRow {
    double x{0.0};
    std::vector<double> values;
    std::string status{"ok"};
};

struct SweepTable {
    std::string x_name;
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;

    [[nodiscard]] bool converged() const;
};

[[nodiscard]] std::vector<double> sweep_grid(const SweepBlock& sweep);

// Columns |S11|², |S12|², |S21|², |S22|² of the primary block; singular rows carry NaN.
[[nodiscard]] SweepTable scatter_table(const RunConfig& cfg, const CommandOptions& opts);

// Columns J_L, J_R, J_aux, err. Throws ConfigError when the model cannot provide the
// requested transport path.
[[nodiscard]] SweepTable current_table(const RunConfig& cfg, const CommandOptions& opts);

// '#'-prefixed provenance block (command plus resolved config), header row, data rows.
void write_csv(std::ostream& out, const std::string& command, const RunConfig& cfg, const SweepTable& table);

// Each returns an exit code (kExitOk or kExitNonConvergence); ConfigError propagates.
int cmd_scatter(const RunConfig& cfg, std::ostream& out, const CommandOptions& opts);
int cmd_current(const RunConfig& cfg, std::ostream& out, const CommandOptions& opts);
int cmd_design(const RunConfig& cfg, std::ostream& out);

[[nodiscard]] const std::vector<std::string>& figure_ids();
// Writes <dir>/<id>.csv (fig11: fig11_JL.csv and fig11_JR.csv). Unknown id → ConfigError.
int cmd_figure(const std::string& id, const std::filesystem::path& dir, const CommandOptions& opts,
               double rel_tol_override = 0.0);

}  // namespace nrdot::app
