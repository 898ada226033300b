// Figure datasets with their parameters baked in. Each preset is plain config text so
// the CSV header alone reproduces the run through `nrdot current|scatter --config`.

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"

namespace nrdot::app {

namespace {

// Γ is the unit throughout; "auto" resolves directionality and matching.
const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> p = {
        {"fig3a", R"([model]
kind = three_dot
eps_d = 1
kappa = 100
gamma = 1
[sweep]
kind = g_abs
start = 0
stop = 3
points = 301
omega = 1
)"},
        {"fig3b", R"([model]
kind = three_dot
eps_d = 1
kappa = 100
gamma = 1
[sweep]
kind = omega
start = -4
stop = 6
points = 501
)"},
        {"fig5a", R"([model]
kind = four_dot
eps_d = 1
kappa = 10
delta = 0
gamma = 1
[sweep]
kind = omega
start = -4
stop = 6
points = 501
)"},
        {"fig5b", R"([model]
kind = four_dot
eps_d = 1
kappa = 10
delta = 5
gamma = 1
[sweep]
kind = omega
start = -4
stop = 6
points = 501
)"},
        {"fig6a", R"([model]
kind = three_dot
eps_d = 1
kappa = 100
[leads]
T = 0.5
mu_a = -50
[sweep]
kind = voltage
start = -40
stop = 40
points = 81
)"},
        {"fig6b", R"([model]
kind = three_dot
eps_d = 20
kappa = 100
[leads]
T = 0.5
mu_a = -50
[sweep]
kind = voltage
start = -40
stop = 40
points = 81
)"},
        {"fig8", R"([model]
kind = three_dot
eps_d = 1
lambda = 1
kappa = 100
g_mode = explicit
g_abs = 1
phi = 3.141592653589793
gamma_mode = explicit
gamma = 1
transport = lb
[leads]
T = 0.5
mu_a = -50
[sweep]
kind = voltage
start = -40
stop = 40
points = 81
)"},
        {"fig9a", R"([model]
kind = four_dot
eps_d = 1
kappa = 30
delta = 30
[leads]
T = 1
mu_u = -60
mu_d = -60
[sweep]
kind = voltage
start = -40
stop = 40
points = 81
)"},
        {"fig9b", R"([model]
kind = four_dot
eps_d = 20
kappa = 30
delta = 30
[leads]
T = 1
mu_u = -60
mu_d = -60
[sweep]
kind = voltage
start = -40
stop = 40
points = 81
)"},
        {"fig10", R"([model]
kind = four_dot
eps_d = 1
lambda = 2
kappa = 30
delta = 30
g_mode = explicit
phi = 3.141592653589793
gamma_mode = explicit
gamma = 1
transport = lb
[leads]
T = 1
mu_u = -60
mu_d = -60
[sweep]
kind = voltage
start = -40
stop = 40
points = 81
)"},
    };
    return p;
}

// fig7: α = λ²/(κΓ) ∈ {1, 4, 8} with κ = 100Γ, directionality kept, matching relaxed.
std::string fig7_config(double alpha) {
    return fmt::format(R"([model]
kind = three_dot
eps_d = 1
kappa = 100
lambda = {:.17g}
gamma_mode = explicit
gamma = 1
[leads]
T = 0.5
mu_a = -50
[sweep]
kind = voltage
start = -40
stop = 40
points = 81
)",
                       std::sqrt(100.0 * alpha));
}

// fig11: ε̃_d = Γ, ω_c = 10Γ, fig6a leads.
std::string fig11_config(double nu) {
    return fmt::format(R"([model]
kind = three_dot
eps_d = 1
kappa = 100
[leads]
T = 0.5
mu_a = -50
[phonon]
nu = {:.17g}
omega_c = 10
eps_d = renormalized
[sweep]
kind = voltage
start = -40
stop = 40
points = 41
)",
                       nu);
}

RunConfig load(const std::string& text, double rel_tol) {
    RunConfig cfg = parse_config(text);
    if (rel_tol > 0.0) cfg.quadrature.rel_tol = rel_tol;
    return cfg;
}

std::ofstream open(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("--out", 0, "cannot write " + path.string());
    return f;
}

// Side-by-side columns from several runs sharing one sweep axis.
int write_wide(const std::filesystem::path& path, const std::string& title, const std::vector<RunConfig>& cfgs,
               const std::vector<std::string>& labels, const std::vector<SweepTable>& tables,
               const std::vector<int>& columns) {
    auto f = open(path);
    f << "# nrdot figure " << title << "\n";
    for (std::size_t k = 0; k < cfgs.size(); ++k) {
        f << "# --- run " << labels[k] << "\n";
        std::istringstream ini(to_ini(cfgs[k]));
        for (std::string line; std::getline(ini, line);) f << (line.empty() ? "#" : "# " + line) << "\n";
    }
    f << tables.front().x_name;
    for (std::size_t k = 0; k < tables.size(); ++k)
        for (int c : columns) f << "," << tables[k].columns[static_cast<std::size_t>(c)] << "_" << labels[k];
    f << ",status\n";
    bool ok = true;
    for (std::size_t i = 0; i < tables.front().rows.size(); ++i) {
        f << fmt::format("{:.12g}", tables.front().rows[i].x);
        std::string status = "ok";
        for (const auto& t : tables) {
            for (int c : columns) f << "," << fmt::format("{:.12g}", t.rows[i].values[static_cast<std::size_t>(c)]);
            if (t.rows[i].status != "ok") status = t.rows[i].status;
        }
        if (status != "ok") ok = false;
        f << "," << status << "\n";
    }
    return ok ? kExitOk : kExitNonConvergence;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids = {"fig3a", "fig3b", "fig5a", "fig5b", "fig6a", "fig6b",
                                                 "fig7",  "fig8",  "fig9a", "fig9b", "fig10", "fig11"};
    return ids;
}

int cmd_figure(const std::string& id, const std::filesystem::path& dir, const CommandOptions& opts,
               double rel_tol_override) {
    std::filesystem::create_directories(dir);

    if (id == "fig7") {
        std::vector<RunConfig> cfgs;
        std::vector<SweepTable> tables;
        const std::vector<std::string> labels = {"alpha1", "alpha4", "alpha8"};
        for (double alpha : {1.0, 4.0, 8.0}) {
            cfgs.push_back(load(fig7_config(alpha), rel_tol_override));
            tables.push_back(current_table(cfgs.back(), opts));
        }
        return write_wide(dir / "fig7.csv", "fig7", cfgs, labels, tables, {0, 1});
    }

    if (id == "fig11") {
        std::vector<RunConfig> cfgs;
        std::vector<SweepTable> tables;
        std::vector<std::string> labels;
        for (double nu : {0.0, 0.08, 0.2, 0.4}) {
            cfgs.push_back(load(fig11_config(nu), rel_tol_override));
            tables.push_back(current_table(cfgs.back(), opts));
            labels.push_back(fmt::format("nu{:g}", nu));
        }
        const int a = write_wide(dir / "fig11_JL.csv", "fig11 (J_L)", cfgs, labels, tables, {0});
        const int b = write_wide(dir / "fig11_JR.csv", "fig11 (J_R)", cfgs, labels, tables, {1});
        return std::max(a, b);
    }

    const auto it = presets().find(id);
    if (it == presets().end()) throw ConfigError("figure", 0, "unknown figure id '" + id + "'");
    const RunConfig cfg = load(it->second, rel_tol_override);
    auto f = open(dir / (id + ".csv"));
    if (cfg.sweep.kind == SweepKind::omega || cfg.sweep.kind == SweepKind::g_abs) return cmd_scatter(cfg, f, opts);
    return cmd_current(cfg, f, opts);
}

}  // namespace nrdot::app
