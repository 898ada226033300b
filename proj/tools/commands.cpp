#include "commands.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include <nrdot/phonon.hpp>
#include <nrdot/scattering.hpp>
#include <nrdot/transport.hpp>

namespace nrdot::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates fn(i) for i in [0, n) on up to `threads` workers; results keep index order.
std::vector<SweepRow> parallel_rows(std::size_t n, int threads, const std::function<SweepRow(std::size_t)>& fn) {
    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                rows[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int count = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::array<double, 4> primary_block(const ScatteringMatrix& s) {
    return {std::norm(s(0, 0)), std::norm(s(0, 1)), std::norm(s(1, 0)), std::norm(s(1, 1))};
}

ScatteringMatrix primary_scattering(const RunConfig& cfg, const ThreeDotParams* three, double omega) {
    if (cfg.path == ScatterPath::closed_form) {
        if (three) return three_dot_closed_form(*three, omega);
        if (cfg.model == ModelKind::four_dot) return four_dot_closed_form(four_dot_params(cfg), omega);
    }
    const CircuitSpec spec = three ? three_dot_circuit(*three) : circuit_of(cfg);
    return scattering_matrix(assemble_drift(spec), omega);
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

void check_current_config(const RunConfig& cfg) {
    if (cfg.sweep.kind != SweepKind::voltage && cfg.sweep.kind != SweepKind::nu)
        throw ConfigError("sweep.kind", 0, "current sweeps need kind = voltage or nu");
    if (cfg.phonon) {
        if (cfg.model != ModelKind::three_dot || cfg.transport != TransportKind::giom)
            throw ConfigError("phonon", 0, "phonon currents need model.kind = three_dot and transport = giom");
        if (!cfg.g_auto || cfg.direction != Direction::forward ||
            !near(cfg.lambda * cfg.lambda / cfg.kappa, cfg.gamma))
            throw ConfigError("phonon", 0, "phonon currents need forward directional g and gamma = lambda^2/kappa");
        return;
    }
    if (cfg.transport == TransportKind::lb) return;
    switch (cfg.model) {
        case ModelKind::three_dot:
            if (!cfg.g_auto || cfg.direction != Direction::forward)
                throw ConfigError("model.g_mode", 0,
                                  "giom currents assume the forward directionality condition; use transport = lb");
            break;
        case ModelKind::four_dot:
            if (!cfg.g_auto || cfg.direction != Direction::forward || !near(cfg.lambda1, cfg.lambda2) ||
                !near(cfg.delta1, -cfg.delta2))
                throw ConfigError("model", 0,
                                  "giom four-dot currents need lambda1 = lambda2, delta2 = -delta1 and forward g_mode = auto");
            if (!near(cfg.gamma, four_dot_matched_damping(cfg.lambda1, cfg.lambda2, cfg.delta1, cfg.delta2, cfg.kappa)))
                throw ConfigError("model.gamma", 0, "giom four-dot currents need the matched gamma");
            break;
        case ModelKind::custom:
            throw ConfigError("model.transport", 0, "custom circuits support transport = lb only");
    }
}

LeadState fixed_lead(const RunConfig& cfg, const std::string& name) {
    const auto it = cfg.mu.find(name);
    if (it == cfg.mu.end()) throw ConfigError("leads.mu_" + name, 0, "missing chemical potential");
    return {name, it->second, cfg.temperature};
}

// μ_L = V/2, μ_R = −V/2.
ThreeDotLeads sweep_leads(const RunConfig& cfg, double voltage) {
    return {{"L", 0.5 * voltage, cfg.temperature}, {"R", -0.5 * voltage, cfg.temperature}, fixed_lead(cfg, "a")};
}

PolaronParams polaron_params(const RunConfig& cfg, const OhmicBath& bath) {
    return cfg.phonon->renormalized ? PolaronParams::from_renormalized(cfg.eps_d, bath, cfg.lambda, cfg.kappa, cfg.gamma)
                                    : PolaronParams::from_bare(cfg.eps_d, bath, cfg.lambda, cfg.kappa, cfg.gamma);
}

SweepRow current_row(const RunConfig& cfg, double x, double voltage, const CorrelationGrid* grid) {
    const LeadState left{"L", 0.5 * voltage, cfg.temperature};
    const LeadState right{"R", -0.5 * voltage, cfg.temperature};
    SweepRow row;
    row.x = x;
    auto from = [&](const CurrentResult& r) {
        row.values = {r.left, r.right, r.aux, r.error};
        if (!r.converged) row.status = "nonconverged";
    };
    auto from_lb = [&](const LbCurrentResult& r, const std::string& l, const std::string& rr) {
        const double jl = r.at(l), jr = r.at(rr);
        row.values = {jl, jr, r.sum() - jl - jr, r.error};
        if (!r.converged) row.status = "nonconverged";
    };

    if (cfg.phonon) {
        const OhmicBath bath{cfg.phonon->nu, cfg.phonon->omega_c, cfg.temperature};
        const auto p = polaron_params(cfg, bath);
        const ThreeDotLeads leads = sweep_leads(cfg, voltage);
        from(grid ? polaron_currents(p, *grid, leads, cfg.quadrature) : polaron_currents(p, bath, leads, cfg.quadrature));
        return row;
    }

    if (cfg.model == ModelKind::custom) {
        const DriftModel dm = assemble_drift(cfg.custom);
        std::map<std::string, LeadState> leads;
        for (int i = 0; i < dm.dim(); ++i) {
            const auto& label = dm.port_labels[static_cast<std::size_t>(i)];
            if (i == 0) leads[label] = {label, left.mu, cfg.temperature};
            else if (i == 1) leads[label] = {label, right.mu, cfg.temperature};
            else leads[label] = fixed_lead(cfg, label);
        }
        from_lb(lb_current(cfg.custom, leads, cfg.quadrature), dm.port_labels[0], dm.port_labels[1]);
        return row;
    }

    if (cfg.model == ModelKind::three_dot) {
        const LeadState aux = fixed_lead(cfg, "a");
        if (cfg.transport == TransportKind::lb) {
            from_lb(lb_current(circuit_of(cfg), {{"d1", left}, {"d2", right}, {"a", aux}}, cfg.quadrature), "d1", "d2");
        } else {
            from(current_three_dot({cfg.eps_d, cfg.lambda, cfg.kappa, cfg.gamma}, {left, right, aux}, cfg.quadrature));
        }
        return row;
    }

    const LeadState up = fixed_lead(cfg, "u"), down = fixed_lead(cfg, "d");
    if (cfg.transport == TransportKind::lb) {
        from_lb(lb_current(circuit_of(cfg), {{"d1", left}, {"d2", right}, {"a1", up}, {"a2", down}}, cfg.quadrature),
                "d1", "d2");
    } else {
        from(current_four_dot({cfg.eps_d, cfg.lambda1, cfg.kappa, cfg.delta1, cfg.gamma, cfg.four_dot_form},
                              {left, right, up, down}, cfg.quadrature));
    }
    return row;
}

std::string num(double v) { return fmt::format("{:.12g}", v); }

}  // namespace

bool SweepTable::converged() const {
    for (const auto& r : rows)
        if (r.status == "nonconverged") return false;
    return true;
}

std::vector<double> sweep_grid(const SweepBlock& sweep) {
    std::vector<double> xs(static_cast<std::size_t>(sweep.points));
    for (int i = 0; i < sweep.points; ++i)
        xs[static_cast<std::size_t>(i)] =
            i + 1 == sweep.points ? sweep.stop : sweep.start + (sweep.stop - sweep.start) * i / (sweep.points - 1);
    return xs;
}

SweepTable scatter_table(const RunConfig& cfg, const CommandOptions& opts) {
    if (cfg.sweep.kind != SweepKind::omega && cfg.sweep.kind != SweepKind::g_abs)
        throw ConfigError("sweep.kind", 0, "scatter sweeps need kind = omega or g_abs");
    SweepTable t;
    t.x_name = cfg.sweep.kind == SweepKind::omega ? "omega" : "g_abs_over_lambda2_kappa";
    t.columns = {"abs_S11_sq", "abs_S12_sq", "abs_S21_sq", "abs_S22_sq"};
    const auto xs = sweep_grid(cfg.sweep);
    t.rows = parallel_rows(xs.size(), opts.threads, [&](std::size_t i) {
        SweepRow row;
        row.x = xs[i];
        double omega = xs[i];
        std::optional<ThreeDotParams> three;
        if (cfg.model == ModelKind::three_dot) three = three_dot_params(cfg);
        if (cfg.sweep.kind == SweepKind::g_abs) {
            // arg(g/(λ²/κ)) = π/2, |g| in units of λ²/κ.
            three->g = cplx(0.0, xs[i] * cfg.lambda * cfg.lambda / cfg.kappa);
            omega = cfg.sweep.omega.value_or(cfg.eps_d);
        }
        try {
            const auto b = primary_block(primary_scattering(cfg, three ? &*three : nullptr, omega));
            row.values.assign(b.begin(), b.end());
        } catch (const SingularResolvent&) {
            row.values.assign(4, kNaN);
            row.status = "singular";
        }
        return row;
    });
    return t;
}

SweepTable current_table(const RunConfig& cfg, const CommandOptions& opts) {
    check_current_config(cfg);
    SweepTable t;
    t.x_name = cfg.sweep.kind == SweepKind::voltage ? "V" : "nu";
    t.columns = {"J_L", "J_R", "J_aux", "err"};
    const auto xs = sweep_grid(cfg.sweep);

    std::optional<CorrelationGrid> grid;
    if (cfg.phonon && cfg.sweep.kind == SweepKind::voltage) {
        // One grid for the whole sweep, fine enough for its widest bias.
        const OhmicBath bath{cfg.phonon->nu, cfg.phonon->omega_c, cfg.temperature};
        const auto p = polaron_params(cfg, bath);
        const double tau_max = default_tau_max(cfg.gamma);
        int nodes = kDefaultCorrelationNodes;
        for (double v : {cfg.sweep.start, cfg.sweep.stop})
            nodes = std::max(nodes, correlation_nodes_for(p, sweep_leads(cfg, v), tau_max, cfg.quadrature));
        grid = correlation_B(bath, tau_max, nodes);
    }

    t.rows = parallel_rows(xs.size(), opts.threads, [&](std::size_t i) {
        if (cfg.sweep.kind == SweepKind::voltage) return current_row(cfg, xs[i], xs[i], grid ? &*grid : nullptr);
        RunConfig local = cfg;
        local.phonon->nu = xs[i];
        return current_row(local, xs[i], cfg.sweep.voltage, nullptr);
    });
    return t;
}

void write_csv(std::ostream& out, const std::string& command, const RunConfig& cfg, const SweepTable& table) {
    out << "# nrdot " << command << "\n";
    for (const auto& note : cfg.notes) out << "# note: " << note << "\n";
    std::istringstream ini(to_ini(cfg));
    for (std::string line; std::getline(ini, line);) out << (line.empty() ? "#" : "# " + line) << "\n";
    out << table.x_name;
    for (const auto& c : table.columns) out << "," << c;
    out << ",status\n";
    for (const auto& row : table.rows) {
        out << num(row.x);
        for (double v : row.values) out << "," << num(v);
        out << "," << row.status << "\n";
    }
}

int cmd_scatter(const RunConfig& cfg, std::ostream& out, const CommandOptions& opts) {
    write_csv(out, "scatter", cfg, scatter_table(cfg, opts));
    return kExitOk;
}

int cmd_current(const RunConfig& cfg, std::ostream& out, const CommandOptions& opts) {
    const auto table = current_table(cfg, opts);
    write_csv(out, "current", cfg, table);
    return table.converged() ? kExitOk : kExitNonConvergence;
}

int cmd_design(const RunConfig& cfg, std::ostream& out) {
    if (cfg.model == ModelKind::custom) throw ConfigError("model.kind", 0, "design needs three_dot or four_dot");
    const char* dir = cfg.direction == Direction::forward ? "forward" : "reverse";
    out << "# nrdot design\n";
    for (const auto& note : cfg.notes) out << "# note: " << note << "\n";

    if (cfg.model == ModelKind::three_dot) {
        const double c = cfg.lambda * cfg.lambda / cfg.kappa;
        const auto p = three_dot_params(cfg);
        const auto s = three_dot_closed_form(p, cfg.eps_d);
        auto reverse = p;
        reverse.g = std::conj(three_dot_directional_coupling(cfg.lambda, cfg.kappa, cfg.direction));
        const auto sr = three_dot_closed_form(reverse, cfg.eps_d);
        out << "model                 three_dot\n";
        out << "lambda^2/kappa        " << num(c) << "\n";
        out << "alpha                 " << num(c / cfg.gamma) << "\n";
        out << "directional g (" << dir << ")  " << num(p.g.real()) << (p.g.imag() < 0 ? " - " : " + ")
            << num(std::abs(p.g.imag())) << "i\n";
        out << "reverse-direction g   " << num(reverse.g.real()) << (reverse.g.imag() < 0 ? " - " : " + ")
            << num(std::abs(reverse.g.imag())) << "i\n";
        out << "matched gamma         " << num(three_dot_matched_damping(cfg.lambda, cfg.kappa)) << "\n";
        out << "gamma (in use)        " << num(cfg.gamma) << "\n";
        out << "|S21(eps_d)|^2        " << num(std::norm(s(1, 0))) << "\n";
        out << "|S12(eps_d)|^2        " << num(std::norm(s(0, 1))) << "\n";
        out << "|S11(eps_d)|^2        " << num(std::norm(s(0, 0))) << "\n";
        out << "reversed: |S21|^2 = " << num(std::norm(sr(1, 0))) << ", |S12|^2 = " << num(std::norm(sr(0, 1)))
            << " (S12 and S21 swap roles)\n";
        return kExitOk;
    }

    const auto p = four_dot_params(cfg);
    const auto eff = four_dot_effective(p);
    const auto s = four_dot_closed_form(p, eff.detuned_onsite);
    auto reverse = p;
    const Direction other = cfg.direction == Direction::forward ? Direction::reverse : Direction::forward;
    out << "model                 four_dot\n";
    try {
        reverse.phi = four_dot_directional_phase(p.lambda1, p.lambda2, p.delta1, p.delta2, p.kappa, other);
    } catch (const NoPhaseSolution& e) {
        throw ConfigError("model.phi", 0, e.what());
    }
    const auto sr = four_dot_closed_form(reverse, eff.detuned_onsite);
    out << "loop phase (" << dir << ")   " << num(p.phi) << "\n";
    out << "reverse-direction phi " << num(reverse.phi) << "\n";
    if (near(p.lambda1, p.lambda2) && near(p.delta1, -p.delta2))
        out << "pi + 2*atan(delta/kappa) = " << num(std::numbers::pi + 2.0 * std::atan(p.delta1 / p.kappa))
            << " (same angle mod 2pi for the forward solution)\n";
    out << "matched gamma         "
        << num(four_dot_matched_damping(p.lambda1, p.lambda2, p.delta1, p.delta2, p.kappa)) << "\n";
    out << "gamma (in use)        " << num(p.gamma) << "\n";
    out << "Delta (resonance)     " << num(eff.detuned_onsite) << "\n";
    out << "|S21(Delta)|^2        " << num(std::norm(s(1, 0))) << "\n";
    out << "|S12(Delta)|^2        " << num(std::norm(s(0, 1))) << "\n";
    out << "|S11(Delta)|^2        " << num(std::norm(s(0, 0))) << "\n";
    if (near(p.lambda1, p.lambda2) && near(p.delta1, -p.delta2))
        out << "delta^2/(kappa^2+delta^2) = " << num(p.delta1 * p.delta1 / (p.kappa * p.kappa + p.delta1 * p.delta1))
            << "\n";
    out << "reversed: |S21|^2 = " << num(std::norm(sr(1, 0))) << ", |S12|^2 = " << num(std::norm(sr(0, 1)))
        << " (S12 and S21 swap roles)\n";
    return kExitOk;
}

}  // namespace nrdot::app
