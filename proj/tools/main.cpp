#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"

namespace app = nrdot::app;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw app::ConfigError("--config", 0, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"nrdot: nonreciprocal transport in quantum-dot circuits"};
    cli.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    double rel_tol = 0.0;
    std::string figure_id;

    cli.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    cli.add_option("--rel-tol", rel_tol, "Override quadrature.rel_tol")->check(CLI::PositiveNumber);

    auto* scatter = cli.add_subcommand("scatter", "Scattering-matrix sweep (CSV)");
    auto* current = cli.add_subcommand("current", "Current-voltage (or current-nu) sweep (CSV)");
    auto* design = cli.add_subcommand("design", "Directionality and matching report");
    auto* figure = cli.add_subcommand("figure", "Write a figure dataset");
    for (auto* sub : {scatter, current, design}) {
        sub->add_option("--config", config_path, "INI configuration file")->required();
        sub->add_option("--out", out_path, "Output file (default: [output] path, else stdout)");
    }
    figure->add_option("id", figure_id, "Figure id")->required()->check(CLI::IsMember(app::figure_ids()));
    figure->add_option("--out", out_path, "Output directory (default: .)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : app::kExitConfig;
    }

    const app::CommandOptions opts{threads};
    try {
        if (figure->parsed()) return app::cmd_figure(figure_id, out_path.empty() ? "." : out_path, opts, rel_tol);

        app::RunConfig cfg = app::parse_config(read_file(config_path));
        if (rel_tol > 0.0) cfg.quadrature.rel_tol = rel_tol;
        const std::string target = out_path.empty() ? cfg.output : out_path;
        std::ofstream file;
        if (!target.empty()) {
            file.open(target, std::ios::binary);
            if (!file) throw app::ConfigError("--out", 0, "cannot write " + target);
        }
        std::ostream& out = target.empty() ? std::cout : file;

        int code = app::kExitOk;
        if (scatter->parsed()) code = app::cmd_scatter(cfg, out, opts);
        else if (current->parsed()) code = app::cmd_current(cfg, out, opts);
        else code = app::cmd_design(cfg, out);
        out.flush();
        if (code == app::kExitNonConvergence) std::cerr << "warning: quadrature did not converge in some rows\n";
        return code;
    } catch (const app::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return app::kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return app::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
