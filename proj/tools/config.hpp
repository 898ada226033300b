// config.hpp — INI-style run configuration for the nrdot tool.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nrdot/circuit.hpp>
#include <nrdot/quadrature.hpp>
#include <nrdot/scattering.hpp>
#include <nrdot/transport.hpp>

namespace nrdot::app {

// Carries the offending key path ("sweep.start") and its 1-based line (0 when not from a line).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, int line, const std::string& message);
    [[nodiscard]] const std::string& key() const noexcept { return key_; }
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

enum class ModelKind { three_dot, four_dot, custom };
enum class SweepKind { omega, voltage, nu, g_abs };
enum class ScatterPath { closed_form, generic };
enum class TransportKind { giom, lb };

struct PhononBlock {
    double nu{0.0};
    double omega_c{10.0};
    bool renormalized{true};  // eps_d is ε̃_d rather than the bare on-site energy
};

struct SweepBlock {
    SweepKind kind{SweepKind::voltage};
    double start{-40.0};
    double stop{40.0};
    int points{81};
    double voltage{20.0};  // fixed bias for nu sweeps
    std::optional<double> omega;  // fixed frequency for g_abs sweeps (default ε_d)
};

struct RunConfig {
    ModelKind model{ModelKind::three_dot};

    double eps_d{1.0};
    double lambda{10.0};
    double lambda1{1.0};
    double lambda2{1.0};
    double kappa{100.0};
    double delta1{0.0};
    double delta2{0.0};

    bool g_auto{true};
    double g_abs{0.0};
    double phi{0.0};  // arg g (three-dot) or loop phase (four-dot)
    Direction direction{Direction::forward};

    bool gamma_auto{true};
    double gamma{1.0};

    ScatterPath path{ScatterPath::closed_form};
    TransportKind transport{TransportKind::giom};
    FourDotCoefficients four_dot_form{FourDotCoefficients::halved};  // giom four-dot J_R only

    double temperature{0.5};
    std::map<std::string, double> mu;  // fixed chemical potentials by lead name (a, u, d or dot label)

    std::optional<PhononBlock> phonon;
    SweepBlock sweep;
    QuadratureConfig quadrature;
    std::string output;

    CircuitSpec custom;

    // Human-readable lines describing how auto modes were resolved.
    std::vector<std::string> notes;
};

// Parses and resolves a config document; auto modes are solved here so that every
// downstream consumer sees explicit values. Throws ConfigError.
[[nodiscard]] RunConfig parse_config(const std::string& text);

// Applies the directionality / matching solvers to cfg in place. Throws ConfigError.
void resolve(RunConfig& cfg);

// Serialises the resolved configuration back to INI text; parse_config(to_ini(c)) reproduces c.
[[nodiscard]] std::string to_ini(const RunConfig& cfg);

[[nodiscard]] cplx three_dot_g(const RunConfig& cfg);
[[nodiscard]] ThreeDotParams three_dot_params(const RunConfig& cfg);
[[nodiscard]] FourDotParams four_dot_params(const RunConfig& cfg);
[[nodiscard]] CircuitSpec circuit_of(const RunConfig& cfg);

}  // namespace nrdot::app
