// circuit.hpp — declarative quantum-dot circuits and their linear Heisenberg-Langevin drift model
//
// Energies are dimensionless, measured in units of the primary-lead damping Γ
// (ħ = e = k_B = 1, Fermi energy at zero).

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nrdot {

using cplx = std::complex<double>;

enum class DotRole { primary, auxiliary };

struct DotSpec {
    std::string label;
    DotRole role{DotRole::primary};
    double onsite{0.0};        // ε_n for primary dots, δ_m for auxiliary dots
    double lead_damping{1.0};  // Γ for primary dots, κ for auxiliary dots
};

// Sets H[from][to] = value and H[to][from] = conj(value).
struct Coupling {
    std::string from;
    std::string to;
    cplx value;
};

struct CircuitSpec {
    std::vector<DotSpec> dots;
    std::vector<Coupling> couplings;
};

struct ValidationReport {
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] std::string to_string() const;
};

class InvalidCircuit : public std::invalid_argument {
public:
    explicit InvalidCircuit(ValidationReport report);
    [[nodiscard]] const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

// Violation messages start with one of: "nonpositive damping", "duplicate label",
// "dangling endpoint", "self-coupling", "non-Hermitian coupling", "non-finite value",
// "empty circuit".
[[nodiscard]] ValidationReport validate_circuit(const CircuitSpec& spec);

// Indices into spec.dots in port order: primary dots in declaration order, then auxiliaries.
[[nodiscard]] std::vector<std::size_t> port_order(const CircuitSpec& spec);

// Hermitian coherent Hamiltonian in port order. Throws InvalidCircuit.
[[nodiscard]] Eigen::MatrixXcd coherent_hamiltonian(const CircuitSpec& spec);

// dO/dt = M·O + C·F_in with M = −iH − K and C = −i√(2π)·I.
struct DriftModel {
    Eigen::MatrixXcd drift;
    Eigen::MatrixXcd input;
    Eigen::VectorXd damping;
    Eigen::MatrixXcd hamiltonian;
    std::vector<std::string> port_labels;
    std::vector<DotRole> port_roles;

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(port_labels.size()); }
    [[nodiscard]] int primary_count() const noexcept;
    // Throws std::out_of_range for unknown labels.
    [[nodiscard]] int port_index(const std::string& label) const;
};

[[nodiscard]] DriftModel assemble_drift(const CircuitSpec& spec);

// Primary-dot dynamics after quasi-static elimination of the auxiliary dots:
//   dd/dt = drift·d − i√(2π)·d_in + aux_routing·a_in
// Self terms Z_n = −drift(n,n); Φ = −drift(0,1) multiplies d₂ in ḋ₁, Ψ = −drift(1,0).
struct ReducedCircuit {
    Eigen::MatrixXcd drift;
    Eigen::MatrixXcd aux_routing;
    Eigen::VectorXd damping;
    std::vector<std::string> port_labels;
    std::vector<std::string> aux_labels;
    std::vector<std::string> warnings;

    [[nodiscard]] cplx self_term(int n) const { return -drift(n, n); }
    [[nodiscard]] cplx phi() const { return -drift(0, 1); }
    [[nodiscard]] cplx psi() const { return -drift(1, 0); }
};

// Ratio κ / (largest other energy scale) below which adiabatic_reduce warns.
inline constexpr double kAdiabaticWarnRatio = 10.0;

// Throws std::invalid_argument("nothing to eliminate") without auxiliary dots.
[[nodiscard]] ReducedCircuit adiabatic_reduce(const CircuitSpec& spec);

// Three-dot model: primaries d1, d2 with direct coupling g, both tunnel-coupled (λ, real)
// to one auxiliary dot a.
struct ThreeDotParams {
    double eps_d{1.0};
    cplx g{0.0, 1.0};
    double lambda{10.0};
    double kappa{100.0};
    double gamma{1.0};
    double aux_onsite{0.0};
};

// Four-dot model: primaries d1, d2 coupled only through auxiliaries a1 (δ₁) and a2 (δ₂),
// g11 = λ₁, g12 = g22 = λ₂, g21 = λ₁e^{iφ}.
struct FourDotParams {
    double eps_d{1.0};
    double delta1{0.0};
    double delta2{0.0};
    double lambda1{1.0};
    double lambda2{1.0};
    double phi{0.0};
    double kappa{10.0};
    double gamma{1.0};
};

[[nodiscard]] CircuitSpec three_dot_circuit(const ThreeDotParams& p);
[[nodiscard]] CircuitSpec four_dot_circuit(const FourDotParams& p);

}  // namespace nrdot
