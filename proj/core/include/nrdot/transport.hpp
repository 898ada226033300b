// transport.hpp — steady-state charge currents: closed-form integrals for the optimal
// three- and four-dot circuits, and Landauer-Büttiker currents for arbitrary circuits.
//
// Sign convention: a positive current flows out of its lead into the dots.

#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nrdot/circuit.hpp"
#include "nrdot/leads.hpp"
#include "nrdot/quadrature.hpp"

namespace nrdot {

// One integral of a current expression, already carrying its sign.
struct CurrentTerm {
    std::string name;
    char lead;  // 'L' or 'R'
    double value;
};

struct CurrentResult {
    double left{0.0};
    double right{0.0};
    double aux{0.0};  // −J_L − J_R
    std::vector<CurrentTerm> breakdown;
    double error{0.0};
    bool converged{true};
    std::vector<std::string> warnings;
};

struct ThreeDotCurrentParams {
    double eps_d{1.0};
    double lambda{10.0};
    double kappa{100.0};
    double gamma{1.0};

    [[nodiscard]] double alpha() const { return lambda * lambda / (kappa * gamma); }
};

struct ThreeDotLeads {
    LeadState left{"L", 0.0, 1.0};
    LeadState right{"R", 0.0, 1.0};
    LeadState aux{"a", -50.0, 1.0};
};

// Directional three-dot circuit (g = iλ²/κ) at arbitrary α = λ²/(κΓ):
//   J_L = ∫ A·[n_L − n_a],  J_R = ∫ A·[n_R − n_a] − ∫ A²·[n_L − n_a]
// with A(ε) = 4Γ²α/(Γ²(1+α)² + (ε_d−ε)²) and ∫ ≡ ∫dε/2π.
[[nodiscard]] CurrentResult current_three_dot(const ThreeDotCurrentParams& p, const ThreeDotLeads& leads,
                                              const QuadratureConfig& cfg = {});

// halved: the commonly quoted closed form, whose s²·L2sq and cross terms carry half weight.
// lb_consistent: those terms doubled, which is what the matched scattering matrix
// (|S₂₁(Δ)|² = δ²/(κ²+δ²)) and lb_current give.
enum class FourDotCoefficients { halved, lb_consistent };

// λ₁ = λ₂ = λ, δ₁ = −δ₂ = δ, directional phase and Γ = 2λ²κ/(κ²+δ²) imposed.
//   J_L = ∫ L2·[n_L − n_u] + ∫ L2·[n_L − n_d]
//   J_R = ∫ L2·[n_R − n_u] + ∫ L2·[n_R − n_d] − c·s²∫ L2sq·[n_L − n_u] − c·s²∫ L2sq·[n_L − n_d]
//         − c·(4Γ³δκ/(κ²+δ²))∫ x/(4Γ² + x²)²·[n_u − n_d]
// with x = ε_d − ε, L2 = 2Γ²/(4Γ²+x²), L2sq = 4Γ⁴/(4Γ²+x²)², s² = δ²/(κ²+δ²), c = 1 (halved) or 2.
struct FourDotCurrentParams {
    double eps_d{1.0};
    double lambda{1.0};
    double kappa{30.0};
    double delta{30.0};
    double gamma{1.0};
    FourDotCoefficients coefficients{FourDotCoefficients::halved};

    [[nodiscard]] double matched_gamma() const { return 2.0 * lambda * lambda * kappa / (kappa * kappa + delta * delta); }
};

struct FourDotLeads {
    LeadState left{"L", 0.0, 1.0};
    LeadState right{"R", 0.0, 1.0};
    LeadState up{"u", -60.0, 1.0};
    LeadState down{"d", -60.0, 1.0};
};

// Throws std::invalid_argument when Γ is not matched within 1e−9 relative.
[[nodiscard]] CurrentResult current_four_dot(const FourDotCurrentParams& p, const FourDotLeads& leads,
                                             const QuadratureConfig& cfg = {});

// T_vv'(ε) = K_v·K_v'·|G^r_vv'(ε)|², G^r = (ε − H + iK)⁻¹, in port order. T_vv' carries v' → v.
[[nodiscard]] Eigen::MatrixXd lb_transmissions(const CircuitSpec& spec, double energy);

struct LbCurrentResult {
    std::vector<std::string> labels;  // port order
    std::vector<double> currents;
    double error{0.0};
    bool converged{true};

    [[nodiscard]] double at(const std::string& label) const;
    [[nodiscard]] double sum() const;
};

// J_v = 4·Σ_v' ∫dε/2π [T_v'v·n_v − T_vv'·n_v'], one lead per dot keyed by dot label.
[[nodiscard]] LbCurrentResult lb_current(const CircuitSpec& spec, const std::map<std::string, LeadState>& leads,
                                         const QuadratureConfig& cfg = {});

}  // namespace nrdot
