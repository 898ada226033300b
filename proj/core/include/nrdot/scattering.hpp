// scattering.hpp — frequency-domain scattering matrices, directionality and
// impedance-matching conditions, isolation metrics.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nrdot/circuit.hpp"

namespace nrdot {

struct ScatteringMatrix {
    double omega{0.0};
    Eigen::MatrixXcd entries;
    std::vector<std::string> port_labels;

    [[nodiscard]] cplx operator()(int j, int k) const { return entries(j, k); }
    [[nodiscard]] int index(const std::string& label) const;
};

class SingularResolvent : public std::runtime_error {
public:
    SingularResolvent(double omega, double rcond);
    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] double rcond() const noexcept { return rcond_; }

private:
    double omega_;
    double rcond_;
};

// Reciprocal condition estimate below which the resolvent is treated as singular.
inline constexpr double kSingularRcond = 1e-14;

// S(ω) = I − i√(2/π)·K·(−iωI − M)⁻¹·C, via an LU solve. Throws SingularResolvent.
[[nodiscard]] ScatteringMatrix scattering_matrix(const DriftModel& drift, double omega);

// Ŝ = K^{-1/2}·S·K^{1/2}; unitary for Hermitian couplings at real ω.
[[nodiscard]] Eigen::MatrixXcd flux_normalized(const ScatteringMatrix& s, const Eigen::VectorXd& damping);

// Primary-block scattering of the adiabatically reduced dynamics.
[[nodiscard]] ScatteringMatrix reduced_scattering(const ReducedCircuit& reduced, double omega);

// Closed forms for the primary 2×2 block (ports d1, d2) after eliminating the auxiliaries.
// The three-dot form assumes a zero auxiliary on-site energy (aux_onsite is ignored).
[[nodiscard]] ScatteringMatrix three_dot_closed_form(const ThreeDotParams& p, double omega);
[[nodiscard]] ScatteringMatrix four_dot_closed_form(const FourDotParams& p, double omega);

// Effective quantities of the reduced four-dot model.
struct FourDotEffective {
    double detuned_onsite;  // Δ
    double total_damping;   // Σ
    cplx phi;               // Φ, couples d₂ into ḋ₁
    cplx psi;               // Ψ, couples d₁ into ḋ₂
};
[[nodiscard]] FourDotEffective four_dot_effective(const FourDotParams& p);

// forward: d₂ driven by d₁ only (S₁₂ = 0). reverse: the mirrored solution (S₂₁ = 0).
enum class Direction { forward, reverse };

// g = iλ²/κ (forward) or g = −iλ²/κ (reverse, i.e. g* = iλ²/κ).
[[nodiscard]] cplx three_dot_directional_coupling(double lambda, double kappa,
                                                  Direction dir = Direction::forward);

class NoPhaseSolution : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Loop phase φ ∈ (−π, π] with e^{iφ} = −(κ+iδ₁)λ₂²/((κ+iδ₂)λ₁²); reverse returns −φ.
// Throws NoPhaseSolution when the right-hand side is not unit modulus within 1e−12.
[[nodiscard]] double four_dot_directional_phase(double lambda1, double lambda2, double delta1,
                                                double delta2, double kappa,
                                                Direction dir = Direction::forward);

[[nodiscard]] double three_dot_matched_damping(double lambda, double kappa);
[[nodiscard]] double four_dot_matched_damping(double lambda1, double lambda2, double delta1,
                                              double delta2, double kappa);

struct MatchingSolution {
    double gamma{0.0};
    double reflection{0.0};  // |S_pp| at the optimum
    bool boundary{false};    // no interior minimum on the search bracket
};

inline constexpr double kMatchingLower = 1e-6;
inline constexpr double kMatchingUpper = 1e2;
inline constexpr double kMatchingTol = 1e-10;

// Golden-section search over a common damping Γ on all primary ports, minimising |S_pp(resonance)|.
[[nodiscard]] MatchingSolution solve_matching_numerically(const DriftModel& drift, double resonance,
                                                          const std::string& port);

inline constexpr double kIsolationFloor = 1e-30;

struct IsolationReport {
    double forward_t{0.0};     // |S_jk|², k → j
    double reverse_t{0.0};     // |S_kj|²
    double reflection_j{0.0};  // |S_jj|²
    double reflection_k{0.0};  // |S_kk|²
    double isolation_ratio{0.0};
};

[[nodiscard]] IsolationReport isolation_report(const ScatteringMatrix& s, int j, int k);
[[nodiscard]] IsolationReport isolation_report(const ScatteringMatrix& s, const std::string& j,
                                               const std::string& k);

}  // namespace nrdot
