// phonon.hpp — three-dot circuit with an Ohmic phonon bath, treated in the polaron frame.

#pragma once

#include <complex>
#include <vector>

#include "nrdot/circuit.hpp"
#include "nrdot/quadrature.hpp"
#include "nrdot/transport.hpp"

namespace nrdot {

// I(ω) = πνω·e^{−ω/ω_c}; the same bath on every dot.
struct OhmicBath {
    double nu{0.0};
    double omega_c{10.0};
    double temperature{0.5};

    void validate() const;
};

// Δ = ∫dω I(ω)/(πω) = ν·ω_c.
[[nodiscard]] double reorganization_shift(const OhmicBath& bath);

// φ(τ) = ν∫₀^∞dω e^{−ω/ω_c}/ω·[coth(ω/2T)(1 − cos ωτ) + i sin ωτ], so that B(τ) = e^{−φ(τ)}.
[[nodiscard]] cplx correlation_exponent(const OhmicBath& bath, double tau);

// B(τ) tabulated on composite 8-point Gauss-Legendre panels: geometric near τ = 0, then uniform.
struct CorrelationGrid {
    std::vector<double> tau;
    std::vector<double> weights;
    std::vector<cplx> phi;
    std::vector<cplx> B;
    double tau_max{0.0};
};

inline constexpr int kDefaultCorrelationNodes = 8192;

// 30/(2Γ): the e^{−2Γτ} weight of G is below 1e−13 beyond it.
[[nodiscard]] inline double default_tau_max(double gamma) { return 15.0 / gamma; }

// n_nodes ≥ 64, rounded up to a multiple of 8.
[[nodiscard]] CorrelationGrid correlation_B(const OhmicBath& bath, double tau_max,
                                            int n_nodes = kDefaultCorrelationNodes);

struct PolaronParams {
    double renorm_onsite{1.0};  // ε̃_d = ε_d − Δ
    double shift{0.0};          // Δ
    double lambda{10.0};
    double kappa{100.0};
    double gamma{1.0};

    [[nodiscard]] static PolaronParams from_bare(double eps_d, const OhmicBath& bath, double lambda,
                                                 double kappa, double gamma);
    [[nodiscard]] static PolaronParams from_renormalized(double eps_tilde, const OhmicBath& bath,
                                                         double lambda, double kappa, double gamma);
};

// G(ε) = Re∫₀^∞dτ e^{−(2Γ + iε̃_d − iε)τ}·B(τ).
[[nodiscard]] double generalized_transmission(const PolaronParams& p, const CorrelationGrid& grid, double energy);

// Node count keeping G(ε) alias-free over the integration window of these leads (≥ the default).
[[nodiscard]] int correlation_nodes_for(const PolaronParams& p, const ThreeDotLeads& leads, double tau_max,
                                        const QuadratureConfig& cfg = {});

// J_L = 2Γ∫G·[n_L − n_a],  J_R = 2Γ∫G·[n_R − n_a] − 4Γ²∫G²·[n_L − n_a]  (∫ ≡ ∫dε/2π).
// Warns when Δ > κ/10, where dropping the shift from the auxiliary damping is questionable, and
// when the grid is too coarse for the window. The bath overload sizes its grid itself.
[[nodiscard]] CurrentResult polaron_currents(const PolaronParams& p, const CorrelationGrid& grid,
                                             const ThreeDotLeads& leads, const QuadratureConfig& cfg = {});
[[nodiscard]] CurrentResult polaron_currents(const PolaronParams& p, const OhmicBath& bath,
                                             const ThreeDotLeads& leads, const QuadratureConfig& cfg = {});

// S̆₁₁(ω) = S̆₂₂(ω) = (i(ε̃_d − ω) + λ²/κ − Γ)/(i(ε̃_d − ω) + λ²/κ + Γ).
[[nodiscard]] cplx polaron_reflection(const PolaronParams& p, double omega);

}  // namespace nrdot
