#include "nrdot/phonon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nrdot {

namespace {

constexpr std::array<double, 4> kGlNodes = {0.1834346424956498049394761, 0.5255324099163289858177390,
                                            0.7966664774136267395915539, 0.9602898564975362316835609};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783619829651504, 0.3137066458778872873379622,
                                              0.2223810344533744705443560, 0.1012285362903762591525314};

// (1 − cos ωτ)/(ω·(e^{ω/T} − 1)), finite at ω → 0 where it tends to Tτ²/2.
double thermal_integrand(double w, double tau, double temperature, double omega_c) {
    const double damp = std::exp(-w / omega_c);
    if (w < 1e-8 * std::min(temperature, 1.0 / std::max(tau, 1e-300)))
        return damp * 0.5 * temperature * tau * tau;
    const double s = std::sin(0.5 * w * tau);
    return damp * 2.0 * s * s / (w * std::expm1(w / temperature));
}

}  // namespace

void OhmicBath::validate() const {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("bath nu must be >= 0");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw std::invalid_argument("bath omega_c must be > 0");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw std::invalid_argument("bath temperature must be > 0");
}

double reorganization_shift(const OhmicBath& bath) { return bath.nu * bath.omega_c; }

// coth = 1 + 2n_B splits Re φ into the zero-temperature part (ν/2)·ln(1 + ω_c²τ²) and a
// thermal correction that lives on ω ≲ T and is integrated numerically.
cplx correlation_exponent(const OhmicBath& bath, double tau) {
    bath.validate();
    if (tau < 0.0) throw std::invalid_argument("correlation_exponent needs tau >= 0");
    if (tau == 0.0 || bath.nu == 0.0) return {0.0, 0.0};

    const double wc = bath.omega_c;
    const double im = bath.nu * std::atan(wc * tau);
    double re = 0.5 * bath.nu * std::log1p(wc * wc * tau * tau);

    const double T = bath.temperature;
    const double upper = 45.0 * T * wc / (T + wc);
    const int chunks = std::clamp(static_cast<int>(std::ceil(upper * tau / (4.0 * std::numbers::pi))), 1, 4000);
    std::vector<Interval> pieces;
    pieces.reserve(static_cast<std::size_t>(chunks));
    for (int k = 0; k < chunks; ++k)
        pieces.push_back({upper * k / chunks, upper * (k + 1) / chunks});
    const auto thermal = integrate_adaptive(
        [&](double w) { return thermal_integrand(w, tau, T, wc); }, pieces, 1e-12, 1e-15, 20000);
    re += 2.0 * bath.nu * thermal.value;
    return {re, im};
}

CorrelationGrid correlation_B(const OhmicBath& bath, double tau_max, int n_nodes) {
    bath.validate();
    if (!(tau_max > 0.0)) throw std::invalid_argument("correlation_B needs tau_max > 0");
    if (n_nodes < 64) throw std::invalid_argument("correlation_B needs at least 64 nodes");

    const int panels = (n_nodes + 7) / 8;
    // Geometric refinement only inside the first uniform-width panel, so no panel is wider than
    // the uniform spacing (which must resolve e^{iετ} across the whole energy window).
    const int n_geo = std::min(20, panels / 8);
    const double tau_geo = tau_max / (panels - n_geo + 1);

    std::vector<double> edges{0.0};
    for (int k = 1; k <= n_geo; ++k) edges.push_back(tau_geo * std::ldexp(1.0, k - n_geo));
    const int n_uni = panels - n_geo;
    const double start = edges.back();
    for (int k = 1; k <= n_uni; ++k) edges.push_back(start + (tau_max - start) * k / n_uni);

    CorrelationGrid g;
    g.tau_max = tau_max;
    const auto total = static_cast<std::size_t>(8 * panels);
    g.tau.reserve(total);
    g.weights.reserve(total);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        for (int j = 3; j >= 0; --j) {
            g.tau.push_back(mid - half * kGlNodes[j]);
            g.weights.push_back(half * kGlWeights[j]);
        }
        for (int j = 0; j < 4; ++j) {
            g.tau.push_back(mid + half * kGlNodes[j]);
            g.weights.push_back(half * kGlWeights[j]);
        }
    }
    g.phi.resize(g.tau.size());
    g.B.resize(g.tau.size());
    for (std::size_t k = 0; k < g.tau.size(); ++k) {
        g.phi[k] = correlation_exponent(bath, g.tau[k]);
        g.B[k] = std::exp(-g.phi[k]);
    }
    return g;
}

PolaronParams PolaronParams::from_bare(double eps_d, const OhmicBath& bath, double lambda, double kappa,
                                       double gamma) {
    const double shift = reorganization_shift(bath);
    return {eps_d - shift, shift, lambda, kappa, gamma};
}

PolaronParams PolaronParams::from_renormalized(double eps_tilde, const OhmicBath& bath, double lambda,
                                               double kappa, double gamma) {
    return {eps_tilde, reorganization_shift(bath), lambda, kappa, gamma};
}

double generalized_transmission(const PolaronParams& p, const CorrelationGrid& grid, double energy) {
    const cplx rate(2.0 * p.gamma, p.renorm_onsite - energy);
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.tau.size(); ++k)
        sum += grid.weights[k] * (std::exp(-rate * grid.tau[k]) * grid.B[k]).real();
    return sum;
}

namespace {

// e^{iετ} over one 8-node panel of width 8·tau_max/n turns by |ε − ε̃|·8·tau_max/n; keeping that
// below 2 rad leaves the Gauss-Legendre panels exact to ~1e−10.
constexpr double kNodesPerPhase = 4.0;

double energy_reach(const PolaronParams& p, const ThreeDotLeads& leads, const QuadratureConfig& cfg) {
    const std::array lead_list{leads.left, leads.right, leads.aux};
    const std::array centers{p.renorm_onsite};
    const std::array widths{2.0 * p.gamma};
    double reach = 0.0;
    for (const auto& piece : integration_window(lead_list, centers, widths, cfg))
        reach = std::max({reach, std::abs(piece.lo - p.renorm_onsite), std::abs(piece.hi - p.renorm_onsite)});
    return reach;
}

}  // namespace

int correlation_nodes_for(const PolaronParams& p, const ThreeDotLeads& leads, double tau_max, const QuadratureConfig& cfg) {
    const double need = std::ceil(kNodesPerPhase * energy_reach(p, leads, cfg) * tau_max);
    return std::max(kDefaultCorrelationNodes, static_cast<int>(std::min(need, 1e8)));
}

CurrentResult polaron_currents(const PolaronParams& p, const CorrelationGrid& grid, const ThreeDotLeads& leads,
                               const QuadratureConfig& cfg) {
    if (!(p.gamma > 0.0) || !(p.kappa > 0.0)) throw std::invalid_argument("polaron currents need gamma, kappa > 0");
    if (grid.tau_max < default_tau_max(p.gamma) * (1.0 - 1e-12))
        throw std::invalid_argument("correlation grid too short for this gamma");

    const double g = p.gamma;
    const VectorKernel kernel = [&](double e, std::span<double> out) {
        const double G = generalized_transmission(p, grid, e);
        const double na = fermi_dirac(e, leads.aux);
        const double left = fermi_dirac(e, leads.left) - na;
        out[0] = 2.0 * g * G * left;
        out[1] = 2.0 * g * G * (fermi_dirac(e, leads.right) - na);
        out[2] = 4.0 * g * g * G * G * left;
    };
    const std::array lead_list{leads.left, leads.right, leads.aux};
    const std::array centers{p.renorm_onsite};
    const std::array widths{2.0 * g};
    const auto q = integrate(3, kernel, lead_list, centers, widths, cfg);

    constexpr double inv2pi = 0.5 / std::numbers::pi;
    CurrentResult r;
    r.breakdown = {{"L: 2G*G[nL-na]", 'L', q.values[0] * inv2pi},
                   {"R: 2G*G[nR-na]", 'R', q.values[1] * inv2pi},
                   {"R: -4G^2*G^2[nL-na]", 'R', -q.values[2] * inv2pi}};
    for (const auto& t : r.breakdown) (t.lead == 'L' ? r.left : r.right) += t.value;
    r.aux = -r.left - r.right;
    r.error = q.error * inv2pi;
    r.converged = q.converged;
    if (!q.converged) r.warnings.emplace_back("quadrature did not converge within max_subdivisions");
    if (kNodesPerPhase * energy_reach(p, leads, cfg) * grid.tau_max > static_cast<double>(grid.tau.size()))
        r.warnings.emplace_back("correlation grid too coarse for the energy window; G(eps) may alias");
    if (p.shift > 0.1 * p.kappa) r.warnings.emplace_back("polaron shift exceeds kappa/10; kappa - i*shift ~ kappa is questionable");
    return r;
}

CurrentResult polaron_currents(const PolaronParams& p, const OhmicBath& bath, const ThreeDotLeads& leads,
                               const QuadratureConfig& cfg) {
    const double tau_max = default_tau_max(p.gamma);
    return polaron_currents(p, correlation_B(bath, tau_max, correlation_nodes_for(p, leads, tau_max, cfg)), leads, cfg);
}

cplx polaron_reflection(const PolaronParams& p, double omega) {
    const cplx x(0.0, p.renorm_onsite - omega);
    const double c = p.lambda * p.lambda / p.kappa;
    return (x + c - p.gamma) / (x + c + p.gamma);
}

}  // namespace nrdot
