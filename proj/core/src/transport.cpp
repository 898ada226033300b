#include "nrdot/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nrdot {

namespace {

constexpr double kInv2Pi = 0.5 / std::numbers::pi;

void finish(CurrentResult& r, const VectorQuadrature& q) {
    r.left = 0.0;
    r.right = 0.0;
    for (const auto& t : r.breakdown) (t.lead == 'L' ? r.left : r.right) += t.value;
    r.aux = -r.left - r.right;
    r.error = q.error * kInv2Pi;
    r.converged = q.converged;
    if (!q.converged) r.warnings.emplace_back("quadrature did not converge within max_subdivisions");
}

}  // namespace

CurrentResult current_three_dot(const ThreeDotCurrentParams& p, const ThreeDotLeads& leads,
                                const QuadratureConfig& cfg) {
    if (!(p.lambda > 0.0) || !(p.kappa > 0.0) || !(p.gamma > 0.0))
        throw std::invalid_argument("three-dot currents need lambda, kappa, gamma > 0");
    const double g2 = p.gamma * p.gamma;
    const double alpha = p.alpha();
    const double width2 = g2 * (1.0 + alpha) * (1.0 + alpha);

    const VectorKernel kernel = [&](double e, std::span<double> out) {
        const double x = p.eps_d - e;
        const double a = 4.0 * g2 * alpha / (width2 + x * x);
        const double na = fermi_dirac(e, leads.aux);
        const double left = fermi_dirac(e, leads.left) - na;
        out[0] = a * left;
        out[1] = a * (fermi_dirac(e, leads.right) - na);
        out[2] = a * a * left;
    };
    const std::array lead_list{leads.left, leads.right, leads.aux};
    const std::array centers{p.eps_d};
    const std::array widths{p.gamma * (1.0 + alpha)};
    const auto q = integrate(3, kernel, lead_list, centers, widths, cfg);

    CurrentResult r;
    r.breakdown = {{"L: A[nL-na]", 'L', q.values[0] * kInv2Pi},
                   {"R: A[nR-na]", 'R', q.values[1] * kInv2Pi},
                   {"R: -A^2[nL-na]", 'R', -q.values[2] * kInv2Pi}};
    finish(r, q);
    return r;
}

CurrentResult current_four_dot(const FourDotCurrentParams& p, const FourDotLeads& leads,
                               const QuadratureConfig& cfg) {
    if (!(p.lambda > 0.0) || !(p.kappa > 0.0) || !(p.gamma > 0.0))
        throw std::invalid_argument("four-dot currents need lambda, kappa, gamma > 0");
    const double matched = p.matched_gamma();
    if (std::abs(p.gamma - matched) > 1e-9 * matched)
        throw std::invalid_argument("four-dot currents need the matched damping 2*lambda^2*kappa/(kappa^2+delta^2)");

    const double g = p.gamma;
    const double kd = p.kappa * p.kappa + p.delta * p.delta;
    // In the halved form the last three terms of J_R are half of what |Ŝ_RL|², |Ŝ_Ru|² − |Ŝ_Rd|² give.
    const double scale = p.coefficients == FourDotCoefficients::lb_consistent ? 2.0 : 1.0;
    const double s2 = scale * p.delta * p.delta / kd;
    const double cross_coef = scale * 4.0 * g * g * g * p.delta * p.kappa / kd;

    const VectorKernel kernel = [&](double e, std::span<double> out) {
        const double x = p.eps_d - e;
        const double den = 4.0 * g * g + x * x;
        const double l2 = 2.0 * g * g / den;
        const double l2sq = 4.0 * g * g * g * g / (den * den);
        const double cross = x / (den * den);
        const double nl = fermi_dirac(e, leads.left);
        const double nr = fermi_dirac(e, leads.right);
        const double nu = fermi_dirac(e, leads.up);
        const double nd = fermi_dirac(e, leads.down);
        out[0] = l2 * (nl - nu);
        out[1] = l2 * (nl - nd);
        out[2] = l2 * (nr - nu);
        out[3] = l2 * (nr - nd);
        out[4] = l2sq * (nl - nu);
        out[5] = l2sq * (nl - nd);
        out[6] = cross * (nu - nd);
    };
    const std::array lead_list{leads.left, leads.right, leads.up, leads.down};
    const std::array centers{p.eps_d};
    const std::array widths{2.0 * g};
    const auto q = integrate(7, kernel, lead_list, centers, widths, cfg);

    const auto v = [&](int i) { return q.values[i] * kInv2Pi; };
    CurrentResult r;
    r.breakdown = {{"L: L2[nL-nu]", 'L', v(0)},
                   {"L: L2[nL-nd]", 'L', v(1)},
                   {"R: L2[nR-nu]", 'R', v(2)},
                   {"R: L2[nR-nd]", 'R', v(3)},
                   {"R: -s2*L2sq[nL-nu]", 'R', -s2 * v(4)},
                   {"R: -s2*L2sq[nL-nd]", 'R', -s2 * v(5)},
                   {"R: -cross[nu-nd]", 'R', -cross_coef * v(6)}};
    finish(r, q);
    return r;
}

Eigen::MatrixXd lb_transmissions(const CircuitSpec& spec, double energy) {
    const DriftModel dm = assemble_drift(spec);
    const auto n = dm.dim();
    Eigen::MatrixXcd inv = -dm.hamiltonian;
    inv.diagonal().array() += cplx(energy, 0.0);
    inv.diagonal() += cplx(0.0, 1.0) * dm.damping.cast<cplx>();
    const Eigen::MatrixXcd gr = inv.partialPivLu().inverse();
    Eigen::MatrixXd t(n, n);
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) t(v, w) = dm.damping(v) * dm.damping(w) * std::norm(gr(v, w));
    return t;
}

double LbCurrentResult::at(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw std::out_of_range("no lead on dot '" + label + "'");
    return currents[static_cast<std::size_t>(it - labels.begin())];
}

double LbCurrentResult::sum() const {
    double s = 0.0;
    for (double c : currents) s += c;
    return s;
}

LbCurrentResult lb_current(const CircuitSpec& spec, const std::map<std::string, LeadState>& leads,
                           const QuadratureConfig& cfg) {
    const DriftModel dm = assemble_drift(spec);
    const int n = dm.dim();

    std::vector<LeadState> ordered;
    ordered.reserve(static_cast<std::size_t>(n));
    for (const auto& label : dm.port_labels) {
        const auto it = leads.find(label);
        if (it == leads.end()) throw std::invalid_argument("missing lead for dot '" + label + "'");
        ordered.push_back(it->second);
    }
    if (leads.size() != ordered.size()) throw std::invalid_argument("lead attached to an unknown dot");

    // Resonances sit near the eigenvalues of H; use the narrowest damping as their width.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dm.hamiltonian, Eigen::EigenvaluesOnly);
    std::vector<double> centers(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
    std::vector<double> widths(static_cast<std::size_t>(n), dm.damping.minCoeff());

    const Eigen::MatrixXcd base = -dm.hamiltonian + cplx(0.0, 1.0) * Eigen::MatrixXcd(dm.damping.cast<cplx>().asDiagonal());
    const VectorKernel kernel = [&](double e, std::span<double> out) {
        Eigen::MatrixXcd inv = base;
        inv.diagonal().array() += cplx(e, 0.0);
        const Eigen::MatrixXcd gr = inv.partialPivLu().inverse();
        std::vector<double> occ(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) occ[static_cast<std::size_t>(v)] = fermi_dirac(e, ordered[static_cast<std::size_t>(v)]);
        for (int v = 0; v < n; ++v) {
            double j = 0.0;
            for (int w = 0; w < n; ++w) {
                if (w == v) continue;
                const double kk = dm.damping(v) * dm.damping(w);
                j += kk * (std::norm(gr(w, v)) * occ[static_cast<std::size_t>(v)] -
                           std::norm(gr(v, w)) * occ[static_cast<std::size_t>(w)]);
            }
            out[static_cast<std::size_t>(v)] = 4.0 * j;
        }
    };
    const auto q = integrate(static_cast<std::size_t>(n), kernel, ordered, centers, widths, cfg);

    LbCurrentResult r;
    r.labels = dm.port_labels;
    r.currents.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) r.currents[static_cast<std::size_t>(v)] = q.values[static_cast<std::size_t>(v)] * kInv2Pi;
    r.error = q.error * kInv2Pi;
    r.converged = q.converged;
    return r;
}

}  // namespace nrdot
