#include "nrdot/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nrdot {

namespace {

constexpr cplx kI{0.0, 1.0};
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

std::string singular_message(double omega, double rcond) {
    std::ostringstream os;
    os << "singular resolvent at omega=" << omega << " (rcond estimate " << rcond << ")";
    return os.str();
}

// S = I − i√(2/π)·K·(−iωI − M)⁻¹·C
Eigen::MatrixXcd resolvent_scattering(const Eigen::MatrixXcd& drift, const Eigen::MatrixXcd& input,
                                      const Eigen::VectorXd& damping, double omega) {
    const auto n = drift.rows();
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) * (-kI * omega) - drift;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond >= kSingularRcond)) throw SingularResolvent(omega, rcond);
    const Eigen::MatrixXcd x = lu.solve(input);
    return Eigen::MatrixXcd::Identity(n, n) - (kI * kSqrt2OverPi) * (damping.cast<cplx>().asDiagonal() * x);
}

ScatteringMatrix two_port(double omega, cplx s11, cplx s12, cplx s21, cplx s22) {
    ScatteringMatrix s;
    s.omega = omega;
    s.entries.resize(2, 2);
    s.entries << s11, s12, s21, s22;
    s.port_labels = {"d1", "d2"};
    return s;
}

double normalize_angle(double phi) {
    phi = std::remainder(phi, 2.0 * std::numbers::pi);
    if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
    return phi;
}

}  // namespace

int ScatteringMatrix::index(const std::string& label) const {
    const auto it = std::find(port_labels.begin(), port_labels.end(), label);
    if (it == port_labels.end()) throw std::out_of_range("unknown port '" + label + "'");
    return static_cast<int>(it - port_labels.begin());
}

SingularResolvent::SingularResolvent(double omega, double rcond)
    : std::runtime_error(singular_message(omega, rcond)), omega_(omega), rcond_(rcond) {}

ScatteringMatrix scattering_matrix(const DriftModel& drift, double omega) {
    ScatteringMatrix s;
    s.omega = omega;
    s.entries = resolvent_scattering(drift.drift, drift.input, drift.damping, omega);
    s.port_labels = drift.port_labels;
    return s;
}

Eigen::MatrixXcd flux_normalized(const ScatteringMatrix& s, const Eigen::VectorXd& damping) {
    const Eigen::VectorXd root = damping.cwiseSqrt();
    return root.cwiseInverse().cast<cplx>().asDiagonal() * s.entries * root.cast<cplx>().asDiagonal();
}

ScatteringMatrix reduced_scattering(const ReducedCircuit& reduced, double omega) {
    const auto n = reduced.drift.rows();
    const Eigen::MatrixXcd input = Eigen::MatrixXcd::Identity(n, n) * (-kI * kSqrt2Pi);
    ScatteringMatrix s;
    s.omega = omega;
    s.entries = resolvent_scattering(reduced.drift, input, reduced.damping, omega);
    s.port_labels = reduced.port_labels;
    return s;
}

ScatteringMatrix three_dot_closed_form(const ThreeDotParams& p, double omega) {
    const double c = p.lambda * p.lambda / p.kappa;
    const cplx x = kI * (p.eps_d - omega);
    const cplx fwd = c + kI * p.g;             // λ²/κ + ig
    const cplx bwd = c + kI * std::conj(p.g);  // λ²/κ + ig*
    const cplx den = (x + c + p.gamma) * (x + c + p.gamma) - fwd * bwd;
    const cplx s11 = ((x + c) * (x + c) - p.gamma * p.gamma - fwd * bwd) / den;
    return two_port(omega, s11, 2.0 * p.gamma * fwd / den, 2.0 * p.gamma * bwd / den, s11);
}

FourDotEffective four_dot_effective(const FourDotParams& p) {
    const double l1 = p.lambda1 * p.lambda1;
    const double l2 = p.lambda2 * p.lambda2;
    const double n1 = p.kappa * p.kappa + p.delta1 * p.delta1;
    const double n2 = p.kappa * p.kappa + p.delta2 * p.delta2;
    const cplx r1 = 1.0 / cplx(p.kappa, p.delta1);
    const cplx r2 = 1.0 / cplx(p.kappa, p.delta2);
    FourDotEffective e;
    e.detuned_onsite = p.eps_d - l1 * p.delta1 / n1 - l2 * p.delta2 / n2;
    e.total_damping = p.gamma + l1 * p.kappa / n1 + l2 * p.kappa / n2;
    e.phi = l1 * std::polar(1.0, p.phi) * r1 + l2 * r2;
    e.psi = l1 * std::polar(1.0, -p.phi) * r1 + l2 * r2;
    return e;
}

ScatteringMatrix four_dot_closed_form(const FourDotParams& p, double omega) {
    const auto e = four_dot_effective(p);
    const cplx a = kI * (e.detuned_onsite - omega) + e.total_damping;
    const cplx pp = e.phi * e.psi;
    const cplx den = a * a - pp;
    const cplx s11 = (a * (a - 2.0 * p.gamma) - pp) / den;
    return two_port(omega, s11, 2.0 * p.gamma * e.phi / den, 2.0 * p.gamma * e.psi / den, s11);
}

cplx three_dot_directional_coupling(double lambda, double kappa, Direction dir) {
    if (!(lambda > 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("directional coupling needs lambda > 0 and kappa > 0");
    const double c = lambda * lambda / kappa;
    return dir == Direction::forward ? cplx(0.0, c) : cplx(0.0, -c);
}

double four_dot_directional_phase(double lambda1, double lambda2, double delta1, double delta2,
                                  double kappa, Direction dir) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("directional phase needs lambda1, lambda2, kappa > 0");
    const cplx rhs = -cplx(kappa, delta1) / cplx(kappa, delta2) * (lambda2 * lambda2) / (lambda1 * lambda1);
    if (std::abs(std::abs(rhs) - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "no pure-phase solution (|e^{i phi}| would be " << std::abs(rhs)
           << "); adjust lambda1/lambda2";
        throw NoPhaseSolution(os.str());
    }
    const double phi = normalize_angle(std::arg(rhs));
    return dir == Direction::forward ? phi : normalize_angle(-phi);
}

double three_dot_matched_damping(double lambda, double kappa) { return lambda * lambda / kappa; }

double four_dot_matched_damping(double lambda1, double lambda2, double delta1, double delta2,
                                double kappa) {
    return lambda1 * lambda1 * kappa / (kappa * kappa + delta1 * delta1) +
           lambda2 * lambda2 * kappa / (kappa * kappa + delta2 * delta2);
}

MatchingSolution solve_matching_numerically(const DriftModel& drift, double resonance,
                                            const std::string& port) {
    const int target = drift.port_index(port);
    if (drift.port_roles[target] != DotRole::primary)
        throw std::invalid_argument("matching port '" + port + "' is not a primary dot");

    auto reflection = [&](double gamma) {
        DriftModel trial = drift;
        for (int j = 0; j < trial.dim(); ++j) {
            if (trial.port_roles[j] != DotRole::primary) continue;
            trial.drift(j, j) += trial.damping(j) - gamma;
            trial.damping(j) = gamma;
        }
        return std::abs(scattering_matrix(trial, resonance)(target, target));
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = kMatchingLower, b = kMatchingUpper;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = reflection(c), fd = reflection(d);
    while (b - a > kMatchingTol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = reflection(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = reflection(d);
        }
    }
    MatchingSolution sol;
    sol.gamma = 0.5 * (a + b);
    sol.reflection = reflection(sol.gamma);
    const double edge = std::min(reflection(kMatchingLower), reflection(kMatchingUpper));
    sol.boundary = !(sol.reflection < edge - 1e-12) ||
                   sol.gamma - kMatchingLower < 10 * kMatchingTol ||
                   kMatchingUpper - sol.gamma < 10 * kMatchingTol;
    return sol;
}

IsolationReport isolation_report(const ScatteringMatrix& s, int j, int k) {
    if (j == k) throw std::invalid_argument("isolation_report needs two distinct ports");
    const int n = static_cast<int>(s.entries.rows());
    if (j < 0 || k < 0 || j >= n || k >= n) throw std::out_of_range("isolation_report port out of range");
    IsolationReport r;
    r.forward_t = std::norm(s(j, k));
    r.reverse_t = std::norm(s(k, j));
    r.reflection_j = std::norm(s(j, j));
    r.reflection_k = std::norm(s(k, k));
    r.isolation_ratio = r.reverse_t < kIsolationFloor ? std::numeric_limits<double>::infinity()
                                                      : r.forward_t / r.reverse_t;
    return r;
}

IsolationReport isolation_report(const ScatteringMatrix& s, const std::string& j, const std::string& k) {
    return isolation_report(s, s.index(j), s.index(k));
}

}  // namespace nrdot
