#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <nrdot/circuit.hpp>
#include <nrdot/scattering.hpp>

#include "random_circuits.hpp"

using namespace nrdot;

namespace {

constexpr cplx I{0.0, 1.0};

bool has_violation(const ValidationReport& r, const std::string& prefix) {
    for (const auto& v : r.violations)
        if (v.rfind(prefix, 0) == 0) return true;
    return false;
}

}  // namespace

TEST(Validate, ThreeDotIsValid) {
    EXPECT_TRUE(validate_circuit(three_dot_circuit({})).ok());
}

TEST(Validate, ZeroAuxiliaryDampingRejected) {
    ThreeDotParams p;
    p.kappa = 0.0;
    const auto r = validate_circuit(three_dot_circuit(p));
    EXPECT_TRUE(has_violation(r, "nonpositive damping")) << r.to_string();
}

TEST(Validate, DanglingEndpointRejected) {
    auto s = three_dot_circuit({});
    s.couplings.push_back({"d1", "nowhere", 1.0});
    EXPECT_TRUE(has_violation(validate_circuit(s), "dangling endpoint"));
}

TEST(Validate, OtherGuards) {
    CircuitSpec empty;
    EXPECT_TRUE(has_violation(validate_circuit(empty), "empty circuit"));

    auto dup = three_dot_circuit({});
    dup.dots.push_back(dup.dots.front());
    EXPECT_TRUE(has_violation(validate_circuit(dup), "duplicate label"));

    auto self = three_dot_circuit({});
    self.couplings.push_back({"d1", "d1", 1.0});
    EXPECT_TRUE(has_violation(validate_circuit(self), "self-coupling"));

    auto nonherm = three_dot_circuit({});
    nonherm.couplings.push_back({"a", "d1", 3.0});  // d1–a already set to λ = 10
    EXPECT_TRUE(has_violation(validate_circuit(nonherm), "non-Hermitian coupling"));

    auto nan = three_dot_circuit({});
    nan.dots[0].onsite = std::nan("");
    EXPECT_TRUE(has_violation(validate_circuit(nan), "non-finite value"));

    EXPECT_THROW((void)assemble_drift(empty), InvalidCircuit);
}

TEST(Validate, ConjugatePairIsConsistent) {
    auto s = three_dot_circuit({});
    s.couplings.push_back({"d2", "d1", std::conj(I)});  // same as H[d1][d2] = i
    EXPECT_TRUE(validate_circuit(s).ok());
}

TEST(Drift, ThreeDotFirstRow) {
    ThreeDotParams p{1.5, {0.3, 0.7}, 2.0, 40.0, 0.8, 0.0};
    const auto dm = assemble_drift(three_dot_circuit(p));
    ASSERT_EQ(dm.dim(), 3);
    EXPECT_EQ(dm.port_labels, (std::vector<std::string>{"d1", "d2", "a"}));
    EXPECT_LT(std::abs(dm.drift(0, 0) - (-I * p.eps_d - p.gamma)), 1e-15);
    EXPECT_LT(std::abs(dm.drift(0, 1) - (-I * p.g)), 1e-15);
    EXPECT_LT(std::abs(dm.drift(0, 2) - (-I * p.lambda)), 1e-15);
    EXPECT_LT(std::abs(dm.drift(2, 2) - (-p.kappa)), 1e-15);
    const cplx c = -I * std::sqrt(2.0 * std::numbers::pi);
    EXPECT_TRUE(dm.input.isApprox(c * Eigen::MatrixXcd::Identity(3, 3)));
}

TEST(Drift, SingleDot) {
    CircuitSpec s{{{"d", DotRole::primary, 0.7, 1.3}}, {}};
    const auto dm = assemble_drift(s);
    ASSERT_EQ(dm.dim(), 1);
    EXPECT_LT(std::abs(dm.drift(0, 0) - cplx(-1.3, -0.7)), 1e-15);
}

TEST(Drift, FourDotSignPattern) {
    FourDotParams p{1.0, 0.5, -0.5, 1.2, 0.9, 0.8, 10.0, 1.0};
    const auto dm = assemble_drift(four_dot_circuit(p));
    EXPECT_EQ(dm.port_labels, (std::vector<std::string>{"d1", "d2", "a1", "a2"}));
    const cplx g11 = p.lambda1, g21 = std::polar(p.lambda1, p.phi);
    EXPECT_LT(std::abs(dm.drift(0, 2) - (-I * std::conj(g11))), 1e-15);
    EXPECT_LT(std::abs(dm.drift(2, 0) - (-I * g11)), 1e-15);
    EXPECT_LT(std::abs(dm.drift(1, 2) - (-I * std::conj(g21))), 1e-15);
    EXPECT_LT(std::abs(dm.drift(2, 1) - (-I * g21)), 1e-15);
}

TEST(Drift, PrimariesFirstInDeclarationOrder) {
    CircuitSpec s{{{"x", DotRole::auxiliary, 0, 5}, {"p", DotRole::primary, 0, 1}, {"y", DotRole::auxiliary, 0, 6},
                   {"q", DotRole::primary, 0, 1}},
                  {}};
    EXPECT_EQ(assemble_drift(s).port_labels, (std::vector<std::string>{"p", "q", "x", "y"}));
    EXPECT_EQ(assemble_drift(s).primary_count(), 2);
}

TEST(Drift, HermiticityAndDeterminism) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = testing_support::random_circuit(rng);
        const auto a = assemble_drift(spec);
        const auto b = assemble_drift(spec);
        const Eigen::MatrixXcd sum = a.drift + a.drift.adjoint();
        const Eigen::MatrixXcd expect = -2.0 * a.damping.cast<cplx>().asDiagonal().toDenseMatrix();
        EXPECT_EQ((sum - expect).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_TRUE(a.drift == b.drift);
    }
}

TEST(Reduce, ThreeDotCouplingCoefficient) {
    ThreeDotParams p{1.0, {0.2, 0.5}, 3.0, 50.0, 1.0, 0.0};
    const auto r = adiabatic_reduce(three_dot_circuit(p));
    const cplx expected = p.lambda * p.lambda / p.kappa + I * p.g;
    EXPECT_LT(std::abs(r.phi() - expected), 1e-14);
    EXPECT_LT(std::abs(r.psi() - (p.lambda * p.lambda / p.kappa + I * std::conj(p.g))), 1e-14);
    EXPECT_EQ(r.aux_labels, (std::vector<std::string>{"a"}));
}

TEST(Reduce, FourDotDestructiveInterference) {
    // λ₁ = λ₂, no detuning, g₂₁ = −λ₁ (φ = π): the two paths cancel.
    FourDotParams p{1.0, 0.0, 0.0, 1.5, 1.5, std::numbers::pi, 20.0, 1.0};
    const auto r = adiabatic_reduce(four_dot_circuit(p));
    EXPECT_LT(std::abs(r.phi()), 1e-14);
    EXPECT_LT(std::abs(r.psi()), 1e-14);

    p.phi = 0.0;  // in-phase: Φ = Ψ = (λ₁² + λ₂²)/κ
    const auto q = adiabatic_reduce(four_dot_circuit(p));
    EXPECT_LT(std::abs(q.phi() - 2.0 * 1.5 * 1.5 / 20.0), 1e-14);
    EXPECT_LT(std::abs(q.psi() - q.phi()), 1e-14);
}

TEST(Reduce, FourDotDirectionalPhase) {
    const double lambda = 2.0, kappa = 10.0, delta = 5.0;
    const double phi = four_dot_directional_phase(lambda, lambda, delta, -delta, kappa);
    const double gamma = four_dot_matched_damping(lambda, lambda, delta, -delta, kappa);
    FourDotParams p{1.0, delta, -delta, lambda, lambda, phi, kappa, gamma};
    const auto r = adiabatic_reduce(four_dot_circuit(p));
    EXPECT_LT(std::abs(r.phi()), 1e-14);
    const cplx psi = 2.0 * gamma * I * delta / cplx(kappa, delta);
    EXPECT_LT(std::abs(r.psi() - psi), 1e-14);
    const auto eff = four_dot_effective(p);
    EXPECT_LT(std::abs(eff.psi - psi), 1e-14);
    EXPECT_LT(std::abs(eff.phi), 1e-14);
}

TEST(Reduce, WarnsWhenAuxiliaryNotFast) {
    ThreeDotParams p;
    p.kappa = 2.0;
    p.lambda = 1.0;
    EXPECT_FALSE(adiabatic_reduce(three_dot_circuit(p)).warnings.empty());
    EXPECT_TRUE(adiabatic_reduce(three_dot_circuit({})).warnings.empty());
}

TEST(Reduce, NothingToEliminate) {
    CircuitSpec s{{{"d1", DotRole::primary, 0, 1}, {"d2", DotRole::primary, 0, 1}}, {{"d1", "d2", 0.5}}};
    EXPECT_THROW((void)adiabatic_reduce(s), std::invalid_argument);
}

TEST(Reduce, FirstOrderInInverseKappa) {
    // Reduced-vs-full primary-block difference shrinks ~1/κ at fixed λ²/κ.
    double previous = 0.0;
    for (double kappa : {1e2, 1e3, 1e4}) {
        ThreeDotParams p{1.0, I, std::sqrt(kappa), kappa, 1.0, 0.0};
        const auto spec = three_dot_circuit(p);
        const auto full = scattering_matrix(assemble_drift(spec), 0.7);
        const auto red = reduced_scattering(adiabatic_reduce(spec), 0.7);
        const double err = (full.entries.topLeftCorner(2, 2) - red.entries).cwiseAbs().maxCoeff();
        if (previous > 0.0) {
            EXPECT_GT(previous / err, 8.0);
            EXPECT_LT(previous / err, 12.5);
        }
        previous = err;
    }
}
