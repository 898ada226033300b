#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <nrdot/scattering.hpp>

#include "random_circuits.hpp"

using namespace nrdot;

namespace {

constexpr cplx I{0.0, 1.0};

ThreeDotParams optimal_three_dot(double lambda, double kappa, double eps_d = 1.0) {
    ThreeDotParams p;
    p.eps_d = eps_d;
    p.lambda = lambda;
    p.kappa = kappa;
    p.g = three_dot_directional_coupling(lambda, kappa);
    p.gamma = three_dot_matched_damping(lambda, kappa);
    return p;
}

FourDotParams optimal_four_dot(double delta, double kappa, double gamma, double eps_d = 1.0) {
    // λ₁ = λ₂ = λ with Γ = 2λ²κ/(κ²+δ²).
    const double lambda = std::sqrt(gamma * (kappa * kappa + delta * delta) / (2.0 * kappa));
    FourDotParams p{eps_d, delta, -delta, lambda, lambda, 0.0, kappa, gamma};
    p.phi = four_dot_directional_phase(lambda, lambda, delta, -delta, kappa);
    return p;
}

}  // namespace

TEST(Generic, SingleDotIsAllPass) {
    CircuitSpec s{{{"d", DotRole::primary, 0.4, 1.7}}, {}};
    const auto dm = assemble_drift(s);
    for (double w : {-10.0, 0.0, 0.4, 3.0}) {
        const cplx x = I * (0.4 - w);
        const auto S = scattering_matrix(dm, w);
        EXPECT_LT(std::abs(S(0, 0) - (x - 1.7) / (x + 1.7)), 1e-14);
        EXPECT_NEAR(std::abs(S(0, 0)), 1.0, 1e-14);
    }
}

TEST(Generic, ThreeDotLargeKappaNearlyIdeal) {
    const auto p = optimal_three_dot(100.0, 1e4);
    const auto S = scattering_matrix(assemble_drift(three_dot_circuit(p)), p.eps_d);
    EXPECT_NEAR(std::norm(S(1, 0)), 1.0, 1e-3);
    EXPECT_LT(std::norm(S(0, 0)), 1e-3);
    EXPECT_LT(std::norm(S(0, 1)), 1e-3);
}

TEST(Generic, ApproachesIdentityFarFromResonance) {
    const auto dm = assemble_drift(three_dot_circuit(optimal_three_dot(10.0, 100.0)));
    const auto S = scattering_matrix(dm, 1e9);
    EXPECT_LT((S.entries - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Generic, FluxNormalizedUnitarityAndDeterminant) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> omega(-20.0, 20.0);
    for (int c = 0; c < 50; ++c) {
        const auto dm = assemble_drift(testing_support::random_circuit(rng));
        for (int k = 0; k < 20; ++k) {
            const auto S = scattering_matrix(dm, omega(rng));
            const Eigen::MatrixXcd u = flux_normalized(S, dm.damping);
            const auto n = u.rows();
            EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_NEAR(std::abs(S.entries.determinant()), 1.0, 1e-10);
        }
    }
}

TEST(Generic, SingularResolventReported) {
    // Zero damping on the only port makes (−iω − M) singular at ω = ε.
    DriftModel dm = assemble_drift(CircuitSpec{{{"d", DotRole::primary, 0.5, 1.0}}, {}});
    dm.drift(0, 0) = cplx(0.0, -0.5);
    dm.damping(0) = 0.0;
    EXPECT_THROW((void)scattering_matrix(dm, 0.5), SingularResolvent);
}

TEST(ClosedForm, DirectionalThreeDotBlocksReverse) {
    auto p = optimal_three_dot(3.0, 30.0);
    p.gamma = 0.7;  // matching not needed for S12 = 0
    for (double w = -20.0; w <= 20.0; w += 0.37) EXPECT_LT(std::abs(three_dot_closed_form(p, w)(0, 1)), 1e-14);
}

TEST(ClosedForm, OptimalThreeDotExact) {
    const auto p = optimal_three_dot(1.0, 100.0);
    const auto S = three_dot_closed_form(p, p.eps_d);
    EXPECT_LT(std::abs(S(0, 0)), 1e-15);
    EXPECT_LT(std::abs(S(1, 1)), 1e-15);
    EXPECT_LT(std::abs(S(1, 0) - 1.0), 1e-15);
}

TEST(ClosedForm, RealCouplingIsReciprocal) {
    ThreeDotParams p{1.0, cplx(-0.8, 0.0), 2.0, 40.0, 1.0, 0.0};
    for (double w = -5.0; w <= 5.0; w += 0.5) {
        const auto S = three_dot_closed_form(p, w);
        EXPECT_NEAR(std::abs(S(0, 1)), std::abs(S(1, 0)), 1e-14);
        EXPECT_NEAR(isolation_report(S, 1, 0).isolation_ratio, 1.0, 1e-12);
    }
}

TEST(ClosedForm, PhaseReversalDuality) {
    for (double phi : {-2.0, -0.3, 0.9, 2.8}) {
        ThreeDotParams a{1.0, std::polar(0.6, phi), 2.0, 30.0, 1.0, 0.0};
        ThreeDotParams b = a;
        b.g = std::polar(0.6, -phi);
        for (double w : {-3.0, 0.5, 1.0, 4.0}) {
            EXPECT_NEAR(std::abs(three_dot_closed_form(a, w)(1, 0)), std::abs(three_dot_closed_form(b, w)(0, 1)), 1e-14);
            const auto spec_a = three_dot_circuit(a), spec_b = three_dot_circuit(b);
            EXPECT_NEAR(std::abs(scattering_matrix(assemble_drift(spec_a), w)(1, 0)),
                        std::abs(scattering_matrix(assemble_drift(spec_b), w)(0, 1)), 1e-13);
        }
    }
}

TEST(ClosedForm, ThreeDotMatchesReducedDynamics) {
    ThreeDotParams p{0.4, cplx(0.3, 0.5), 2.0, 25.0, 0.9, 0.0};
    const auto red = adiabatic_reduce(three_dot_circuit(p));
    for (double w : {-2.0, 0.4, 1.3}) {
        const auto a = three_dot_closed_form(p, w), b = reduced_scattering(red, w);
        EXPECT_LT((a.entries - b.entries).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(ClosedForm, FourDotMatchesReducedDynamics) {
    FourDotParams p{0.4, 1.5, -0.7, 1.2, 0.8, 0.9, 12.0, 0.6};
    const auto red = adiabatic_reduce(four_dot_circuit(p));
    for (double w : {-2.0, 0.4, 1.3}) {
        const auto a = four_dot_closed_form(p, w), b = reduced_scattering(red, w);
        EXPECT_LT((a.entries - b.entries).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(ClosedForm, FourDotEqualDetuningIsReciprocal) {
    // Φ and Ψ then differ only by the gauge phase e^{±iφ}; with φ = 0 they coincide.
    FourDotParams p{1.0, 2.0, 2.0, 1.1, 0.7, 0.6, 10.0, 1.0};
    for (double w : {-1.0, 1.0, 3.0}) {
        const auto S = four_dot_closed_form(p, w);
        EXPECT_NEAR(std::abs(S(0, 1)), std::abs(S(1, 0)), 1e-14);
        const auto eff = four_dot_effective(p);
        EXPECT_NEAR(std::abs(eff.phi), std::abs(eff.psi), 1e-14);
    }
    p.phi = 0.0;
    EXPECT_LT(std::abs(four_dot_closed_form(p, 0.3)(0, 1) - four_dot_closed_form(p, 0.3)(1, 0)), 1e-14);
}

TEST(ClosedForm, FourDotOptimum) {
    const auto p = optimal_four_dot(5.0, 10.0, 1.0);
    const auto eff = four_dot_effective(p);
    EXPECT_NEAR(eff.total_damping, 2.0 * p.gamma, 1e-14);
    const auto S = four_dot_closed_form(p, eff.detuned_onsite);
    EXPECT_NEAR(std::norm(S(1, 0)), 0.2, 1e-12);
    EXPECT_LT(std::abs(S(0, 0)), 1e-12);
    EXPECT_LT(std::abs(S(1, 1)), 1e-12);
    EXPECT_LT(std::abs(S(0, 1)), 1e-12);
}

TEST(Conditions, ThreeDotDirectionalCoupling) {
    EXPECT_LT(std::abs(three_dot_directional_coupling(1.0, 100.0) - 0.01 * I), 1e-18);
    EXPECT_LT(std::abs(three_dot_directional_coupling(1.0, 100.0, Direction::reverse) + 0.01 * I), 1e-18);
    EXPECT_DOUBLE_EQ(three_dot_matched_damping(1.0, 100.0), 0.01);
    EXPECT_THROW((void)three_dot_directional_coupling(0.0, 1.0), std::invalid_argument);
}

TEST(Conditions, ReverseThreeDotSwapsRoles) {
    auto p = optimal_three_dot(2.0, 40.0);
    p.g = three_dot_directional_coupling(p.lambda, p.kappa, Direction::reverse);
    const auto S = three_dot_closed_form(p, p.eps_d);
    EXPECT_LT(std::abs(S(1, 0)), 1e-15);
    EXPECT_NEAR(std::norm(S(0, 1)), 1.0, 1e-14);
}

TEST(Conditions, FourDotPhaseClosedForm) {
    for (double delta : {0.0, 1.0, 5.0, -3.0, 40.0}) {
        const double kappa = 10.0;
        const double phi = four_dot_directional_phase(1.3, 1.3, delta, -delta, kappa);
        const double expected = std::numbers::pi + 2.0 * std::atan(delta / kappa);
        EXPECT_LT(std::abs(std::polar(1.0, phi) - std::polar(1.0, expected)), 1e-13) << delta;
        EXPECT_GT(phi, -std::numbers::pi);
        EXPECT_LE(phi, std::numbers::pi);
        const double rev = four_dot_directional_phase(1.3, 1.3, delta, -delta, kappa, Direction::reverse);
        EXPECT_LT(std::abs(std::polar(1.0, rev) - std::polar(1.0, -expected)), 1e-13);
    }
}

TEST(Conditions, FourDotNoPhaseSolution) {
    EXPECT_THROW((void)four_dot_directional_phase(1.0, 2.0, 1.0, -1.0, 10.0), NoPhaseSolution);
}

TEST(Conditions, FourDotMatchedDamping) {
    EXPECT_NEAR(four_dot_matched_damping(2.0, 2.0, 3.0, -3.0, 10.0), 2.0 * 4.0 * 10.0 / 109.0, 1e-15);
    EXPECT_NEAR(four_dot_matched_damping(1.5, 0.5, 0.0, 0.0, 10.0), (2.25 + 0.25) / 10.0, 1e-15);
}

TEST(Matching, NumericThreeDot) {
    auto p = optimal_three_dot(2.0, 400.0, 0.0);
    p.gamma = 1.0;  // the solver replaces it
    const auto sol = solve_matching_numerically(assemble_drift(three_dot_circuit(p)), 0.0, "d1");
    EXPECT_NEAR(sol.gamma, 2.0 * 2.0 / 400.0, 1e-8);
    EXPECT_FALSE(sol.boundary);
    EXPECT_LT(sol.reflection, 1e-6);
}

TEST(Matching, NumericFourDot) {
    auto p = optimal_four_dot(5.0, 10.0, 1.0, 0.0);
    const double target = p.gamma;
    p.gamma = 3.0;
    const auto eff = four_dot_effective(p);
    const auto sol = solve_matching_numerically(assemble_drift(four_dot_circuit(p)), eff.detuned_onsite, "d1");
    EXPECT_NEAR(sol.gamma, target, 1e-8);
    EXPECT_FALSE(sol.boundary);
}

TEST(Matching, SingleDotHitsBoundary) {
    const auto sol = solve_matching_numerically(assemble_drift(CircuitSpec{{{"d", DotRole::primary, 0, 1}}, {}}), 0.0, "d");
    EXPECT_TRUE(sol.boundary);
    EXPECT_NEAR(sol.reflection, 1.0, 1e-12);
}

TEST(Matching, AuxiliaryPortRejected) {
    EXPECT_THROW((void)solve_matching_numerically(assemble_drift(three_dot_circuit({})), 1.0, "a"), std::invalid_argument);
}

TEST(Isolation, OptimalThreeDot) {
    const auto p = optimal_three_dot(1.0, 100.0);
    const auto r = isolation_report(three_dot_closed_form(p, p.eps_d), "d2", "d1");
    EXPECT_NEAR(r.forward_t, 1.0, 1e-14);
    EXPECT_LT(r.reverse_t, 1e-28);
    EXPECT_LT(r.reflection_j, 1e-28);
    EXPECT_LT(r.reflection_k, 1e-28);
    EXPECT_TRUE(std::isinf(r.isolation_ratio));
}

TEST(Isolation, Identity) {
    ScatteringMatrix s;
    s.entries = Eigen::MatrixXcd::Identity(2, 2);
    s.port_labels = {"x", "y"};
    const auto r = isolation_report(s, 0, 1);
    EXPECT_EQ(r.forward_t, 0.0);
    EXPECT_EQ(r.reverse_t, 0.0);
    EXPECT_EQ(r.reflection_j, 1.0);
    EXPECT_EQ(r.reflection_k, 1.0);
    EXPECT_THROW((void)isolation_report(s, 0, 0), std::invalid_argument);
    EXPECT_THROW((void)isolation_report(s, "x", "zz"), std::out_of_range);
}

TEST(Isolation, BoundedForEqualDampingPorts) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        ThreeDotParams p{u(rng), {u(rng), u(rng)}, std::abs(u(rng)) + 0.1, 20.0 + 10 * std::abs(u(rng)), 1.0, 0.0};
        const auto r = isolation_report(scattering_matrix(assemble_drift(three_dot_circuit(p)), u(rng)), 1, 0);
        for (double v : {r.forward_t, r.reverse_t, r.reflection_j, r.reflection_k}) EXPECT_LE(v, 1.0 + 1e-9);
    }
}
