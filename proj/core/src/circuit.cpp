#include "nrdot/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace nrdot {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::unordered_map<std::string, std::size_t> label_positions(const CircuitSpec& spec) {
    std::unordered_map<std::string, std::size_t> pos;
    const auto order = port_order(spec);
    for (std::size_t p = 0; p < order.size(); ++p) pos.emplace(spec.dots[order[p]].label, p);
    return pos;
}

}  // namespace

std::string ValidationReport::to_string() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

InvalidCircuit::InvalidCircuit(ValidationReport report)
    : std::invalid_argument("invalid circuit: " + report.to_string()), report_(std::move(report)) {}

ValidationReport validate_circuit(const CircuitSpec& spec) {
    ValidationReport report;
    auto& v = report.violations;
    if (spec.dots.empty()) v.push_back("empty circuit: no dots declared");

    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < spec.dots.size(); ++i) {
        const auto& dot = spec.dots[i];
        if (!seen.emplace(dot.label, i).second) v.push_back("duplicate label '" + dot.label + "'");
        if (!std::isfinite(dot.onsite)) v.push_back("non-finite value: onsite of '" + dot.label + "'");
        if (!(dot.lead_damping > 0.0) || !std::isfinite(dot.lead_damping))
            v.push_back("nonpositive damping on '" + dot.label + "'");
    }

    // Canonical orientation (lexicographic labels) so that (a,b,z) and (b,a,conj z) agree.
    std::unordered_map<std::string, cplx> pair_values;
    for (const auto& c : spec.couplings) {
        const std::string name = "'" + c.from + "'-'" + c.to + "'";
        bool dangling = false;
        for (const auto* end : {&c.from, &c.to}) {
            if (!seen.contains(*end)) {
                v.push_back("dangling endpoint '" + *end + "' in coupling " + name);
                dangling = true;
            }
        }
        if (!finite(c.value)) v.push_back("non-finite value in coupling " + name);
        if (c.from == c.to) {
            v.push_back("self-coupling on '" + c.from + "'");
            continue;
        }
        if (dangling) continue;
        const bool flip = c.to < c.from;
        const std::string key = flip ? c.to + '\x1f' + c.from : c.from + '\x1f' + c.to;
        const cplx canonical = flip ? std::conj(c.value) : c.value;
        auto [it, inserted] = pair_values.emplace(key, canonical);
        if (!inserted) {
            const double scale = std::max({1.0, std::abs(it->second), std::abs(canonical)});
            if (std::abs(it->second - canonical) > 1e-12 * scale)
                v.push_back("non-Hermitian coupling map: conflicting entries for " + name);
        }
    }
    return report;
}

std::vector<std::size_t> port_order(const CircuitSpec& spec) {
    std::vector<std::size_t> order;
    order.reserve(spec.dots.size());
    for (auto role : {DotRole::primary, DotRole::auxiliary})
        for (std::size_t i = 0; i < spec.dots.size(); ++i)
            if (spec.dots[i].role == role) order.push_back(i);
    return order;
}

Eigen::MatrixXcd coherent_hamiltonian(const CircuitSpec& spec) {
    auto report = validate_circuit(spec);
    if (!report.ok()) throw InvalidCircuit(std::move(report));

    const auto order = port_order(spec);
    const auto pos = label_positions(spec);
    const auto n = static_cast<Eigen::Index>(order.size());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index p = 0; p < n; ++p) h(p, p) = spec.dots[order[p]].onsite;
    for (const auto& c : spec.couplings) {
        const auto j = static_cast<Eigen::Index>(pos.at(c.from));
        const auto k = static_cast<Eigen::Index>(pos.at(c.to));
        h(j, k) = c.value;
        h(k, j) = std::conj(c.value);
    }
    return h;
}

int DriftModel::primary_count() const noexcept {
    return static_cast<int>(std::count(port_roles.begin(), port_roles.end(), DotRole::primary));
}

int DriftModel::port_index(const std::string& label) const {
    const auto it = std::find(port_labels.begin(), port_labels.end(), label);
    if (it == port_labels.end()) throw std::out_of_range("unknown port '" + label + "'");
    return static_cast<int>(it - port_labels.begin());
}

DriftModel assemble_drift(const CircuitSpec& spec) {
    DriftModel model;
    model.hamiltonian = coherent_hamiltonian(spec);
    const auto order = port_order(spec);
    const auto n = static_cast<Eigen::Index>(order.size());

    model.damping.resize(n);
    for (Eigen::Index p = 0; p < n; ++p) {
        const auto& dot = spec.dots[order[p]];
        model.damping(p) = dot.lead_damping;
        model.port_labels.push_back(dot.label);
        model.port_roles.push_back(dot.role);
    }
    const cplx i{0.0, 1.0};
    model.drift = -i * model.hamiltonian;
    model.drift.diagonal() -= model.damping.cast<cplx>();
    model.input = Eigen::MatrixXcd::Identity(n, n) * (-i * kSqrt2Pi);
    return model;
}

ReducedCircuit adiabatic_reduce(const CircuitSpec& spec) {
    const DriftModel full = assemble_drift(spec);
    const int np = full.primary_count();
    const int na = full.dim() - np;
    if (na == 0) throw std::invalid_argument("nothing to eliminate: circuit has no auxiliary dots");

    const auto m_pp = full.drift.topLeftCorner(np, np);
    const auto m_pa = full.drift.topRightCorner(np, na);
    const auto m_ap = full.drift.bottomLeftCorner(na, np);
    const auto m_aa = full.drift.bottomRightCorner(na, na);
    const auto c_a = full.input.bottomRightCorner(na, na);

    // 0 = M_AA·a + M_AP·d + C_A·a_in  ⇒  a = −M_AA⁻¹(M_AP·d + C_A·a_in)
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m_aa);
    ReducedCircuit reduced;
    reduced.drift = m_pp - m_pa * lu.solve(Eigen::MatrixXcd(m_ap));
    reduced.aux_routing = -m_pa * lu.solve(Eigen::MatrixXcd(c_a));
    reduced.damping = full.damping.head(np);
    reduced.port_labels.assign(full.port_labels.begin(), full.port_labels.begin() + np);
    reduced.aux_labels.assign(full.port_labels.begin() + np, full.port_labels.end());

    double other_scale = 0.0;
    for (int p = 0; p < np; ++p)
        other_scale = std::max({other_scale, std::abs(full.hamiltonian(p, p)), full.damping(p)});
    for (int j = 0; j < full.dim(); ++j)
        for (int k = 0; k < full.dim(); ++k)
            if (j != k) other_scale = std::max(other_scale, std::abs(full.hamiltonian(j, k)));
    for (int m = np; m < full.dim(); ++m) {
        if (full.damping(m) < kAdiabaticWarnRatio * other_scale) {
            std::ostringstream os;
            os << "auxiliary '" << full.port_labels[m] << "' damping " << full.damping(m)
               << " is below " << kAdiabaticWarnRatio << "x the largest other energy scale ("
               << other_scale << "); adiabatic elimination may be inaccurate";
            reduced.warnings.push_back(os.str());
        }
    }
    return reduced;
}

CircuitSpec three_dot_circuit(const ThreeDotParams& p) {
    CircuitSpec spec;
    spec.dots = {
        {"d1", DotRole::primary, p.eps_d, p.gamma},
        {"d2", DotRole::primary, p.eps_d, p.gamma},
        {"a", DotRole::auxiliary, p.aux_onsite, p.kappa},
    };
    spec.couplings = {
        {"d1", "d2", p.g},
        {"a", "d1", p.lambda},
        {"a", "d2", p.lambda},
    };
    return spec;
}

CircuitSpec four_dot_circuit(const FourDotParams& p) {
    CircuitSpec spec;
    spec.dots = {
        {"d1", DotRole::primary, p.eps_d, p.gamma},
        {"d2", DotRole::primary, p.eps_d, p.gamma},
        {"a1", DotRole::auxiliary, p.delta1, p.kappa},
        {"a2", DotRole::auxiliary, p.delta2, p.kappa},
    };
    // g_nm d_n a_m† + H.c. puts g_nm at H[a_m][d_n].
    spec.couplings = {
        {"a1", "d1", p.lambda1},
        {"a2", "d1", p.lambda2},
        {"a1", "d2", std::polar(p.lambda1, p.phi)},
        {"a2", "d2", p.lambda2},
    };
    return spec;
}

}  // namespace nrdot
