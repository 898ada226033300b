#pragma once

#include <string>

namespace nrdot {

// Thermal reservoir attached to one dot.
struct LeadState {
    std::string label;
    double mu{0.0};
    double temperature{1.0};
};

// 1/(exp((ε−μ)/T) + 1) with the exponent clamped to ±700.
[[nodiscard]] double fermi_dirac(double energy, const LeadState& lead);

}  // namespace nrdot
