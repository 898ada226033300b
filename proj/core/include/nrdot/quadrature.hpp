// quadrature.hpp — global adaptive Gauss-Kronrod (21-point) integration over
// unions of Fermi and resonance windows.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nrdot/leads.hpp"

namespace nrdot {

struct QuadratureConfig {
    double rel_tol{1e-9};
    double abs_tol{1e-12};
    double window_pad_T{50.0};  // in units of the largest lead temperature
    double window_pad_G{50.0};  // in units of each resonance width
    int max_subdivisions{2000};

    // Throws std::invalid_argument on nonpositive tolerances or pads below 10.
    void validate() const;
};

struct Interval {
    double lo{0.0};
    double hi{0.0};
};

struct ScalarQuadrature {
    double value{0.0};
    double error{0.0};
    int subdivisions{0};
    bool converged{true};
};

struct VectorQuadrature {
    std::vector<double> values;
    double error{0.0};
    int subdivisions{0};
    bool converged{true};
};

// Writes `components` kernel values at x into out.
using VectorKernel = std::function<void(double x, std::span<double> out)>;
using ScalarKernel = std::function<double(double x)>;

// Bisects the piece with the largest error estimate until the summed estimate drops below
// max(abs_tol, rel_tol·max_c|I_c|) or max_subdivisions bisections have been spent.
[[nodiscard]] VectorQuadrature integrate_adaptive(std::size_t components, const VectorKernel& f,
                                                  std::span<const Interval> pieces, double rel_tol,
                                                  double abs_tol, int max_subdivisions);
[[nodiscard]] ScalarQuadrature integrate_adaptive(const ScalarKernel& f, std::span<const Interval> pieces,
                                                  double rel_tol, double abs_tol, int max_subdivisions);

// Union of [min μ − pad_T·T_max, max μ + pad_T·T_max] and every center ± pad_G·width,
// merged and split at each μ, μ ± 10T, μ ± 40T, center and center ± 5·width that falls inside.
[[nodiscard]] std::vector<Interval> integration_window(std::span<const LeadState> leads,
                                                       std::span<const double> centers,
                                                       std::span<const double> widths,
                                                       const QuadratureConfig& cfg);

[[nodiscard]] ScalarQuadrature integrate(const ScalarKernel& kernel, std::span<const LeadState> leads,
                                         std::span<const double> centers, std::span<const double> widths,
                                         const QuadratureConfig& cfg);
[[nodiscard]] VectorQuadrature integrate(std::size_t components, const VectorKernel& kernel,
                                         std::span<const LeadState> leads, std::span<const double> centers,
                                         std::span<const double> widths, const QuadratureConfig& cfg);

}  // namespace nrdot
