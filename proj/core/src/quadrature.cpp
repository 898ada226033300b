#include "nrdot/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace nrdot {

double fermi_dirac(double energy, const LeadState& lead) {
    const double x = std::clamp((energy - lead.mu) / lead.temperature, -700.0, 700.0);
    return 1.0 / (std::exp(x) + 1.0);
}

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be positive");
    if (!(window_pad_T >= 10.0) || !(window_pad_G >= 10.0))
        throw std::invalid_argument("quadrature window pads must be >= 10");
    if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be >= 1");
}

namespace {

// QUADPACK qk21 abscissae (descending, last is the centre) and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600340266558, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss 10-point weights for kXgk[1], kXgk[3], ..., kXgk[9].
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
    double lo, hi;
    std::vector<double> value;
    double error;
};

struct ByError {
    bool operator()(const Segment& a, const Segment& b) const { return a.error < b.error; }
};

class Kronrod21 {
public:
    Kronrod21(std::size_t components, const VectorKernel& f)
        : n_(components), f_(f), samples_(21 * components), kron_(components), gauss_(components) {}

    Segment apply(double lo, double hi) {
        const double centre = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        auto at = [&](int node) { return std::span<double>(samples_.data() + node * n_, n_); };
        f_(centre, at(0));
        for (int j = 0; j < 10; ++j) {
            f_(centre - half * kXgk[j], at(1 + 2 * j));
            f_(centre + half * kXgk[j], at(2 + 2 * j));
        }

        Segment seg{lo, hi, std::vector<double>(n_), 0.0};
        for (std::size_t c = 0; c < n_; ++c) {
            const double fc = samples_[c];
            double resk = kWgk[10] * fc;
            double resg = 0.0;
            double resabs = std::abs(resk);
            for (int j = 0; j < 10; ++j) {
                const double f1 = samples_[(1 + 2 * j) * n_ + c];
                const double f2 = samples_[(2 + 2 * j) * n_ + c];
                resk += kWgk[j] * (f1 + f2);
                resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
                if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
            }
            const double mean = 0.5 * resk;
            double resasc = kWgk[10] * std::abs(fc - mean);
            for (int j = 0; j < 10; ++j)
                resasc += kWgk[j] * (std::abs(samples_[(1 + 2 * j) * n_ + c] - mean) +
                                     std::abs(samples_[(2 + 2 * j) * n_ + c] - mean));
            resasc *= std::abs(half);
            resabs *= std::abs(half);
            double err = std::abs((resk - resg) * half);
            if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
            if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
            if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
            seg.value[c] = resk * half;
            seg.error = std::max(seg.error, err);
        }
        return seg;
    }

private:
    std::size_t n_;
    const VectorKernel& f_;
    std::vector<double> samples_;
    std::vector<double> kron_;
    std::vector<double> gauss_;
};

}  // namespace

VectorQuadrature integrate_adaptive(std::size_t components, const VectorKernel& f,
                                    std::span<const Interval> pieces, double rel_tol, double abs_tol,
                                    int max_subdivisions) {
    VectorQuadrature out;
    out.values.assign(components, 0.0);
    if (pieces.empty() || components == 0) return out;

    Kronrod21 rule(components, f);
    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    std::vector<double> total(components, 0.0);
    double total_error = 0.0;
    for (const auto& p : pieces) {
        if (!(p.hi > p.lo)) continue;
        auto seg = rule.apply(p.lo, p.hi);
        for (std::size_t c = 0; c < components; ++c) total[c] += seg.value[c];
        total_error += seg.error;
        heap.push(std::move(seg));
    }

    auto target = [&] {
        double scale = 0.0;
        for (double v : total) scale = std::max(scale, std::abs(v));
        return std::max(abs_tol, rel_tol * scale);
    };

    std::vector<Segment> retired;  // too narrow to bisect further
    while (!heap.empty() && total_error > target()) {
        if (out.subdivisions >= max_subdivisions) {
            out.converged = false;
            break;
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi) ||
            worst.hi - worst.lo < 1e3 * kEps * std::max(std::abs(worst.lo), std::abs(worst.hi))) {
            retired.push_back(std::move(worst));
            continue;
        }
        auto left = rule.apply(worst.lo, mid);
        auto right = rule.apply(mid, worst.hi);
        for (std::size_t c = 0; c < components; ++c) total[c] += left.value[c] + right.value[c] - worst.value[c];
        total_error += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++out.subdivisions;
    }

    // Re-sum from the leaves to avoid drift in the running totals.
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.error = 0.0;
    auto add = [&](const Segment& s) {
        for (std::size_t c = 0; c < components; ++c) out.values[c] += s.value[c];
        out.error += s.error;
    };
    for (const auto& s : retired) add(s);
    while (!heap.empty()) {
        add(heap.top());
        heap.pop();
    }
    double scale = 0.0;
    for (double v : out.values) scale = std::max(scale, std::abs(v));
    if (out.error > std::max(abs_tol, rel_tol * scale)) out.converged = false;
    return out;
}

ScalarQuadrature integrate_adaptive(const ScalarKernel& f, std::span<const Interval> pieces, double rel_tol,
                                    double abs_tol, int max_subdivisions) {
    const VectorKernel wrapped = [&f](double x, std::span<double> out) { out[0] = f(x); };
    const auto r = integrate_adaptive(1, wrapped, pieces, rel_tol, abs_tol, max_subdivisions);
    return {r.values[0], r.error, r.subdivisions, r.converged};
}

std::vector<Interval> integration_window(std::span<const LeadState> leads, std::span<const double> centers,
                                         std::span<const double> widths, const QuadratureConfig& cfg) {
    cfg.validate();
    if (centers.size() != widths.size()) throw std::invalid_argument("centers and widths differ in length");

    std::vector<Interval> spans;
    std::vector<double> breaks;
    if (!leads.empty()) {
        double lo = leads[0].mu, hi = leads[0].mu, t_max = 0.0;
        for (const auto& l : leads) {
            if (!(l.temperature > 0.0)) throw std::invalid_argument("lead '" + l.label + "' temperature must be > 0");
            lo = std::min(lo, l.mu);
            hi = std::max(hi, l.mu);
            t_max = std::max(t_max, l.temperature);
            // A step much narrower than its segment falls between the outer Kronrod nodes and
            // would pass unnoticed; give each Fermi edge segments on the scale of its own T.
            for (double k : {0.0, -40.0, -10.0, 10.0, 40.0}) breaks.push_back(l.mu + k * l.temperature);
        }
        spans.push_back({lo - cfg.window_pad_T * t_max, hi + cfg.window_pad_T * t_max});
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double w = std::abs(widths[i]);
        spans.push_back({centers[i] - cfg.window_pad_G * w, centers[i] + cfg.window_pad_G * w});
        for (double k : {0.0, -5.0, 5.0}) breaks.push_back(centers[i] + k * w);
    }
    std::sort(spans.begin(), spans.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

    std::vector<Interval> merged;
    for (const auto& s : spans) {
        if (!(s.hi > s.lo)) continue;
        if (!merged.empty() && s.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, s.hi);
        else
            merged.push_back(s);
    }

    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<Interval> pieces;
    for (const auto& m : merged) {
        double lo = m.lo;
        for (double b : breaks) {
            if (b > lo && b < m.hi) {
                pieces.push_back({lo, b});
                lo = b;
            }
        }
        pieces.push_back({lo, m.hi});
    }
    return pieces;
}

ScalarQuadrature integrate(const ScalarKernel& kernel, std::span<const LeadState> leads,
                           std::span<const double> centers, std::span<const double> widths,
                           const QuadratureConfig& cfg) {
    const auto pieces = integration_window(leads, centers, widths, cfg);
    return integrate_adaptive(kernel, pieces, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
}

VectorQuadrature integrate(std::size_t components, const VectorKernel& kernel, std::span<const LeadState> leads,
                           std::span<const double> centers, std::span<const double> widths,
                           const QuadratureConfig& cfg) {
    const auto pieces = integration_window(leads, centers, widths, cfg);
    return integrate_adaptive(components, kernel, pieces, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
}

}  // namespace nrdot
