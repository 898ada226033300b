#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace nrdot::app {

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{} (line {}): {}", key, line, message)
                                  : fmt::format("{}: {}", key, message)),
      key_(std::move(key)),
      line_(line) {}

namespace {

struct Entry {
    std::string value;
    int line{0};
    bool used{false};
};

struct Section {
    int line{0};
    std::map<std::string, Entry> entries;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::map<std::string, Section> tokenize(const std::string& text) {
    std::map<std::string, Section> out;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(s, line, "unterminated section header");
            current = trim(std::string_view(s).substr(1, s.size() - 2));
            if (current.empty()) throw ConfigError("[]", line, "empty section name");
            if (out.contains(current)) throw ConfigError(current, line, "duplicate section");
            out[current].line = line;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(s, line, "expected key = value");
        const std::string key = trim(std::string_view(s).substr(0, eq));
        std::string value = trim(std::string_view(s).substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
        if (current.empty()) throw ConfigError(key, line, "key outside of any section");
        const std::string path = current + "." + key;
        auto& sec = out[current];
        if (sec.entries.contains(key)) throw ConfigError(path, line, "duplicate key");
        sec.entries[key] = {value, line, false};
    }
    return out;
}

class Reader {
public:
    explicit Reader(std::map<std::string, Section>& sections) : sections_(sections) {}

    [[nodiscard]] bool has_section(const std::string& s) const { return sections_.contains(s); }

    Entry* find(const std::string& section, const std::string& key) {
        const auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        const auto e = s->second.entries.find(key);
        if (e == s->second.entries.end()) return nullptr;
        e->second.used = true;
        return &e->second;
    }

    std::optional<double> number(const std::string& section, const std::string& key) {
        Entry* e = find(section, key);
        if (!e) return std::nullopt;
        double v = 0.0;
        const char* first = e->value.data();
        const char* last = first + e->value.size();
        if (!e->value.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v))
            throw ConfigError(section + "." + key, e->line, "expected a finite number, got '" + e->value + "'");
        return v;
    }

    double number(const std::string& section, const std::string& key, double fallback) {
        return number(section, key).value_or(fallback);
    }

    std::optional<int> integer(const std::string& section, const std::string& key) {
        Entry* e = find(section, key);
        if (!e) return std::nullopt;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (ec != std::errc() || ptr != e->value.data() + e->value.size())
            throw ConfigError(section + "." + key, e->line, "expected an integer, got '" + e->value + "'");
        return v;
    }

    template <class T>
    std::optional<T> choice(const std::string& section, const std::string& key,
                            const std::vector<std::pair<std::string, T>>& options) {
        Entry* e = find(section, key);
        if (!e) return std::nullopt;
        for (const auto& [name, value] : options)
            if (name == e->value) return value;
        std::string allowed;
        for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + name;
        throw ConfigError(section + "." + key, e->line, "expected one of " + allowed + ", got '" + e->value + "'");
    }

    int line_of(const std::string& section, const std::string& key) {
        const auto s = sections_.find(section);
        if (s == sections_.end()) return 0;
        const auto e = s->second.entries.find(key);
        return e == s->second.entries.end() ? s->second.line : e->second.line;
    }

    void reject_unused() const {
        for (const auto& [name, sec] : sections_)
            for (const auto& [key, e] : sec.entries)
                if (!e.used) throw ConfigError(name + "." + key, e.line, "unknown key");
    }

private:
    std::map<std::string, Section>& sections_;
};

const std::vector<std::pair<std::string, bool>> kAutoModes = {
    {"auto", true}, {"auto_directional", true}, {"auto_matched", true}, {"explicit", false}};

std::string fmt_num(double v) { return fmt::format("{}", v); }

}  // namespace

RunConfig parse_config(const std::string& text) {
    auto sections = tokenize(text);
    Reader r(sections);
    static const std::set<std::string> known = {"model", "leads", "phonon", "sweep", "quadrature", "output"};
    for (const auto& [name, sec] : sections)
        if (!known.contains(name) && !name.starts_with("dot.") && !name.starts_with("coupling."))
            throw ConfigError(name, sec.line, "unknown section");

    RunConfig c;
    const auto kind = r.choice<ModelKind>("model", "kind",
                                          {{"three_dot", ModelKind::three_dot},
                                           {"four_dot", ModelKind::four_dot},
                                           {"custom", ModelKind::custom}});
    if (!kind) throw ConfigError("model.kind", r.line_of("model", "kind"), "missing required key");
    c.model = *kind;

    const bool four = c.model == ModelKind::four_dot;
    c.eps_d = r.number("model", "eps_d", 1.0);
    c.kappa = r.number("model", "kappa", four ? 30.0 : 100.0);
    c.lambda = r.number("model", "lambda", four ? 1.0 : 10.0);
    c.lambda1 = r.number("model", "lambda1", c.lambda);
    c.lambda2 = r.number("model", "lambda2", c.lambda);
    const double delta = r.number("model", "delta", four ? 30.0 : 0.0);
    c.delta1 = r.number("model", "delta1", delta);
    c.delta2 = r.number("model", "delta2", -delta);
    c.g_auto = r.choice("model", "g_mode", kAutoModes).value_or(true);
    c.g_abs = r.number("model", "g_abs", 0.0);
    c.phi = r.number("model", "phi", 0.0);
    c.direction = r.choice<Direction>("model", "direction",
                                      {{"forward", Direction::forward}, {"reverse", Direction::reverse}})
                      .value_or(Direction::forward);
    c.gamma_auto = r.choice("model", "gamma_mode", kAutoModes).value_or(true);
    c.gamma = r.number("model", "gamma", 1.0);
    c.path = r.choice<ScatterPath>("model", "path",
                                   {{"closed_form", ScatterPath::closed_form}, {"generic", ScatterPath::generic}})
                 .value_or(ScatterPath::closed_form);
    c.transport = r.choice<TransportKind>("model", "transport", {{"giom", TransportKind::giom}, {"lb", TransportKind::lb}})
                      .value_or(TransportKind::giom);
    c.four_dot_form = r.choice<FourDotCoefficients>("model", "four_dot_form",
                                                    {{"halved", FourDotCoefficients::halved},
                                                     {"lb_consistent", FourDotCoefficients::lb_consistent}})
                          .value_or(FourDotCoefficients::halved);

    for (const auto& [key, value] : std::map<std::string, double>{{"kappa", c.kappa}, {"gamma", c.gamma}})
        if (!(value > 0.0)) throw ConfigError("model." + key, r.line_of("model", key), "must be > 0");
    if (c.model != ModelKind::custom) {
        if (c.lambda1 <= 0.0 || c.lambda2 <= 0.0 || c.lambda <= 0.0)
            throw ConfigError("model.lambda", r.line_of("model", "lambda"), "must be > 0");
        if (!c.g_auto && c.g_abs < 0.0) throw ConfigError("model.g_abs", r.line_of("model", "g_abs"), "must be >= 0");
    }

    // Leads.
    c.temperature = r.number("leads", "T", four ? 1.0 : 0.5);
    if (!(c.temperature > 0.0)) throw ConfigError("leads.T", r.line_of("leads", "T"), "must be > 0");
    if (c.model == ModelKind::three_dot) c.mu["a"] = -50.0;
    if (four) c.mu["u"] = c.mu["d"] = -60.0;
    if (auto it = sections.find("leads"); it != sections.end()) {
        for (auto& [key, e] : it->second.entries) {
            if (key == "T") continue;
            if (!key.starts_with("mu_")) continue;  // left for reject_unused
            const std::string name = key.substr(3);
            if (c.model != ModelKind::custom && !c.mu.contains(name))
                throw ConfigError("leads." + key, e.line,
                                  "no such fixed lead for this model (L and R follow the bias V)");
            c.mu[name] = *r.number("leads", key);
        }
    }

    // Phonons.
    if (r.has_section("phonon")) {
        if (c.model != ModelKind::three_dot)
            throw ConfigError("phonon", r.line_of("phonon", ""), "phonons are only supported for model.kind = three_dot");
        PhononBlock ph;
        ph.nu = r.number("phonon", "nu", 0.0);
        ph.omega_c = r.number("phonon", "omega_c", 10.0);
        ph.renormalized = r.choice<bool>("phonon", "eps_d", {{"renormalized", true}, {"bare", false}}).value_or(true);
        if (ph.nu < 0.0) throw ConfigError("phonon.nu", r.line_of("phonon", "nu"), "must be >= 0");
        if (!(ph.omega_c > 0.0)) throw ConfigError("phonon.omega_c", r.line_of("phonon", "omega_c"), "must be > 0");
        c.phonon = ph;
    }

    // Sweep.
    if (auto k = r.choice<SweepKind>("sweep", "kind",
                                     {{"omega", SweepKind::omega},
                                      {"voltage", SweepKind::voltage},
                                      {"nu", SweepKind::nu},
                                      {"g_abs", SweepKind::g_abs}}))
        c.sweep.kind = *k;
    c.sweep.start = r.number("sweep", "start", c.sweep.start);
    c.sweep.stop = r.number("sweep", "stop", c.sweep.stop);
    c.sweep.points = r.integer("sweep", "points").value_or(c.sweep.points);
    c.sweep.voltage = r.number("sweep", "voltage", c.sweep.voltage);
    c.sweep.omega = r.number("sweep", "omega");
    if (c.sweep.points < 2) throw ConfigError("sweep.points", r.line_of("sweep", "points"), "must be >= 2");
    if (!(c.sweep.start < c.sweep.stop))
        throw ConfigError("sweep.start", r.line_of("sweep", "start"), "must be < sweep.stop");
    if (c.sweep.kind == SweepKind::nu && !c.phonon)
        throw ConfigError("sweep.kind", r.line_of("sweep", "kind"), "nu sweeps need a [phonon] section");
    if (c.sweep.kind == SweepKind::nu && c.sweep.start < 0.0)
        throw ConfigError("sweep.start", r.line_of("sweep", "start"), "nu must be >= 0");
    if (c.sweep.kind == SweepKind::g_abs && c.model != ModelKind::three_dot)
        throw ConfigError("sweep.kind", r.line_of("sweep", "kind"), "g_abs sweeps need model.kind = three_dot");

    // Quadrature.
    auto& q = c.quadrature;
    q.rel_tol = r.number("quadrature", "rel_tol", q.rel_tol);
    q.abs_tol = r.number("quadrature", "abs_tol", q.abs_tol);
    q.window_pad_T = r.number("quadrature", "window_pad_T", q.window_pad_T);
    q.window_pad_G = r.number("quadrature", "window_pad_G", q.window_pad_G);
    q.max_subdivisions = r.integer("quadrature", "max_subdivisions").value_or(q.max_subdivisions);
    try {
        q.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("quadrature", r.line_of("quadrature", ""), e.what());
    }

    if (Entry* e = r.find("output", "path")) c.output = e->value;

    // Custom circuits.
    for (const auto& [name, sec] : sections) {
        if (!name.starts_with("dot.")) continue;
        DotSpec d;
        d.label = name.substr(4);
        d.role = r.choice<DotRole>(name, "role", {{"primary", DotRole::primary}, {"auxiliary", DotRole::auxiliary}})
                     .value_or(DotRole::primary);
        d.onsite = r.number(name, "onsite", 0.0);
        d.lead_damping = r.number(name, "damping", 1.0);
        c.custom.dots.push_back(d);
    }
    for (const auto& [name, sec] : sections) {
        if (!name.starts_with("coupling.")) continue;
        const std::string rest = name.substr(9);
        const auto dot = rest.find('.');
        if (dot == std::string::npos) throw ConfigError(name, sec.line, "expected [coupling.FROM.TO]");
        Coupling cp{rest.substr(0, dot), rest.substr(dot + 1), {}};
        const auto abs = r.number(name, "abs");
        const auto phase = r.number(name, "phase");
        const auto re = r.number(name, "re");
        const auto im = r.number(name, "im");
        if ((abs || phase) && (re || im)) throw ConfigError(name, sec.line, "give either re/im or abs/phase");
        cp.value = (abs || phase) ? std::polar(abs.value_or(0.0), phase.value_or(0.0))
                                  : cplx(re.value_or(0.0), im.value_or(0.0));
        c.custom.couplings.push_back(cp);
    }
    if (c.model == ModelKind::custom) {
        const auto report = validate_circuit(c.custom);
        if (!report.ok()) throw ConfigError("dot", 0, report.to_string());
        const auto primaries = std::count_if(c.custom.dots.begin(), c.custom.dots.end(),
                                             [](const DotSpec& d) { return d.role == DotRole::primary; });
        if (primaries < 2) throw ConfigError("dot", 0, "custom circuits need at least two primary dots");
        for (const auto& d : c.custom.dots)
            if (d.role == DotRole::auxiliary && !c.mu.contains(d.label)) c.mu[d.label] = -50.0;
    } else if (!c.custom.dots.empty() || !c.custom.couplings.empty()) {
        throw ConfigError("dot", 0, "[dot.*] and [coupling.*] sections need model.kind = custom");
    }

    r.reject_unused();
    resolve(c);
    return c;
}

void resolve(RunConfig& c) {
    c.notes.clear();
    if (c.model == ModelKind::three_dot) {
        if (c.gamma_auto) {
            c.lambda = std::sqrt(c.kappa * c.gamma);
            c.lambda1 = c.lambda2 = c.lambda;
            c.notes.push_back(fmt::format("gamma_mode=auto: gamma={} kept as the unit, lambda={} so lambda^2/kappa=gamma",
                                          c.gamma, c.lambda));
        }
        if (c.g_auto) {
            const cplx g = three_dot_directional_coupling(c.lambda, c.kappa, c.direction);
            c.g_abs = std::abs(g);
            c.phi = std::arg(g);
            c.notes.push_back(fmt::format("g_mode=auto: g = {:+.12g}i ({})", g.imag(),
                                          c.direction == Direction::forward ? "forward, S12 = 0" : "reverse, S21 = 0"));
        }
    } else if (c.model == ModelKind::four_dot) {
        if (c.gamma_auto) {
            const double current = four_dot_matched_damping(c.lambda1, c.lambda2, c.delta1, c.delta2, c.kappa);
            const double s = std::sqrt(c.gamma / current);
            c.lambda1 *= s;
            c.lambda2 *= s;
            c.notes.push_back(fmt::format("gamma_mode=auto: gamma={} kept as the unit, lambda1={}, lambda2={}", c.gamma,
                                          c.lambda1, c.lambda2));
        }
        if (c.g_auto) {
            try {
                c.phi = four_dot_directional_phase(c.lambda1, c.lambda2, c.delta1, c.delta2, c.kappa, c.direction);
            } catch (const NoPhaseSolution& e) {
                throw ConfigError("model.phi", 0, e.what());
            }
            c.notes.push_back(fmt::format("g_mode=auto: loop phase phi={:.12g} ({})", c.phi,
                                          c.direction == Direction::forward ? "forward, S12 = 0" : "reverse, S21 = 0"));
        }
    }
}

std::string to_ini(const RunConfig& c) {
    std::ostringstream os;
    static const char* kinds[] = {"three_dot", "four_dot", "custom"};
    os << "[model]\n";
    os << "kind = " << kinds[static_cast<int>(c.model)] << "\n";
    if (c.model != ModelKind::custom) {
        os << "eps_d = " << fmt_num(c.eps_d) << "\n";
        os << "kappa = " << fmt_num(c.kappa) << "\n";
        if (c.model == ModelKind::three_dot) {
            os << "lambda = " << fmt_num(c.lambda) << "\n";
        } else {
            os << "lambda1 = " << fmt_num(c.lambda1) << "\nlambda2 = " << fmt_num(c.lambda2) << "\n";
            os << "delta1 = " << fmt_num(c.delta1) << "\ndelta2 = " << fmt_num(c.delta2) << "\n";
        }
        os << "g_mode = " << (c.g_auto ? "auto" : "explicit") << "\n";
        if (c.model == ModelKind::three_dot) os << "g_abs = " << fmt_num(c.g_abs) << "\n";
        os << "phi = " << fmt_num(c.phi) << "\n";
        os << "direction = " << (c.direction == Direction::forward ? "forward" : "reverse") << "\n";
        os << "gamma_mode = " << (c.gamma_auto ? "auto" : "explicit") << "\n";
    }
    os << "gamma = " << fmt_num(c.gamma) << "\n";
    os << "path = " << (c.path == ScatterPath::closed_form ? "closed_form" : "generic") << "\n";
    os << "transport = " << (c.transport == TransportKind::giom ? "giom" : "lb") << "\n";
    if (c.model == ModelKind::four_dot)
        os << "four_dot_form = " << (c.four_dot_form == FourDotCoefficients::halved ? "halved" : "lb_consistent") << "\n";

    os << "\n[leads]\nT = " << fmt_num(c.temperature) << "\n";
    for (const auto& [name, mu] : c.mu) os << "mu_" << name << " = " << fmt_num(mu) << "\n";

    if (c.phonon) {
        os << "\n[phonon]\nnu = " << fmt_num(c.phonon->nu) << "\nomega_c = " << fmt_num(c.phonon->omega_c)
           << "\neps_d = " << (c.phonon->renormalized ? "renormalized" : "bare") << "\n";
    }

    static const char* sweeps[] = {"omega", "voltage", "nu", "g_abs"};
    os << "\n[sweep]\nkind = " << sweeps[static_cast<int>(c.sweep.kind)] << "\n";
    os << "start = " << fmt_num(c.sweep.start) << "\nstop = " << fmt_num(c.sweep.stop) << "\n";
    os << "points = " << c.sweep.points << "\nvoltage = " << fmt_num(c.sweep.voltage) << "\n";
    if (c.sweep.omega) os << "omega = " << fmt_num(*c.sweep.omega) << "\n";

    const auto& q = c.quadrature;
    os << "\n[quadrature]\nrel_tol = " << fmt_num(q.rel_tol) << "\nabs_tol = " << fmt_num(q.abs_tol)
       << "\nwindow_pad_T = " << fmt_num(q.window_pad_T) << "\nwindow_pad_G = " << fmt_num(q.window_pad_G)
       << "\nmax_subdivisions = " << q.max_subdivisions << "\n";

    if (!c.output.empty()) os << "\n[output]\npath = " << c.output << "\n";

    if (c.model == ModelKind::custom) {
        for (const auto& d : c.custom.dots)
            os << "\n[dot." << d.label << "]\nrole = " << (d.role == DotRole::primary ? "primary" : "auxiliary")
               << "\nonsite = " << fmt_num(d.onsite) << "\ndamping = " << fmt_num(d.lead_damping) << "\n";
        for (const auto& cp : c.custom.couplings)
            os << "\n[coupling." << cp.from << "." << cp.to << "]\nre = " << fmt_num(cp.value.real())
               << "\nim = " << fmt_num(cp.value.imag()) << "\n";
    }
    return os.str();
}

cplx three_dot_g(const RunConfig& c) {
    if (c.g_auto) return three_dot_directional_coupling(c.lambda, c.kappa, c.direction);
    return std::polar(c.g_abs, c.phi);
}

ThreeDotParams three_dot_params(const RunConfig& c) {
    ThreeDotParams p;
    p.eps_d = c.eps_d;
    p.g = three_dot_g(c);
    p.lambda = c.lambda;
    p.kappa = c.kappa;
    p.gamma = c.gamma;
    return p;
}

FourDotParams four_dot_params(const RunConfig& c) {
    return {c.eps_d, c.delta1, c.delta2, c.lambda1, c.lambda2, c.phi, c.kappa, c.gamma};
}

CircuitSpec circuit_of(const RunConfig& c) {
    switch (c.model) {
        case ModelKind::three_dot: return three_dot_circuit(three_dot_params(c));
        case ModelKind::four_dot: return four_dot_circuit(four_dot_params(c));
        case ModelKind::custom: return c.custom;
    }
    return c.custom;
}

}  // namespace nrdot::app
