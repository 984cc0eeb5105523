// scenarios.hpp — the built-in catalog of concrete examples.
//
// A Scenario bundles a chart (dimension + pairing convention), the pair
// (f, g), a distinguished point x, a domain box, and optional extras:
// sequence families indexed by n, a first-order bilinear form when the
// example is not about the standard bracket, and a preferred cube
// half-width for the perturbation construction.
//
// Reference values are never trusted as written: every scenario carries
// named checks that the loader re-runs against the bracket operators, and
// catalog() throws naming the failing identity if any disagrees.
//
// Built-ins:
//   cubic_model       f = x - x^3/3 - x y^2, g = y; h = 1 - x^2 - y^2,
//                     Phi(0) = 4, A = 2 — the rate-sweep workhorse
//   quadratic_model   f = x, g = y(1 - x^2 - y^2); Phi(0) = 8
//   quartic_model     h = 1 - (x^2+y^2)^2: multiplicity 4 at the origin,
//                     exercising the higher-order operators at l = 2
//   polterovich       F_n = chi(p)/sqrt(n) cos(nq), G_n = chi(p)/sqrt(n) sin(nq)
//   incomplete_flow   (x,y,z,u), -1 < z < 1, chi(t) = sqrt(2t+2); the pair
//                     f_n, g_n bracket-commutes while {f,g} = 1
//   nonlocal_cutoff   tensor-bump truncation of incomplete_flow
//   staircase         B(u,v) = u_x v_x with h = x on [-3,3]^2
//   torus_B           B(f,g) = (sin(z)^2+1)(f_x g_y - f_y g_x) on [0,2pi]^3

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pblab/bracketops.hpp"
#include "pblab/box.hpp"
#include "pblab/parser.hpp"
#include "pblab/toml.hpp"

namespace pblab {

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioCheck {
    std::string name;
    std::string provenance;
    double expected = 0.0;
    double tolerance = 1e-6;
    std::function<double()> compute;
};

struct ScenarioFlags {
    std::optional<bool> complete_flow;
    std::optional<bool> rigidity_holds;
    std::optional<bool> locality_holds;
};

struct Scenario {
    std::string name;
    int dim = 2;
    PairingConvention conv;
    FieldExpr f, g;
    Point x;
    Box box;
    std::optional<double> cube_half_width;  // preferred b for the construction
    std::function<FieldExpr(int)> f_seq, g_seq;
    std::optional<FirstOrderForm> bilinear;
    ScenarioFlags flags;
    std::vector<ScenarioCheck> checks;
    std::map<std::string, double> reference;  // verified values, by name

    bool has_sequences() const { return static_cast<bool>(f_seq); }

    void verify() const {
        for (const auto& c : checks) {
            const double got = c.compute();
            if (std::abs(got - c.expected) > c.tolerance)
                throw ScenarioError("scenario '" + name + "': check '" + c.name +
                                    "' got " + std::to_string(got) + ", expected " +
                                    std::to_string(c.expected) + " [" + c.provenance + "]");
        }
    }
};

namespace builtin {

inline Scenario cubic_model() {
    Scenario s;
    s.name = "cubic_model";
    s.dim = 2;
    s.conv = PairingConvention::standard(2);
    s.f = parse_field("x - x^3/3 - x*y^2", 2);
    s.g = parse_field("y", 2);
    s.x = {0.0, 0.0};
    s.box = Box({-1.0, -1.0}, {1.0, 1.0}, 241);
    s.cube_half_width = 0.6;
    s.flags.complete_flow = true;
    s.flags.rigidity_holds = true;
    s.reference = {{"h_at_x", 1.0}, {"Phi_at_x", 4.0}, {"A_at_x", 2.0}};
    const auto conv = s.conv;
    const auto f = s.f, g = s.g;
    const Point x = s.x;
    s.checks.push_back({"h(x) = 1", "bracket oracle", 1.0, 1e-10,
                        [=] { return poisson(f, g, conv)(x); }});
    s.checks.push_back({"Phi(x) = 4", "bracket oracle", 4.0, 1e-10,
                        [=] { return phi_invariant(f, g, conv)(x); }});
    s.checks.push_back({"A = -{{h,g},g}(x) = 2", "bracket oracle", 2.0, 1e-10, [=] {
                            const auto h = poisson(f, g, conv);
                            return -iterated_bracket(h, {g, g}, conv)(x);
                        }});
    return s;
}

inline Scenario quadratic_model() {
    Scenario s;
    s.name = "quadratic_model";
    s.dim = 2;
    s.conv = PairingConvention::standard(2);
    s.f = parse_field("x", 2);
    s.g = parse_field("y*(1 - x^2 - y^2)", 2);
    s.x = {0.0, 0.0};
    s.box = Box({-1.0, -1.0}, {1.0, 1.0}, 241);
    s.flags.complete_flow = true;
    s.flags.rigidity_holds = true;
    s.reference = {{"h_at_x", 1.0}, {"Phi_at_x", 8.0}, {"C", 2.0}};
    const auto conv = s.conv;
    const auto f = s.f, g = s.g;
    const Point x = s.x;
    s.checks.push_back({"h(x) = 1", "bracket oracle", 1.0, 1e-10,
                        [=] { return poisson(f, g, conv)(x); }});
    s.checks.push_back({"Phi(x) = 8", "bracket oracle", 8.0, 1e-10,
                        [=] { return phi_invariant(f, g, conv)(x); }});
    return s;
}

inline Scenario quartic_model() {
    Scenario s;
    s.name = "quartic_model";
    s.dim = 2;
    s.conv = PairingConvention::standard(2);
    s.f = parse_field("x - x^5/5 - 2*x^3*y^2/3 - x*y^4", 2);
    s.g = parse_field("y", 2);
    s.x = {0.0, 0.0};
    s.box = Box({-1.0, -1.0}, {1.0, 1.0}, 241);
    s.flags.complete_flow = true;
    s.flags.rigidity_holds = true;
    s.reference = {{"h_at_x", 1.0}, {"Phi_at_x", 0.0}, {"multiplicity", 4.0}};
    const auto conv = s.conv;
    const auto f = s.f, g = s.g;
    const Point x = s.x;
    s.checks.push_back({"h(x) = 1", "bracket oracle", 1.0, 1e-10,
                        [=] { return poisson(f, g, conv)(x); }});
    s.checks.push_back({"Phi(x) = 0 (higher multiplicity)", "bracket oracle", 0.0,
                        1e-10, [=] { return phi_invariant(f, g, conv)(x); }});
    s.checks.push_back({"multiplicity >= 4", "derivative oracle", 1.0, 0.5, [=] {
                            const auto h = poisson(f, g, conv);
                            return has_multiplicity(h, x, 4) ? 1.0 : 0.0;
                        }});
    return s;
}

// chi defaults to the rescaled mollifier bump with ||chi|| = 1.
inline FieldExpr polterovich_chi() {
    const FieldExpr p = FieldExpr::coordinate(2, 1);
    return std::exp(1.0) * bump(p);
}

inline Scenario polterovich() {
    Scenario s;
    s.name = "polterovich";
    s.dim = 2;
    s.conv = PairingConvention::standard(2);
    // The limit pair is (0, 0); the action happens in the sequences.
    s.f = FieldExpr::constant(2, 0.0);
    s.g = FieldExpr::constant(2, 0.0);
    s.x = {0.0, 0.0};
    s.box = Box({0.0, -1.0}, {2.0 * 3.14159265358979323846, 1.0}, 257);
    s.flags.complete_flow = true;
    s.flags.rigidity_holds = false;  // {F_n,G_n} does not converge to {0,0}
    const FieldExpr q = FieldExpr::coordinate(2, 0);
    const FieldExpr chi = polterovich_chi();
    s.f_seq = [q, chi](int n) {
        return (1.0 / std::sqrt(double(n))) * chi * cos(double(n) * q);
    };
    s.g_seq = [q, chi](int n) {
        return (1.0 / std::sqrt(double(n))) * chi * sin(double(n) * q);
    };
    s.reference = {{"chi_norm", 1.0}};
    const auto conv = s.conv;
    const auto fs = s.f_seq, gs = s.g_seq;
    s.checks.push_back({"chi(0) = 1", "construction", 1.0, 1e-12,
                        [chi] { return chi({0.0, 0.0}); }});
    s.checks.push_back(
        {"|{F_1,G_1}| = |chi chi'| at p=0.3", "bracket oracle", 0.0, 1e-10, [=] {
             const FieldExpr br = poisson(fs(1), gs(1), conv);
             const FieldExpr chi2 = polterovich_chi();
             const double lhs = std::abs(br({1.234, 0.3}));
             const double rhs = std::abs(chi2({0.0, 0.3}) * chi2.derivative(1)({0.0, 0.3}));
             return lhs - rhs;
         }});
    return s;
}

inline Scenario incomplete_flow() {
    Scenario s;
    s.name = "incomplete_flow";
    s.dim = 4;
    s.conv = PairingConvention::standard(4);
    s.f = parse_field("x", 4);
    s.g = parse_field("y", 4);
    s.x = {0.0, 0.0, 0.0, 0.0};
    // The manifold is -1 < z < 1 (the printed "1<z<1" read with the sign the
    // domain of chi forces); the box stops short of the z-boundary.
    s.box = Box({-2.0, -2.0, -0.999, -7.0}, {2.0, 2.0, 0.999, 7.0}, 17);
    s.flags.complete_flow = false;
    s.flags.rigidity_holds = false;
    const FieldExpr chi = parse_field("sqrt(2*z + 2)", 4);
    const FieldExpr u = FieldExpr::coordinate(4, 3);
    const FieldExpr xc = FieldExpr::coordinate(4, 0);
    const FieldExpr yc = FieldExpr::coordinate(4, 1);
    s.f_seq = [=](int n) {
        return xc + (1.0 / std::sqrt(double(n))) * chi * cos(double(n) * u);
    };
    s.g_seq = [=](int n) {
        return yc - (1.0 / std::sqrt(double(n))) * chi * sin(double(n) * u);
    };
    s.reference = {{"bracket_f_g", 1.0}, {"bracket_fn_gn", 0.0}};
    const auto conv = s.conv;
    const auto f = s.f, g = s.g;
    const auto fs = s.f_seq, gs = s.g_seq;
    s.checks.push_back({"{f,g} = 1", "bracket oracle", 1.0, 1e-12, [=] {
                            return poisson(f, g, conv)({0.3, -0.4, 0.2, 1.7});
                        }});
    s.checks.push_back({"{f_2,g_2} = 0 (chi chi' = 1)", "bracket oracle", 0.0, 1e-10,
                        [=] {
                            return poisson(fs(2), gs(2), conv)({0.3, -0.4, 0.5, 1.7});
                        }});
    return s;
}

inline Scenario nonlocal_cutoff() {
    Scenario s;
    s.name = "nonlocal_cutoff";
    s.dim = 4;
    s.conv = PairingConvention::standard(4);
    // psi = 1 on |t| <= 1/4, 0 on |t| >= 1/3, t psi'(t) <= 0.
    auto window = [](int coord) {
        return mollified_window(FieldExpr::coordinate(4, coord), 0.25, 1.0 / 3.0);
    };
    const FieldExpr phi = window(0) * window(1) * window(2) * window(3);
    const FieldExpr xc = FieldExpr::coordinate(4, 0);
    const FieldExpr yc = FieldExpr::coordinate(4, 1);
    s.f = xc * phi;   // F = f varphi
    s.g = yc * phi;   // G = g varphi
    s.x = {0.0, 0.0, 0.0, 0.0};
    s.box = Box({-0.4, -0.4, -0.4, -0.4}, {0.4, 0.4, 0.4, 0.4}, 17);
    s.flags.complete_flow = true;
    s.flags.locality_holds = false;
    const FieldExpr chi = parse_field("sqrt(2*z + 2)", 4);
    const FieldExpr u = FieldExpr::coordinate(4, 3);
    s.f_seq = [=](int n) {
        return (xc + (1.0 / std::sqrt(double(n))) * chi * cos(double(n) * u)) * phi;
    };
    s.g_seq = [=](int n) {
        return (yc - (1.0 / std::sqrt(double(n))) * chi * sin(double(n) * u)) * phi;
    };
    s.reference = {{"bracket_on_K", 1.0}, {"seq_bracket_on_K", 0.0}};
    const auto conv = s.conv;
    const auto F = s.f, G = s.g;
    const auto fs = s.f_seq, gs = s.g_seq;
    s.checks.push_back({"{F,G} = 1 inside K", "bracket oracle", 1.0, 1e-10, [=] {
                            return poisson(F, G, conv)({0.1, -0.12, 0.2, 0.05});
                        }});
    s.checks.push_back({"{F_3,G_3} = 0 inside K", "bracket oracle", 0.0, 1e-10, [=] {
                            return poisson(fs(3), gs(3), conv)({0.1, -0.12, 0.2, 0.05});
                        }});
    return s;
}

inline Scenario staircase() {
    Scenario s;
    s.name = "staircase";
    s.dim = 2;
    s.conv = PairingConvention::standard(2);
    s.f = parse_field("x", 2);  // h in the counterexample construction
    s.g = parse_field("x", 2);
    s.x = {0.0, 0.0};
    s.box = Box({-3.0, -3.0}, {3.0, 3.0}, 301);
    s.bilinear = FirstOrderForm::from_matrix({{1.0, 0.0}, {0.0, 0.0}});
    s.flags.rigidity_holds = false;  // B is not antisymmetric
    const auto B = *s.bilinear;
    const auto h = s.f;
    s.checks.push_back({"B(h,h) = 1 (not antisymmetric)", "construction", 1.0, 1e-12,
                        [=] { return B.apply(h, h)({0.7, -0.1}); }});
    return s;
}

inline Scenario torus_b() {
    Scenario s;
    s.name = "torus_B";
    s.dim = 3;
    const double two_pi = 2.0 * 3.14159265358979323846;
    s.conv = PairingConvention{{{0, 1}}, 1.0};  // acts on (x, y) only
    s.f = parse_field("sin(x)", 3);
    s.g = parse_field("sin(y)", 3);
    s.x = {0.0, 0.0, 0.0};
    s.box = Box({0.0, 0.0, 0.0}, {two_pi, two_pi, two_pi}, 33);
    const FieldExpr mult = parse_field("sin(z)^2 + 1", 3);
    const FieldExpr zero = FieldExpr::constant(3, 0.0);
    FirstOrderForm form;
    form.dim = 3;
    form.coeff = {zero, mult, zero,   //
                  -mult, zero, zero,  //
                  zero, zero, zero};
    s.bilinear = form;
    s.flags.rigidity_holds = true;  // strong rigidity via the fibration over z
    const auto B = *s.bilinear;
    const auto f = s.f, g = s.g;
    s.checks.push_back({"B(f,f) = 0 (antisymmetric)", "construction", 0.0, 1e-12,
                        [=] { return B.apply(f, f)({0.9, 0.4, 1.1}); }});
    s.checks.push_back(
        {"B = (sin(z)^2+1){f,g}_xy", "construction", 0.0, 1e-12, [=, m = mult] {
             const Point pt = {0.9, 0.4, 1.1};
             const PairingConvention xy{{{0, 1}}, 1.0};
             return B.apply(f, g)(pt) - m(pt) * poisson(f, g, xy)(pt);
         }});
    return s;
}

}  // namespace builtin

// The built-in catalog.  Every scenario is re-verified before it is handed
// out; a failing identity aborts the load.
inline std::vector<Scenario> catalog() {
    std::vector<Scenario> list = {
        builtin::cubic_model(),    builtin::polterovich(),
        builtin::incomplete_flow(), builtin::nonlocal_cutoff(),
        builtin::staircase(),      builtin::torus_b(),
        builtin::quadratic_model(), builtin::quartic_model(),
    };
    for (const auto& s : list) s.verify();
    return list;
}

inline Scenario find_scenario(const std::string& name) {
    for (auto& s : catalog())
        if (s.name == name) return s;
    throw ScenarioError("unknown scenario '" + name + "'");
}

// User scenario files: TOML with name, dim, f, g, x, box_lo, box_hi and
// optional sign, resolution, b, f_n, g_n (expressions that may use the
// symbols n and sqrtn), plus an optional expected bracket value at x.
inline Scenario load_scenario_file(const std::string& path) {
    const TomlTable t = TomlTable::parse_file(path);
    Scenario s;
    s.name = t.get_string("name");
    s.dim = static_cast<int>(t.get_number("dim"));
    s.conv = PairingConvention::standard(s.dim, t.get_number_or("sign", 1.0));
    s.f = parse_field(t.get_string("f"), s.dim);
    s.g = parse_field(t.get_string("g"), s.dim);
    const auto xs = t.get_numbers("x");
    if (static_cast<int>(xs.size()) != s.dim)
        throw ScenarioError("scenario file: x has wrong dimension");
    s.x = xs;
    const auto lo = t.get_numbers("box_lo");
    const auto hi = t.get_numbers("box_hi");
    const int res = static_cast<int>(t.get_number_or("resolution", 121));
    s.box = Box(lo, hi, res);
    if (s.box.dim() != s.dim) throw ScenarioError("scenario file: box dim mismatch");
    if (t.has("b")) s.cube_half_width = t.get_number("b");
    if (t.has("f_n") && t.has("g_n")) {
        const std::string fn = t.get_string("f_n"), gn = t.get_string("g_n");
        const int dim = s.dim;
        s.f_seq = [fn, dim](int n) {
            return parse_field(fn, dim,
                               {{"n", double(n)}, {"sqrtn", std::sqrt(double(n))}});
        };
        s.g_seq = [gn, dim](int n) {
            return parse_field(gn, dim,
                               {{"n", double(n)}, {"sqrtn", std::sqrt(double(n))}});
        };
    }
    if (t.has("expect_bracket_at_x")) {
        const double expected = t.get_number("expect_bracket_at_x");
        const auto f = s.f, g = s.g;
        const auto conv = s.conv;
        const Point x = s.x;
        s.checks.push_back({"{f,g}(x) matches declared value", "user scenario file",
                            expected, 1e-6, [=] { return poisson(f, g, conv)(x); }});
    }
    s.verify();
    return s;
}

}  // namespace pblab
