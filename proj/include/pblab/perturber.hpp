// perturber.hpp — the constructive perturbations.
//
// local_perturbation builds, for a scenario whose bracket h = {f,g} has a
// nondegenerate maximum at x and whose chart satisfies X_g = d/dx1, the pair
//
//   F = f - phi(x1) psi(rest),   G = g,
//
// where phi is a compactly supported C^1 profile whose central piece is the
// exact line phi(t) = (1/2) A^{1/3} eps^{2/3} t on |t| <= A^{-1/3} eps^{1/3},
// A = -{{h,g},g}(x), and psi is a plateau bump equal to 1 on (1/3)K and 0
// outside (2/3)K.  Then {F,G} = h - phi'(x1) psi(rest) identically, and the
// uniform drop
//
//   gap(eps) = h(x) - sup_U {F,G} = (1/2) A^{1/3} eps^{2/3}
//
// realises the eps^{2/3} rate with the sharp constant (1/2) A^{1/3}
// >= (1/3) Phi(x)^{1/3}.  When {{h,f},f}(x) < {{h,g},g}(x) the roles are
// swapped through (f,g) -> (-g,f) (recorded flag) so that the perturbation
// always lands on the steeper direction; the returned pair is mapped back to
// the original orientation, which then perturbs g instead of f.
//
// The profile conditions (|phi| <= eps globally, phi' >= 0 on [-b/3,b/3],
// phi' >= hgap/2 on [-2b/3,2b/3], phi = 0 outside) are re-verified on a
// 10^4-point grid, and every scenario-level invariant is re-measured on
// grids.  The theorem is asymptotic; eps0 (the largest eps for which the
// verification predicate holds) is found by bisection and reported.
//
// staircase_counterexample builds the smooth nondecreasing staircase
// phi(t) = 2k on [2k, 2k+1] and the pair f_n = phi(n h)/n, g_n =
// phi(n h + 1)/n whose phi' supports are disjoint mod the shift, so any
// first-order bilinear form annihilates the pair: B(f_n, g_n) = 0 while
// f_n, g_n -> h uniformly at rate 2/n.

#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pblab/bracketops.hpp"
#include "pblab/box.hpp"
#include "pblab/profile.hpp"
#include "pblab/scenarios.hpp"

namespace pblab {

struct PerturbError : std::runtime_error {
    explicit PerturbError(const std::string& what) : std::runtime_error(what) {}
};

// ── phi profile ───────────────────────────────────────────────────────────────

struct PhiProfile {
    std::shared_ptr<const Profile> profile;
    double central_slope = 0.0;   // (1/2) A^{1/3} eps^{2/3}
    double central_halfwidth = 0;  // A^{-1/3} eps^{1/3}
    double plateau = 0.0;          // max value, <= eps
    double decay_min_slope = 0.0;  // most negative phi' on the decay pieces
};

// Builds phi for parameters A > 0, eps > 0, cube half-width b, and
// hgap = max_{K \ K'} h - h(x) < 0.  Throws PerturbError with the limiting
// eps when the decay segment would need slope below hgap/2.
inline PhiProfile build_phi_profile(double A, double eps, double b, double hgap) {
    if (A <= 0.0 || eps <= 0.0 || b <= 0.0)
        throw PerturbError("build_phi_profile: A, eps, b must be positive");
    if (hgap >= 0.0)
        throw PerturbError("build_phi_profile: hgap must be negative");
    const double m = 0.5 * std::cbrt(A) * std::pow(eps, 2.0 / 3.0);
    const double c = std::pow(eps / A, 1.0 / 3.0);  // A^{-1/3} eps^{1/3}
    if (c >= b / 3.0)
        throw PerturbError(
            "build_phi_profile: infeasible, central interval exceeds b/3 "
            "(largest feasible eps = " +
            std::to_string(A * std::pow(b / 3.0, 3.0)) + ")");

    // Rise from (c, eps/2) with slope m to a flat plateau.  The Hermite with
    // end slope 0 and value gain m*L/3 has derivative 3*Delta*(1-s)^2 >= 0.
    const double rise = std::min(0.25 * eps, m * (b / 3.0 - c) / 3.0);
    const double rise_len = 3.0 * rise / m;
    const double plateau = 0.5 * eps + rise;
    const double t_flat = c + rise_len;

    // Decay across [b/3, 2b/3] by a Hermite with zero end slopes; its
    // steepest slope is -(3/2) * plateau / (b/3) and must stay >= hgap/2.
    const double steepest = -1.5 * plateau / (b / 3.0);
    if (steepest < 0.5 * hgap) {
        // plateau <= |hgap| b / 9 and plateau >= eps/2 bound the feasible eps.
        const double eps_limit = 2.0 * (-hgap) * b / 9.0;
        throw PerturbError(
            "build_phi_profile: infeasible, decay slope would violate phi' >= "
            "hgap/2 (largest feasible eps ~= " +
            std::to_string(eps_limit) + ")");
    }

    ProfileBuilder builder;
    builder.hermite(-2.0 * b / 3.0, -b / 3.0, 0.0, -plateau, 0.0, 0.0);
    if (t_flat < b / 3.0 - 1e-15)
        builder.constant(-b / 3.0, -t_flat, -plateau);
    builder.hermite(-t_flat, -c, -plateau, -0.5 * eps, 0.0, m);
    builder.linear(-c, c, -0.5 * eps, m);
    builder.hermite(c, t_flat, 0.5 * eps, plateau, m, 0.0);
    if (t_flat < b / 3.0 - 1e-15)
        builder.constant(t_flat, b / 3.0, plateau);
    builder.hermite(b / 3.0, 2.0 * b / 3.0, plateau, 0.0, 0.0, 0.0);
    Profile prof = builder.finish(0.0, 0.0, eps, false);
    prof.verify_c1(1e-8);

    PhiProfile out;
    out.central_slope = m;
    out.central_halfwidth = c;
    out.plateau = plateau;

    // Re-verify the four conditions on a 10^4-point grid.
    const int n = 10000;
    double min_decay_slope = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = -b + 2.0 * b * i / (n - 1);
        const double v = prof(t);
        const double d = prof.eval_deriv(1, t);
        if (std::abs(v) > eps * (1.0 + 1e-12))
            throw PerturbError("phi: |phi| <= eps violated at t=" + std::to_string(t));
        if (std::abs(t) <= b / 3.0 && d < -1e-12)
            throw PerturbError("phi: phi' >= 0 violated on [-b/3,b/3]");
        if (std::abs(t) <= 2.0 * b / 3.0 && d < 0.5 * hgap - 1e-12)
            throw PerturbError("phi: phi' >= hgap/2 violated on [-2b/3,2b/3]");
        if (std::abs(t) >= 2.0 * b / 3.0 && std::abs(v) > 1e-14)
            throw PerturbError("phi: support exceeds [-2b/3,2b/3]");
        min_decay_slope = std::min(min_decay_slope, d);
    }
    out.decay_min_slope = min_decay_slope;
    out.profile = std::make_shared<const Profile>(std::move(prof));
    return out;
}

// ── Local perturbation ────────────────────────────────────────────────────────

struct LocalPerturbation {
    FieldExpr F, G;        // pair in the scenario's orientation
    bool swapped = false;  // construction ran on (-g, f)

    // Working pair actually perturbed: work_F = work_f - phi(x1) psi(rest),
    // work_g untouched; {work_f, work_g} = {f, g} = h in either orientation.
    FieldExpr work_f, work_g, work_F;

    double eps = 0.0;
    double A = 0.0;          // -{{h,g},g}(x) after orientation
    double phi_at_x = 0.0;   // Phi invariant at x
    double b = 0.0;          // cube half-width
    double hgap = 0.0;       // max_{K\K'} h - h(x)
    PhiProfile phi;
    FieldExpr psi;
    double gap = 0.0;            // h(x) - sup_U {F,G}, measured
    double sup_fg = 0.0;         // measured sup_U {F,G}
    double norm_f_pert = 0.0;    // measured sup |work_F - work_f|
    double h_at_x = 0.0;
    int grid_resolution = 0;
    double refined_spacing = 0.0;
};

namespace detail {

// Largest b with K = [-b,b]^2n inside the box around x and
// max_{K \ K'} h < h(x) strictly.
inline double search_cube_halfwidth(const FieldExpr& h, const Point& x, const Box& box,
                                    double h_at_x) {
    double max_b = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        max_b = std::min({max_b, x[i] - box.lo[i], box.hi[i] - x[i]});
    for (double frac : {0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1}) {
        const double b = frac * max_b;
        Box k = box;
        for (std::size_t i = 0; i < x.size(); ++i) {
            k.lo[i] = x[i] - b;
            k.hi[i] = x[i] + b;
            k.res[i] = 41;
        }
        double worst = -std::numeric_limits<double>::infinity();
        const std::size_t n = k.grid_size();
        for (std::size_t j = 0; j < n; ++j) {
            const Point pt = k.grid_point(j);
            if (std::abs(pt[0] - x[0]) < b / 3.0) continue;  // inside K'
            worst = std::max(worst, h(pt));
        }
        if (worst < h_at_x - 1e-9) return b;
    }
    throw PerturbError("local_perturbation: no feasible cube half-width");
}

inline double grid_max_outside_kprime(const FieldExpr& h, const Point& x, double b,
                                      int res) {
    Box k({}, {});
    k.lo.resize(x.size());
    k.hi.resize(x.size());
    k.res.assign(x.size(), res);
    for (std::size_t i = 0; i < x.size(); ++i) {
        k.lo[i] = x[i] - b;
        k.hi[i] = x[i] + b;
    }
    double worst = -std::numeric_limits<double>::infinity();
    const std::size_t n = k.grid_size();
    for (std::size_t j = 0; j < n; ++j) {
        const Point pt = k.grid_point(j);
        if (std::abs(pt[0] - x[0]) < b / 3.0) continue;
        worst = std::max(worst, h(pt));
    }
    return worst;
}

}  // namespace detail

inline LocalPerturbation local_perturbation(const Scenario& scen, double eps) {
    const PairingConvention& conv = scen.conv;
    const FieldExpr h = poisson(scen.f, scen.g, conv);
    const Point& x = scen.x;
    const int dim = scen.dim;

    // Nondegenerate maximum of h at x.
    for (int i = 0; i < dim; ++i)
        if (std::abs(h.derivative(i)(x)) > 1e-8)
            throw PerturbError("local_perturbation: x is not a critical point of h");
    if (std::abs(determinant(hessian_at(h, x))) < 1e-10)
        throw PerturbError("local_perturbation: degenerate maximum of h at x");

    // Orientation: perturb the steeper direction.  WLOG swap (f,g) -> (-g,f)
    // when {{h,f},f}(x) < {{h,g},g}(x).
    const double cff = iterated_bracket(h, {scen.f, scen.f}, conv)(x);
    const double cgg = iterated_bracket(h, {scen.g, scen.g}, conv)(x);
    const bool swapped = cff < cgg;
    const FieldExpr work_f = swapped ? -scen.g : scen.f;
    const FieldExpr work_g = swapped ? scen.f : scen.g;
    const double A = -(swapped ? cff : cgg);
    if (A <= 1e-12)
        throw PerturbError("local_perturbation: -{{h,g},g}(x) is not positive");

    // Flow-box chart assumption: X_{work_g} = d/dx1 identically.
    const VectorFieldExpr xg = ham_vector_field(work_g, conv);
    {
        const Box coarse = scen.box.with_resolution(9);
        for (std::size_t i = 0; i < coarse.grid_size(); ++i) {
            const Point pt = coarse.grid_point(i);
            for (int c = 0; c < dim; ++c) {
                const double want = c == 0 ? 1.0 : 0.0;
                if (std::abs(xg.components[static_cast<std::size_t>(c)](pt) - want) > 1e-10)
                    throw PerturbError(
                        "local_perturbation: chart assumption X_g = d/dx1 violated");
            }
        }
    }
    // H-alignment: the mixed second partials h_{x1 x_j}(x), j != 1, vanish.
    {
        const FieldExpr hx1 = h.derivative(0);
        for (int j = 1; j < dim; ++j)
            if (std::abs(hx1.derivative(j)(x)) > 1e-8)
                throw PerturbError(
                    "local_perturbation: H-alignment coordinates not satisfied");
    }

    LocalPerturbation out;
    out.swapped = swapped;
    out.eps = eps;
    out.A = A;
    out.phi_at_x = phi_invariant(scen.f, scen.g, conv)(x);
    out.h_at_x = h(x);
    out.work_f = work_f;
    out.work_g = work_g;

    out.b = scen.cube_half_width.value_or(0.0);
    if (out.b <= 0.0)
        out.b = detail::search_cube_halfwidth(h, x, scen.box, out.h_at_x);
    out.hgap = detail::grid_max_outside_kprime(h, x, out.b, 61) - out.h_at_x;
    if (out.hgap >= 0.0)
        throw PerturbError("local_perturbation: h does not drop off K' (bad cube)");

    if (eps == 0.0) {  // trivial: F = f, gap = 0
        out.F = scen.f;
        out.G = scen.g;
        out.work_F = work_f;
        out.psi = FieldExpr::constant(dim, 1.0);
        out.gap = 0.0;
        out.sup_fg = out.h_at_x;
        return out;
    }

    out.phi = build_phi_profile(A, eps, out.b, out.hgap);

    // psi: plateau window product over the non-flow coordinates, 1 on (1/3)K,
    // 0 outside (2/3)K.
    FieldExpr psi = FieldExpr::constant(dim, 1.0);
    for (int c = 1; c < dim; ++c) {
        const FieldExpr centered =
            FieldExpr::coordinate(dim, c) - x[static_cast<std::size_t>(c)];
        psi = psi * mollified_window(centered, out.b / 3.0, 2.0 * out.b / 3.0);
    }
    out.psi = psi;

    const FieldExpr x1 =
        FieldExpr::coordinate(dim, 0) - x[0];
    const FieldExpr phi_x1 = apply_profile(out.phi.profile, x1);
    out.work_F = work_f - phi_x1 * psi;

    // Map back to the scenario orientation.
    if (!swapped) {
        out.F = out.work_F;  // F = f - phi psi
        out.G = scen.g;
    } else {
        out.F = scen.f;                 // untouched
        out.G = scen.g + phi_x1 * psi;  // G = -work_F
    }

    // Measured invariants.
    out.norm_f_pert = sup_norm(out.work_F - work_f, scen.box).value;
    const GridMax sup = sup_value(poisson(out.F, out.G, conv), scen.box);
    out.sup_fg = sup.value;
    out.gap = out.h_at_x - sup.value;
    out.grid_resolution = sup.base_resolution;
    out.refined_spacing = sup.refined_spacing;
    return out;
}

// Verification predicate behind eps0: the constructed pair satisfies all
// LocalPerturbation invariants at this eps.
inline bool perturbation_valid(const Scenario& scen, double eps, double grid_slack = 1e-9) {
    try {
        const LocalPerturbation p = local_perturbation(scen, eps);
        if (p.norm_f_pert > eps * (1.0 + 1e-9)) return false;
        const double target = 0.5 * std::cbrt(p.A) * std::pow(eps, 2.0 / 3.0);
        return p.gap >= target - grid_slack;
    } catch (const PerturbError&) {
        return false;
    }
}

// Largest eps for which the verification predicate holds, by bisection.
// The theorem is asymptotic; this exposes its concrete validity range.
inline double find_eps0(const Scenario& scen, double eps_hi = 0.1, int iters = 24) {
    if (perturbation_valid(scen, eps_hi)) return eps_hi;
    double lo = 1e-9, hi = eps_hi;
    if (!perturbation_valid(scen, lo))
        throw PerturbError("find_eps0: construction invalid even at eps = 1e-9");
    for (int i = 0; i < iters; ++i) {
        const double mid = std::sqrt(lo * hi);  // bisect in log scale
        (perturbation_valid(scen, mid) ? lo : hi) = mid;
    }
    return lo;
}

// ── Staircase counterexample ──────────────────────────────────────────────────

struct StaircasePair {
    FieldExpr f_n, g_n;
    std::shared_ptr<const Profile> staircase;
    int n = 1;
};

// Smooth nondecreasing staircase with phi(t) = 2k on [2k, 2k+1]; the rise
// from 2k to 2k+2 happens on [2k+1.4, 2k+1.6], so supp phi'(.) and
// supp phi'(.+1) are disjoint and phi'(t) phi'(t+1) = 0 for all t.
inline std::shared_ptr<const Profile> staircase_profile(double t_min, double t_max) {
    const long k_lo = static_cast<long>(std::floor((t_min - 2.0) / 2.0));
    const long k_hi = static_cast<long>(std::ceil((t_max + 2.0) / 2.0));
    ProfileBuilder builder;
    for (long k = k_lo; k < k_hi; ++k) {
        const double t0 = 2.0 * static_cast<double>(k);
        builder.constant(t0, t0 + 1.4, t0);
        builder.hermite(t0 + 1.4, t0 + 1.6, t0, t0 + 2.0, 0.0, 0.0);
        builder.constant(t0 + 1.6, t0 + 2.0, t0 + 2.0);
    }
    Profile prof = builder.finish(2.0 * static_cast<double>(k_lo),
                                  2.0 * static_cast<double>(k_hi),
                                  std::numeric_limits<double>::infinity(), true);
    prof.verify_c1(1e-8);
    return std::make_shared<const Profile>(std::move(prof));
}

// f_n = phi(n h)/n, g_n = phi(n h + 1)/n.  B(f_n, g_n) =
// phi'(nh) phi'(nh+1) B(h,h) = 0 for any first-order bilinear B.
inline StaircasePair staircase_counterexample(const FirstOrderForm& B,
                                              const FieldExpr& h, int n,
                                              const Box& box) {
    if (n < 1) throw PerturbError("staircase_counterexample: n must be >= 1");
    (void)B;  // the construction is independent of B; B enters the checks
    // Range of n*h over the box, padded for the +1 shift.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const Box coarse = box.with_resolution(41);
    for (std::size_t i = 0; i < coarse.grid_size(); ++i) {
        const double v = h(coarse.grid_point(i)) * n;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    StaircasePair out;
    out.n = n;
    out.staircase = staircase_profile(lo - 2.0, hi + 3.0);
    const FieldExpr nh = double(n) * h;
    const FieldExpr one = FieldExpr::constant(h.dim(), 1.0);
    out.f_n = (1.0 / double(n)) * apply_profile(out.staircase, nh);
    out.g_n = (1.0 / double(n)) * apply_profile(out.staircase, nh + one);
    return out;
}

}  // namespace pblab
