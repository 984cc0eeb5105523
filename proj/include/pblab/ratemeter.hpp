// ratemeter.hpp — rate curves, theoretical bands, and the bound evaluators.
//
// The Upsilon curve is measured from the constructive side only: for each
// eps, the explicit perturbation supplies gap(eps) = sup{f,g} - sup{F,G},
// which lower-bounds the rigidity modulus Upsilon^+.  The theoretical band
//
//   [C/3, 6C],   C = min_k |Phi(x_k)|^{1/3}
//
// comes from the explicit rate theorems; a fitted log-log slope near 2/3
// together with band containment of gap/eps^{2/3} is the reproduction
// target.  Rate fits discard eps values above the construction's verified
// validity threshold eps0.
//
// The other evaluators:
//
//   higher_bound        -9 ((1/(2l)!) D^l(h)(x))^{1/(2l+1)} (signed odd root)
//   truncated_jet_bound sup-norm of h + 9 sum_{l<=L} eps^{2l/(2l+1)} (...)^{1/(2l+1)},
//                       clamping points whose root argument is positive
//   first_order_bound   lambda(f)(x) - (9/2)^{1/3} (-lambda^3(f)(x))^{1/3} eps^{2/3}
//   unicontinuity       max(||f_n-f||, ||g_n-g||) ||g_n||_{U,1} per n

#pragma once

#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pblab/bracketops.hpp"
#include "pblab/box.hpp"
#include "pblab/perturber.hpp"
#include "pblab/scenarios.hpp"

namespace pblab {

struct RateError : std::runtime_error {
    explicit RateError(const std::string& what) : std::runtime_error(what) {}
};

// ── Rate tables ───────────────────────────────────────────────────────────────

struct RateRow {
    double eps = 0.0;
    double gap = 0.0;
    double ratio = 0.0;  // gap / eps^{2/3}
    bool used_in_fit = true;
    int grid_resolution = 0;
    double refined_spacing = 0.0;
};

struct RateTable {
    std::vector<RateRow> rows;   // eps strictly decreasing
    double slope = 0.0;          // OLS slope of log gap vs log eps
    double intercept = 0.0;
    double residual = 0.0;       // max |fit - data| in log space
    double band_lo = 0.0;        // C/3
    double band_hi = 0.0;        // 6C
    double rate_constant = 0.0;  // C = |Phi(x)|^{1/3}
    double eps0 = 0.0;           // construction validity threshold

    void validate() const {
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].eps < rows[i - 1].eps))
                throw RateError("RateTable: eps not strictly decreasing");
        for (const auto& r : rows)
            if (!(r.gap > 0.0)) throw RateError("RateTable: non-positive gap");
        int fitted = 0;
        for (const auto& r : rows) fitted += r.used_in_fit ? 1 : 0;
        if (fitted < 4) throw RateError("RateTable: slope fitted on fewer than 4 points");
    }
};

namespace detail {

inline void fit_loglog(RateTable& table) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& r : table.rows) {
        if (!r.used_in_fit) continue;
        const double lx = std::log(r.eps), ly = std::log(r.gap);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw RateError("rate fit needs at least 2 points");
    const double denom = n * sxx - sx * sx;
    table.slope = (n * sxy - sx * sy) / denom;
    table.intercept = (sy - table.slope * sx) / n;
    table.residual = 0.0;
    for (const auto& r : table.rows) {
        if (!r.used_in_fit) continue;
        const double fit = table.intercept + table.slope * std::log(r.eps);
        table.residual = std::max(table.residual, std::abs(fit - std::log(r.gap)));
    }
}

}  // namespace detail

// Band (C/3, 6C) with C = min over the supplied extremizers of |Phi|^{1/3}.
// Each point must be a nondegenerate critical point of h = {f,g}.
struct TheoreticalBand {
    double lower = 0.0, upper = 0.0;
    double rate_constant = 0.0;
    bool higher_multiplicity = false;  // C = 0: use higher_bound instead
};

inline TheoreticalBand theoretical_band(const FieldExpr& f, const FieldExpr& g,
                                        const std::vector<Point>& points,
                                        const PairingConvention& conv) {
    if (points.empty()) throw RateError("theoretical_band: no extremizers supplied");
    const FieldExpr h = poisson(f, g, conv);
    const FieldExpr phi = phi_invariant(f, g, conv);
    double c_min = std::numeric_limits<double>::infinity();
    for (const auto& x : points) {
        const double phi_x = phi(x);
        if (std::abs(phi_x) < 1e-12) {
            // Phi = 0 at a bracket maximum means higher multiplicity; the
            // eps^{2/3} band collapses and higher_bound takes over.
            TheoreticalBand flat;
            flat.higher_multiplicity = true;
            return flat;
        }
        if (std::abs(determinant(hessian_at(h, x))) < 1e-10)
            throw RateError("theoretical_band: degenerate critical point of h");
        c_min = std::min(c_min, std::cbrt(std::abs(phi_x)));
    }
    TheoreticalBand band;
    band.rate_constant = c_min;
    band.lower = c_min / 3.0;
    band.upper = 6.0 * c_min;
    return band;
}

// Constructive Upsilon^+ lower-bound curve over an eps sweep.
inline RateTable upsilon_upper_curve(const Scenario& scen,
                                     const std::vector<double>& eps_list,
                                     std::optional<double> eps0 = std::nullopt) {
    if (eps_list.empty()) throw RateError("upsilon_upper_curve: empty eps list");
    RateTable table;
    table.eps0 = eps0.value_or(0.0);
    if (!eps0) table.eps0 = find_eps0(scen);
    for (double eps : eps_list) {
        const LocalPerturbation p = local_perturbation(scen, eps);
        RateRow row;
        row.eps = eps;
        row.gap = p.gap;
        row.ratio = p.gap / std::pow(eps, 2.0 / 3.0);
        row.used_in_fit = eps <= table.eps0;
        row.grid_resolution = p.grid_resolution;
        row.refined_spacing = p.refined_spacing;
        table.rows.push_back(row);
    }
    const TheoreticalBand band = theoretical_band(scen.f, scen.g, {scen.x}, scen.conv);
    table.rate_constant = band.rate_constant;
    table.band_lo = band.lower;
    table.band_hi = band.upper;
    detail::fit_loglog(table);
    table.validate();
    return table;
}

// ── Higher-multiplicity and jet bounds ────────────────────────────────────────

inline double signed_odd_root(double s, int order) {
    // order = 2l+1 odd; sign-preserving real root.
    return s >= 0.0 ? std::pow(s, 1.0 / order) : -std::pow(-s, 1.0 / order);
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// -9 ((1/(2l)!) D^l(h)(x))^{1/(2l+1)}; requires multiplicity 2l of h at x.
// Nonnegative when D^l(h)(x) <= 0; a positive D^l(h)(x) at a maximum signals
// a scenario error and yields a negative bound (reported, not hidden).
inline double higher_bound(int l, const FieldExpr& f, const FieldExpr& g,
                           const Point& x, const PairingConvention& conv) {
    if (l < 1) throw RateError("higher_bound: l must be >= 1");
    const FieldExpr h = poisson(f, g, conv);
    if (!has_multiplicity(h, x, 2 * l))
        throw RateError("higher_bound: h lacks multiplicity 2l at x");
    const double dl = d_power(l, h, f, g, conv)(x);
    return -9.0 * signed_odd_root(dl / factorial(2 * l), 2 * l + 1);
}

// sup-norm over the box of the truncated asymptotic series
//   H_{L,eps} = h + 9 sum_{l=1}^{L} eps^{2l/(2l+1)} ((1/(2l)!) D^l h)^{1/(2l+1)},
// taking the signed odd root pointwise and clamping the term to zero (with a
// count) wherever the root argument is positive.
struct JetBound {
    double value = 0.0;
    long clamped_points = 0;
    int grid_resolution = 0;
};

inline JetBound truncated_jet_bound(int L, double eps, const FieldExpr& f,
                                    const FieldExpr& g, const PairingConvention& conv,
                                    const Box& box) {
    if (L < 1) throw RateError("truncated_jet_bound: L must be >= 1");
    const FieldExpr h = poisson(f, g, conv);
    std::vector<FieldExpr> d_powers;
    for (int l = 1; l <= L; ++l) d_powers.push_back(d_power(l, h, f, g, conv));
    JetBound out;
    out.grid_resolution = box.res[0];
    std::atomic<long> clamped{0};
    const GridMax gm = grid_sup(box, [&](const Point& pt) {
        double v = h(pt);
        for (int l = 1; l <= L; ++l) {
            const double arg = d_powers[static_cast<std::size_t>(l - 1)](pt) /
                               factorial(2 * l);
            if (arg > 0.0) {
                clamped.fetch_add(1, std::memory_order_relaxed);
                continue;  // the series is only meaningful for a real-negative root
            }
            v += 9.0 * std::pow(eps, 2.0 * l / (2.0 * l + 1.0)) *
                 signed_odd_root(arg, 2 * l + 1);
        }
        return std::abs(v);
    });
    out.value = gm.value;
    out.clamped_points = clamped.load();
    return out;
}

// ── First-order operator bound ────────────────────────────────────────────────

// lambda(f) = df(v).  Bound: lambda(f)(x) - (9/2)^{1/3} (-lambda^3(f)(x))^{1/3}
// eps^{2/3}, with lambda^3 three symbolic applications.
inline double first_order_bound(const VectorFieldExpr& v, const FieldExpr& f,
                                const Point& x, double eps) {
    auto lambda = [&](const FieldExpr& u) {
        FieldExpr acc = FieldExpr::constant(u.dim(), 0.0);
        for (int i = 0; i < u.dim(); ++i)
            acc = acc + u.derivative(i) * v.components[static_cast<std::size_t>(i)];
        return acc;
    };
    const FieldExpr l1 = lambda(f);
    for (int i = 0; i < f.dim(); ++i)
        if (std::abs(l1.derivative(i)(x)) > 1e-8)
            throw RateError("first_order_bound: x is not a critical point of lambda(f)");
    if (std::abs(determinant(hessian_at(l1, x))) < 1e-10)
        throw RateError("first_order_bound: degenerate maximum of lambda(f)");
    const double l3 = lambda(lambda(l1))(x);
    return l1(x) - std::cbrt(4.5) * signed_odd_root(-l3, 3) * std::pow(eps, 2.0 / 3.0);
}

// ── Uniform-continuity criterion ──────────────────────────────────────────────

struct UnicontinuityRow {
    int n = 0;
    double f_dist = 0.0;   // ||f_n - f||
    double g_dist = 0.0;   // ||g_n - g||
    double g_c1 = 0.0;     // ||g_n||_{U,1}
    double product = 0.0;  // max(f_dist, g_dist) * g_c1
};

struct UnicontinuityReport {
    std::vector<UnicontinuityRow> rows;
    std::string trend;  // "decreasing", "increasing", "flat"
};

inline UnicontinuityReport unicontinuity_criterion(
    const FieldExpr& f, const FieldExpr& g, const std::function<FieldExpr(int)>& f_seq,
    const std::function<FieldExpr(int)>& g_seq, const std::vector<int>& ns,
    const Box& box) {
    if (!f_seq || !g_seq)
        throw RateError("unicontinuity_criterion: scenario has no sequences");
    UnicontinuityReport report;
    for (int n : ns) {
        UnicontinuityRow row;
        row.n = n;
        const FieldExpr fn = f_seq(n), gn = g_seq(n);
        row.f_dist = sup_norm(fn - f, box).value;
        row.g_dist = sup_norm(gn - g, box).value;
        row.g_c1 = c1_seminorm(gn, box).value;
        row.product = std::max(row.f_dist, row.g_dist) * row.g_c1;
        report.rows.push_back(row);
    }
    if (report.rows.size() >= 2) {
        const double first = report.rows.front().product;
        const double last = report.rows.back().product;
        if (last < first * 0.9) report.trend = "decreasing";
        else if (last > first * 1.1) report.trend = "increasing";
        else report.trend = "flat";
    } else {
        report.trend = "flat";
    }
    return report;
}

}  // namespace pblab
