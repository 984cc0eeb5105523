// trigfact.hpp — Fejér–Riesz factorization of nonnegative trigonometric
// polynomials, and the (2l+1)-mean bound.
//
// A TrigPoly stores complex frequency coefficients a_{-m}..a_{m}.  For a
// real-valued P >= 0 of degree 2l the factorization P(theta) = |Q(theta)|^2
// goes through the Laurent lift
//
//   P(theta) = z^{-r} T(z),   z = e^{i theta},  T(0) != 0,
//
// whose root multiset is invariant under alpha -> 1/conj(alpha); roots on
// the unit circle must occur with even multiplicity (that parity doubles as
// the nonnegativity certificate: an odd circle multiplicity means P changes
// sign, and the factorization refuses).  Q collects the interior roots plus
// half of every circle cluster, scaled by the positive real constant that
// matches |Q|^2 to P.
//
// Roots come from an Aberth–Ehrlich simultaneous iteration on the monic
// normalization (max 200 sweeps, random-restart on stagnation).  A mu-fold
// root is resolved to accuracy ~ tol^{1/mu}, so clusters are first merged at
// the documented radius 1e-6 and then, for circle-parity robustness only,
// near-circle clusters within 1e-4 whose merged centroid lands on the circle
// are combined (a split double root straddles the circle at ~1e-5).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pblab {

using Complex = std::complex<double>;

struct TrigError : std::runtime_error {
    explicit TrigError(const std::string& what) : std::runtime_error(what) {}
};

// ── TrigPoly ──────────────────────────────────────────────────────────────────

class TrigPoly {
public:
    TrigPoly() : m_(0), a_(1, Complex(0.0)) {}

    // Coefficients a_{-m}..a_{m} in ascending frequency order.
    explicit TrigPoly(std::vector<Complex> coeffs) : a_(std::move(coeffs)) {
        if (a_.empty() || a_.size() % 2 == 0)
            throw TrigError("TrigPoly: need an odd-length coefficient window");
        m_ = static_cast<int>(a_.size() / 2);
    }

    static TrigPoly constant(double c) { return TrigPoly({Complex(c)}); }

    // c0 + sum_k (cos_k cos(k theta) + sin_k sin(k theta)), real-valued.
    static TrigPoly real_trig(double c0, const std::vector<double>& cos_k,
                              const std::vector<double>& sin_k = {}) {
        const int m = static_cast<int>(std::max(cos_k.size(), sin_k.size()));
        std::vector<Complex> a(static_cast<std::size_t>(2 * m + 1), Complex(0.0));
        a[static_cast<std::size_t>(m)] = c0;
        for (int k = 1; k <= m; ++k) {
            const double ck = k <= static_cast<int>(cos_k.size()) ? cos_k[k - 1] : 0.0;
            const double sk = k <= static_cast<int>(sin_k.size()) ? sin_k[k - 1] : 0.0;
            a[static_cast<std::size_t>(m + k)] = Complex(ck / 2.0, -sk / 2.0);
            a[static_cast<std::size_t>(m - k)] = Complex(ck / 2.0, sk / 2.0);
        }
        return TrigPoly(std::move(a));
    }

    // Analytic polynomial sum_{k>=0} c_k e^{i k theta} as a TrigPoly.
    static TrigPoly analytic(const std::vector<Complex>& c) {
        const int m = static_cast<int>(c.size()) - 1;
        std::vector<Complex> a(static_cast<std::size_t>(2 * m + 1), Complex(0.0));
        for (int k = 0; k <= m; ++k) a[static_cast<std::size_t>(m + k)] = c[static_cast<std::size_t>(k)];
        return TrigPoly(std::move(a));
    }

    int window() const { return m_; }

    Complex coeff(int k) const {
        if (k < -m_ || k > m_) return Complex(0.0);
        return a_[static_cast<std::size_t>(k + m_)];
    }

    // Largest |k| with a numerically nonzero coefficient.
    int degree(double rel_tol = 1e-13) const {
        const double scale = max_coeff();
        for (int k = m_; k >= 1; --k)
            if (std::abs(coeff(k)) > rel_tol * scale ||
                std::abs(coeff(-k)) > rel_tol * scale)
                return k;
        return 0;
    }

    double max_coeff() const {
        double s = 0.0;
        for (const auto& c : a_) s = std::max(s, std::abs(c));
        return s;
    }

    bool is_real_valued(double tol = 1e-14) const {
        const double scale = std::max(1.0, max_coeff());
        for (int k = 0; k <= m_; ++k)
            if (std::abs(coeff(-k) - std::conj(coeff(k))) > tol * scale) return false;
        return true;
    }

    Complex eval(double theta) const {
        // Horner in z = e^{i theta}, then shift by z^{-m}.
        const Complex z = std::polar(1.0, theta);
        Complex acc(0.0);
        for (std::size_t i = a_.size(); i-- > 0;) acc = acc * z + a_[i];
        return acc * std::polar(1.0, -m_ * theta);
    }

    double eval_real(double theta) const { return eval(theta).real(); }

    // |this|^2 as a TrigPoly: p_k = sum_j a_j conj(a_{j-k}).
    TrigPoly conj_square() const {
        std::vector<Complex> p(static_cast<std::size_t>(4 * m_ + 1), Complex(0.0));
        for (int k = -2 * m_; k <= 2 * m_; ++k) {
            Complex s(0.0);
            for (int j = -m_; j <= m_; ++j) s += coeff(j) * std::conj(coeff(j - k));
            p[static_cast<std::size_t>(k + 2 * m_)] = s;
        }
        return TrigPoly(std::move(p));
    }

    // Mean over the circle = zero-frequency coefficient.
    Complex mean() const { return coeff(0); }

    TrigPoly trimmed(double rel_tol = 1e-13) const {
        const int d = degree(rel_tol);
        std::vector<Complex> a(static_cast<std::size_t>(2 * d + 1));
        for (int k = -d; k <= d; ++k) a[static_cast<std::size_t>(k + d)] = coeff(k);
        return TrigPoly(std::move(a));
    }

private:
    int m_;
    std::vector<Complex> a_;
};

// ── Laurent lift ──────────────────────────────────────────────────────────────

struct LaurentLift {
    std::vector<Complex> t;  // T coefficients, ascending powers, T(0) != 0
    int shift = 0;           // r: P(theta) = z^{-r} T(z)
};

inline LaurentLift laurent_lift(const TrigPoly& p) {
    const TrigPoly q = p.trimmed();
    const double scale = q.max_coeff();
    if (scale == 0.0) throw TrigError("laurent_lift: zero polynomial");
    int lo = -q.window();
    while (lo <= q.window() && std::abs(q.coeff(lo)) <= 1e-13 * scale) ++lo;
    int hi = q.window();
    while (hi >= lo && std::abs(q.coeff(hi)) <= 1e-13 * scale) --hi;
    LaurentLift lift;
    lift.shift = -lo;
    for (int k = lo; k <= hi; ++k) lift.t.push_back(q.coeff(k));
    return lift;
}

// ── Root finding (Aberth–Ehrlich) ─────────────────────────────────────────────

enum class RootClass { Interior, Exterior, UnitCircle };

struct ClusteredRoot {
    Complex value;
    int multiplicity = 1;
    RootClass cls = RootClass::Interior;
};

struct RootMultiset {
    std::vector<ClusteredRoot> roots;
    int total = 0;
    int iterations = 0;
    double worst_residual = 0.0;
};

struct RootOptions {
    double residual_tol = 1e-10;     // relative to max |coefficient|
    int max_iterations = 200;
    double cluster_radius = 1e-6;
    double circle_tol = 1e-8;
    double pair_merge_radius = 1e-4;  // circle-parity merge for split multiples
    std::uint64_t seed = 42;
};

namespace detail {

inline Complex poly_eval(const std::vector<Complex>& c, Complex z) {
    Complex acc(0.0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
}

inline std::vector<Complex> poly_derivative(const std::vector<Complex>& c) {
    std::vector<Complex> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * double(i));
    return d;
}

}  // namespace detail

inline RootMultiset find_roots(const std::vector<Complex>& coeffs,
                               RootOptions opts = {}) {
    // Trim leading/trailing numerical zeros.
    double scale = 0.0;
    for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) throw TrigError("find_roots: zero polynomial");
    std::vector<Complex> c = coeffs;
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) throw TrigError("find_roots: degree must be >= 1");

    // Monic normalization.
    for (auto& ck : c) ck /= c.back();
    const auto d = detail::poly_derivative(c);

    // Initial guesses: Cauchy-bound circle with an irrational twist.
    double radius = 0.0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[static_cast<std::size_t>(i)]));
    radius = 1.0 + radius;
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        z[static_cast<std::size_t>(i)] =
            std::polar(radius * (0.5 + 0.5 * (i + 1.0) / n),
                       2.0 * 3.14159265358979323846 * i / n + 0.40308);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    const double tol = opts.residual_tol;
    double prev_worst = std::numeric_limits<double>::infinity();
    int stagnation = 0;
    int it = 0;
    double worst = 0.0;
    for (it = 0; it < opts.max_iterations; ++it) {
        worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const Complex zi = z[static_cast<std::size_t>(i)];
            const Complex p = detail::poly_eval(c, zi);
            worst = std::max(worst, std::abs(p));
            if (std::abs(p) <= tol) continue;
            const Complex dp = detail::poly_eval(d, zi);
            Complex newton = dp == Complex(0.0) ? Complex(1e-12) : p / dp;
            Complex repulse(0.0);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const Complex diff = zi - z[static_cast<std::size_t>(j)];
                if (std::abs(diff) > 1e-300) repulse += 1.0 / diff;
            }
            const Complex denom = 1.0 - newton * repulse;
            const Complex w = std::abs(denom) > 1e-300 ? newton / denom : newton;
            z[static_cast<std::size_t>(i)] = zi - w;
        }
        if (worst <= tol) break;
        if (worst >= prev_worst * 0.999) {
            if (++stagnation >= 8) {  // random perturbation restart
                for (auto& zi : z)
                    zi += Complex(unit(rng), unit(rng)) * (1e-6 * radius);
                stagnation = 0;
            }
        } else {
            stagnation = 0;
        }
        prev_worst = worst;
    }
    if (worst > tol)
        throw TrigError("find_roots: no convergence after max iterations (residual " +
                        std::to_string(worst) + ")");

    // Greedy clustering at the documented radius.
    std::vector<ClusteredRoot> clusters;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        Complex sum = z[static_cast<std::size_t>(i)];
        int count = 1;
        used[static_cast<std::size_t>(i)] = true;
        for (int j = i + 1; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            if (std::abs(z[static_cast<std::size_t>(j)] - z[static_cast<std::size_t>(i)]) <=
                opts.cluster_radius) {
                sum += z[static_cast<std::size_t>(j)];
                used[static_cast<std::size_t>(j)] = true;
                ++count;
            }
        }
        clusters.push_back({sum / double(count), count, RootClass::Interior});
    }

    // Circle-parity merge: a mu-fold circle root is resolved only to
    // ~tol^{1/mu}, splitting into a conjugate-reciprocal pair straddling the
    // circle; merge such near-circle groups when the centroid is circular.
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            if (clusters[j].multiplicity == 0 || clusters[i].multiplicity == 0) continue;
            const Complex a = clusters[i].value, b = clusters[j].value;
            if (std::abs(a - b) > opts.pair_merge_radius) continue;
            if (std::abs(std::abs(a) - 1.0) > opts.pair_merge_radius) continue;
            const Complex mid = (a * double(clusters[i].multiplicity) +
                                 b * double(clusters[j].multiplicity)) /
                                double(clusters[i].multiplicity + clusters[j].multiplicity);
            if (std::abs(std::abs(mid) - 1.0) <= opts.pair_merge_radius) {
                clusters[i].value = mid;  // polished below, then classified
                clusters[i].multiplicity += clusters[j].multiplicity;
                clusters[j].multiplicity = 0;
            }
        }
    }
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const ClusteredRoot& r) { return r.multiplicity == 0; }),
                   clusters.end());

    // Polish: a mu-fold root is a simple root of the (mu-1)-th derivative, so
    // Newton there recovers it to machine precision from the cluster centroid.
    for (auto& cl : clusters) {
        if (cl.multiplicity < 2) continue;
        std::vector<Complex> deriv = c;
        for (int k = 1; k < cl.multiplicity; ++k) deriv = detail::poly_derivative(deriv);
        const auto deriv2 = detail::poly_derivative(deriv);
        Complex zc = cl.value;
        for (int step = 0; step < 60; ++step) {
            const Complex fv = detail::poly_eval(deriv, zc);
            const Complex dv = detail::poly_eval(deriv2, zc);
            if (std::abs(dv) < 1e-300) break;
            const Complex delta = fv / dv;
            zc -= delta;
            if (std::abs(delta) < 1e-16 * (1.0 + std::abs(zc))) break;
        }
        // Accept the polish only if it stayed inside the cluster's scale.
        if (std::abs(zc - cl.value) < 10.0 * opts.pair_merge_radius) cl.value = zc;
    }

    RootMultiset out;
    out.iterations = it;
    out.worst_residual = worst;
    for (auto& cl : clusters) {
        const double dist = std::abs(std::abs(cl.value) - 1.0);
        cl.cls = dist <= opts.circle_tol
                     ? RootClass::UnitCircle
                     : (std::abs(cl.value) < 1.0 ? RootClass::Interior
                                                 : RootClass::Exterior);
        out.total += cl.multiplicity;
        out.roots.push_back(cl);
    }
    return out;
}

// ── Fejér–Riesz ───────────────────────────────────────────────────────────────

struct FejerRieszOptions {
    int grid = 4096;
    double negativity_tol = 1e-9;
    double residual_tol = 1e-8;  // scaled by (1 + max P)
    bool skip_grid_screen = false;  // leave rejection to the parity certificate
    RootOptions roots;
};

inline TrigPoly fejer_riesz(const TrigPoly& p_in, FejerRieszOptions opts = {}) {
    if (!p_in.is_real_valued())
        throw TrigError("fejer_riesz: input is not real-valued");
    const TrigPoly p = p_in.trimmed();

    // Nonnegativity screen on the theta grid, and locate the max for the
    // normalization constant.
    double max_p = -std::numeric_limits<double>::infinity();
    double theta_star = 0.0;
    for (int i = 0; i < opts.grid; ++i) {
        const double theta = 2.0 * 3.14159265358979323846 * i / opts.grid;
        const double v = p.eval_real(theta);
        if (!opts.skip_grid_screen && v < -opts.negativity_tol)
            throw TrigError("fejer_riesz: P is negative on the grid (P(" +
                            std::to_string(theta) + ") = " + std::to_string(v) + ")");
        if (v > max_p) {
            max_p = v;
            theta_star = theta;
        }
    }

    if (p.degree() == 0) {
        const double c = p.coeff(0).real();
        if (c < 0.0) throw TrigError("fejer_riesz: negative constant");
        return TrigPoly::constant(std::sqrt(c));
    }

    const LaurentLift lift = laurent_lift(p);
    const RootMultiset rm = find_roots(lift.t, opts.roots);

    // Q-roots: interior roots as-is, half of each unit-circle cluster.
    std::vector<Complex> q_roots;
    for (const auto& cl : rm.roots) {
        if (cl.cls == RootClass::UnitCircle) {
            if (cl.multiplicity % 2 != 0)
                throw TrigError(
                    "fejer_riesz: odd multiplicity on the unit circle — P changes "
                    "sign, hypothesis violated");
            for (int k = 0; k < cl.multiplicity / 2; ++k) q_roots.push_back(cl.value);
        } else if (cl.cls == RootClass::Interior) {
            for (int k = 0; k < cl.multiplicity; ++k) q_roots.push_back(cl.value);
        }
    }
    if (static_cast<int>(q_roots.size()) != lift.shift)
        throw TrigError("fejer_riesz: interior/circle root count " +
                        std::to_string(q_roots.size()) + " != shift " +
                        std::to_string(lift.shift) +
                        " — conjugate-reciprocal pairing broken");

    // q(z) = prod (z - beta_j), expanded.
    std::vector<Complex> q = {Complex(1.0)};
    for (const auto& beta : q_roots) {
        std::vector<Complex> next(q.size() + 1, Complex(0.0));
        for (std::size_t i = 0; i < q.size(); ++i) {
            next[i + 1] += q[i];
            next[i] -= beta * q[i];
        }
        q = std::move(next);
    }

    // Positive real normalization c'' from the grid argmax of P.
    const Complex z_star = std::polar(1.0, theta_star);
    const double q2 = std::norm(detail::poly_eval(q, z_star));
    if (q2 <= 0.0) throw TrigError("fejer_riesz: normalization point degenerate");
    const double c_norm = max_p / q2;
    for (auto& ck : q) ck *= std::sqrt(c_norm);

    const TrigPoly result = TrigPoly::analytic(q);

    // Residual check of |Q|^2 against P on the grid.
    double worst = 0.0;
    for (int i = 0; i < opts.grid; ++i) {
        const double theta = 2.0 * 3.14159265358979323846 * i / opts.grid;
        worst = std::max(worst,
                         std::abs(std::norm(result.eval(theta)) - p.eval_real(theta)));
    }
    if (worst > opts.residual_tol * (1.0 + max_p))
        throw TrigError("fejer_riesz: residual " + std::to_string(worst) +
                        " exceeds tolerance");
    return result;
}

// ── Mean bound ────────────────────────────────────────────────────────────────

// max_theta P <= (2l+1)/(2pi) * integral of P = (2l+1) * a_0.
struct MeanBound {
    double max_p = 0.0;
    double theta_at_max = 0.0;
    double bound = 0.0;
    bool holds = false;
    int grid = 0;
};

inline MeanBound mean_bound(const TrigPoly& p, int l, int grid = 4096) {
    if (!p.is_real_valued()) throw TrigError("mean_bound: P must be real-valued");
    if (p.degree() > 2 * l)
        throw TrigError("mean_bound: degree exceeds 2l");
    MeanBound out;
    out.grid = grid;
    out.max_p = -std::numeric_limits<double>::infinity();
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (int i = 0; i < grid; ++i) {
        const double theta = two_pi * i / grid;
        const double v = p.eval_real(theta);
        if (v > out.max_p) {
            out.max_p = v;
            out.theta_at_max = theta;
        }
    }
    // One refinement pass around the grid argmax.
    const double h = two_pi / grid;
    for (int i = 0; i <= 200; ++i) {
        const double theta = out.theta_at_max - h + 2.0 * h * i / 200;
        out.max_p = std::max(out.max_p, p.eval_real(theta));
    }
    out.bound = (2.0 * l + 1.0) * p.mean().real();
    out.holds = out.max_p <= out.bound + 1e-9;
    return out;
}

}  // namespace pblab
