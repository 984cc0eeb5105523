// bracketops.hpp — Poisson brackets, Hamiltonian vector fields, iterated
// brackets, and the invariants they generate.
//
// The bracket is built from a pairing convention: an ordered list of
// (position, momentum) coordinate pairs and a global sign s,
//
//   {f,g} = s * sum_i ( df/dq_i dg/dp_i - df/dp_i dg/dq_i ).
//
// The default convention pairs (x_i, y_i) with s = +1, which reproduces
// {x,y} = 1 on the plane and makes the incomplete-flow example's pair
// bracket-commute exactly.  Derived objects:
//
//   X_g           Hamiltonian vector field, df(X_g) = {f,g} for all f
//   Phi           -{{{f,g},f},f} - {{{f,g},g},g}; its cube root sets the
//                 eps^{2/3} rate constant at a bracket maximum
//   D(k)          {{k,f},f} + {{k,g},g}, iterated as D^l for the
//                 higher-multiplicity rate bounds
//   H_k           -{..{{h,f},f},..,g},..,g}(x), f taken 2l-k times, then g
//                 k times (canonical order; order-free at multiplicity 2l)
//   P_2l(theta)   -2l-fold bracket of h by cos(theta) f + sin(theta) g at x
//
// Directional seminorms ||h||_{x,v,k} use straight-line geodesics of the
// chart metric, so they reduce to one-dimensional symbolic derivatives.

#pragma once

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "pblab/box.hpp"
#include "pblab/expr.hpp"

namespace pblab {

// ── Pairing convention ────────────────────────────────────────────────────────

struct PairingConvention {
    std::vector<std::pair<int, int>> pairs;  // (position index, momentum index)
    double sign = 1.0;                       // global sign, +1 or -1

    static PairingConvention standard(int dim, double sign = 1.0) {
        if (dim % 2 != 0) throw DimensionError("standard convention needs even dim");
        PairingConvention conv;
        conv.sign = sign;
        for (int i = 0; i < dim; i += 2) conv.pairs.push_back({i, i + 1});
        return conv;
    }

    int dim() const {
        int d = 0;
        for (const auto& [q, p] : pairs) d = std::max({d, q + 1, p + 1});
        return d;
    }

    void check(int dim_needed) const {
        std::vector<bool> seen(static_cast<std::size_t>(dim_needed), false);
        for (const auto& [q, p] : pairs) {
            if (q < 0 || p < 0 || q >= dim_needed || p >= dim_needed)
                throw DimensionError("convention index out of chart range");
            if (seen[static_cast<std::size_t>(q)] || seen[static_cast<std::size_t>(p)])
                throw DimensionError("convention indices not a partition");
            seen[static_cast<std::size_t>(q)] = seen[static_cast<std::size_t>(p)] = true;
        }
    }
};

// ── Bracket and vector field ──────────────────────────────────────────────────

inline FieldExpr poisson(const FieldExpr& f, const FieldExpr& g,
                         const PairingConvention& conv) {
    if (f.dim() != g.dim()) throw DimensionError("poisson: dim mismatch");
    conv.check(f.dim());
    FieldExpr acc = FieldExpr::constant(f.dim(), 0.0);
    for (const auto& [q, p] : conv.pairs)
        acc = acc + f.derivative(q) * g.derivative(p) - f.derivative(p) * g.derivative(q);
    return conv.sign * acc;
}

struct VectorFieldExpr {
    std::vector<FieldExpr> components;

    int dim() const { return static_cast<int>(components.size()); }

    Point eval(std::span<const double> pt) const {
        Point v(components.size());
        for (std::size_t i = 0; i < components.size(); ++i) v[i] = components[i](pt);
        return v;
    }

    double norm_at(std::span<const double> pt) const {
        double s = 0.0;
        for (const auto& c : components) {
            const double v = c(pt);
            s += v * v;
        }
        return std::sqrt(s);
    }

    // sup of the Euclidean field norm over a grid (with refinement pass).
    GridMax sup_norm(const Box& box) const {
        return grid_sup(box, [&](const Point& pt) { return norm_at(pt); });
    }
};

// X_g with df(X_g) = {f,g}: on pair (q_i, p_i), X_g = s (dg/dp_i, -dg/dq_i).
inline VectorFieldExpr ham_vector_field(const FieldExpr& g,
                                        const PairingConvention& conv) {
    conv.check(g.dim());
    const FieldExpr sign = FieldExpr::constant(g.dim(), conv.sign);
    std::vector<FieldExpr> comp(static_cast<std::size_t>(g.dim()),
                                FieldExpr::constant(g.dim(), 0.0));
    for (const auto& [q, p] : conv.pairs) {
        comp[static_cast<std::size_t>(q)] = sign * g.derivative(p);
        comp[static_cast<std::size_t>(p)] = -(sign * g.derivative(q));
    }
    return VectorFieldExpr{std::move(comp)};
}

// Left-nested bracket {..{{h,a_1},a_2},..,a_m}.
inline FieldExpr iterated_bracket(FieldExpr h, const std::vector<FieldExpr>& args,
                                  const PairingConvention& conv) {
    if (args.empty()) throw DimensionError("iterated_bracket: empty argument list");
    for (const auto& a : args) h = poisson(h, a, conv);
    return h;
}

// ── Rate invariants ───────────────────────────────────────────────────────────

// Phi = -{{{f,g},f},f} - {{{f,g},g},g}; non-negative at a maximum of {f,g}.
inline FieldExpr phi_invariant(const FieldExpr& f, const FieldExpr& g,
                               const PairingConvention& conv) {
    const FieldExpr h = poisson(f, g, conv);
    return -(iterated_bracket(h, {f, f}, conv) + iterated_bracket(h, {g, g}, conv));
}

// D(k) = {{k,f},f} + {{k,g},g}.
inline FieldExpr d_operator(const FieldExpr& k, const FieldExpr& f,
                            const FieldExpr& g, const PairingConvention& conv) {
    return iterated_bracket(k, {f, f}, conv) + iterated_bracket(k, {g, g}, conv);
}

inline FieldExpr d_power(int l, FieldExpr k, const FieldExpr& f, const FieldExpr& g,
                         const PairingConvention& conv) {
    if (l < 1) throw DimensionError("d_power: l must be >= 1");
    for (int i = 0; i < l; ++i) k = d_operator(k, f, g, conv);
    return k;
}

// H_k(x) = -{..{{h,f},f},..},g},..,g}(x), f appearing 2l-k times then g
// appearing k times, h = {f,g}.
inline double h_k(const FieldExpr& f, const FieldExpr& g, std::span<const double> x,
                  int k, int l, const PairingConvention& conv) {
    if (k < 0 || k > 2 * l) throw DimensionError("h_k: k out of range [0, 2l]");
    const FieldExpr h = poisson(f, g, conv);
    std::vector<FieldExpr> args;
    args.reserve(static_cast<std::size_t>(2 * l));
    for (int i = 0; i < 2 * l - k; ++i) args.push_back(f);
    for (int i = 0; i < k; ++i) args.push_back(g);
    return -iterated_bracket(h, args, conv)(x);
}

// Same nested value with an arbitrary f/g pattern (true = g); used by the
// order-independence property at points of full multiplicity.
inline double h_pattern(const FieldExpr& f, const FieldExpr& g,
                        std::span<const double> x, const std::vector<bool>& pattern,
                        const PairingConvention& conv) {
    const FieldExpr h = poisson(f, g, conv);
    std::vector<FieldExpr> args;
    args.reserve(pattern.size());
    for (bool pick_g : pattern) args.push_back(pick_g ? g : f);
    return -iterated_bracket(h, args, conv)(x);
}

// P_2l(theta) = -{..{h, k_th},..,k_th}(x), bracket taken 2l times with
// k_th = cos(theta) f + sin(theta) g.
inline double p_theta(const FieldExpr& f, const FieldExpr& g, std::span<const double> x,
                      double theta, int l, const PairingConvention& conv) {
    const FieldExpr h = poisson(f, g, conv);
    const FieldExpr k_theta = std::cos(theta) * f + std::sin(theta) * g;
    std::vector<FieldExpr> args(static_cast<std::size_t>(2 * l), k_theta);
    return -iterated_bracket(h, args, conv)(x);
}

// ── Hessian helpers (nondegeneracy checks) ────────────────────────────────────

inline std::vector<std::vector<double>> hessian_at(const FieldExpr& h,
                                                   std::span<const double> x) {
    const int d = h.dim();
    std::vector<std::vector<double>> m(static_cast<std::size_t>(d),
                                       std::vector<double>(static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i) {
        const FieldExpr hi = h.derivative(i);
        for (int j = i; j < d; ++j) {
            const double v = hi.derivative(j)(x);
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
        }
    }
    return m;
}

// Spectral radius of a small symmetric matrix by cyclic Jacobi rotations.
inline double sym_spectral_radius(std::vector<std::vector<double>> m) {
    const std::size_t n = m.size();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m[p][q]) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * m[p][q], m[q][q] - m[p][p]);
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
    }
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(m[i][i]));
    return radius;
}

inline double determinant(std::vector<std::vector<double>> m) {
    const std::size_t n = m.size();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double fac = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= fac * m[c][k];
        }
    }
    return det;
}

// Multiplicity check: all partial derivatives of h of order 1..order-1
// vanish at x (within tol).
inline bool has_multiplicity(const FieldExpr& h, std::span<const double> x, int order,
                             double tol = 1e-8) {
    std::vector<FieldExpr> level = {h};
    for (int k = 1; k < order; ++k) {
        std::vector<FieldExpr> next;
        for (const auto& e : level)
            for (int i = 0; i < h.dim(); ++i) next.push_back(e.derivative(i));
        for (const auto& e : next)
            if (std::abs(e(x)) > tol) return false;
        level = std::move(next);
    }
    return true;
}


// ── Directional seminorms ─────────────────────────────────────────────────────

// ||h||_{x,v,k} = |(1/k!) d^k/dt^k h(x + t v) at t = 0|, ||v|| = 1.
inline double directional_seminorm(const FieldExpr& h, std::span<const double> x,
                                   std::span<const double> v, int k) {
    if (static_cast<int>(x.size()) != h.dim() || x.size() != v.size())
        throw DimensionError("directional_seminorm: dimension mismatch");
    double norm = 0.0;
    for (double c : v) norm += c * c;
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-9)
        throw DomainError("directional_seminorm: direction is not unit length");
    // Restrict to the line: coordinate i -> x_i + t v_i with t the sole
    // coordinate of a 1-dimensional chart.
    const FieldExpr t = FieldExpr::coordinate(1, 0);
    std::vector<FieldExpr> line;
    line.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        line.push_back(v[i] * t + x[i]);
    FieldExpr restricted = h.substitute(line, 1);
    double fact = 1.0;
    for (int j = 1; j <= k; ++j) {
        restricted = restricted.derivative(0);
        fact *= j;
    }
    return std::abs(restricted({0.0}) / fact);
}

// ||h||_{x,k}: max over unit directions, by quasi-random sphere sampling with
// one local refinement stage.  Exact only for k = 1 (gradient norm).
struct DirectionalMax {
    double value = 0.0;
    Point direction;
    int samples = 0;
};

namespace detail {

inline Point sphere_direction(std::size_t index, int dim, std::mt19937_64& rng) {
    // Gaussian directions give uniform sphere coverage; the generator is
    // seeded once per call site so sweeps stay deterministic.
    (void)index;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Point v(static_cast<std::size_t>(dim));
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& c : v) {
            c = gauss(rng);
            norm += c * c;
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (auto& c : v) c /= norm;
    return v;
}

}  // namespace detail

inline DirectionalMax directional_max(const FieldExpr& h, std::span<const double> x,
                                      int k, std::uint64_t seed = 42) {
    const int dim = h.dim();
    if (k == 1) {
        // Gradient norm is exact; also report the maximizing direction.
        Point grad(static_cast<std::size_t>(dim));
        double norm = 0.0;
        for (int i = 0; i < dim; ++i) {
            grad[static_cast<std::size_t>(i)] = h.derivative(i)(x);
            norm += grad[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(i)];
        }
        norm = std::sqrt(norm);
        DirectionalMax out;
        out.value = norm;
        out.samples = 1;
        if (norm > 1e-300) {
            for (auto& c : grad) c /= norm;
            out.direction = grad;
        } else {
            out.direction.assign(static_cast<std::size_t>(dim), 0.0);
            out.direction[0] = 1.0;
        }
        return out;
    }
    if (k == 2) {
        // ||h||_{x,v,2} = |(1/2) v^T Hess(x) v|; the max over unit v is half
        // the spectral radius, so this case is exact as well.
        DirectionalMax out;
        out.value = 0.5 * sym_spectral_radius(hessian_at(h, x));
        out.direction.assign(static_cast<std::size_t>(dim), 0.0);
        out.direction[0] = 1.0;
        out.samples = 1;
        return out;
    }
    const int n = 256 * (dim - 1);
    std::mt19937_64 rng(seed);
    DirectionalMax out;
    out.direction.assign(static_cast<std::size_t>(dim), 0.0);
    out.direction[0] = 1.0;
    out.samples = n;
    for (int i = 0; i < n; ++i) {
        const Point v = detail::sphere_direction(static_cast<std::size_t>(i), dim, rng);
        const double val = directional_seminorm(h, x, v, k);
        if (val > out.value) {
            out.value = val;
            out.direction = v;
        }
    }
    // Local refinement: shrinking perturbations around the best direction.
    double radius = 0.3;
    for (int stage = 0; stage < 4; ++stage, radius *= 0.3) {
        for (int i = 0; i < 64; ++i) {
            Point v = detail::sphere_direction(0, dim, rng);
            double norm = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                v[j] = out.direction[j] + radius * v[j];
                norm += v[j] * v[j];
            }
            norm = std::sqrt(norm);
            for (auto& c : v) c /= norm;
            const double val = directional_seminorm(h, x, v, k);
            if (val > out.value) {
                out.value = val;
                out.direction = v;
            }
            ++out.samples;
        }
    }
    return out;
}

// ||h||_{Y,k}: sup over a grid of ||h||_{x,k}.  Coarse by construction; the
// resolution rides along in the result.
struct RegionSeminorm {
    double value = 0.0;
    Point argmax;
    int grid_resolution = 0;
    int direction_samples = 0;
};

inline RegionSeminorm region_seminorm(const FieldExpr& h, const Box& box, int k,
                                      int resolution = 11, std::uint64_t seed = 42) {
    const Box coarse = box.with_resolution(resolution);
    RegionSeminorm out;
    out.grid_resolution = resolution;
    const std::size_t n = coarse.grid_size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point pt = coarse.grid_point(i);
        const DirectionalMax dm = directional_max(h, pt, k, seed);
        if (dm.value > out.value) {
            out.value = dm.value;
            out.argmax = pt;
        }
        out.direction_samples = dm.samples;
    }
    return out;
}

// ── First-order bilinear forms B(u,v) = sum a_ij du/dx_i dv/dx_j ──────────────

struct FirstOrderForm {
    int dim = 0;
    std::vector<FieldExpr> coeff;  // row-major dim x dim

    const FieldExpr& a(int i, int j) const {
        return coeff[static_cast<std::size_t>(i * dim + j)];
    }

    FieldExpr apply(const FieldExpr& u, const FieldExpr& v) const {
        if (u.dim() != dim || v.dim() != dim)
            throw DimensionError("FirstOrderForm: dim mismatch");
        FieldExpr acc = FieldExpr::constant(dim, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                if (a(i, j).is_zero()) continue;
                acc = acc + a(i, j) * u.derivative(i) * v.derivative(j);
            }
        return acc;
    }

    static FirstOrderForm from_matrix(const std::vector<std::vector<double>>& m) {
        FirstOrderForm form;
        form.dim = static_cast<int>(m.size());
        for (const auto& row : m)
            for (double c : row)
                form.coeff.push_back(FieldExpr::constant(form.dim, c));
        return form;
    }

    // a_ij = -a_ji as fields, checked on a grid.
    bool antisymmetric_on(const Box& box, double tol = 1e-12) const {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                if (grid_distance(a(i, j), -a(j, i), box) > tol) return false;
        return true;
    }
};

}  // namespace pblab
