// hamflow.hpp — Hamiltonian flow integration and the displacement toolkit.
//
// Time stepping is the implicit midpoint rule
//
//   z' = z + h X_H((z + z')/2),
//
// a symplectic one-step method that handles the non-separable scenario
// Hamiltonians.  Each step runs fixed-point iteration to residual 1e-12 and
// falls back to Newton (with the symbolic Jacobian of X_H) if the contraction
// stalls.  Trajectories terminate early with status LeftDomain when the state
// exits the supplied box — this is how incomplete flows show up — or Diverged
// when the state norm passes a blow-up threshold.
//
// The displacement side implements the bounds used by the proofs:
//
//   hofer_upper           ||Phi_g^{-t} o Phi_G^t||_Hof <= 2 t ||g - G||
//   energy_lower_product  e(Q_1 x ... x Q_n) >= (1/2) min Area(Q_i)
//   energy_lower_slab     e(W_{r,alpha}) >= C r alpha, C = (1-kappa)/||X_f(x)||
//   displacement_check    min f over one transported cloud vs max over the other
//
// Slab sets W_{r,alpha} = B_x(r) ∩ {f(x) < f < f(x)+alpha} are sampled with a
// Halton sequence filtered by the membership predicate; min/max over samples
// under-estimate the true extrema, so sample counts are recorded.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "pblab/bracketops.hpp"
#include "pblab/box.hpp"
#include "pblab/parallel.hpp"

namespace pblab {

struct IntegrateError : std::runtime_error {
    explicit IntegrateError(const std::string& what) : std::runtime_error(what) {}
};

// ── Trajectories ──────────────────────────────────────────────────────────────

enum class FlowStatus : std::uint8_t { Completed, LeftDomain, Diverged };

inline std::string to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::Completed: return "completed";
        case FlowStatus::LeftDomain: return "left-domain";
        case FlowStatus::Diverged: return "diverged";
    }
    return "?";
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Point> states;
    FlowStatus status = FlowStatus::Completed;
    double t_star = 0.0;  // last valid time when terminated early

    const Point& back() const { return states.back(); }

    // CSV dump: t, x_1..x_2n, H.
    void write_csv(std::ostream& os, const FieldExpr& H) const {
        os << "# pblab csv v1; trajectory; columns: t";
        for (int i = 0; i < H.dim(); ++i) os << ",x" << i + 1;
        os << ",H; status=" << to_string(status) << "\n";
        os.precision(12);
        for (std::size_t k = 0; k < times.size(); ++k) {
            os << times[k];
            for (double c : states[k]) os << "," << c;
            os << "," << H(states[k]) << "\n";
        }
    }
};

struct IntegratorOptions {
    double fixed_point_residual = 1e-12;
    int max_fixed_point_iters = 50;
    int max_newton_iters = 25;
    double blowup_norm = 1e6;
    bool store_states = true;
};

namespace detail {

// Solve (I - (h/2) J) dz = rhs in place; tiny dense system.
inline Point solve_newton_step(std::vector<std::vector<double>> m, Point rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) < 1e-300)
            throw IntegrateError("singular Newton system in implicit solve");
        std::swap(m[piv], m[c]);
        std::swap(rhs[piv], rhs[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double fac = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= fac * m[c][k];
            rhs[r] -= fac * rhs[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        for (std::size_t k = c + 1; k < n; ++k) rhs[c] -= m[c][k] * rhs[k];
        rhs[c] /= m[c][c];
    }
    return rhs;
}

}  // namespace detail

class MidpointIntegrator {
public:
    MidpointIntegrator(const FieldExpr& H, const PairingConvention& conv,
                       IntegratorOptions opts = {})
        : dim_(H.dim()), field_(ham_vector_field(H, conv)), opts_(opts) {
        // Symbolic Jacobian of X_H, used by the Newton fallback.
        jac_.reserve(static_cast<std::size_t>(dim_ * dim_));
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                jac_.push_back(field_.components[static_cast<std::size_t>(i)].derivative(j));
    }

    const VectorFieldExpr& field() const { return field_; }

    // One implicit midpoint step from z over time h (h may be negative).
    Point step(const Point& z, double h) const {
        const std::size_t n = z.size();
        Point mid = z, znext = z;
        // Fixed-point iteration on z'.
        Point xv = field_.eval(z);
        for (std::size_t i = 0; i < n; ++i) znext[i] = z[i] + h * xv[i];
        double residual = std::numeric_limits<double>::infinity();
        for (int it = 0; it < opts_.max_fixed_point_iters; ++it) {
            for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (z[i] + znext[i]);
            xv = field_.eval(mid);
            residual = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double next = z[i] + h * xv[i];
                residual = std::max(residual, std::abs(next - znext[i]));
                znext[i] = next;
            }
            if (residual <= opts_.fixed_point_residual) return znext;
        }
        // Newton fallback on G(z') = z' - z - h X((z+z')/2).
        for (int it = 0; it < opts_.max_newton_iters; ++it) {
            for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (z[i] + znext[i]);
            xv = field_.eval(mid);
            Point g(n);
            residual = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                g[i] = znext[i] - z[i] - h * xv[i];
                residual = std::max(residual, std::abs(g[i]));
            }
            if (residual <= opts_.fixed_point_residual) return znext;
            std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    m[i][j] = (i == j ? 1.0 : 0.0) -
                              0.5 * h * jac_[i * n + j](mid);
            const Point dz = detail::solve_newton_step(std::move(m), g);
            for (std::size_t i = 0; i < n; ++i) znext[i] -= dz[i];
        }
        throw IntegrateError("implicit midpoint solve did not converge");
    }

private:
    int dim_;
    VectorFieldExpr field_;
    std::vector<FieldExpr> jac_;
    IntegratorOptions opts_;
};

// Integrate the flow of H from x0 for time t_end (signed), step size `step`,
// stopping early on box exit or blow-up.
inline Trajectory integrate(const FieldExpr& H, const Point& x0, double t_end,
                            double step, const Box& box, const PairingConvention& conv,
                            IntegratorOptions opts = {}) {
    if (step <= 0.0) throw IntegrateError("integrate: step must be positive");
    if (!box.contains(x0)) throw IntegrateError("integrate: x0 outside box");
    const MidpointIntegrator integ(H, conv, opts);
    const double dir = t_end >= 0.0 ? 1.0 : -1.0;
    const double total = std::abs(t_end);
    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil(total / step - 1e-12));

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    Point z = x0;
    double t = 0.0, t_abs = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double h_abs = std::min(step, total - t_abs);
        if (h_abs <= 0.0) break;
        const double h = dir * h_abs;
        Point znext;
        try {
            znext = integ.step(z, h);
        } catch (const DomainError&) {
            traj.status = FlowStatus::LeftDomain;  // field undefined past here
            traj.t_star = t;
            return traj;
        }
        double norm = 0.0;
        for (double c : znext) norm += c * c;
        norm = std::sqrt(norm);
        if (norm > opts.blowup_norm) {
            traj.status = FlowStatus::Diverged;
            traj.t_star = t;
            return traj;
        }
        if (!box.contains(znext)) {
            traj.status = FlowStatus::LeftDomain;
            traj.t_star = t;
            return traj;
        }
        t_abs += h_abs;
        t = dir * t_abs;
        z = std::move(znext);
        if (opts.store_states || k + 1 == n_steps) {
            traj.times.push_back(t);
            traj.states.push_back(z);
        }
    }
    traj.status = FlowStatus::Completed;
    traj.t_star = t;
    return traj;
}

// Transport a point cloud along the flow of H; per-point status.
struct TransportResult {
    std::vector<Point> cloud;
    std::vector<FlowStatus> status;

    bool all_completed() const {
        for (auto s : status)
            if (s != FlowStatus::Completed) return false;
        return true;
    }
};

inline TransportResult transport_set(const FieldExpr& H, const std::vector<Point>& cloud,
                                     double t, double step, const Box& box,
                                     const PairingConvention& conv,
                                     IntegratorOptions opts = {}) {
    opts.store_states = false;
    TransportResult out;
    out.cloud.resize(cloud.size());
    out.status.resize(cloud.size());
    parallel_for(cloud.size(), [&](std::size_t i) {
        const Trajectory traj = integrate(H, cloud[i], t, step, box, conv, opts);
        out.cloud[i] = traj.back();
        out.status[i] = traj.status;
    }, /*grain=*/8);
    return out;
}

// ── Slab sets ─────────────────────────────────────────────────────────────────

namespace detail {

inline double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    std::size_t i = index + 1;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % static_cast<std::size_t>(base));
        i /= static_cast<std::size_t>(base);
    }
    return r;
}

inline constexpr int kHaltonPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace detail

// W_{r,alpha} = B_x(r) ∩ {y : f(x) < f(y) < f(x) + alpha}, sampled.
struct SlabSet {
    Point center;
    double radius = 0.0;
    double height = 0.0;
    FieldExpr generator;   // the slab-cutting function f
    double f_center = 0.0;
    std::vector<Point> samples;
    std::size_t attempts = 0;  // Halton points drawn to get the samples

    bool member(std::span<const double> y) const {
        double d2 = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) {
            const double d = y[i] - center[i];
            d2 += d * d;
        }
        if (d2 >= radius * radius) return false;
        const double fy = generator(y);
        return fy > f_center && fy < f_center + height;
    }
};

inline SlabSet sample_slab(const FieldExpr& f, const Point& x, double r, double alpha,
                           std::size_t target_count = 4096,
                           std::size_t max_attempts = 4u << 20) {
    if (static_cast<int>(x.size()) != f.dim())
        throw DimensionError("sample_slab: point dim mismatch");
    SlabSet slab;
    slab.center = x;
    slab.radius = r;
    slab.height = alpha;
    slab.generator = f;
    slab.f_center = f(x);
    const int dim = f.dim();
    if (dim > 8) throw DimensionError("sample_slab: dimension above Halton table");
    for (std::size_t i = 0; i < max_attempts && slab.samples.size() < target_count; ++i) {
        Point y(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d)
            y[static_cast<std::size_t>(d)] =
                x[static_cast<std::size_t>(d)] +
                r * (2.0 * detail::halton(i, detail::kHaltonPrimes[d]) - 1.0);
        slab.attempts = i + 1;
        if (slab.member(y)) slab.samples.push_back(std::move(y));
    }
    if (slab.samples.empty())
        throw DomainError("sample_slab: no samples accepted (slab too thin?)");
    return slab;
}

// ── Displacement bounds ───────────────────────────────────────────────────────

struct PlanarDomain {
    std::vector<std::array<double, 2>> vertices;  // simple polygon, CCW or CW

    static PlanarDomain rectangle(double x0, double x1, double y0, double y1) {
        return PlanarDomain{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
    }

    static PlanarDomain regular_polygon(double radius, int sides) {
        PlanarDomain d;
        for (int i = 0; i < sides; ++i) {
            const double a = 2.0 * 3.14159265358979323846 * i / sides;
            d.vertices.push_back({radius * std::cos(a), radius * std::sin(a)});
        }
        return d;
    }

    double area() const {  // shoelace
        if (vertices.size() < 3) throw DomainError("PlanarDomain: degenerate polygon");
        double s = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const auto& a = vertices[i];
            const auto& b = vertices[(i + 1) % vertices.size()];
            s += a[0] * b[1] - b[0] * a[1];
        }
        const double area = 0.5 * std::abs(s);
        if (area <= 0.0) throw DomainError("PlanarDomain: zero area");
        return area;
    }
};

// e(Q_1 x ... x Q_n) >= (1/2) min Area(Q_i).
inline double energy_lower_product(const std::vector<PlanarDomain>& domains) {
    if (domains.empty()) throw DomainError("energy_lower_product: no domains");
    double m = std::numeric_limits<double>::infinity();
    for (const auto& d : domains) m = std::min(m, d.area());
    return 0.5 * m;
}

// e(W_{r,alpha}) >= C r alpha with C = (1 - kappa) / ||X_f(x)||.  The safety
// margin kappa keeps C strictly below the limit constant 1/||X_f(x)||.
inline double energy_lower_slab(const FieldExpr& f, const Point& x, double r,
                                double alpha, const PairingConvention& conv,
                                double kappa = 0.05) {
    const VectorFieldExpr xf = ham_vector_field(f, conv);
    const double speed = xf.norm_at(x);
    if (speed < 1e-12)
        throw DomainError("energy_lower_slab: x is a critical point of f");
    return (1.0 - kappa) / speed * r * alpha;
}

// 2 t ||g - G|| over the box: Hofer-norm upper bound for Phi_g^{-t} o Phi_G^t.
inline double hofer_upper(const FieldExpr& g, const FieldExpr& G, double t,
                          const Box& box) {
    return 2.0 * t * sup_norm(g - G, box).value;
}

// Separation of two transported clouds by the values of an observable.
struct DisplacementCheck {
    bool separated = false;
    double margin = 0.0;  // min over A minus max over B
};

inline DisplacementCheck displacement_check(const std::vector<double>& f_values_a,
                                            const std::vector<double>& f_values_b) {
    if (f_values_a.empty() || f_values_b.empty())
        throw DomainError("displacement_check: empty cloud");
    double min_a = std::numeric_limits<double>::infinity();
    double max_b = -std::numeric_limits<double>::infinity();
    for (double v : f_values_a) min_a = std::min(min_a, v);
    for (double v : f_values_b) max_b = std::max(max_b, v);
    DisplacementCheck out;
    out.margin = min_a - max_b;
    out.separated = out.margin > 0.0;
    return out;
}

}  // namespace pblab
