// box.hpp — coordinate boxes, grids, and grid-based uniform norms.
//
// A Box is a product of closed intervals with a per-axis grid resolution.
// Sup-norms are grid maxima followed by one refinement pass: a factor-10
// finer local grid laid over the cell neighbourhood of the coarse argmax.
// Results always carry the resolution they were computed at, so callers can
// budget tolerances for grid error.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pblab/expr.hpp"
#include "pblab/parallel.hpp"

namespace pblab {

using Point = std::vector<double>;

struct Box {
    std::vector<double> lo, hi;
    std::vector<int> res;  // grid points per axis, >= 2

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_, int resolution = 41)
        : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size()) throw DimensionError("Box: lo/hi size mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw DomainError("Box: empty interval");
        if (resolution < 2) throw DomainError("Box: resolution must be >= 2");
        res.assign(lo.size(), resolution);
    }

    static Box cube(int dim, double half_width, int resolution = 41) {
        return Box(std::vector<double>(static_cast<std::size_t>(dim), -half_width),
                   std::vector<double>(static_cast<std::size_t>(dim), half_width),
                   resolution);
    }

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(std::span<const double> pt, double slack = 0.0) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (pt[i] < lo[i] - slack || pt[i] > hi[i] + slack) return false;
        return true;
    }

    std::size_t grid_size() const {
        std::size_t n = 1;
        for (int r : res) n *= static_cast<std::size_t>(r);
        return n;
    }

    Point grid_point(std::size_t flat) const {
        Point pt(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) {
            const std::size_t r = static_cast<std::size_t>(res[i]);
            const std::size_t k = flat % r;
            flat /= r;
            pt[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(k) /
                                static_cast<double>(r - 1);
        }
        return pt;
    }

    double max_spacing() const {
        double s = 0.0;
        for (std::size_t i = 0; i < lo.size(); ++i)
            s = std::max(s, (hi[i] - lo[i]) / (res[i] - 1));
        return s;
    }

    Box with_resolution(int resolution) const {
        Box b = *this;
        b.res.assign(lo.size(), resolution);
        return b;
    }

    // Sub-box of one cell-neighbourhood around a point, clipped to this box.
    Box refine_around(std::span<const double> center, int resolution) const {
        Box b;
        b.lo.resize(lo.size());
        b.hi.resize(lo.size());
        b.res.assign(lo.size(), resolution);
        for (std::size_t i = 0; i < lo.size(); ++i) {
            const double h = (hi[i] - lo[i]) / (res[i] - 1);
            b.lo[i] = std::max(lo[i], center[i] - h);
            b.hi[i] = std::min(hi[i], center[i] + h);
            if (!(b.lo[i] < b.hi[i])) {  // degenerate after clipping
                b.lo[i] = lo[i];
                b.hi[i] = hi[i];
            }
        }
        return b;
    }

    std::string describe() const {
        std::string s = "[";
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (i) s += " x ";
            s += "(" + std::to_string(lo[i]) + "," + std::to_string(hi[i]) + ")@" +
                 std::to_string(res[i]);
        }
        return s + "]";
    }
};

// Result of a grid extremum scan, with the resolution it was computed at.
struct GridMax {
    double value = 0.0;
    Point argmax;
    int base_resolution = 0;
    double refined_spacing = 0.0;
};

namespace detail {

template <typename F>
GridMax grid_max(const Box& box, F&& f) {
    const std::size_t n = box.grid_size();
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), n ? n : 1);
    std::vector<double> best(threads, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> best_idx(threads, 0);
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    parallel_for(
        static_cast<std::size_t>(threads),
        [&](std::size_t t) {
            const std::size_t lo = chunk * t, hi = std::min(n, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    const Point pt = box.grid_point(i);
                    const double v = f(pt);
                    if (v > best[t]) { best[t] = v; best_idx[t] = i; }
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        },
        /*grain=*/2);
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    std::size_t which = 0;
    for (std::size_t t = 1; t < best.size(); ++t)
        if (best[t] > best[which]) which = t;
    GridMax out;
    out.value = best[which];
    out.argmax = box.grid_point(best_idx[which]);
    return out;
}

}  // namespace detail

// Grid maximum of a scalar function with one factor-10 refinement pass.
template <typename F>
GridMax grid_sup(const Box& box, F&& f) {
    GridMax coarse = detail::grid_max(box, f);
    const Box fine = box.refine_around(coarse.argmax, 21);
    GridMax refined = detail::grid_max(fine, f);
    if (refined.value < coarse.value) refined = coarse;
    refined.base_resolution = box.res[0];
    refined.refined_spacing = fine.max_spacing();
    return refined;
}

// sup over the grid of |f|, with argmax.  Def of the uniform norm.
inline GridMax sup_norm(const FieldExpr& f, const Box& box) {
    if (f.dim() != box.dim()) throw DimensionError("sup_norm: dim mismatch");
    return grid_sup(box, [&](const Point& pt) { return std::abs(f(pt)); });
}

// sup over the grid of f itself (signed).
inline GridMax sup_value(const FieldExpr& f, const Box& box) {
    if (f.dim() != box.dim()) throw DimensionError("sup_value: dim mismatch");
    return grid_sup(box, [&](const Point& pt) { return f(pt); });
}

// sup over the grid of the Euclidean gradient norm: the ||.||_{Y,1} seminorm
// in the chart metric (geodesics are straight lines).
inline GridMax c1_seminorm(const FieldExpr& f, const Box& box) {
    if (f.dim() != box.dim()) throw DimensionError("c1_seminorm: dim mismatch");
    std::vector<FieldExpr> grad;
    grad.reserve(static_cast<std::size_t>(f.dim()));
    for (int i = 0; i < f.dim(); ++i) grad.push_back(f.derivative(i));
    return grid_sup(box, [&](const Point& pt) {
        double s = 0.0;
        for (const auto& g : grad) {
            const double v = g(pt);
            s += v * v;
        }
        return std::sqrt(s);
    });
}

// Max absolute difference of two fields over the plain grid (no refinement).
inline double grid_distance(const FieldExpr& a, const FieldExpr& b, const Box& box) {
    if (a.dim() != box.dim() || b.dim() != box.dim())
        throw DimensionError("grid_distance: dim mismatch");
    return detail::grid_max(box, [&](const Point& pt) {
               return std::abs(a(pt) - b(pt));
           }).value;
}

}  // namespace pblab
