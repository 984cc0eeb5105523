// profile.hpp — piecewise-polynomial univariate profiles.
//
// A Profile is a function R -> R given by breakpoints t_0 < t_1 < ... < t_m
// and m+1 polynomial pieces (two of them unbounded).  Each piece stores its
// coefficients in a local frame (t - t_ref)^j, so high breakpoint values do
// not wreck conditioning.  Profiles support exact derivative evaluation of
// any order, which is what lets them participate in symbolic expression
// trees: the derivative of a profile-backed primitive is the same profile
// queried at derivative order k+1.
//
// Construction helpers cover the pieces needed by the perturbation profiles:
// constants, linear ramps, cubic Hermite joins (C^1 by construction) and the
// cubic smoothstep.  verify_c1() re-checks value/slope continuity at every
// breakpoint numerically; verify_bound() re-checks a declared global bound
// on a fine grid.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pblab {

struct ProfileError : std::runtime_error {
    explicit ProfileError(const std::string& what) : std::runtime_error(what) {}
};

// One polynomial piece p(t) = sum_j c_j (t - t_ref)^j.
struct ProfilePiece {
    double t_ref = 0.0;
    std::vector<double> coeffs;  // c_0 .. c_d

    // k-th derivative: sum_{j>=k} c_j * j!/(j-k)! * (t-t_ref)^{j-k} by Horner.
    double eval_deriv(int order, double t) const {
        if (static_cast<std::size_t>(order) >= coeffs.size()) return 0.0;
        const double u = t - t_ref;
        double acc = 0.0;
        for (std::size_t j = coeffs.size(); j-- > static_cast<std::size_t>(order);) {
            double fall = 1.0;
            for (int r = 0; r < order; ++r) fall *= static_cast<double>(j - r);
            acc = acc * u + coeffs[j] * fall;
        }
        return acc;
    }
};

class Profile {
public:
    Profile() = default;

    // breakpoints.size() + 1 == pieces.size(); pieces[i] covers
    // (breakpoints[i-1], breakpoints[i]], with the obvious unbounded ends.
    Profile(std::vector<double> breakpoints, std::vector<ProfilePiece> pieces,
            double declared_bound = std::numeric_limits<double>::infinity(),
            bool nondecreasing = false)
        : breaks_(std::move(breakpoints)),
          pieces_(std::move(pieces)),
          bound_(declared_bound),
          nondecreasing_(nondecreasing) {
        if (pieces_.size() != breaks_.size() + 1)
            throw ProfileError("Profile: piece/breakpoint count mismatch");
        if (!std::is_sorted(breaks_.begin(), breaks_.end()))
            throw ProfileError("Profile: breakpoints not sorted");
    }

    double operator()(double t) const { return eval_deriv(0, t); }

    double eval_deriv(int order, double t) const {
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        const std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
        return pieces_[idx].eval_deriv(order, t);
    }

    const std::vector<double>& breakpoints() const { return breaks_; }
    double declared_bound() const { return bound_; }
    bool nondecreasing_flag() const { return nondecreasing_; }

    // Max one-sided value/slope mismatch over all breakpoints.
    double c1_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < breaks_.size(); ++i) {
            const double t = breaks_[i];
            for (int k = 0; k <= 1; ++k) {
                const double left = pieces_[i].eval_deriv(k, t);
                const double right = pieces_[i + 1].eval_deriv(k, t);
                worst = std::max(worst, std::abs(left - right));
            }
        }
        return worst;
    }

    void verify_c1(double tol = 1e-8) const {
        const double d = c1_defect();
        if (d >= tol)
            throw ProfileError("Profile: C1 defect " + std::to_string(d) +
                               " exceeds tolerance");
    }

    // Checks |p(t)| <= declared bound on an n-point grid spanning the
    // breakpoint range (plus a margin on each side).
    void verify_bound(int n = 10000, double slack = 1e-12) const {
        if (!std::isfinite(bound_) || breaks_.empty()) return;
        const double lo = breaks_.front() - 1.0, hi = breaks_.back() + 1.0;
        for (int i = 0; i < n; ++i) {
            const double t = lo + (hi - lo) * i / (n - 1);
            if (std::abs((*this)(t)) > bound_ + slack)
                throw ProfileError("Profile: declared bound violated at t=" +
                                   std::to_string(t));
        }
    }

private:
    std::vector<double> breaks_;
    std::vector<ProfilePiece> pieces_;
    double bound_ = std::numeric_limits<double>::infinity();
    bool nondecreasing_ = false;
};

// Left-to-right builder over a contiguous span.  Segments are appended with
// explicit intervals; finish() attaches the two unbounded constant ends.
class ProfileBuilder {
public:
    ProfileBuilder& constant(double t0, double t1, double value) {
        return add(t0, t1, ProfilePiece{t0, {value}});
    }

    // value(t) = v0 + slope*(t - t0) on [t0, t1].
    ProfileBuilder& linear(double t0, double t1, double v0, double slope) {
        return add(t0, t1, ProfilePiece{t0, {v0, slope}});
    }

    // Cubic Hermite on [t0, t1] with endpoint values/slopes.
    ProfileBuilder& hermite(double t0, double t1, double v0, double v1,
                            double d0, double d1) {
        const double L = t1 - t0;
        if (L <= 0.0) throw ProfileError("ProfileBuilder: empty Hermite span");
        const double dv = v1 - v0;
        // p(u) = v0 + d0 u + a u^2 + b u^3 in u = t - t0.
        const double a = (3.0 * dv / L - 2.0 * d0 - d1) / L;
        const double b = (d0 + d1 - 2.0 * dv / L) / (L * L);
        return add(t0, t1, ProfilePiece{t0, {v0, d0, a, b}});
    }

    Profile finish(double left_value, double right_value,
                   double declared_bound = std::numeric_limits<double>::infinity(),
                   bool nondecreasing = false) {
        if (edges_.empty()) throw ProfileError("ProfileBuilder: no segments");
        std::vector<ProfilePiece> pieces;
        pieces.reserve(interior_.size() + 2);
        pieces.push_back(ProfilePiece{edges_.front(), {left_value}});
        for (auto& p : interior_) pieces.push_back(std::move(p));
        pieces.push_back(ProfilePiece{edges_.back(), {right_value}});
        return Profile(std::move(edges_), std::move(pieces), declared_bound,
                       nondecreasing);
    }

private:
    ProfileBuilder& add(double t0, double t1, ProfilePiece piece) {
        if (t1 <= t0) throw ProfileError("ProfileBuilder: empty segment");
        if (edges_.empty()) {
            edges_.push_back(t0);
        } else if (std::abs(edges_.back() - t0) > 1e-12) {
            throw ProfileError("ProfileBuilder: segments not contiguous");
        }
        edges_.push_back(t1);
        interior_.push_back(std::move(piece));
        return *this;
    }

    std::vector<double> edges_;
    std::vector<ProfilePiece> interior_;
};

// Cubic smoothstep as a profile: 0 for t<=0, 3t^2-2t^3 on [0,1], 1 for t>=1.
inline Profile cubic_smoothstep_profile() {
    std::vector<double> breaks = {0.0, 1.0};
    std::vector<ProfilePiece> pieces = {
        ProfilePiece{0.0, {0.0}},
        ProfilePiece{0.0, {0.0, 0.0, 3.0, -2.0}},
        ProfilePiece{1.0, {1.0}},
    };
    return Profile(std::move(breaks), std::move(pieces), 1.0, true);
}

}  // namespace pblab
