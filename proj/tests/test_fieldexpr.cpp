#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pblab/box.hpp"
#include "pblab/parser.hpp"
#include "pblab/profile.hpp"

using namespace pblab;
using Catch::Approx;

namespace {

// Independent finite-difference oracle: central difference, step 1e-5.
double fd_partial(const FieldExpr& f, Point pt, int i, double step = 1e-5) {
    pt[static_cast<std::size_t>(i)] += step;
    const double hi = f(pt);
    pt[static_cast<std::size_t>(i)] -= 2.0 * step;
    const double lo = f(pt);
    return (hi - lo) / (2.0 * step);
}

std::vector<Point> random_points(int dim, int count, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-radius, radius);
    std::vector<Point> pts;
    for (int k = 0; k < count; ++k) {
        Point pt(static_cast<std::size_t>(dim));
        for (auto& c : pt) c = unit(rng);
        pts.push_back(pt);
    }
    return pts;
}

}  // namespace

TEST_CASE("parse_field basics") {
    SECTION("odd cubic vanishes at the origin") {
        const auto f = parse_field("x - x^3/3 - x*y^2", 2);
        REQUIRE(f({0.0, 0.0}) == 0.0);
    }
    SECTION("sqrt(2z+2) on a 4d chart") {
        const auto chi = parse_field("sqrt(2*z + 2)", 4);
        REQUIRE(chi({0.0, 0.0, 1.0, 0.0}) == Approx(2.0));
    }
    SECTION("malformed input reports the offset") {
        try {
            parse_field("1 +", 2);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            REQUIRE(e.offset == 3);
        }
    }
    SECTION("unknown symbol") {
        REQUIRE_THROWS_AS(parse_field("x + w", 2), ParseError);
    }
    SECTION("dimension mismatch at evaluation") {
        const auto f = parse_field("x + y", 2);
        REQUIRE_THROWS_AS(f({1.0}), DimensionError);
    }
    SECTION("q/p aliases in dimension 2") {
        const auto f = parse_field("p*cos(q)", 2);
        REQUIRE(f({0.0, 1.0}) == Approx(1.0));
    }
}

TEST_CASE("differentiate against the finite-difference oracle") {
    SECTION("d/dx of the cubic model field") {
        const auto f = parse_field("x - x^3/3 - x*y^2", 2);
        const auto fx = f.derivative(0);
        for (const auto& pt : random_points(2, 10, 0.9, 7)) {
            const double fd = fd_partial(f, pt, 0);
            REQUIRE(fx(pt) == Approx(fd).epsilon(1e-6));
            // and it matches the closed form 1 - x^2 - y^2
            REQUIRE(fx(pt) == Approx(1.0 - pt[0] * pt[0] - pt[1] * pt[1]).margin(1e-12));
        }
    }
    SECTION("d/dy of x is zero") {
        const auto f = parse_field("x", 2);
        const auto fy = f.derivative(1);
        for (const auto& pt : random_points(2, 5, 1.0, 8))
            REQUIRE(fy(pt) == 0.0);
    }
    SECTION("d/dp of p cos q at (0,1)") {
        const auto f = parse_field("p*cos(q)", 2);
        const double fd = fd_partial(f, {0.0, 1.0}, 1);
        REQUIRE(f.derivative(1)({0.0, 1.0}) == Approx(1.0).margin(1e-12));
        REQUIRE(fd == Approx(1.0).epsilon(1e-6));
    }
    SECTION("index out of range") {
        const auto f = parse_field("x", 2);
        REQUIRE_THROWS_AS(f.derivative(2), DimensionError);
        REQUIRE_THROWS_AS(f.derivative(-1), DimensionError);
    }
}

TEST_CASE("derivative property: symbolic vs central difference at random points") {
    const std::vector<std::string> exprs = {
        "x - x^3/3 - x*y^2",
        "sin(x)*cos(y) + exp(x*y/4)",
        "y*(1 - x^2 - y^2)",
        "bump(x)*bump(y)",
        "smoothstep(x + y)",
    };
    for (const auto& text : exprs) {
        const auto f = parse_field(text, 2);
        for (int i = 0; i < 2; ++i) {
            const auto df = f.derivative(i);
            int checked = 0;
            for (const auto& pt : random_points(2, 100, 0.85, 11 + i)) {
                const double fd = fd_partial(f, pt, i);
                const double sym = df(pt);
                REQUIRE(std::abs(sym - fd) <= 1e-5 * (1.0 + std::abs(sym)));
                ++checked;
            }
            REQUIRE(checked == 100);
        }
    }
}

TEST_CASE("mixed partials commute") {
    const auto f = parse_field("sin(x*y) + x^3*y^2 - exp(x/2)*y", 2);
    const auto fxy = f.derivative(0).derivative(1);
    const auto fyx = f.derivative(1).derivative(0);
    for (const auto& pt : random_points(2, 50, 1.0, 3))
        REQUIRE(fxy(pt) == Approx(fyx(pt)).margin(1e-10));
}

TEST_CASE("conservative simplification preserves values") {
    const auto a = parse_field("0*x + 1*y + x^1 + (x - x)", 2);
    const auto b = parse_field("y + x", 2);
    for (const auto& pt : random_points(2, 50, 2.0, 5))
        REQUIRE(a(pt) == Approx(b(pt)).margin(1e-14 * (1.0 + std::abs(b(pt)))));
}

TEST_CASE("parse -> print -> parse round-trips to an equivalent tree") {
    const std::vector<std::string> exprs = {
        "x - x^3/3 - x*y^2",
        "sqrt(2*y + 2) * cos(3*x)",
        "(x + y)^4 / (1 + x^2)",
        "bump(x) - smoothstep(y)*exp(x)",
        "-x^2 - -y",
    };
    for (const auto& text : exprs) {
        const auto f = parse_field(text, 2);
        const auto g = parse_field(f.print(), 2);
        for (const auto& pt : random_points(2, 60, 0.9, 17)) {
            const double fv = f(pt);
            REQUIRE(g(pt) == Approx(fv).margin(1e-12 * (1.0 + std::abs(fv))));
        }
    }
}

TEST_CASE("printed derivatives of primitives re-parse via the @ suffix") {
    const auto f = sin(FieldExpr::coordinate(1, 0));
    const auto f2 = f.derivative(0).derivative(0);  // sin@2
    const auto g = parse_field(f2.print({"x"}), 1);
    REQUIRE(g({0.3}) == Approx(-std::sin(0.3)).margin(1e-15));
}

TEST_CASE("domain errors") {
    SECTION("sqrt outside its domain") {
        const auto chi = parse_field("sqrt(2*z + 2)", 4);
        REQUIRE_THROWS_AS(chi({0.0, 0.0, -1.5, 0.0}), DomainError);
        // derivative blows up at z = -1 exactly
        REQUIRE_THROWS_AS(chi.derivative(2)({0.0, 0.0, -1.0, 0.0}), DomainError);
    }
    SECTION("division by zero") {
        const auto f = parse_field("1/(x - y)", 2);
        REQUIRE_THROWS_AS(f({0.5, 0.5}), DomainError);
        REQUIRE(f({1.0, 0.5}) == Approx(2.0));
    }
}

TEST_CASE("sup_norm") {
    SECTION("paraboloid cap on [-1,1]^2") {
        const auto f = parse_field("1 - x^2 - y^2", 2);
        const auto sn = sup_norm(f, Box({-1, -1}, {1, 1}, 101));
        REQUIRE(sn.value == Approx(1.0).margin(1e-12));
        // |f| also attains 1 at the corners, so only the value is pinned.
        REQUIRE(std::abs(f(sn.argmax)) == Approx(1.0).margin(1e-12));
    }
    SECTION("zero field") {
        const auto sn = sup_norm(FieldExpr::constant(2, 0.0), Box({-1, -1}, {1, 1}, 11));
        REQUIRE(sn.value == 0.0);
    }
    SECTION("momentum coordinate on [0,2pi]x[-1,1]") {
        const auto f = parse_field("p", 2);
        const auto sn = sup_norm(f, Box({0.0, -1.0}, {2 * 3.14159265358979323846, 1.0}, 51));
        REQUIRE(sn.value == Approx(1.0).margin(1e-12));
        REQUIRE(std::abs(sn.argmax[1]) == Approx(1.0).margin(1e-12));
    }
    SECTION("monotone under box inclusion with aligned grids") {
        const auto f = parse_field("sin(3*x)*cos(2*y) + x/2", 2);
        const Box big({-1, -1}, {1, 1}, 41);     // spacing 0.05
        const Box small({-0.5, -0.5}, {0.5, 0.5}, 21);  // same spacing, aligned
        REQUIRE(sup_norm(f, small).value <= sup_norm(f, big).value + 1e-15);
    }
    SECTION("reports the refinement resolution") {
        const auto sn = sup_norm(parse_field("x", 2), Box({-1, -1}, {1, 1}, 11));
        REQUIRE(sn.base_resolution == 11);
        REQUIRE(sn.refined_spacing > 0.0);
        REQUIRE(sn.refined_spacing < 2.0 / 10.0);
    }
}

TEST_CASE("c1_seminorm") {
    SECTION("linear coordinate") {
        REQUIRE(c1_seminorm(parse_field("x", 2), Box({-1, -1}, {1, 1}, 21)).value ==
                Approx(1.0).margin(1e-12));
    }
    SECTION("constant") {
        REQUIRE(c1_seminorm(FieldExpr::constant(2, 3.0), Box({-1, -1}, {1, 1}, 11)).value ==
                0.0);
    }
    SECTION("p cos q on [0,2pi]x[-1,1]") {
        // |grad|^2 = p^2 sin^2 q + cos^2 q <= 1 on |p| <= 1, attained wherever
        // p = +-1 or q = 0 mod pi; the analytic maximum is 1.
        const auto f = parse_field("p*cos(q)", 2);
        const auto c1 = c1_seminorm(f, Box({0.0, -1.0}, {2 * 3.14159265358979323846, 1.0}, 101));
        REQUIRE(c1.value == Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("Box invariants") {
    REQUIRE_THROWS_AS(Box({0.0}, {0.0}, 11), DomainError);
    REQUIRE_THROWS_AS(Box({0.0}, {1.0}, 1), DomainError);
    REQUIRE_THROWS_AS(Box({0.0, 1.0}, {1.0}, 4), DimensionError);
    const Box b({-1, 0}, {1, 4}, 5);
    REQUIRE(b.grid_size() == 25);
    REQUIRE(b.contains({0.0, 2.0}));
    REQUIRE_FALSE(b.contains({0.0, 4.5}));
}

TEST_CASE("Profile pieces and verification") {
    SECTION("builder produces a C1 profile") {
        ProfileBuilder builder;
        builder.constant(-1.0, 0.0, 0.5);
        builder.hermite(0.0, 1.0, 0.5, 2.0, 0.0, 0.0);
        builder.constant(1.0, 2.0, 2.0);
        const Profile prof = builder.finish(0.5, 2.0, 2.0);
        REQUIRE_NOTHROW(prof.verify_c1(1e-10));
        REQUIRE_NOTHROW(prof.verify_bound());
        REQUIRE(prof(-5.0) == 0.5);
        REQUIRE(prof(5.0) == 2.0);
        REQUIRE(prof(0.5) == Approx(1.25));   // Hermite midpoint
        REQUIRE(prof.eval_deriv(1, -0.5) == 0.0);
    }
    SECTION("C1 defect detected") {
        ProfileBuilder builder;
        builder.linear(0.0, 1.0, 0.0, 1.0);
        builder.linear(1.0, 2.0, 5.0, 1.0);  // value jump at t=1
        const Profile prof = builder.finish(0.0, 6.0);
        REQUIRE_THROWS_AS(prof.verify_c1(1e-8), ProfileError);
    }
    SECTION("declared bound enforced") {
        ProfileBuilder builder;
        builder.linear(0.0, 1.0, 0.0, 10.0);
        const Profile prof = builder.finish(0.0, 10.0, 1.0);  // bound 1, max 10
        REQUIRE_THROWS_AS(prof.verify_bound(), ProfileError);
    }
    SECTION("cubic smoothstep profile") {
        const Profile s = cubic_smoothstep_profile();
        REQUIRE(s(-1.0) == 0.0);
        REQUIRE(s(2.0) == 1.0);
        REQUIRE(s(0.5) == Approx(0.5));
        REQUIRE(s.eval_deriv(1, 0.5) == Approx(1.5));
        REQUIRE_NOTHROW(s.verify_c1(1e-12));
    }
}

TEST_CASE("bump primitive matches the mollifier") {
    const auto b = bump(FieldExpr::coordinate(1, 0));
    REQUIRE(b({0.0}) == Approx(std::exp(-1.0)).margin(1e-16));
    REQUIRE(b({0.5}) == Approx(std::exp(-1.0 / 0.75)).margin(1e-16));
    REQUIRE(b({1.0}) == 0.0);
    REQUIRE(b({-2.0}) == 0.0);
    // smooth across the support boundary: derivatives vanish there
    const auto b2 = b.derivative(0).derivative(0);
    REQUIRE(b2({1.0}) == 0.0);
    REQUIRE(b2({0.99999}) == Approx(0.0).margin(1e-10));
    // finite-difference cross-check of the second derivative
    const double h = 1e-4;
    const double fd = (b({0.5 + h}) - 2.0 * b({0.5}) + b({0.5 - h})) / (h * h);
    REQUIRE(b2({0.5}) == Approx(fd).epsilon(1e-5));
}

TEST_CASE("mollified window plateau") {
    const auto w = mollified_window(FieldExpr::coordinate(1, 0), 0.25, 1.0 / 3.0);
    REQUIRE(w({0.0}) == Approx(1.0).margin(1e-15));
    REQUIRE(w({0.25}) == Approx(1.0).margin(1e-15));
    REQUIRE(w({-0.2}) == Approx(1.0).margin(1e-15));
    REQUIRE(w({1.0 / 3.0}) == Approx(0.0).margin(1e-15));
    REQUIRE(w({0.5}) == 0.0);
    REQUIRE(w({0.3}) > 0.0);
    REQUIRE(w({0.3}) < 1.0);
}
