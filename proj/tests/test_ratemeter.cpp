#include <catch_amalgamated.hpp>

#include <cmath>

#include "pblab/parser.hpp"
#include "pblab/ratemeter.hpp"
#include "pblab/scenarios.hpp"

using namespace pblab;
using Catch::Approx;

namespace {
const PairingConvention kPlane = PairingConvention::standard(2);
}

TEST_CASE("theoretical_band") {
    SECTION("cubic model: C = 4^{1/3}") {
        const auto scen = find_scenario("cubic_model");
        const auto band = theoretical_band(scen.f, scen.g, {scen.x}, kPlane);
        REQUIRE(band.rate_constant == Approx(std::cbrt(4.0)).margin(1e-12));
        REQUIRE(band.lower == Approx(0.5291).epsilon(1e-3));
        REQUIRE(band.upper == Approx(9.524).epsilon(1e-3));
        REQUIRE_FALSE(band.higher_multiplicity);
    }
    SECTION("quadratic model: C = 2, band (2/3, 12)") {
        const auto scen = find_scenario("quadratic_model");
        const auto band = theoretical_band(scen.f, scen.g, {scen.x}, kPlane);
        REQUIRE(band.rate_constant == Approx(2.0).margin(1e-12));
        REQUIRE(band.lower == Approx(2.0 / 3.0));
        REQUIRE(band.upper == Approx(12.0));
    }
    SECTION("Phi = 0 flags higher multiplicity with a collapsed band") {
        const auto scen = find_scenario("quartic_model");
        const auto band = theoretical_band(scen.f, scen.g, {scen.x}, kPlane);
        REQUIRE(band.higher_multiplicity);
        REQUIRE(band.lower == Approx(0.0).margin(1e-12));
        REQUIRE(band.upper == Approx(0.0).margin(1e-12));
    }
    SECTION("degenerate critical point with Phi != 0 is rejected") {
        // h = 1 - x^2 is flat in y: singular Hessian, Phi(0) = 2.
        const auto f = parse_field("x - x^3/3", 2);
        const auto g = parse_field("y", 2);
        REQUIRE(phi_invariant(f, g, kPlane)({0.0, 0.0}) == Approx(2.0).margin(1e-12));
        REQUIRE_THROWS_AS(theoretical_band(f, g, {{0.0, 0.0}}, kPlane), RateError);
    }
    SECTION("no extremizers") {
        const auto scen = find_scenario("cubic_model");
        REQUIRE_THROWS_AS(theoretical_band(scen.f, scen.g, {}, kPlane), RateError);
    }
}

TEST_CASE("upsilon_upper_curve") {
    const auto scen = find_scenario("cubic_model");
    SECTION("empty eps list is a precondition error") {
        REQUIRE_THROWS_AS(upsilon_upper_curve(scen, {}), RateError);
    }
    SECTION("short sweep: slope 2/3, ratios inside the band") {
        const RateTable table =
            upsilon_upper_curve(scen, {1e-3, 3e-4, 1e-4, 3e-5}, 5e-3);
        REQUIRE(table.rows.size() == 4);
        REQUIRE(table.slope == Approx(2.0 / 3.0).margin(0.02));
        for (const auto& row : table.rows) {
            REQUIRE(row.ratio >= table.band_lo);
            REQUIRE(row.ratio <= table.band_hi * 1.1);
            REQUIRE(row.used_in_fit);
        }
        REQUIRE(table.band_lo == Approx(std::cbrt(4.0) / 3.0));
        REQUIRE_NOTHROW(table.validate());
    }
    SECTION("fit requires at least 4 points") {
        RateTable table;
        table.rows = {{1e-3, 1e-2, 0.0, true, 0, 0.0},
                      {1e-4, 2e-3, 0.0, true, 0, 0.0}};
        REQUIRE_THROWS_AS(table.validate(), RateError);
    }
}

TEST_CASE("higher_bound") {
    SECTION("l = 1 on the cubic model: 9 * 2^{1/3}") {
        const auto scen = find_scenario("cubic_model");
        const double hb = higher_bound(1, scen.f, scen.g, scen.x, kPlane);
        REQUIRE(hb == Approx(9.0 * std::cbrt(2.0)).margin(1e-9));
        REQUIRE(hb == Approx(11.34).epsilon(1e-3));
        // within a factor of 3 of the band top 6 C = 9.524
        REQUIRE(hb / 9.524 < 3.0);
        REQUIRE(9.524 / hb < 3.0);
    }
    SECTION("D(h)(x) = 0 gives bound 0") {
        // quartic model: D(h)(0) = 0 because h is flat to order 3
        const auto scen = find_scenario("quartic_model");
        const double hb = higher_bound(1, scen.f, scen.g, scen.x, kPlane);
        REQUIRE(hb == Approx(0.0).margin(1e-12));
    }
    SECTION("l = 2 on the quartic model is positive") {
        const auto scen = find_scenario("quartic_model");
        const auto h = poisson(scen.f, scen.g, kPlane);
        const double d2 = d_power(2, h, scen.f, scen.g, kPlane)(scen.x);
        REQUIRE(d2 < 0.0);  // negativity makes the bound positive
        const double hb = higher_bound(2, scen.f, scen.g, scen.x, kPlane);
        REQUIRE(hb == Approx(-9.0 * signed_odd_root(d2 / 24.0, 5)).margin(1e-12));
        REQUIRE(hb > 0.0);
    }
    SECTION("multiplicity gate") {
        const auto scen = find_scenario("cubic_model");
        REQUIRE_THROWS_AS(higher_bound(2, scen.f, scen.g, scen.x, kPlane), RateError);
    }
    SECTION("positive D^l at a flat minimum yields a negative bound (warning case)") {
        // h = {f,g} = -(1 - x^2 - y^2) has a *minimum* at 0; D(h)(0) > 0.
        const auto f = parse_field("-x + x^3/3 + x*y^2", 2);
        const auto g = parse_field("y", 2);
        const auto h = poisson(f, g, kPlane);
        REQUIRE(d_operator(h, f, g, kPlane)({0.0, 0.0}) > 0.0);
        const double hb = higher_bound(1, f, g, {0.0, 0.0}, kPlane);
        REQUIRE(hb < 0.0);
    }
}

TEST_CASE("truncated_jet_bound") {
    const auto scen = find_scenario("cubic_model");
    const Box box = scen.box.with_resolution(41);
    SECTION("eps = 0 returns the bracket sup-norm") {
        const auto h = poisson(scen.f, scen.g, kPlane);
        const JetBound jet = truncated_jet_bound(1, 0.0, scen.f, scen.g, kPlane, box);
        REQUIRE(jet.value == Approx(sup_norm(h, box).value).margin(1e-12));
    }
    SECTION("cubic model, L = 1, eps = 1e-4") {
        const auto h = poisson(scen.f, scen.g, kPlane);
        const double h_norm = sup_norm(h, box).value;
        const JetBound jet = truncated_jet_bound(1, 1e-4, scen.f, scen.g, kPlane, box);
        REQUIRE(jet.value <= h_norm + 1e-12);
        REQUIRE(jet.value >= h_norm - 9.0 * std::cbrt(2.0) * std::pow(1e-4, 2.0 / 3.0));
    }
    SECTION("constants give 0") {
        const JetBound jet =
            truncated_jet_bound(1, 1e-3, FieldExpr::constant(2, 1.0),
                                FieldExpr::constant(2, 2.0), kPlane, box);
        REQUIRE(jet.value == 0.0);
    }
    SECTION("clamped points are counted") {
        // h = -(1 - x^2 - y^2): D(h) > 0 near the origin, so the root
        // argument is positive there and the term is clamped.
        const auto f = parse_field("-x + x^3/3 + x*y^2", 2);
        const auto g = parse_field("y", 2);
        const JetBound jet = truncated_jet_bound(1, 1e-3, f, g, kPlane, box);
        REQUIRE(jet.clamped_points > 0);
    }
}

TEST_CASE("first_order_bound") {
    const auto f = parse_field("x - x^3/3 - x*y^2", 2);
    const VectorFieldExpr v{{FieldExpr::constant(2, 1.0), FieldExpr::constant(2, 0.0)}};
    SECTION("cubic model: 1 - 9^{1/3} eps^{2/3}") {
        for (double eps : {1e-3, 1e-4}) {
            const double bound = first_order_bound(v, f, {0.0, 0.0}, eps);
            REQUIRE(bound ==
                    Approx(1.0 - std::cbrt(9.0) * std::pow(eps, 2.0 / 3.0)).margin(1e-12));
        }
    }
    SECTION("eps = 0 returns lambda(f)(x)") {
        REQUIRE(first_order_bound(v, f, {0.0, 0.0}, 0.0) == Approx(1.0).margin(1e-15));
    }
    SECTION("degenerate maximum is rejected") {
        const auto quartic = find_scenario("quartic_model");
        REQUIRE_THROWS_AS(first_order_bound(v, quartic.f, quartic.x, 1e-3), RateError);
    }
}

TEST_CASE("unicontinuity_criterion") {
    const Box box({-1.0, -1.0}, {1.0, 1.0}, 81);
    const auto f = parse_field("x", 2);
    const auto g = parse_field("y", 2);
    SECTION("identical sequences give the zero product") {
        const auto rep = unicontinuity_criterion(
            f, g, [&](int) { return f; }, [&](int) { return g; }, {1, 2, 4}, box);
        for (const auto& row : rep.rows) REQUIRE(row.product == Approx(0.0).margin(1e-15));
    }
    SECTION("f_n = f + 1/n^2 with bounded g decays like 1/n^2") {
        const auto rep = unicontinuity_criterion(
            f, g, [&](int n) { return f + 1.0 / double(n * n); },
            [&](int) { return g; }, {1, 2, 4, 8}, box);
        REQUIRE(rep.trend == "decreasing");
        for (const auto& row : rep.rows)
            REQUIRE(row.product == Approx(1.0 / double(row.n * row.n)).epsilon(1e-6));
    }
    SECTION("polterovich: the product approaches |chi|^2 = 1") {
        const auto scen = find_scenario("polterovich");
        const Box fine = scen.box.with_resolution(513);
        const auto rep = unicontinuity_criterion(scen.f, scen.g, scen.f_seq, scen.g_seq,
                                                 {4, 16}, fine);
        REQUIRE(rep.rows.back().product == Approx(1.0).epsilon(0.05));
    }
    SECTION("missing sequences are rejected") {
        REQUIRE_THROWS_AS(
            unicontinuity_criterion(f, g, nullptr, nullptr, {1}, box), RateError);
    }
}

TEST_CASE("rate constants are internally consistent on the cubic model") {
    const auto scen = find_scenario("cubic_model");
    // 144^{1/3} (max P)^{1/3} <= 6 Phi^{1/3}: max P = 2 and Phi = 4.
    double max_p = 0.0;
    for (int i = 0; i < 720; ++i) {
        const double theta = 2.0 * 3.14159265358979323846 * i / 720;
        max_p = std::max(max_p, p_theta(scen.f, scen.g, scen.x, theta, 1, kPlane));
    }
    const double phi0 = phi_invariant(scen.f, scen.g, kPlane)(scen.x);
    REQUIRE(std::cbrt(144.0) * std::cbrt(max_p) <=
            6.0 * std::cbrt(phi0) + 1e-9);
}
