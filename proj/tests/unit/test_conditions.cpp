#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spectra_cert/conditions.hpp"

using namespace spectra_cert;

namespace {
constexpr double kPi = std::numbers::pi;

// Centered-difference oracle for d/dr (r Re V).
double d_r_rReV_fd(const Potential& V, double r) {
    const double h = 1e-5 * r;
    return ((r + h) * V.radial_profile(r + h).real() - (r - h) * V.radial_profile(r - h).real()) / (2 * h);
}
}  // namespace

TEST_CASE("Hardy constant") {
    CHECK(hardy_constant(3) == 0.25);
    CHECK(hardy_constant(4) == 1.0);
    CHECK(hardy_constant(6) == 4.0);
    CHECK_THROWS_AS(hardy_constant(2), PreconditionError);
}

TEST_CASE("pointwise subordination constant") {
    CHECK(subordination_a_pointwise(catalog("hardy", {{"a", 0.5}}, 3)).value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(subordination_a_pointwise(catalog("coulomb_repulsive", {{"c", 1.0}}, 3)).divergent);
    // max of 4 r^2 exp(-r^2) is 4/e at r = 1
    CHECK(subordination_a_pointwise(catalog("gaussian", {{"V0", 1.0}}, 3)).value ==
          doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-10));
    CHECK(subordination_a_pointwise(catalog("zero", {}, 3)).value == 0.0);
    // square well: sup at the edge, V0 R0^2 / (1/4)
    CHECK(subordination_a_pointwise(catalog("square_well", {{"V0", 2.0}, {"R0", 1.5}}, 3)).value ==
          doctest::Approx(4 * 2.0 * 2.25).epsilon(1e-10));
}

TEST_CASE("variational subordination constant") {
    CHECK(subordination_a_variational(catalog("zero", {}, 3), RadialGrid::graded(50, 10.0)) == 0.0);
    const auto H = catalog("hardy", {{"a", 0.5}}, 3);
    const int ns[] = {200, 400, 800};
    const auto ex = subordination_a_extrapolated(H, ns, 40.0, 0);
    CHECK(std::abs(ex.extrapolated - 0.5) <= 0.05 * 0.5);
    for (double v : ex.values) CHECK(v < 0.5);

    const auto G = catalog("gaussian", {{"V0", 0.2}}, 3);
    const double var = subordination_a_variational(G, RadialGrid::graded(200, 8.0), 8);
    CHECK(var <= subordination_a_pointwise(G).value);
    CHECK(var <= rollnik_norm(G).value / (4 * kPi));
    CHECK_THROWS_AS(subordination_a_variational(catalog("gaussian", {{"V0", 0.2}}, 4), RadialGrid::graded(20, 8.0)),
                    UnsupportedError);
}

TEST_CASE("Rollnik norm") {
    CHECK(rollnik_norm(catalog("hardy", {{"a", 0.3}}, 3)).divergent);
    CHECK(rollnik_norm(catalog("zero", {}, 3)).value == 0.0);
    // ||exp(-r^2)||_R^2 = pi^3
    for (double V0 : {1.0, 2.5}) {
        const auto G = catalog("gaussian", {{"V0", V0}}, 3);
        CHECK(rollnik_norm(G).value == doctest::Approx(V0 * std::pow(kPi, 1.5)).epsilon(1e-8));
    }
    CHECK(std::isfinite(rollnik_norm(catalog("yukawa", {{"g", 1.0}, {"mu", 1.0}}, 3)).value));
    CHECK(std::isfinite(rollnik_norm(catalog("square_well", {{"V0", 1.0}, {"R0", 1.0}}, 3)).value));
    CHECK_THROWS_AS(rollnik_norm(catalog("gaussian", {{"V0", 1.0}}, 4)), UnsupportedError);
}

TEST_CASE("Frank L^(3/2) condition and Sobolev chain") {
    CHECK(frank_threshold() == doctest::Approx(0.13162).epsilon(1e-4));
    CHECK(sobolev_chain_factor() == doctest::Approx(0.18255).epsilon(1e-4));
    const auto h = frank_l32(catalog("hardy", {{"a", 0.5}}, 3));
    CHECK(h.divergent);
    CHECK(!h.passes);
    const auto z = frank_l32(catalog("zero", {}, 3));
    CHECK(z.value == 0.0);
    CHECK(z.passes);
    for (double V0 : {0.05, 1.0}) {
        const auto g = frank_l32(catalog("gaussian", {{"V0", V0}}, 3));
        const double expect = std::pow(V0, 1.5) * std::pow(2 * kPi / 3, 1.5);
        CHECK(g.value == doctest::Approx(expect).epsilon(1e-10));
        CHECK(g.passes == (expect < frank_threshold()));
    }
    CHECK(sobolev_chain_a(catalog("zero", {}, 3)).value == 0.0);
    // a gaussian sitting exactly at the Frank threshold
    const double V0 = frank_threshold() / std::pow(2 * kPi / 3, 1.5);
    const auto at = catalog("gaussian", {{"V0", std::pow(V0, 2.0 / 3.0)}}, 3);
    CHECK(sobolev_chain_a(at).value ==
          doctest::Approx(std::pow(frank_threshold(), 2.0 / 3.0) * sobolev_chain_factor()).epsilon(1e-9));

    const auto G = catalog("gaussian", {{"V0", 1.0}}, 3);
    CHECK(sobolev_chain_a(G).value >= subordination_a_variational(G, RadialGrid::graded(200, 8.0), 4));
}

TEST_CASE("Lambda constant") {
    CHECK(lambda_constant(catalog("imaginary_hardy", {{"beta", 0.1}}, 3)).value == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(lambda_constant(catalog("zero", {}, 3)).value == 0.0);
    CHECK(lambda_constant(catalog("hardy", {{"a", 0.6}}, 3)).value == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(lambda_constant(catalog("coulomb_repulsive", {{"c", 1.0}}, 3)).divergent);
}

TEST_CASE("pointwise a equals 2 Lambda / (d - 2)") {
    for (int d : {3, 4, 5, 7})
        for (const char* name : {"hardy", "gaussian", "imaginary_hardy"}) {
            ParamMap p = std::string(name) == "hardy"      ? ParamMap{{"a", 0.7}}
                         : std::string(name) == "gaussian" ? ParamMap{{"V0", 1.3}, {"c_im", 0.2}}
                                                           : ParamMap{{"beta", 0.4}};
            const auto V = catalog(name, p, d);
            CHECK(subordination_a_pointwise(V).value == lambda_constant(V).value * 2.0 / (d - 2));
        }
}

TEST_CASE("threshold table") {
    const auto t = thresholds(3);
    CHECK(t.thm12_b_max == 1.0 / 7.0);
    CHECK(std::abs(t.lambda_star - 0.1525) <= 0.0005);
    CHECK(std::abs(6 * t.lambda_star + std::sqrt(2.0) * std::pow(t.lambda_star, 1.5) - 1.0) <= 1e-10);
    CHECK(std::abs(t.sqrt_b3_max - 0.55209) <= 1e-4);
    CHECK(t.sqrt_b3_max * t.sqrt_b3_max == doctest::Approx(0.30480).epsilon(1e-4));
    CHECK(t.sqrt_b3_max == doctest::Approx(8.0 / (2 * std::sqrt(2.0) + std::sqrt(136.0))));
    for (int d = 3; d <= 10; ++d) {
        const auto td = thresholds(d);
        CHECK(td.lambda_star < (d - 2) / 4.0);
        CHECK(std::abs(lambda_condition_lhs(d, td.lambda_star) - 1.0) <= 1e-10);
    }
    CHECK_THROWS_AS(thresholds(2), PreconditionError);
}

TEST_CASE("b constants") {
    const auto c = b_constants(catalog("coulomb_repulsive", {{"c", 1.0}}, 3));
    CHECK(c.b1.value == 0.0);
    CHECK(c.b2.value == 0.0);
    CHECK(c.b3.value == 0.0);
    CHECK(!c.b1.divergent);

    const auto ih = b_constants(catalog("imaginary_hardy", {{"beta", 0.15}}, 3));
    CHECK(ih.b1.value == 0.0);
    CHECK(ih.b2.value == 0.0);
    CHECK(ih.b3.value == doctest::Approx(0.3).epsilon(1e-14));

    const double a = 0.6;
    const auto H = catalog("hardy", {{"a", a}}, 3);
    for (double r : {0.3, 1.0, 5.0}) CHECK(H.d_r_rReV(r) == doctest::Approx(d_r_rReV_fd(H, r)).epsilon(1e-8));
    const auto h = b_constants(H);
    CHECK(h.b1.value * h.b1.value == doctest::Approx(a).epsilon(1e-12));
    CHECK(h.b2.value * h.b2.value == doctest::Approx(a).epsilon(1e-12));
    CHECK(h.b3.value == 0.0);

    CHECK(b_constants(catalog("square_well", {{"V0", 1.0}, {"R0", 1.0}}, 3)).b2.divergent);
}

TEST_CASE("variational b constants do not exceed the pointwise certificates") {
    const auto V = catalog("gaussian", {{"V0", 0.5}, {"c_im", 0.3}}, 3);
    const auto pw = b_constants(V);
    const auto var = b_constants_variational(V, RadialGrid::graded(200, 8.0), 4);
    CHECK(var.b1 <= pw.b1.value);
    CHECK(var.b2 <= pw.b2.value);
    CHECK(var.b3 <= pw.b3.value);
    CHECK(var.b1 > 0.0);
}

TEST_CASE("scaling laws") {
    const double t = 2.5;
    for (const char* name : {"gaussian", "yukawa", "imaginary_hardy", "hardy"}) {
        ParamMap p = std::string(name) == "gaussian"   ? ParamMap{{"V0", 1.0}, {"c_im", 0.5}}
                     : std::string(name) == "yukawa"   ? ParamMap{{"g", 1.0}, {"mu", 2.0}}
                     : std::string(name) == "hardy"    ? ParamMap{{"a", 0.4}}
                                                       : ParamMap{{"beta", 0.2}};
        const auto V = catalog(name, p, 3);
        const auto W = V.scaled(t);
        CAPTURE(name);
        CHECK(subordination_a_pointwise(W).value == doctest::Approx(t * subordination_a_pointwise(V).value));
        CHECK(lambda_constant(W).value == doctest::Approx(t * lambda_constant(V).value));
        const auto bv = b_constants(V), bw = b_constants(W);
        CHECK(bw.b3.value == doctest::Approx(t * bv.b3.value));
        CHECK(bw.b1.value * bw.b1.value == doctest::Approx(t * bv.b1.value * bv.b1.value));
        CHECK(bw.b2.value * bw.b2.value == doctest::Approx(t * bv.b2.value * bv.b2.value));
        const auto rv = rollnik_norm(V), rw = rollnik_norm(W);
        CHECK(rv.divergent == rw.divergent);
        if (!rv.divergent) CHECK(rw.value == doctest::Approx(t * rv.value).epsilon(1e-10));
        const auto fv = frank_l32(V), fw = frank_l32(W);
        if (!fv.divergent) CHECK(fw.value == doctest::Approx(std::pow(t, 1.5) * fv.value).epsilon(1e-10));
    }
}

TEST_CASE("theorem verdicts") {
    ConditionOptions fast;
    fast.grid_n = 100;
    fast.ell_max = 4;
    const auto h = check_conditions(catalog("hardy", {{"a", 0.5}}, 3), fast);
    CHECK(h.verdicts.at("thm11") == Verdict::pass);
    CHECK(h.a_method == AMethod::pointwise_hardy);
    REQUIRE(h.a_variational);
    CHECK(h.a >= *h.a_variational - 1e-12);

    const auto ih = check_conditions(catalog("imaginary_hardy", {{"beta", 0.1}}, 3), fast);
    CHECK(ih.b3.value == doctest::Approx(0.2));
    CHECK(ih.verdicts.at("thm13") == Verdict::pass);

    const auto c = check_conditions(catalog("coulomb_repulsive", {{"c", 7.0}}, 3), fast);
    CHECK(c.verdicts.at("thm11") == Verdict::inconclusive);
    CHECK(c.verdicts.at("thm13") == Verdict::pass);
    CHECK(c.verdicts.at("thm12") == Verdict::fail);

    const auto d5 = check_conditions(catalog("hardy", {{"a", 0.1}}, 5), fast);
    CHECK(d5.verdicts.at("thm11") == Verdict::fail);
    CHECK(!d5.rollnik.has_value());

    const auto z = check_conditions(catalog("zero", {}, 3), fast);
    for (const auto& [k, v] : z.verdicts) CHECK(v == Verdict::pass);
}
