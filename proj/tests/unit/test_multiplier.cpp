#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles/multiplier_oracles.hpp"
#include "spectra_cert/multiplier.hpp"

using namespace spectra_cert;

namespace {

std::vector<double> random_point(std::mt19937& rng, int d, double rmax) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> rad(0.1, rmax);
    std::vector<double> x(d);
    double n = 0.0;
    for (double& c : x) n += (c = g(rng)) * c;
    const double r = rad(rng) / std::sqrt(n);
    for (double& c : x) c *= r;
    return x;
}

double term(const IdentityResult& r, const std::string& name) {
    for (const auto& t : r.terms)
        if (t.name == name) return t.value.real();
    FAIL("missing term " << name);
    return 0.0;
}

std::vector<TestFunction> probes() {
    return {gaussian_bump(3, TestFamily::radial), gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5),
            gaussian_bump(3, TestFamily::ell1_harmonic, 0.5, 2.5, 0.3), gaussian_bump(4, TestFamily::radial, 0.7, 2.0, -0.4)};
}

}  // namespace

TEST_CASE("test functions: analytic derivatives match finite differences at second order") {
    std::mt19937 rng(11);
    for (const auto& u : probes()) {
        auto f = [&](const std::vector<double>& x) { return u.value(x); };
        for (int s = 0; s < 5; ++s) {
            const auto x = random_point(rng, u.d, 0.8 * u.support);
            const cplx lap = u.laplacian(x);
            const cplx e1 = oracle::fd_laplacian(f, x, 1e-2) - lap;
            const cplx e2 = oracle::fd_laplacian(f, x, 5e-3) - lap;
            CAPTURE(u.label);
            CHECK(std::abs(e1) <= 1e-3 * (1.0 + std::abs(lap)));
            if (std::abs(e1) > 1e-9) CHECK(std::abs(e1) / std::abs(e2) == doctest::Approx(4.0).epsilon(0.1));
            const auto g = u.gradient(x);
            const auto gf = oracle::fd_gradient(f, x, 1e-4);
            for (int j = 0; j < u.d; ++j) CHECK(std::abs(g[j] - gf[j]) <= 1e-6);
        }
    }
    const auto z = zero_test_function(3);
    const double x0[] = {0.3, 0.1, -0.2};
    CHECK(z.value(x0) == cplx{0.0});
    CHECK(z.laplacian(x0) == cplx{0.0});
}

TEST_CASE("gauge transform") {
    std::mt19937 rng(5);
    CHECK(gauge_sign({1.0, 0.0}) == 1.0);
    CHECK(gauge_sign({1.0, -0.3}) == -1.0);
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    CHECK_THROWS_AS(gauge_transform(u, {0.0, 1.0}, -1), PreconditionError);
    CHECK_THROWS_AS(gauge_transform(u, {-1.0, 0.0}, 1), PreconditionError);
    for (cplx lambda : {cplx{1.0, 0.0}, cplx{2.0, 0.7}, cplx{0.5, -1.5}}) {
        const auto up = gauge_transform(u, lambda, 1), um = gauge_transform(u, lambda, -1);
        for (int s = 0; s < 10; ++s) {
            const auto x = random_point(rng, 3, 2.5);
            CHECK(std::abs(up.value(x)) == doctest::Approx(std::abs(u.value(x))).epsilon(1e-14));
            CHECK(std::abs(um.value(x)) == doctest::Approx(std::abs(u.value(x))).epsilon(1e-14));
            // |grad u^-|^2 from the gauged function against the expansion
            double g2 = 0.0;
            for (cplx c : um.gradient(x)) g2 += std::norm(c);
            CHECK(gauge_gradient_expansion(u, lambda, x) == doctest::Approx(g2).epsilon(1e-12));
        }
        // moduli integrals int |u^+-|^2 / |x|^s agree at quadrature level
        std::vector<double> r, w;
        oracle::gauss_legendre(200, 0.0, u.support, r, w);
        for (int s = 0; s <= 2; ++s) {
            double a = 0.0, bp = 0.0, bm = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double x[] = {r[i], 0.0, 0.0};
                const double wt = w[i] * std::pow(r[i], 2 - s);
                a += wt * std::norm(u.value(x));
                bp += wt * std::norm(up.value(x));
                bm += wt * std::norm(um.value(x));
            }
            CHECK(bp == doctest::Approx(a).epsilon(1e-14));
            CHECK(bm == doctest::Approx(a).epsilon(1e-14));
        }
    }
}

TEST_CASE("canonical multiplier triple") {
    for (cplx lambda : {cplx{1.0, 2.0}, cplx{1.0, -2.0}, cplx{1.0, 0.0}}) {
        const auto t = canonical_triple(lambda);
        CHECK(t.canonical);
        for (double r : {0.1, 0.5, 1.0, 3.0}) {
            CHECK(t.g3.g[2](r) == 2.0);
            CHECK(t.g1.g[0](r) == 1.0);
            CHECK(t.g2.g[0](r) == gauge_sign(lambda) * t.g3.g[1](r));
            CHECK(t.g3.g[2](r) - 2.0 * t.g1.g[0](r) == 0.0);
            CHECK(t.g3.g[1](r) / r - t.g3.g[2](r) / 2.0 == t.g3.g[2](r) / 2.0);
        }
        CHECK_NOTHROW(assert_canonical(t, lambda));
        auto broken = t;
        broken.g1 = multiplier_constant(2.0);
        CHECK_THROWS_AS(assert_canonical(broken, lambda), CheckFailure);
    }
}

TEST_CASE("first identity") {
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    const auto r = identity_residual_1(u, {1.0, 1.0}, multiplier_constant(1.0));
    CHECK(r.residual <= 1e-8);
    // with G1 = 1 the left side is lambda1 ||u||^2 - ||grad u||^2
    const auto z = identity_residual_1(zero_test_function(3), {1.0, 1.0}, multiplier_constant(1.0));
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.residual == 0.0);

    IdentityOptions graded;
    graded.path = QuadraturePath::graded;
    for (const auto& v : probes()) {
        CAPTURE(v.label);
        CHECK(identity_residual_1(v, {1.0, 1.0}, multiplier_abs_x(), graded).residual <= 1e-6);
        CHECK(identity_residual_1(v, {0.3, -2.0}, multiplier_abs_x(0.7)).residual <= 1e-8);
    }
}

TEST_CASE("graded path converges at order at least two") {
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    std::vector<double> hs, res;
    for (int n : {20, 40, 80, 160}) {
        IdentityOptions o;
        o.path = QuadraturePath::graded;
        o.graded_n = n;
        hs.push_back(1.0 / n);
        res.push_back(identity_residual_1(u, {1.0, 1.0}, multiplier_abs_x(), o).residual);
    }
    CHECK(loglog_slope(hs, res) >= 1.9);
}

TEST_CASE("second identity") {
    const auto real_u = gaussian_bump(3, TestFamily::radial);
    const auto r = identity_residual_2(real_u, {1.5, 0.0}, multiplier_constant(1.0));
    CHECK(std::abs(r.lhs) <= 1e-12);
    CHECK(std::abs(r.rhs) <= 1e-12);
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    const auto l2 = identity_residual_2(u, {1.0, 1.0}, multiplier_constant(1.0));
    CHECK(l2.residual <= 1e-8);
    CHECK(term(l2, "-Im int gradG2.conj(u)grad u") == 0.0);
    const auto w = gaussian_bump(3, TestFamily::ell1_harmonic, 0.5, 2.5, 0.3);
    CHECK(identity_residual_2(w, {1.0, 1.0}, multiplier_abs_x()).residual <= 1e-6);
    const auto z = identity_residual_2(zero_test_function(3), {1.0, 1.0}, multiplier_abs_x());
    CHECK(z.residual == 0.0);
}

TEST_CASE("third identity") {
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    const cplx lambda{1.0, 1.0};
    const auto r = identity_residual_3(u, lambda, multiplier_abs_x_squared());
    CHECK(r.residual <= 1e-8);
    // Hessian 2I: the first term is twice the gradient energy
    const auto r1 = identity_residual_1(u, lambda, multiplier_constant(1.0));
    CHECK(term(r, "int grad u.HessG3.grad conj(u)") ==
          doctest::Approx(-2.0 * term(r1, "-int G1|grad u|^2")).epsilon(1e-12));
    CHECK(std::abs(term(r, "-0.25*int BilapG3|u|^2")) <= 1e-14);
    for (const auto& v : probes()) {
        CAPTURE(v.label);
        CHECK(identity_residual_3(v, {0.8, -1.3}, multiplier_damped_quadratic()).residual <= 1e-6);
    }
    CHECK(identity_residual_3(zero_test_function(3), lambda, multiplier_damped_quadratic()).residual == 0.0);
    CHECK_THROWS_AS(identity_residual_3(u, lambda, multiplier_abs_x()), PreconditionError);
}

TEST_CASE("canonical combination") {
    for (const auto& v : probes())
        for (cplx lambda : {cplx{1.0, 2.0}, cplx{1.0, -0.5}, cplx{2.0, 0.0}}) {
            CAPTURE(v.label);
            CHECK(canonical_combined_residual(v, lambda).residual <= 1e-8);
        }
}

TEST_CASE("key identity") {
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    CHECK_THROWS_AS(key_identity_residual(u, {0.0, 1.0}), PreconditionError);
    const auto r0 = key_identity_residual(u, {1.0, 0.0});
    CHECK(r0.residual <= 1e-7);
    CHECK(term(r0, "I3") == 0.0);
    CHECK(key_identity_residual(u, {1.0, 1.0}).residual <= 1e-6);
    CHECK(key_identity_residual(zero_test_function(3), {1.0, 1.0}).residual == 0.0);
    for (const auto& v : probes())
        for (cplx lambda : {cplx{1.0, 0.5}, cplx{2.0, -0.7}, cplx{0.5, 3.0}}) {
            CAPTURE(v.label);
            CHECK(key_identity_residual(v, lambda).residual <= 1e-7);
        }
    // with lambda2 < 0 the cutoff term needs |lambda2|; the signed version breaks the identity
    const auto rn = key_identity_residual(u, {1.0, -1.0});
    CHECK(rn.residual <= 1e-7);
    const double signed_rhs = term(rn, "I1") + term(rn, "I2") - term(rn, "I3");
    CHECK(std::abs(rn.lhs - signed_rhs) > 1e-3 * std::abs(rn.lhs));
}

TEST_CASE("identity sweep") {
    std::vector<IdentityCase> cases;
    for (const auto& v : probes())
        for (cplx lambda : {cplx{1.0, 1.0}, cplx{0.5, -2.0}, cplx{-1.0, 0.5}})
            for (const auto& G : {multiplier_constant(1.0), multiplier_abs_x(), multiplier_damped_quadratic()})
                cases.push_back({v, lambda, G});
    const auto out = identity_sweep(cases);
    REQUIRE(out.size() >= 3 * cases.size());
    for (const auto& r : out) {
        CAPTURE(r.id);
        CAPTURE(r.context);
        CHECK(r.residual <= 1e-6);
    }
    const auto again = identity_sweep(cases);
    REQUIRE(again.size() == out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(again[i].id == out[i].id);
        CHECK(again[i].lhs == out[i].lhs);
    }
}

TEST_CASE("Hardy and weighted Hardy ratios") {
    for (const auto& v : probes()) {
        const auto h = hardy_check(v);
        CAPTURE(v.label);
        CHECK(h.hardy < h.hardy_bound);
        CHECK(h.weighted < h.weighted_bound);
        CHECK(h.hardy_bound == doctest::Approx(4.0 / ((v.d - 2.0) * (v.d - 2.0))));
        CHECK(h.weighted_bound == doctest::Approx(4.0 / ((v.d - 1.0) * (v.d - 1.0))));
    }
    for (int d : {3, 4, 5}) {
        const auto h = hardy_check(hardy_near_extremal(d, 0.05));
        const double k = 0.5 * (d - 2);
        CAPTURE(d);
        CHECK(h.hardy == doctest::Approx(oracle::two_sided_power_ratio(k, 0.05)).epsilon(1e-6));
        CHECK(h.hardy >= 0.9 * h.hardy_bound);
        CHECK(h.hardy <= h.hardy_bound);
        CHECK(h.weighted_divergent);
        const auto hw = hardy_check(hardy_near_extremal(d, 0.05, true));
        const double kw = 0.5 * (d - 1);
        CHECK(hw.weighted == doctest::Approx(oracle::two_sided_power_ratio(kw, 0.05)).epsilon(1e-6));
        CHECK(hw.weighted >= 0.9 * hw.weighted_bound);
        CHECK(hw.weighted <= hw.weighted_bound);
    }
    // ratio approaches the sharp constant as eps decreases
    const double a = hardy_check(hardy_near_extremal(3, 0.2)).hardy;
    const double b = hardy_check(hardy_near_extremal(3, 0.05)).hardy;
    CHECK(a < b);
}

TEST_CASE("case split estimates") {
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    const auto w = gaussian_bump(3, TestFamily::ell1_harmonic, 0.5, 2.5, 0.3);
    CHECK_THROWS_AS(case_split_bound(u, {1.0, 0.5}, catalog("zero", {}, 3)), PreconditionError);

    const auto z = case_split_bound(u, {0.5, 2.0}, catalog("zero", {}, 3));
    CHECK(z.verdict == Verdict::pass);
    CHECK(z.vacuous);

    for (double beta : {0.01, 0.03, 0.05})
        for (const auto* p : {&u, &w})
            for (cplx lambda : {cplx{0.5, 2.0}, cplx{0.5, -2.0}, cplx{0.1, 1.0}}) {
                const auto r = case_split_bound(*p, lambda, catalog("imaginary_hardy", {{"beta", beta}}, 3));
                CAPTURE(beta);
                CAPTURE(p->label);
                CHECK(r.Lambda == doctest::Approx(2.0 * beta));
                CHECK(r.verdict == Verdict::pass);
                for (const auto& c : r.chain) {
                    CAPTURE(c.name);
                    CHECK(c.holds);
                }
                for (const auto& id : r.identities) CHECK(id.residual <= 1e-8);
            }

    const auto big = case_split_bound(u, {0.5, 2.0}, catalog("imaginary_hardy", {{"beta", 0.2}}, 3));
    CHECK(big.verdict == Verdict::inconclusive);
    CHECK(big.coefficient <= 0.0);
}

TEST_CASE("term table of the key identity with a potential") {
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    CHECK_THROWS_AS(radi_identity_terms(u, {1.0, 2.0}, catalog("zero", {}, 3)), PreconditionError);
    CHECK_THROWS_AS(radi_identity_terms(u, {-1.0, 0.0}, catalog("zero", {}, 3)), PreconditionError);

    const auto c = radi_identity_terms(u, {1.0, 0.5}, catalog("coulomb_repulsive", {{"c", 1.0}}, 3));
    CHECK(term(c.identity, "I1") == 0.0);
    CHECK(term(c.identity, "I2") == 0.0);
    CHECK(c.identity.residual <= 1e-6);

    const auto g = radi_identity_terms(u, {1.0, -0.5}, catalog("gaussian", {{"V0", 0.3}, {"c_im", 0.0}}, 3));
    CHECK(term(g.identity, "I2") == 0.0);
    CHECK(g.identity.residual <= 1e-6);

    for (const auto* V : {"imaginary_hardy"})
        for (cplx lambda : {cplx{1.0, 0.5}, cplx{1.0, -0.5}, cplx{1.0, 0.0}}) {
            const auto r = radi_identity_terms(u, lambda, catalog(V, {{"beta", 0.05}}, 3));
            CHECK(r.identity.residual <= 1e-6);
            CHECK(term(r.identity, "I1") == 0.0);
            CHECK(r.verdict == Verdict::pass);
            CHECK(!r.chain.empty());
            for (const auto& k : r.chain) {
                CAPTURE(k.name);
                CHECK(k.holds);
            }
        }

    const auto h = radi_identity_terms(u, {1.0, 0.3}, catalog("hardy", {{"a", 0.3}}, 3));
    CHECK(h.identity.residual <= 1e-6);
    CHECK(h.verdict == Verdict::pass);
}

TEST_CASE("magnetic smoke") {
    const auto u = gaussian_bump(3, TestFamily::radial, 1.0, 3.0, 0.5);
    const auto w = gaussian_bump(3, TestFamily::ell1_harmonic, 0.5, 2.5, 0.3);
    const auto Vg = catalog("gaussian", {{"V0", 1.0}, {"c_im", 0.5}}, 3);

    const auto az = magnetic_identity_smoke(w, {1.0, 0.5}, Vg, MagneticPotential::azimuthal_inverse_square(1.0));
    CHECK(az.max_b_tau <= 1e-12);
    CHECK(az.gauge_max <= 1e-12);
    CHECK(az.identity.residual <= 1e-6);

    const auto uni = magnetic_identity_smoke(w, {1.0, 0.5}, Vg, MagneticPotential::uniform(2.0));
    CHECK(uni.max_b_tau > 0.1);
    CHECK(uni.tangential_max <= 1e-12 * uni.max_b_tau);
    CHECK(uni.gauge_max <= 1e-12 * (1.0 + uni.max_b_tau));
    CHECK(uni.identity.residual <= 1e-6);

    // A = 0 reduces to the first identity with G1 = 1
    const auto zero = magnetic_identity_smoke(u, {1.0, 0.5}, catalog("zero", {}, 3), MagneticPotential::zero(3));
    const auto id1 = identity_residual_1(u, {1.0, 0.5}, multiplier_constant(1.0));
    CHECK(zero.identity.lhs == doctest::Approx(id1.lhs).epsilon(1e-10));
    CHECK(zero.identity.rhs == doctest::Approx(id1.rhs).epsilon(1e-10));
    CHECK(zero.max_b_tau == 0.0);

    CHECK_THROWS_AS(magnetic_identity_smoke(gaussian_bump(4, TestFamily::radial), {1.0, 0.5}, catalog("zero", {}, 4),
                                            MagneticPotential::zero(4)),
                    PreconditionError);
}

TEST_CASE("box quadrature agrees with the radial path") {
    const auto w = gaussian_bump(3, TestFamily::ell1_harmonic, 0.5, 2.5, 0.3);
    for (const auto& G : {multiplier_constant(1.0), multiplier_abs_x()}) {
        const auto b = box_cross_check(w, {1.0, 1.0}, G, 40);
        const auto r = radial_cross_check(w, {1.0, 1.0}, G);
        REQUIRE(b.size() == r.size());
        for (std::size_t k = 0; k < b.size(); ++k) {
            CAPTURE(G.name);
            CAPTURE(k);
            CHECK(std::abs(b[k] - r[k]) <= 1e-4 * std::abs(r[k]));
        }
    }
}
