#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles/bs_oracles.hpp"
#include "spectra_cert/bs.hpp"
#include "spectra_cert/conditions.hpp"

using namespace spectra_cert;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("green function examples") {
    CHECK(green_function(-1.0, 1.0).real() == doctest::Approx(std::exp(-1.0) / (4 * kPi)));
    CHECK(green_function(-1.0, 1.0).real() == doctest::Approx(0.029270).epsilon(1e-4));
    CHECK(green_function(0.0, 2.0).real() == doctest::Approx(1.0 / (8 * kPi)));
    for (double eps : {1e-3, 1e-6, 1e-9}) {
        const double s = 1.7;
        CHECK(std::abs(green_function(cplx(1.0, eps), s)) == doctest::Approx(1.0 / (4 * kPi * s)).epsilon(10 * eps));
    }
    CHECK(green_params(cplx(1.0, 1e-12)).kappa.real() >= 0.0);
    CHECK_THROWS_AS(green_function(-1.0, 0.0), PreconditionError);
}

TEST_CASE("pointwise bound") {
    const double s1[] = {0.1, 1.0, 10.0};
    CHECK(pointwise_bound_check(-5.0, s1));
    CHECK(pointwise_bound_check(cplx(3, 4), s1));
    for (double s : s1) {
        CHECK(std::abs(green_function(cplx(3, 4), s)) < green_function(0.0, s).real());
        CHECK(std::abs(green_function(0.0, s)) == green_function(0.0, s).real());
    }
    CHECK(pointwise_bound_check(0.0, s1));
    CHECK_THROWS_AS(pointwise_bound_check(2.0, s1), PreconditionError);

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-50.0, 50.0), us(1e-6, 100.0);
    for (int t = 0; t < 1000; ++t) {
        cplx z(u(rng), t % 5 == 0 ? 0.0 : u(rng));
        if (z.imag() == 0.0 && z.real() > 0.0) z = -z;
        const double s[] = {us(rng)};
        CHECK(green_params(z).kappa.real() >= 0.0);
        CHECK(pointwise_bound_check(z, s));
    }
}

TEST_CASE("partial-wave kernels match the angular projection") {
    const cplx zs[] = {0.0, -1.0, -10.0, cplx(0, 1), cplx(0, -1), cplx(-1, 1), cplx(3, 4)};
    const double pairs[][2] = {{0.3, 0.35}, {1.0, 2.5}, {0.2, 3.0}, {4.0, 4.0}};
    for (cplx z : zs)
        for (const auto& p : pairs) {
            const auto g = partial_wave_green(z, 8, p[0], p[1]);
            const cplx kappa = green_params(z).kappa;
            const double scale = std::abs(oracle::partial_wave_green(kappa, 0, p[0], p[1]));
            for (int l = 0; l <= 8; ++l) {
                CAPTURE(z);
                CAPTURE(l);
                const cplx ref = oracle::partial_wave_green(kappa, l, p[0], p[1]);
                CHECK(std::abs(g[l] - ref) <= 1e-10 * scale);
            }
        }
    // kappa = sqrt(-(3 + 4i)) = 1 - 2i
    CHECK(std::abs(green_params(cplx(3, 4)).kappa - cplx(1, -2)) < 1e-14);
}

TEST_CASE("partial-wave kernels at z = 0 are r_<^l / ((2l+1) r_>^(l+1))") {
    const auto g = partial_wave_green(0.0, 12, 0.7, 2.0);
    for (int l = 0; l <= 12; ++l)
        CHECK(g[l].real() == doctest::Approx(std::pow(0.7, l) / ((2 * l + 1) * std::pow(2.0, l + 1))).epsilon(1e-13));
}

TEST_CASE("assembled operator reproduces the Newton potential") {
    // V = exp(-r^2) >= 0, f = (1 + r^2) exp(-r^2 / 2)
    const auto V = catalog("gaussian", {{"V0", -1.0}}, 3);
    const auto grid = RadialGrid::uniform(800, 8.0);
    const BSMatrix m = assemble_bs(V, 0.0, grid, 0, true);
    auto f = [](double r) { return (1.0 + r * r) * std::exp(-0.5 * r * r); };
    const std::size_t n = grid.size();
    std::vector<cplx> c(n), y(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = std::sqrt(grid.weights[k]) * grid.nodes[k] * f(grid.nodes[k]);
    m.matrices[0].apply(c.data(), y.data());
    for (std::size_t j : {50u, 150u, 300u, 500u}) {
        const double r = grid.nodes[j];
        const double got = y[j].real() / (std::sqrt(grid.weights[j]) * r);
        const double ref =
            std::exp(-0.5 * r * r) *
            oracle::newton_potential([&](double s) { return std::exp(-0.5 * s * s) * f(s); }, r, 12.0);
        CAPTURE(r);
        CHECK(std::abs(got - ref) <= 1e-3 * std::abs(ref));
    }
}

TEST_CASE("assemble_bs structure") {
    const auto Z = catalog("zero", {}, 3);
    const BSMatrix mz = assemble_bs(Z, -1.0, RadialGrid::graded(50, 10.0), 4);
    CHECK(mz.norm == 0.0);
    for (double v : mz.per_ell_norms) CHECK(v == 0.0);

    const auto V = catalog("gaussian", {{"V0", -0.8}}, 3);
    const BSMatrix m = assemble_bs(V, 0.0, RadialGrid::graded(120, 8.0), 3, true);
    for (const auto& A : m.matrices) {
        double asym = 0.0;
        for (std::size_t i = 0; i < A.order(); ++i)
            for (std::size_t j = 0; j < A.order(); ++j) asym = std::max(asym, std::abs(A(i, j) - A(j, i)));
        CHECK(asym <= 1e-12);
    }
    for (double v : m.per_ell_norms) CHECK(v >= 0.0);
    CHECK(!m.tail_warning);

    CHECK_THROWS_AS(assemble_bs(V, 2.0, RadialGrid::graded(20, 8.0), 2), PreconditionError);
    CHECK_THROWS_AS(assemble_bs(catalog("gaussian", {{"V0", 1.0}}, 4), 0.0, RadialGrid::graded(20, 8.0), 2),
                    UnsupportedError);
}

TEST_CASE("Hardy kernel norm grows under refinement and stays below the sharp constant") {
    const auto H = catalog("hardy", {{"a", 0.5}}, 3);
    double prev = 0.0;
    for (int n : {50, 100, 200, 400}) {
        const double v = assemble_bs(H, 0.0, RadialGrid::graded(n, 40.0), 4).norm;
        CHECK(v >= prev - 1e-10);
        CHECK(v <= 0.5);
        prev = v;
    }
}

TEST_CASE("norm scan respects the z = 0 bound") {
    const auto H = catalog("hardy", {{"a", 0.5}}, 3);
    const cplx zs[] = {-1.0, -10.0, cplx(0, 1), cplx(-1, 1)};
    const auto scan = bs_norm_scan(H, zs, RadialGrid::graded(200, 40.0), 8);
    CHECK(scan.bound_holds);
    for (const auto& [z, v] : scan.norms) CHECK(v <= 0.5 * 1.02);

    const auto Z = catalog("zero", {}, 3);
    for (const auto& [z, v] : bs_norm_scan(Z, zs, RadialGrid::graded(40, 10.0), 2).norms) CHECK(v == 0.0);

    const auto G = catalog("gaussian", {{"V0", 1.0}}, 3);
    double prev = 1e300;
    for (double t : {0.1, 1.0, 10.0, 100.0}) {
        const double v = assemble_bs(G, -t, RadialGrid::graded(120, 8.0), 4).norm;
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("Hilbert-Schmidt norm two ways") {
    const auto G = catalog("gaussian", {{"V0", 1.0}}, 3);
    const HSResult hs = hs_norm(G);
    CHECK(!hs.divergent);
    CHECK(hs.rollnik_over_4pi == doctest::Approx(std::sqrt(kPi) / 4.0).epsilon(1e-8));
    CHECK(hs.relative_gap <= 1e-3);
    CHECK(assemble_bs(G, 0.0, RadialGrid::uniform(400, G.effective_radius()), 8).norm <= hs.direct);

    CHECK(hs_norm(catalog("zero", {}, 3)).direct == 0.0);
    CHECK(hs_norm(catalog("hardy", {{"a", 0.5}}, 3)).divergent);
}

TEST_CASE("matrix Birman-Schwinger identity") {
    // 2x2: H0 = diag(1, 2), V = diag(-3, 0), lambda = -2, psi = e1
    const DenseComplexMatrix H0{{1.0, 0.0}, {0.0, 2.0}};
    const cplx Vd[] = {-3.0, 0.0};
    const cplx psi[] = {1.0, 0.0};
    CHECK(bs_principle_matrix_check(H0, Vd, -2.0, psi) <= 1e-15);

    std::mt19937 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    int checked = 0;
    for (unsigned seed = 1; seed <= 6; ++seed) {
        const std::size_t n = 6;
        DenseComplexMatrix H = oracle::random_matrix(n, seed);
        std::vector<cplx> Vdiag(n);
        for (auto& v : Vdiag) v = cplx(3.0 * g(rng), g(rng));
        DenseComplexMatrix HV = H;
        for (std::size_t i = 0; i < n; ++i) HV(i, i) += Vdiag[i];
        const auto spec0 = eig_complex(H);
        for (const auto& p : eig_complex(HV)) {
            double dist = 1e300;
            for (const auto& q : spec0) dist = std::min(dist, std::abs(q.value - p.value));
            if (dist < 1e-3) continue;
            CHECK(bs_principle_matrix_check(H, Vdiag, p.value, p.vector) <= 1e-8);
            ++checked;
        }
    }
    CHECK(checked > 20);

    // V = 0: every eigenpair of H0 + V lies on the spectrum of H0
    const cplx V0[] = {0.0, 0.0};
    const cplx e2[] = {0.0, 1.0};
    CHECK_THROWS_AS(bs_principle_matrix_check(H0, V0, 2.0, e2), PreconditionError);
}

TEST_CASE("kappa regimes") {
    const double e1[] = {1e-4};
    CHECK(kappa_scaling(0.0, e1).kappa[0] == doctest::Approx(std::sqrt(1e-4 / 2)).epsilon(1e-10));
    CHECK(kappa_scaling(0.0, e1).kappa[0] == doctest::Approx(7.0711e-3).epsilon(1e-4));

    const double eps[] = {1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};
    const auto k0 = kappa_scaling(0.0, eps);
    CHECK(k0.regime == KappaRegime::threshold);
    CHECK(k0.slope_matches);
    const auto k1 = kappa_scaling(1.0, eps);
    CHECK(k1.regime == KappaRegime::positive_axis);
    CHECK(k1.fitted_slope == doctest::Approx(1.0).epsilon(0.05));
    const auto km = kappa_scaling(-1.0, eps);
    CHECK(km.regime == KappaRegime::generic);
    CHECK(std::abs(km.fitted_slope) <= 0.05);
    for (double k : km.kappa) CHECK(k == doctest::Approx(1.0).epsilon(1e-3));

    const double neg[] = {-1e-2, -1e-3, -1e-4};
    CHECK(kappa_scaling(1.0, neg).slope_matches);
    const double zero[] = {0.0};
    CHECK_THROWS_AS(kappa_scaling(1.0, zero), PreconditionError);
}

TEST_CASE("M_eps Hilbert-Schmidt norm") {
    const auto G = catalog("gaussian", {{"V0", 1.0}}, 3);
    const double eps[] = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    const auto c = m_eps_hs_check(G, 3.0, 0.0, eps);
    CHECK(c.expected_slope == doctest::Approx(0.75));
    CHECK(c.slope_matches);
    // direct check: int |G_z|^2 over R^3 is 1 / (8 pi kappa)
    const double l1 = std::pow(kPi, 1.5) * std::erf(3.0) - 2.0 * kPi * 3.0 * std::exp(-9.0);
    for (const auto& row : c.rows) {
        const double kappa = std::sqrt(cplx(0.0, -row.eps)).real();
        CHECK(row.hs_formula == doctest::Approx(std::sqrt(l1 / (4 * kPi * kappa))).epsilon(1e-9));
        CHECK(row.hs_direct == doctest::Approx(std::sqrt(l1 / (8 * kPi * kappa))).epsilon(1e-8));
    }

    const auto H = catalog("hardy", {{"a", 0.5}}, 3);
    for (const auto& row : m_eps_hs_check(H, 1.0, 0.0, eps).rows) CHECK(std::isfinite(row.hs_formula));

    const double e2[] = {1e-3, 2e-3};
    const auto c2 = m_eps_hs_check(G, 3.0, -1.0, e2);
    CHECK(c2.rows[1].hs_formula == doctest::Approx(c2.rows[0].hs_formula).epsilon(0.01));
}
