#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spectra_cert/conditions.hpp"
#include "spectra_cert/numerics.hpp"
#include "spectra_cert/potential.hpp"

namespace spectra_cert {

enum class TestFamily { radial, ell1_harmonic };

// Complex radial profile with two derivatives.
struct ComplexProfile {
    std::function<cplx(double)> h, dh, d2h;
};

// u(x) = h(|x|) (radial) or u(x) = x_1 h(|x|) (ell = 1 harmonic times radial).
struct TestFunction {
    TestFamily family = TestFamily::radial;
    int d = 3;
    ComplexProfile profile;
    double support = 1.0;             // +inf for non-compact profiles
    std::vector<double> breakpoints;  // radii where the profile is not smooth
    bool is_zero = false;
    std::string label;

    cplx value(std::span<const double> x) const;
    std::vector<cplx> gradient(std::span<const double> x) const;
    cplx laplacian(std::span<const double> x) const;
};

// exp((-sigma + i chirp) r^2) * exp(1 - 1/(1 - (r/rho)^2)), supported in r < rho.
TestFunction gaussian_bump(int d, TestFamily family, double sigma = 1.0, double rho = 3.0, double chirp = 0.0);
TestFunction zero_test_function(int d);
// |x|^(-k + eps) for |x| <= 1 and |x|^(-k - eps) beyond, with k = (d-2)/2
// (nearly extremal for the Hardy inequality as eps -> 0) or, when `weighted`,
// k = (d-1)/2 (nearly extremal for the weighted Hardy inequality).
TestFunction hardy_near_extremal(int d, double eps, bool weighted = false);

// sgn(lambda_2), with sgn(0) = 1.
double gauge_sign(cplx lambda);

// u^+- = exp(+- i sgn(lambda_2) sqrt(lambda_1) |x|) u; requires Re lambda > 0.
TestFunction gauge_transform(const TestFunction& u, cplx lambda, int sign);

// |grad u^-|^2 expanded as |grad u|^2 + lambda_1 |u|^2 - 2 sgn sqrt(lambda_1) Im(conj(u) d_r u).
double gauge_gradient_expansion(const TestFunction& u, cplx lambda, std::span<const double> x);

// G(x) = g(|x|) with derivatives g^(0..4).
struct RadialMultiplier {
    std::string name;
    std::function<double(double)> g[5];
    bool smooth = true;  // false when G is not C^4 at the origin (e.g. |x|)

    double laplacian(double r, int d) const;
    double bilaplacian(double r, int d) const;
};

RadialMultiplier multiplier_constant(double c);
RadialMultiplier multiplier_abs_x(double scale = 1.0);  // scale |x|
RadialMultiplier multiplier_abs_x_squared();             // |x|^2
RadialMultiplier multiplier_damped_quadratic();          // |x|^2 exp(-|x|^2/10)

struct MultiplierTriple {
    RadialMultiplier g1, g2, g3;
    bool canonical = false;
};

// g3 = r^2, g1 = g3''/2, g2 = sgn(lambda_2) g3'. Checks g3'' - 2 g1 = 0 and
// that the tangential coefficient g3'/r - g3''/2 equals the radial one g3''/2;
// throws CheckFailure otherwise.
MultiplierTriple canonical_triple(cplx lambda);
void assert_canonical(const MultiplierTriple& t, cplx lambda);

enum class QuadraturePath { gauss, graded };

struct IdentityOptions {
    QuadraturePath path = QuadraturePath::gauss;
    int graded_n = 200;         // nodes of the graded path
    double graded_gamma = 2.0;  // grading exponent of the graded path
};

struct Term {
    std::string name;
    cplx value;
};

struct IdentityResult {
    std::string id;
    std::string context;  // test function, lambda and multiplier
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // |lhs - rhs| / (|lhs| + |rhs| + ||u||^2)
    std::vector<Term> terms;
};

// All identities use f = Lap u + lambda u.
IdentityResult identity_residual_1(const TestFunction& u, cplx lambda, const RadialMultiplier& G1,
                                   const IdentityOptions& opts = {});
IdentityResult identity_residual_2(const TestFunction& u, cplx lambda, const RadialMultiplier& G2,
                                   const IdentityOptions& opts = {});
IdentityResult identity_residual_3(const TestFunction& u, cplx lambda, const RadialMultiplier& G3,
                                   const IdentityOptions& opts = {});
// Sum of the first identity with g1, sqrt(lambda_1) times the second with g2
// and the third with g3 = r^2, in the simplified form of the canonical triple.
IdentityResult canonical_combined_residual(const TestFunction& u, cplx lambda, const IdentityOptions& opts = {});
// Key identity for the gauged function u^-; requires Re lambda > 0.
IdentityResult key_identity_residual(const TestFunction& u, cplx lambda, const IdentityOptions& opts = {});

struct IdentityCase {
    TestFunction u;
    cplx lambda;
    RadialMultiplier G;
};

// Runs the three identities for each case (and the key identity when
// Re lambda > 0) in parallel; results are in case order.
std::vector<IdentityResult> identity_sweep(const std::vector<IdentityCase>& cases, const IdentityOptions& opts = {});

struct HardyRatios {
    double hardy = 0.0;     // int |psi|^2/|x|^2 / int |grad psi|^2
    double weighted = 0.0;  // int |psi|^2/|x| / int |x| |grad psi|^2
    double hardy_bound = 0.0;
    double weighted_bound = 0.0;
    // Set (and the ratio is NaN) when an integral of a non-compact profile
    // diverges.
    bool hardy_divergent = false;
    bool weighted_divergent = false;
};

HardyRatios hardy_check(const TestFunction& psi);

struct ChainCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;  // lhs <= rhs up to 1e-12 relative slack
};

struct CaseSplitResult {
    Verdict verdict = Verdict::inconclusive;
    bool vacuous = false;
    double Lambda = 0.0;
    double coefficient = 0.0;  // 1 - 4 Lambda / (d - 2)
    std::vector<Term> terms;
    std::vector<IdentityResult> identities;  // the +- identities with f = Lap u + lambda u
    std::vector<ChainCheck> chain;
};

// Estimates for |lambda_2| > lambda_1 with f := V u on the probe u.
CaseSplitResult case_split_bound(const TestFunction& u, cplx lambda, const Potential& V);

struct RadiTerms {
    IdentityResult identity;  // I = I1 + I2 + I3
    std::vector<ChainCheck> chain;
    Verdict verdict = Verdict::inconclusive;
};

// Term table of the key identity with f = V u. The probe mismatch
// g = Lap u + lambda u - V u enters through I3. Requires Re lambda > 0 and
// |lambda_2| <= lambda_1.
RadiTerms radi_identity_terms(const TestFunction& u, cplx lambda, const Potential& V,
                              const IdentityOptions& opts = {});

struct MagneticSmoke {
    double tangential_max = 0.0;  // max |B_tau . x| / |x| over samples
    double gauge_max = 0.0;       // max |B_tau . grad_A u^- - e^{-i s sqrt(l1) r} B_tau . grad_A u|
    double max_b_tau = 0.0;
    IdentityResult identity;      // lambda_1 ||u||^2 - ||grad_A u||^2 = Re int f conj(u)
};

// d = 3. f = Lap_A u + lambda u, split as V u + g.
MagneticSmoke magnetic_identity_smoke(const TestFunction& u, cplx lambda, const Potential& V,
                                      const MagneticPotential& A, int samples = 200, unsigned seed = 7);

// Tensor Gauss cross-check of int G1 |u|^2, int G1 |grad u|^2 and
// Re int f G1 conj(u) on [-rho, rho]^3 with n nodes per axis.
std::vector<double> box_cross_check(const TestFunction& u, cplx lambda, const RadialMultiplier& G1, int n);
std::vector<double> radial_cross_check(const TestFunction& u, cplx lambda, const RadialMultiplier& G1);

}  // namespace spectra_cert
