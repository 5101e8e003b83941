#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "spectra_cert/multiplier.hpp"

namespace spectra_cert {
namespace {

constexpr cplx I_UNIT{0.0, 1.0};

double sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d); }

// Sphere integrals at radius r, Jacobian included. For the ell = 1 family the
// factor x_1 is carried by the angular weight c = r^2 / d.
struct Shell {
    double Ac = 0.0;     // area * c
    double tau2 = 0.0;   // integral of |grad_tau u|^2 over the sphere
    cplx h, R, F;        // u, d_r u and (Lap u + lambda u) amplitudes
};

Shell shell(const TestFunction& u, double r, cplx lambda) {
    Shell s;
    const int d = u.d;
    const double area = sphere_area(d) * std::pow(r, d - 1);
    s.h = u.profile.h(r);
    const cplx dh = u.profile.dh(r), d2h = u.profile.d2h(r);
    if (u.family == TestFamily::radial) {
        s.Ac = area;
        s.R = dh;
        s.F = d2h + double(d - 1) / r * dh + lambda * s.h;
        s.tau2 = 0.0;
    } else {
        s.Ac = area * r * r / d;
        s.R = s.h / r + dh;
        s.F = d2h + double(d + 1) / r * dh + lambda * s.h;
        s.tau2 = area * std::norm(s.h) * (d - 1.0) / d;
    }
    return s;
}

double grad2(const Shell& s) { return s.Ac * std::norm(s.R) + s.tau2; }

std::string fmt(cplx z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

std::string context_of(const TestFunction& u, cplx lambda, const std::string& G) {
    return "u=" + u.label + ";lambda=" + fmt(lambda) + (G.empty() ? "" : ";G=" + G);
}

double residual_of(double lhs, double rhs, double unorm2) {
    const double den = std::abs(lhs) + std::abs(rhs) + unorm2;
    return den == 0.0 ? 0.0 : std::abs(lhs - rhs) / den;
}

// Composite Gauss rule on [0, support] split at the breakpoints.
Quadrature gauss_rule(const TestFunction& u, int panels) {
    if (!std::isfinite(u.support)) throw PreconditionError("identity checks require a compactly supported test function");
    std::vector<double> cuts{0.0};
    for (double b : u.breakpoints)
        if (b > 0.0 && b < u.support) cuts.push_back(b);
    cuts.push_back(u.support);
    Quadrature q;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const int p = std::max(2, static_cast<int>(std::round(panels * (cuts[i + 1] - cuts[i]) / u.support)));
        const Quadrature part = composite_gauss_legendre(p, 12, cuts[i], cuts[i + 1]);
        q.nodes.insert(q.nodes.end(), part.nodes.begin(), part.nodes.end());
        q.weights.insert(q.weights.end(), part.weights.begin(), part.weights.end());
    }
    return q;
}

Quadrature graded_rule(const TestFunction& u, const IdentityOptions& opts) {
    if (!std::isfinite(u.support)) throw PreconditionError("identity checks require a compactly supported test function");
    const RadialGrid g = RadialGrid::graded(opts.graded_n, u.support, opts.graded_gamma);
    return {g.nodes, g.weights};
}

double unorm2(const TestFunction& u, const Quadrature& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double r = q.nodes[i];
        const double area = sphere_area(u.d) * std::pow(r, u.d - 1);
        const double c = u.family == TestFamily::radial ? 1.0 : r * r / u.d;
        s += q.weights[i] * area * c * std::norm(u.profile.h(r));
    }
    return s;
}

// Evaluates `build` on the chosen path. The Gauss path compares two
// refinements and throws ConvergenceError when they differ by more than 1e-6
// relative to the residual scale.
template <class Build>
IdentityResult evaluate(const TestFunction& u, const IdentityOptions& opts, Build build) {
    if (opts.path == QuadraturePath::graded) {
        const Quadrature q = graded_rule(u, opts);
        IdentityResult r = build(q);
        r.residual = residual_of(r.lhs, r.rhs, unorm2(u, q));
        return r;
    }
    const Quadrature coarse = gauss_rule(u, 32), fine = gauss_rule(u, 64);
    IdentityResult a = build(coarse);
    IdentityResult b = build(fine);
    const double n2 = unorm2(u, fine);
    const double scale = std::abs(b.lhs) + std::abs(b.rhs) + n2;
    if (std::abs(a.lhs - b.lhs) + std::abs(a.rhs - b.rhs) > 1e-6 * scale)
        throw ConvergenceError("identity " + b.id + ": quadrature refinements differ by more than 1e-6");
    b.residual = residual_of(b.lhs, b.rhs, n2);
    return b;
}

void require_same_dimension(const TestFunction& u) {
    if (u.d < 3) throw PreconditionError("multiplier identities require d >= 3");
}

bool chain_holds(double lhs, double rhs) { return lhs <= rhs + 1e-12 * (std::abs(lhs) + std::abs(rhs)); }

ChainCheck chain(const std::string& name, double lhs, double rhs) { return {name, lhs, rhs, chain_holds(lhs, rhs)}; }

// Polynomial P with G = P(r) exp(a r^2): coefficients of the k-th derivative.
std::vector<double> next_derivative(const std::vector<double>& P, double a) {
    std::vector<double> out(P.size() + 1, 0.0);
    for (std::size_t k = 1; k < P.size(); ++k) out[k - 1] += k * P[k];
    for (std::size_t k = 0; k < P.size(); ++k) out[k + 1] += 2.0 * a * P[k];
    return out;
}

double poly(const std::vector<double>& P, double r) {
    double s = 0.0;
    for (std::size_t k = P.size(); k-- > 0;) s = s * r + P[k];
    return s;
}

}  // namespace

cplx TestFunction::value(std::span<const double> x) const {
    if (is_zero) return 0.0;
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    if (r >= support) return 0.0;
    const cplx h = profile.h(r);
    return family == TestFamily::radial ? h : x[0] * h;
}

std::vector<cplx> TestFunction::gradient(std::span<const double> x) const {
    std::vector<cplx> g(x.size(), 0.0);
    if (is_zero) return g;
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    if (r >= support) return g;
    if (r == 0.0) {
        if (family == TestFamily::ell1_harmonic) g[0] = profile.h(0.0);
        return g;
    }
    const cplx h = profile.h(r), dh = profile.dh(r);
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (family == TestFamily::radial)
            g[j] = dh * x[j] / r;
        else
            g[j] = x[0] * dh * x[j] / r + (j == 0 ? h : cplx{0.0});
    }
    return g;
}

cplx TestFunction::laplacian(std::span<const double> x) const {
    if (is_zero) return 0.0;
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    if (r >= support) return 0.0;
    const cplx dh = profile.dh(r), d2h = profile.d2h(r);
    if (family == TestFamily::radial) return d2h + double(d - 1) / r * dh;
    return x[0] * (d2h + double(d + 1) / r * dh);
}

TestFunction gaussian_bump(int d, TestFamily family, double sigma, double rho, double chirp) {
    if (d < 3) throw PreconditionError("gaussian_bump: d must be >= 3");
    if (!(sigma >= 0.0) || !(rho > 0.0)) throw PreconditionError("gaussian_bump: need sigma >= 0 and rho > 0");
    TestFunction u;
    u.family = family;
    u.d = d;
    u.support = rho;
    const cplx a(-sigma, chirp);
    // h = exp(phi), phi = a r^2 + 1 - 1/w, w = 1 - (r/rho)^2
    auto phi = [a, rho](double r) { return a * r * r + 1.0 - 1.0 / (1.0 - (r / rho) * (r / rho)); };
    auto dphi = [a, rho](double r) {
        const double s = r / rho, w = 1.0 - s * s;
        return 2.0 * a * r - 2.0 * s / (rho * w * w);
    };
    auto d2phi = [a, rho](double r) {
        const double s = r / rho, w = 1.0 - s * s;
        return 2.0 * a - 2.0 / (rho * rho) * (1.0 / (w * w) + 4.0 * s * s / (w * w * w));
    };
    u.profile.h = [=](double r) { return r < rho ? std::exp(phi(r)) : cplx{0.0}; };
    u.profile.dh = [=](double r) { return r < rho ? dphi(r) * std::exp(phi(r)) : cplx{0.0}; };
    u.profile.d2h = [=](double r) {
        if (r >= rho) return cplx{0.0};
        const cplx p1 = dphi(r);
        return (d2phi(r) + p1 * p1) * std::exp(phi(r));
    };
    std::ostringstream os;
    os << (family == TestFamily::radial ? "radial" : "ell1") << "-bump(sigma=" << sigma << ",rho=" << rho
       << ",chirp=" << chirp << ")";
    u.label = os.str();
    return u;
}

TestFunction zero_test_function(int d) {
    TestFunction u;
    u.d = d;
    u.is_zero = true;
    u.support = 1.0;
    u.profile.h = u.profile.dh = u.profile.d2h = [](double) { return cplx{0.0}; };
    u.label = "zero";
    return u;
}

TestFunction hardy_near_extremal(int d, double eps, bool weighted) {
    if (d < 3) throw PreconditionError("hardy_near_extremal: d must be >= 3");
    if (!(eps > 0.0)) throw PreconditionError("hardy_near_extremal: eps must be positive");
    TestFunction u;
    u.d = d;
    u.support = std::numeric_limits<double>::infinity();
    u.breakpoints = {1.0};
    const double k = 0.5 * (weighted ? d - 1 : d - 2);
    const double p = -k + eps, q = -k - eps;
    u.profile.h = [=](double r) { return cplx{std::pow(r, r <= 1.0 ? p : q)}; };
    u.profile.dh = [=](double r) {
        const double e = r <= 1.0 ? p : q;
        return cplx{e * std::pow(r, e - 1.0)};
    };
    u.profile.d2h = [=](double r) {
        const double e = r <= 1.0 ? p : q;
        return cplx{e * (e - 1.0) * std::pow(r, e - 2.0)};
    };
    u.label = std::string(weighted ? "weighted-" : "") + "hardy-near-extremal(eps=" + std::to_string(eps) + ")";
    return u;
}

double gauge_sign(cplx lambda) { return lambda.imag() < 0.0 ? -1.0 : 1.0; }

TestFunction gauge_transform(const TestFunction& u, cplx lambda, int sign) {
    if (!(lambda.real() > 0.0)) throw PreconditionError("gauge_transform: requires Re lambda > 0");
    if (sign != 1 && sign != -1) throw PreconditionError("gauge_transform: sign must be +1 or -1");
    const double theta = sign * gauge_sign(lambda) * std::sqrt(lambda.real());
    TestFunction g = u;
    const ComplexProfile p = u.profile;
    g.profile.h = [p, theta](double r) { return std::exp(I_UNIT * theta * r) * p.h(r); };
    g.profile.dh = [p, theta](double r) { return std::exp(I_UNIT * theta * r) * (p.dh(r) + I_UNIT * theta * p.h(r)); };
    g.profile.d2h = [p, theta](double r) {
        return std::exp(I_UNIT * theta * r) * (p.d2h(r) + 2.0 * I_UNIT * theta * p.dh(r) - theta * theta * p.h(r));
    };
    g.label = u.label + (sign > 0 ? "^+" : "^-");
    return g;
}

double gauge_gradient_expansion(const TestFunction& u, cplx lambda, std::span<const double> x) {
    if (!(lambda.real() > 0.0)) throw PreconditionError("gauge_gradient_expansion: requires Re lambda > 0");
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    const cplx val = u.value(x);
    const auto g = u.gradient(x);
    double grad = 0.0;
    cplx dr = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        grad += std::norm(g[j]);
        dr += x[j] / r * g[j];
    }
    return grad + lambda.real() * std::norm(val) -
           2.0 * gauge_sign(lambda) * std::sqrt(lambda.real()) * (std::conj(val) * dr).imag();
}

double RadialMultiplier::laplacian(double r, int d) const { return g[2](r) + (d - 1) * g[1](r) / r; }

double RadialMultiplier::bilaplacian(double r, int d) const {
    const double g1 = g[1](r), g2 = g[2](r), g3 = g[3](r), g4 = g[4](r);
    const double F1 = g3 + (d - 1) * (g2 / r - g1 / (r * r));
    const double F2 = g4 + (d - 1) * (g3 / r - 2.0 * g2 / (r * r) + 2.0 * g1 / (r * r * r));
    return F2 + (d - 1) * F1 / r;
}

RadialMultiplier multiplier_constant(double c) {
    RadialMultiplier m;
    m.name = "const(" + std::to_string(c) + ")";
    m.g[0] = [c](double) { return c; };
    for (int k = 1; k < 5; ++k) m.g[k] = [](double) { return 0.0; };
    return m;
}

RadialMultiplier multiplier_abs_x(double scale) {
    RadialMultiplier m;
    m.name = "abs_x(" + std::to_string(scale) + ")";
    m.g[0] = [scale](double r) { return scale * r; };
    m.g[1] = [scale](double) { return scale; };
    for (int k = 2; k < 5; ++k) m.g[k] = [](double) { return 0.0; };
    m.smooth = false;
    return m;
}

RadialMultiplier multiplier_abs_x_squared() {
    RadialMultiplier m;
    m.name = "abs_x_squared";
    m.g[0] = [](double r) { return r * r; };
    m.g[1] = [](double r) { return 2.0 * r; };
    m.g[2] = [](double) { return 2.0; };
    m.g[3] = m.g[4] = [](double) { return 0.0; };
    return m;
}

RadialMultiplier multiplier_damped_quadratic() {
    RadialMultiplier m;
    m.name = "damped_quadratic";
    const double a = -0.1;
    std::vector<double> P{0.0, 0.0, 1.0};
    for (int k = 0; k < 5; ++k) {
        m.g[k] = [P, a](double r) { return poly(P, r) * std::exp(a * r * r); };
        P = next_derivative(P, a);
    }
    return m;
}

MultiplierTriple canonical_triple(cplx lambda) {
    MultiplierTriple t;
    t.canonical = true;
    t.g3 = multiplier_abs_x_squared();
    t.g1 = multiplier_constant(1.0);
    t.g1.name = "g3''/2";
    const double s = gauge_sign(lambda);
    RadialMultiplier g2;
    g2.name = "sgn(lambda2)*g3'";
    g2.g[0] = [s](double r) { return 2.0 * s * r; };
    g2.g[1] = [s](double) { return 2.0 * s; };
    for (int k = 2; k < 5; ++k) g2.g[k] = [](double) { return 0.0; };
    t.g2 = g2;
    assert_canonical(t, lambda);
    return t;
}

void assert_canonical(const MultiplierTriple& t, cplx lambda) {
    if (!t.canonical) throw CheckFailure("assert_canonical: triple is not flagged canonical");
    const double s = gauge_sign(lambda);
    for (double r : {0.1, 0.5, 1.0, 2.0, 7.5}) {
        const double g1 = t.g1.g[0](r), g2 = t.g2.g[0](r);
        const double g3p = t.g3.g[1](r), g3pp = t.g3.g[2](r);
        if (g3pp != 2.0 || g1 != 1.0) throw CheckFailure("canonical triple: expected g3'' = 2 and g1 = 1");
        if (g2 != s * g3p) throw CheckFailure("canonical triple: expected g2 = sgn(lambda2) g3'");
        if (g3pp - 2.0 * g1 != 0.0) throw CheckFailure("canonical triple: g3'' - 2 g1 != 0");
        // tangential coefficient g3'/r - g3''/2 equals the radial one g3''/2
        if (g3p / r - 0.5 * g3pp != 0.5 * g3pp)
            throw CheckFailure("canonical triple: tangential and radial coefficients differ");
    }
}

IdentityResult identity_residual_1(const TestFunction& u, cplx lambda, const RadialMultiplier& G1,
                                   const IdentityOptions& opts) {
    require_same_dimension(u);
    return evaluate(u, opts, [&](const Quadrature& q) {
        double a = 0.0, b = 0.0, c = 0.0;
        cplx rhs = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double r = q.nodes[i], w = q.weights[i];
            const Shell s = shell(u, r, lambda);
            const double G = G1.g[0](r);
            const double m = s.Ac * std::norm(s.h);
            a += w * G * m;
            b += w * G * grad2(s);
            c += w * G1.laplacian(r, u.d) * m;
            rhs += w * s.Ac * s.F * G * std::conj(s.h);
        }
        IdentityResult res;
        res.id = "id1";
        res.context = context_of(u, lambda, G1.name);
        res.terms = {{"lambda1*int G1|u|^2", lambda.real() * a},
                     {"-int G1|grad u|^2", -b},
                     {"0.5*int LapG1|u|^2", 0.5 * c},
                     {"Re int f G1 conj(u)", rhs.real()}};
        res.lhs = lambda.real() * a - b + 0.5 * c;
        res.rhs = rhs.real();
        return res;
    });
}

IdentityResult identity_residual_2(const TestFunction& u, cplx lambda, const RadialMultiplier& G2,
                                   const IdentityOptions& opts) {
    require_same_dimension(u);
    return evaluate(u, opts, [&](const Quadrature& q) {
        double a = 0.0;
        cplx b = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double r = q.nodes[i], w = q.weights[i];
            const Shell s = shell(u, r, lambda);
            a += w * G2.g[0](r) * s.Ac * std::norm(s.h);
            b += w * G2.g[1](r) * s.Ac * std::conj(s.h) * s.R;
            rhs += w * s.Ac * s.F * G2.g[0](r) * std::conj(s.h);
        }
        IdentityResult res;
        res.id = "id2";
        res.context = context_of(u, lambda, G2.name);
        res.terms = {{"lambda2*int G2|u|^2", lambda.imag() * a},
                     {"-Im int gradG2.conj(u)grad u", -b.imag()},
                     {"Im int f G2 conj(u)", rhs.imag()}};
        res.lhs = lambda.imag() * a - b.imag();
        res.rhs = rhs.imag();
        return res;
    });
}

IdentityResult identity_residual_3(const TestFunction& u, cplx lambda, const RadialMultiplier& G3,
                                   const IdentityOptions& opts) {
    require_same_dimension(u);
    if (!G3.smooth) throw PreconditionError("identity_residual_3: G3 must have four derivatives at the origin");
    return evaluate(u, opts, [&](const Quadrature& q) {
        double hess = 0.0, bil = 0.0;
        cplx mix = 0.0, r1 = 0.0, r2 = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double r = q.nodes[i], w = q.weights[i];
            const Shell s = shell(u, r, lambda);
            const double gp = G3.g[1](r), gpp = G3.g[2](r);
            hess += w * (gpp * s.Ac * std::norm(s.R) + gp / r * s.tau2);
            bil += w * G3.bilaplacian(r, u.d) * s.Ac * std::norm(s.h);
            mix += w * gp * s.Ac * s.h * std::conj(s.R);
            r1 += w * s.Ac * s.F * G3.laplacian(r, u.d) * std::conj(s.h);
            r2 += w * s.Ac * s.F * gp * std::conj(s.R);
        }
        IdentityResult res;
        res.id = "id3";
        res.context = context_of(u, lambda, G3.name);
        res.terms = {{"int grad u.HessG3.grad conj(u)", hess},
                     {"-0.25*int BilapG3|u|^2", -0.25 * bil},
                     {"lambda2*Im int gradG3.u grad conj(u)", lambda.imag() * mix.imag()},
                     {"-0.5*Re int f LapG3 conj(u)", -0.5 * r1.real()},
                     {"-Re int f gradG3.grad conj(u)", -r2.real()}};
        res.lhs = hess - 0.25 * bil + lambda.imag() * mix.imag();
        res.rhs = -0.5 * r1.real() - r2.real();
        return res;
    });
}

IdentityResult canonical_combined_residual(const TestFunction& u, cplx lambda, const IdentityOptions& opts) {
    require_same_dimension(u);
    if (!(lambda.real() >= 0.0)) throw PreconditionError("canonical_combined_residual: requires Re lambda >= 0");
    const MultiplierTriple t = canonical_triple(lambda);
    (void)t;
    const double l1 = lambda.real(), l2 = lambda.imag(), mu = std::sqrt(l1), s = gauge_sign(lambda);
    const int d = u.d;
    return evaluate(u, opts, [&](const Quadrature& q) {
        double g = 0.0, m = 0.0, rm = 0.0;
        cplx ud = 0.0, rud = 0.0, fu = 0.0, rfu = 0.0, rfd = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double r = q.nodes[i], w = q.weights[i];
            const Shell sh = shell(u, r, lambda);
            g += w * grad2(sh);
            m += w * sh.Ac * std::norm(sh.h);
            rm += w * r * sh.Ac * std::norm(sh.h);
            ud += w * sh.Ac * std::conj(sh.h) * sh.R;
            rud += w * r * sh.Ac * sh.h * std::conj(sh.R);
            fu += w * sh.Ac * sh.F * std::conj(sh.h);
            rfu += w * r * sh.Ac * sh.F * std::conj(sh.h);
            rfd += w * r * sh.Ac * sh.F * std::conj(sh.R);
        }
        IdentityResult res;
        res.id = "canonical";
        res.context = context_of(u, lambda, "canonical triple");
        const double t1 = g + l1 * m, t2 = -2.0 * s * mu * ud.imag(), t3 = 2.0 * std::abs(l2) * mu * rm,
                     t4 = 2.0 * l2 * rud.imag();
        const double r1 = (1.0 - d) * fu.real(), r2 = 2.0 * mu * s * rfu.imag(), r3 = -2.0 * rfd.real();
        res.terms = {{"int |grad u|^2 + lambda1|u|^2", t1},
                     {"-2 sgn sqrt(lambda1) Im int conj(u) d_r u", t2},
                     {"2|lambda2| sqrt(lambda1) int |x||u|^2", t3},
                     {"2 lambda2 Im int |x| u d_r conj(u)", t4},
                     {"(1-d) Re int f conj(u)", r1},
                     {"2 sqrt(lambda1) sgn Im int f |x| conj(u)", r2},
                     {"-2 Re int f x.grad conj(u)", r3}};
        res.lhs = t1 + t2 + t3 + t4;
        res.rhs = r1 + r2 + r3;
        return res;
    });
}

IdentityResult key_identity_residual(const TestFunction& u, cplx lambda, const IdentityOptions& opts) {
    require_same_dimension(u);
    if (!(lambda.real() > 0.0)) throw PreconditionError("key_identity_residual: requires Re lambda > 0");
    const double l1 = lambda.real(), mu = std::sqrt(l1), s = gauge_sign(lambda);
    const double kappa = std::abs(lambda.imag()) / mu;
    const int d = u.d;
    const TestFunction um = gauge_transform(u, lambda, -1);
    return evaluate(u, opts, [&](const Quadrature& q) {
        double gm = 0.0, rgm = 0.0, m_r = 0.0;
        cplx fu = 0.0, i2 = 0.0, rfu = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double r = q.nodes[i], w = q.weights[i];
            const Shell sh = shell(u, r, lambda);
            const Shell sm = shell(um, r, lambda);
            gm += w * grad2(sm);
            rgm += w * r * grad2(sm);
            m_r += w * sh.Ac * std::norm(sh.h) / r;
            fu += w * sh.Ac * sh.F * std::conj(sh.h);
            // d_r conj(u) + i sgn sqrt(lambda1) conj(u) = conj(d_r u - i sgn sqrt(lambda1) u)
            i2 += w * r * sh.Ac * sh.F * std::conj(sh.R - I_UNIT * s * mu * sh.h);
            rfu += w * r * sh.Ac * sh.F * std::conj(sh.h);
        }
        IdentityResult res;
        res.id = "key";
        res.context = context_of(u, lambda, "");
        const double L1 = gm, L2 = kappa * rgm, L3 = -0.5 * (d - 1) * kappa * m_r;
        const double I1 = (1.0 - d) * fu.real(), I2 = -2.0 * i2.real(), I3 = -kappa * rfu.real();
        res.terms = {{"int |grad u^-|^2", L1},
                     {"|lambda2|/sqrt(lambda1) int |x||grad u^-|^2", L2},
                     {"-(d-1)/2 |lambda2|/sqrt(lambda1) int |u|^2/|x|", L3},
                     {"I", L1 + L2 + L3},
                     {"I1", I1},
                     {"I2", I2},
                     {"I3", I3}};
        res.lhs = L1 + L2 + L3;
        res.rhs = I1 + I2 + I3;
        return res;
    });
}

std::vector<IdentityResult> identity_sweep(const std::vector<IdentityCase>& cases, const IdentityOptions& opts) {
    std::vector<std::vector<IdentityResult>> per(cases.size());
    parallel_for(cases.size(), [&](std::size_t i) {
        const IdentityCase& c = cases[i];
        per[i].push_back(identity_residual_1(c.u, c.lambda, c.G, opts));
        per[i].push_back(identity_residual_2(c.u, c.lambda, c.G, opts));
        if (c.G.smooth) per[i].push_back(identity_residual_3(c.u, c.lambda, c.G, opts));
        if (c.lambda.real() > 0.0) per[i].push_back(key_identity_residual(c.u, c.lambda, opts));
    });
    std::vector<IdentityResult> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

HardyRatios hardy_check(const TestFunction& psi) {
    if (psi.is_zero) throw PreconditionError("hardy_check: psi must be nonzero");
    const int d = psi.d;
    if (d < 3) throw PreconditionError("hardy_check: d must be >= 3");
    double m2 = 0.0, g0 = 0.0, m1 = 0.0, g1 = 0.0;
    auto accumulate = [&](double r, double w) {
        const Shell s = shell(psi, r, 0.0);
        const double m = s.Ac * std::norm(s.h), g = grad2(s);
        m2 += w * m / (r * r);
        g0 += w * g;
        m1 += w * m / r;
        g1 += w * r * g;
    };
    if (std::isfinite(psi.support)) {
        const Quadrature coarse = gauss_rule(psi, 32), fine = gauss_rule(psi, 64);
        for (std::size_t i = 0; i < coarse.nodes.size(); ++i) accumulate(coarse.nodes[i], coarse.weights[i]);
        const double c[4] = {m2, g0, m1, g1};
        m2 = g0 = m1 = g1 = 0.0;
        for (std::size_t i = 0; i < fine.nodes.size(); ++i) accumulate(fine.nodes[i], fine.weights[i]);
        const double f[4] = {m2, g0, m1, g1};
        for (int k = 0; k < 4; ++k)
            if (std::abs(c[k] - f[k]) > 1e-6 * std::abs(f[k]))
                throw ConvergenceError("hardy_check: quadrature refinements differ by more than 1e-6");
    } else {
        // Power-law ends: integrate in ln r over [1/b, b] for b = 10^(L/2) and
        // 10^L, with L small enough that r^(2p-2) r^(d-1) stays finite. Growth
        // by more than a factor 2 marks a divergent integral.
        const double L = std::min(40.0, 240.0 / (d + 2));
        auto one = [&](auto weight) {
            auto f = [&](double r) { return weight(r, shell(psi, r, 0.0)); };
            const double half = integrate_log_mapped(f, std::pow(10.0, -0.5 * L), std::pow(10.0, 0.5 * L),
                                                     psi.breakpoints);
            const double full = integrate_log_mapped(f, std::pow(10.0, -L), std::pow(10.0, L), psi.breakpoints);
            return full > 2.0 * half ? std::numeric_limits<double>::infinity() : full;
        };
        m2 = one([](double r, const Shell& s) { return s.Ac * std::norm(s.h) / (r * r); });
        g0 = one([](double, const Shell& s) { return grad2(s); });
        m1 = one([](double r, const Shell& s) { return s.Ac * std::norm(s.h) / r; });
        g1 = one([](double r, const Shell& s) { return r * grad2(s); });
    }
    HardyRatios out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.hardy_divergent = !std::isfinite(m2) || !std::isfinite(g0);
    out.weighted_divergent = !std::isfinite(m1) || !std::isfinite(g1);
    out.hardy = out.hardy_divergent ? nan : m2 / g0;
    out.weighted = out.weighted_divergent ? nan : m1 / g1;
    out.hardy_bound = 4.0 / ((d - 2.0) * (d - 2.0));
    out.weighted_bound = 4.0 / ((d - 1.0) * (d - 1.0));
    return out;
}

CaseSplitResult case_split_bound(const TestFunction& u, cplx lambda, const Potential& V) {
    require_same_dimension(u);
    if (V.dimension() != u.d) throw PreconditionError("case_split_bound: dimension mismatch");
    if (!(std::abs(lambda.imag()) > lambda.real()))
        throw PreconditionError("case_split_bound: requires |Im lambda| > Re lambda");
    if (u.is_zero) throw PreconditionError("case_split_bound: probe must be nonzero");
    const int d = u.d;
    CaseSplitResult out;

    const Quadrature q = gauss_rule(u, 64);
    double n0 = 0.0, g = 0.0, hx = 0.0, xv = 0.0, av = 0.0;
    cplx vu = 0.0, fu = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double r = q.nodes[i], w = q.weights[i];
        const Shell s = shell(u, r, lambda);
        const double m = s.Ac * std::norm(s.h);
        const cplx v = V.radial_profile(r);
        n0 += w * m;
        g += w * grad2(s);
        hx += w * m / (r * r);
        xv += w * r * r * std::norm(v) * m;
        av += w * std::abs(v) * m;
        vu += w * v * m;
        fu += w * s.Ac * s.F * std::conj(s.h);
    }
    const double l1 = lambda.real(), l2 = lambda.imag();
    out.terms = {{"int |u|^2", n0},        {"int |grad u|^2", g},     {"int |u|^2/|x|^2", hx},
                 {"||x V u||^2", xv},      {"int V|u|^2", vu},        {"int |V||u|^2", av},
                 {"(l1+l2) int|u|^2", (l1 + l2) * n0}, {"(l1-l2) int|u|^2", (l1 - l2) * n0}};
    for (int sg : {1, -1}) {
        IdentityResult id;
        id.id = sg > 0 ? "outside+" : "outside-";
        id.context = context_of(u, lambda, "");
        id.lhs = (l1 + sg * l2) * n0;
        id.rhs = g + fu.real() + sg * fu.imag();
        id.residual = residual_of(id.lhs, id.rhs, n0);
        id.terms = {{"(l1+-l2) int|u|^2", id.lhs}, {"int|grad u|^2", g}, {"Re int f conj(u)", fu.real()},
                    {"+-Im int f conj(u)", sg * fu.imag()}};
        out.identities.push_back(id);
    }

    if (V.is_zero()) {
        out.vacuous = true;
        out.verdict = Verdict::pass;
        out.coefficient = 1.0;
        return out;
    }
    const Constant Lam = lambda_constant(V);
    if (Lam.divergent) return out;
    out.Lambda = Lam.value;
    out.coefficient = 1.0 - 4.0 * Lam.value / (d - 2);
    if (out.coefficient <= 0.0) return out;

    const double hard = 2.0 / (d - 2);
    for (int sg : {1, -1}) {
        const std::string tag = sg > 0 ? "[+]" : "[-]";
        out.chain.push_back(chain("|Re int Vu conj(u) +- Im int Vu conj(u)| <= 2 int |V||u|^2" + tag,
                                  std::abs(vu.real() + sg * vu.imag()), 2.0 * av));
        out.chain.push_back(chain("(1 - 4 Lambda/(d-2)) int|grad u|^2 <= int|grad u|^2 + Re + -Im" + tag,
                                  out.coefficient * g, g + vu.real() + sg * vu.imag()));
    }
    out.chain.push_back(chain("int |V||u|^2 <= ||xVu|| ||u/x||", av, std::sqrt(xv * hx)));
    out.chain.push_back(chain("||xVu|| <= Lambda ||grad u||", std::sqrt(xv), Lam.value * std::sqrt(g)));
    out.chain.push_back(chain("||u/x|| <= 2/(d-2) ||grad u||", std::sqrt(hx), hard * std::sqrt(g)));

    bool ok = true;
    for (const auto& c : out.chain) ok = ok && c.holds;
    for (const auto& id : out.identities) ok = ok && id.residual <= 1e-6;
    out.verdict = ok ? Verdict::pass : Verdict::fail;
    return out;
}

RadiTerms radi_identity_terms(const TestFunction& u, cplx lambda, const Potential& V, const IdentityOptions& opts) {
    require_same_dimension(u);
    if (V.dimension() != u.d) throw PreconditionError("radi_identity_terms: dimension mismatch");
    if (!(lambda.real() > 0.0)) throw PreconditionError("radi_identity_terms: requires Re lambda > 0");
    if (std::abs(lambda.imag()) > lambda.real())
        throw PreconditionError("radi_identity_terms: requires |Im lambda| <= Re lambda");
    const int d = u.d;
    const double l1 = lambda.real(), l2 = lambda.imag(), mu = std::sqrt(l1), s = gauge_sign(lambda);
    const double kappa = std::abs(l2) / mu;
    const TestFunction um = gauge_transform(u, lambda, -1);

    double gm_final = 0.0, img_final = 0.0, n0_final = 0.0, i1_final = 0.0, i2_final = 0.0;
    RadiTerms out;
    out.identity = evaluate(u, opts, [&](const Quadrature& q) {
        double gm = 0.0, rgm = 0.0, m_r = 0.0, rv1 = 0.0, i1 = 0.0, n0 = 0.0;
        cplx i2 = 0.0, gu = 0.0, rgd = 0.0, rgu = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double r = q.nodes[i], w = q.weights[i];
            const Shell sh = shell(u, r, lambda);
            const Shell sm = shell(um, r, lambda);
            const cplx v = V.radial_profile(r);
            const double m = sh.Ac * std::norm(sh.h);
            const cplx combo = std::conj(sh.R - I_UNIT * s * mu * sh.h);
            const cplx gmis = sh.F - v * sh.h;  // probe mismatch amplitude
            gm += w * grad2(sm);
            rgm += w * r * grad2(sm);
            m_r += w * m / r;
            rv1 += w * r * v.real() * m;
            i1 += w * V.d_r_rReV(r) * m;
            i2 += w * r * v.imag() * sh.Ac * sh.h * combo;
            gu += w * sh.Ac * gmis * std::conj(sh.h);
            rgd += w * r * sh.Ac * gmis * combo;
            rgu += w * r * sh.Ac * gmis * std::conj(sh.h);
            n0 += w * m;
        }
        IdentityResult res;
        res.id = "radi";
        res.context = context_of(u, lambda, "") + ";V=" + V.name();
        const double Ival = gm + kappa * rgm - 0.5 * (d - 1) * kappa * m_r + kappa * rv1;
        const double I1 = i1, I2 = 2.0 * i2.imag();
        const double I3 = (1.0 - d) * gu.real() - 2.0 * rgd.real() - kappa * rgu.real();
        res.terms = {{"int |grad u^-|^2", gm},
                     {"|lambda2|/sqrt(lambda1) int |x||grad u^-|^2", kappa * rgm},
                     {"-(d-1)/2 |lambda2|/sqrt(lambda1) int |u|^2/|x|", -0.5 * (d - 1) * kappa * m_r},
                     {"|lambda2|/sqrt(lambda1) int |x| V1 |u|^2", kappa * rv1},
                     {"I", Ival},
                     {"I1", I1},
                     {"I2", I2},
                     {"I3", I3}};
        res.lhs = Ival;
        res.rhs = I1 + I2 + I3;
        gm_final = gm;
        img_final = gu.imag();
        n0_final = n0;
        i1_final = I1;
        i2_final = I2;
        return res;
    });

    const BConstants b = b_constants(V);
    if (b.b1.divergent || b.b2.divergent || b.b3.divergent || b.b1.value > 1.0) return out;
    const double hard = 2.0 / (d - 2);
    const double eps2 = std::abs(img_final);
    out.chain.push_back(chain("I1 <= b2^2 ||grad u^-||^2", i1_final, b.b2.value * b.b2.value * gm_final));
    out.chain.push_back(chain("|I2| <= 2 b3 ||grad u^-||^2", std::abs(i2_final), 2.0 * b.b3.value * gm_final));
    if (l2 != 0.0)
        out.chain.push_back(chain("||u||^2 <= (2 b3/(d-2) ||grad u^-||^2 + eps^2)/|lambda2|", n0_final,
                                  (hard * b.b3.value * gm_final + eps2) / std::abs(l2)));
    const double lower = (1.0 - 0.25 * std::sqrt(b.b3.value) * std::pow(hard, 1.5)) * gm_final -
                         0.25 * hard * std::sqrt(gm_final) * std::sqrt(eps2);
    double Ival = 0.0;
    for (const auto& t : out.identity.terms)
        if (t.name == "I") Ival = t.value.real();
    out.chain.push_back(chain("[1 - sqrt(b3)/4 (2/(d-2))^(3/2)] ||grad u^-||^2 - correction <= I", lower, Ival));

    bool ok = out.identity.residual <= 1e-6;
    for (const auto& c : out.chain) ok = ok && c.holds;
    out.verdict = ok ? Verdict::pass : Verdict::fail;
    return out;
}

MagneticSmoke magnetic_identity_smoke(const TestFunction& u, cplx lambda, const Potential& V,
                                      const MagneticPotential& A, int samples, unsigned seed) {
    if (u.d != 3 || A.dimension() != 3 || V.dimension() != 3)
        throw PreconditionError("magnetic_identity_smoke: requires d = 3");
    if (!(lambda.real() > 0.0)) throw PreconditionError("magnetic_identity_smoke: requires Re lambda > 0");
    if (!std::isfinite(u.support)) throw PreconditionError("magnetic_identity_smoke: u must be compactly supported");
    MagneticSmoke out;
    const double mu = std::sqrt(lambda.real()), s = gauge_sign(lambda);
    const TestFunction um = gauge_transform(u, lambda, -1);

    auto grad_A = [&](const TestFunction& w, std::span<const double> x) {
        auto g = w.gradient(x);
        const cplx val = w.value(x);
        const auto a = A.A(x);
        for (int j = 0; j < 3; ++j) g[j] += I_UNIT * a[j] * val;
        return g;
    };

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int taken = 0;
    while (taken < samples) {
        double x[3] = {U(rng), U(rng), U(rng)};
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        if (r > 1.0 || r < 1e-3) continue;
        for (double& c : x) c *= 0.95 * u.support;
        ++taken;
        const auto bt = b_tau(A, x);
        const double rr = 0.95 * u.support * r;
        double nb = 0.0, dotx = 0.0;
        for (int j = 0; j < 3; ++j) {
            nb += bt[j] * bt[j];
            dotx += bt[j] * x[j];
        }
        nb = std::sqrt(nb);
        out.max_b_tau = std::max(out.max_b_tau, nb);
        out.tangential_max = std::max(out.tangential_max, std::abs(dotx) / rr);
        const auto ga = grad_A(u, x), gm = grad_A(um, x);
        cplx lhs = 0.0, rhs = 0.0;
        for (int j = 0; j < 3; ++j) {
            lhs += bt[j] * gm[j];
            rhs += bt[j] * ga[j];
        }
        rhs *= std::exp(-I_UNIT * s * mu * rr);
        out.gauge_max = std::max(out.gauge_max, std::abs(lhs - rhs));
    }

    // Spherical product rule: radial Gauss panels, Gauss in cos(theta),
    // trapezoid in phi.
    const Quadrature rad = gauss_rule(u, 48);
    const Quadrature ct = gauss_legendre(16, -1.0, 1.0);
    const int nphi = 32;
    double n0 = 0.0, ga2 = 0.0;
    cplx vu = 0.0, gu = 0.0;
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        const double r = rad.nodes[i];
        for (std::size_t a = 0; a < ct.nodes.size(); ++a) {
            const double c = ct.nodes[a], sn = std::sqrt(1.0 - c * c);
            for (int p = 0; p < nphi; ++p) {
                const double ph = 2.0 * std::numbers::pi * p / nphi;
                const double x[3] = {r * sn * std::cos(ph), r * sn * std::sin(ph), r * c};
                const double w = rad.weights[i] * r * r * ct.weights[a] * 2.0 * std::numbers::pi / nphi;
                const cplx val = u.value(x);
                const auto g = u.gradient(x);
                const auto av = A.A(x);
                const double divA = A.divergence(x);
                cplx adotg = 0.0;
                double a2 = 0.0, gA = 0.0;
                for (int j = 0; j < 3; ++j) {
                    adotg += av[j] * g[j];
                    a2 += av[j] * av[j];
                    gA += std::norm(g[j] + I_UNIT * av[j] * val);
                }
                const cplx lapA = u.laplacian(x) + I_UNIT * divA * val + 2.0 * I_UNIT * adotg - a2 * val;
                const cplx f = lapA + lambda * val;
                const cplx v = V.eval(x);
                n0 += w * std::norm(val);
                ga2 += w * gA;
                vu += w * v * std::norm(val);
                gu += w * (f - v * val) * std::conj(val);
            }
        }
    }
    IdentityResult& id = out.identity;
    id.id = "magnetic-id1";
    id.context = context_of(u, lambda, "") + ";A=" + A.name() + ";V=" + V.name();
    id.lhs = lambda.real() * n0 - ga2;
    id.rhs = vu.real() + gu.real();
    id.residual = residual_of(id.lhs, id.rhs, n0);
    id.terms = {{"lambda1 int |u|^2", lambda.real() * n0},
                {"-int |grad_A u|^2", -ga2},
                {"Re int V|u|^2", vu.real()},
                {"Re int (f - Vu) conj(u)", gu.real()}};
    return out;
}

std::vector<double> radial_cross_check(const TestFunction& u, cplx lambda, const RadialMultiplier& G1) {
    const Quadrature q = gauss_rule(u, 64);
    double a = 0.0, b = 0.0;
    cplx c = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double r = q.nodes[i], w = q.weights[i];
        const Shell s = shell(u, r, lambda);
        const double G = G1.g[0](r);
        a += w * G * s.Ac * std::norm(s.h);
        b += w * G * grad2(s);
        c += w * G * s.Ac * s.F * std::conj(s.h);
    }
    return {a, b, c.real()};
}

std::vector<double> box_cross_check(const TestFunction& u, cplx lambda, const RadialMultiplier& G1, int n) {
    if (u.d != 3) throw PreconditionError("box_cross_check: requires d = 3");
    if (!std::isfinite(u.support)) throw PreconditionError("box_cross_check: u must be compactly supported");
    const BoxGrid grid = BoxGrid::make(3, n, u.support);
    const std::size_t N = grid.cardinality();
    std::vector<double> a(N), b(N), c(N);
    parallel_for(N, [&](std::size_t k) {
        double x[3];
        const double w = grid.point(k, x);
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        const double G = G1.g[0](r);
        const cplx val = u.value(x);
        double g2 = 0.0;
        for (const cplx& gj : u.gradient(x)) g2 += std::norm(gj);
        const cplx f = u.laplacian(x) + lambda * val;
        a[k] = w * G * std::norm(val);
        b[k] = w * G * g2;
        c[k] = w * G * (f * std::conj(val)).real();
    });
    double sa = 0.0, sb = 0.0, sc = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        sa += a[k];
        sb += b[k];
        sc += c[k];
    }
    return {sa, sb, sc};
}

}  // namespace spectra_cert
