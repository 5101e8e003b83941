#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spectra_cert/bs.hpp"
#include "spectra_cert/conditions.hpp"

namespace spectra_cert {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Constant infinite() { return {kInf, true}; }

void require_dim(int d) {
    if (d < 3) throw PreconditionError("dimension must be >= 3");
}

void require_d3(const Potential& V, const char* op) {
    if (V.dimension() != 3) throw UnsupportedError(std::string(op) + " requires dimension 3");
}

// Pointwise sups of r^2 f(r) grow without bound when V is more singular than
// r^-2 at the origin or decays slower than r^-2.
bool pointwise_sup_diverges(const Potential& V) {
    return V.origin_singularity_order() > 2.0 || V.decay_order() < 2.0;
}

// sup_{r > 0} f(r): log-spaced scan over 12 decades, one-sided samples at the
// breakpoints, then golden-section refinement around the best sample.
double radial_sup(const std::function<double(double)>& f, std::span<const double> breakpoints) {
    const int per_decade = 2000;
    const double lo = -6.0, hi = 6.0;
    const int count = static_cast<int>((hi - lo) * per_decade);
    const double step = (hi - lo) / count;
    double best = 0.0, best_r = 0.0;
    auto visit = [&](double r) {
        const double v = f(r);
        if (v > best) best = v, best_r = r;
    };
    for (int i = 0; i <= count; ++i) visit(std::pow(10.0, lo + i * step));
    for (double b : breakpoints) {
        visit(b * (1.0 - 1e-14));
        visit(b * (1.0 + 1e-14));
    }
    if (best_r == 0.0) return best;
    bool at_breakpoint = false;
    for (double b : breakpoints) at_breakpoint = at_breakpoint || std::abs(best_r - b) <= 1e-12 * b;
    if (at_breakpoint) return best;
    // The bracket must not straddle a jump.
    double a = best_r * std::pow(10.0, -step), c = best_r * std::pow(10.0, step);
    for (double b : breakpoints) {
        if (b > a && b <= best_r) a = b * (1.0 + 1e-14);
        if (b < c && b >= best_r) c = b * (1.0 - 1e-14);
    }
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = c - g * (c - a), x2 = a + g * (c - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && c - a > 1e-15 * c; ++it) {
        if (f1 < f2) {
            a = x1, x1 = x2, f1 = f2;
            x2 = a + g * (c - a), f2 = f(x2);
        } else {
            c = x2, x2 = x1, f2 = f1;
            x1 = c - g * (c - a), f1 = f(x1);
        }
    }
    return std::max({best, f1, f2});
}

// sup r^2 f(r), or +inf when the metadata says it diverges and f is not
// identically zero on the scan.
Constant weighted_sup(const Potential& V, const std::function<double(double)>& f) {
    const auto bps = V.breakpoints();
    const double s = radial_sup([&](double r) { return r * r * f(r); }, bps);
    if (s > 0.0 && pointwise_sup_diverges(V)) return infinite();
    return {s, false};
}

double hardy_scale(int d) { return 0.5 * (d - 2); }

// Composite Gauss rule on [0, R] split at the breakpoints, with about
// `total_panels` panels shared in proportion to segment length.
Quadrature split_rule(double R, std::span<const double> breakpoints, int total_panels, int order) {
    std::vector<double> cuts{0.0};
    for (double b : breakpoints)
        if (b > 0.0 && b < R) cuts.push_back(b);
    cuts.push_back(R);
    Quadrature q;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const int panels = std::max(20, static_cast<int>(std::ceil((cuts[i + 1] - cuts[i]) / R * total_panels)));
        const Quadrature piece = composite_gauss_legendre(panels, order, cuts[i], cuts[i + 1]);
        q.nodes.insert(q.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        q.weights.insert(q.weights.end(), piece.weights.begin(), piece.weights.end());
    }
    return q;
}

// int_0^R ln|(r + s)/(r - s)| ds.
double log_kernel_row_integral(double r, double R) {
    auto xlogx = [](double x) { return x == 0.0 ? 0.0 : x * std::log(x); };
    return xlogx(R + r) - xlogx(std::abs(R - r)) - 2.0 * xlogx(r);
}

}  // namespace

double hardy_constant(int d) {
    require_dim(d);
    const double c = hardy_scale(d);
    return c * c;
}

Constant lambda_constant(const Potential& V) {
    const int d = V.dimension();
    const Constant s = weighted_sup(V, [&](double r) { return V.abs(r); });
    if (s.divergent) return s;
    return {s.value * (2.0 / (d - 2)), false};
}

Constant subordination_a_pointwise(const Potential& V) {
    const int d = V.dimension();
    // sup |V| r^2 / ((d-2)/2)^2 written as (sup |V| r^2 2/(d-2)) 2/(d-2).
    const Constant L = lambda_constant(V);
    if (L.divergent) return L;
    return {L.value * (2.0 / (d - 2)), false};
}

double subordination_a_variational(const Potential& V, const RadialGrid& grid, int ell_max) {
    require_d3(V, "subordination_a_variational");
    if (!V.is_radial()) throw UnsupportedError("subordination_a_variational requires a radial potential");
    if (V.is_zero()) return 0.0;
    return assemble_bs(V, 0.0, grid, ell_max).norm;
}

ExtrapolatedConstant subordination_a_extrapolated(const Potential& V, std::span<const int> ns, double r_max,
                                                  int ell_max) {
    ExtrapolatedConstant out;
    for (int n : ns) {
        out.ns.push_back(n);
        out.values.push_back(subordination_a_variational(V, RadialGrid::graded(n, r_max, 2.0), ell_max));
    }
    out.extrapolated = V.is_zero() ? 0.0 : log_richardson(out.ns, out.values);
    return out;
}

Constant rollnik_norm(const Potential& V) {
    require_d3(V, "rollnik_norm");
    if (V.is_zero()) return {0.0, false};
    if (V.origin_singularity_order() >= 2.0 || V.decay_order() <= 2.0) return infinite();
    const double R = V.effective_radius();
    if (!std::isfinite(R)) return infinite();
    const auto bps = V.breakpoints();
    const Quadrature q = split_rule(R, bps, 400, 8);
    const std::size_t n = q.nodes.size();
    // ||V||_R^2 = 8 pi^2 int int f(r) f(s) ln|(r+s)/(r-s)| dr ds with f = |V| r;
    // the inner integral subtracts f(r) and adds it back in closed form.
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = V.abs(q.nodes[i]) * q.nodes[i];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] == 0.0) continue;
        const double r = q.nodes[i];
        double inner = f[i] * log_kernel_row_integral(r, R);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) continue;
            const double s = q.nodes[k];
            inner += q.weights[k] * (f[k] - f[i]) * std::log(std::abs((r + s) / (r - s)));
        }
        total += q.weights[i] * f[i] * inner;
    }
    return {std::sqrt(8.0 * kPi * kPi * total), false};
}

double frank_threshold() { return std::pow(3.0, 1.5) / (4.0 * kPi * kPi); }

FrankResult frank_l32(const Potential& V) {
    require_d3(V, "frank_l32");
    FrankResult out;
    if (V.is_zero()) {
        out.passes = 0.0 < frank_threshold();
        return out;
    }
    const double R = V.effective_radius();
    if (V.origin_singularity_order() >= 2.0 || V.decay_order() <= 2.0 || !std::isfinite(R)) {
        out.value = kInf;
        out.divergent = true;
        out.passes = false;
        return out;
    }
    const auto bps = V.breakpoints();
    out.value = 4.0 * kPi *
                integrate_log_mapped([&](double r) { return std::pow(V.abs(r), 1.5) * r * r; }, 1e-12 * R, R, bps);
    out.passes = out.value < frank_threshold();
    return out;
}

double sobolev_chain_factor() { return std::pow(2.0, 4.0 / 3.0) / (3.0 * std::pow(kPi, 4.0 / 3.0)); }

Constant sobolev_chain_a(const Potential& V) {
    const FrankResult fr = frank_l32(V);
    if (fr.divergent) return infinite();
    return {std::pow(fr.value, 2.0 / 3.0) * sobolev_chain_factor(), false};
}

double lambda_condition_lhs(int d, double Lambda) {
    require_dim(d);
    return 2.0 * (2.0 * d - 3.0) / (d - 2.0) * Lambda + std::sqrt(2.0 / (d - 2.0)) * std::pow(Lambda, 1.5);
}

Thresholds thresholds(int d) {
    require_dim(d);
    Thresholds t;
    t.thm12_b_max = (d - 2.0) / (5.0 * d - 8.0);
    t.lambda_star = find_root_increasing([d](double L) { return lambda_condition_lhs(d, L) - 1.0; }, 0.0, 0.5 * (d - 2));
    const double beta = std::pow(2.0 / (d - 2.0), 1.5);
    t.sqrt_b3_max = 8.0 / (beta + std::sqrt(beta * beta + 128.0));
    return t;
}

BConstants b_constants(const Potential& V) {
    const int d = V.dimension();
    const double c2 = hardy_constant(d);
    BConstants out;
    const Constant s1 = weighted_sup(V, [&](double r) { return V.re_minus(r); });
    out.b1 = s1.divergent ? s1 : Constant{std::sqrt(s1.value / c2), false};

    bool positive_jump = false;
    for (double j : V.r_ReV_jumps()) positive_jump = positive_jump || j > 0.0;
    if (positive_jump) {
        out.b2 = infinite();
    } else {
        const Constant s2 = weighted_sup(V, [&](double r) { return std::max(V.d_r_rReV(r), 0.0); });
        out.b2 = s2.divergent ? s2 : Constant{std::sqrt(s2.value / c2), false};
    }

    const Constant s3 = weighted_sup(V, [&](double r) { return std::abs(V.im_part(r)); });
    out.b3 = s3.divergent ? s3 : Constant{s3.value * (2.0 / (d - 2)), false};
    return out;
}

double weighted_form_constant(const std::function<double(double)>& W, const RadialGrid& grid, int ell_max) {
    const std::size_t n = grid.size();
    std::vector<double> s(n);
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = W(grid.nodes[j]);
        if (w < 0.0) throw PreconditionError("weighted_form_constant: weight must be nonnegative");
        s[j] = std::sqrt(grid.weights[j] * w) * grid.nodes[j];
        any = any || w > 0.0;
    }
    if (!any) return 0.0;
    double best = 0.0;
    DenseComplexMatrix A(n);
    for (int l = 0; l <= ell_max; ++l) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k <= j; ++k) {
                const double rl = grid.nodes[k], rg = grid.nodes[j];
                const double g = std::pow(rl / rg, l) / ((2.0 * l + 1.0) * rg);
                A(j, k) = A(k, j) = s[j] * g * s[k];
            }
        best = std::max(best, largest_singular_value(A));
    }
    return best;
}

BConstantsVariational b_constants_variational(const Potential& V, const RadialGrid& grid, int ell_max) {
    require_d3(V, "b_constants_variational");
    BConstantsVariational out;
    out.b1 = std::sqrt(weighted_form_constant([&](double r) { return V.re_minus(r); }, grid, ell_max));
    bool positive_jump = false;
    for (double j : V.r_ReV_jumps()) positive_jump = positive_jump || j > 0.0;
    out.b2 = positive_jump ? kInf
                           : std::sqrt(weighted_form_constant(
                                 [&](double r) { return std::max(V.d_r_rReV(r), 0.0); }, grid, ell_max));
    out.b3 = std::sqrt(weighted_form_constant(
        [&](double r) { return r * r * V.im_part(r) * V.im_part(r); }, grid, ell_max));
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string to_string(AMethod m) { return m == AMethod::variational ? "variational" : "pointwise-hardy"; }

std::map<std::string, Verdict> evaluate_verdicts(const ConditionReport& rep, int d) {
    require_dim(d);
    std::map<std::string, Verdict> v;
    auto below = [](const Constant& c, double bound) { return !c.divergent && c.value < bound; };

    if (d != 3) {
        v["thm11"] = Verdict::fail;
    } else if (rep.a_method == AMethod::pointwise_hardy && rep.a < 1.0) {
        v["thm11"] = Verdict::pass;
    } else if (rep.a_variational) {
        v["thm11"] = *rep.a_variational < 1.0 ? Verdict::pass : Verdict::fail;
    } else {
        v["thm11"] = Verdict::inconclusive;
    }

    const Thresholds t = thresholds(d);
    v["thm12"] = below(rep.Lambda, t.thm12_b_max) ? Verdict::pass : Verdict::fail;

    bool thm13 = !rep.b1.divergent && !rep.b2.divergent && !rep.b3.divergent;
    if (thm13) {
        const double b1 = rep.b1.value, b2 = rep.b2.value, b3 = rep.b3.value;
        thm13 = b1 * b1 < 1.0 - 2.0 * b3 / (d - 2.0) &&
                b2 * b2 + 2.0 * b3 + 0.25 * std::sqrt(b3) * std::pow(2.0 / (d - 2.0), 1.5) < 1.0;
    }
    v["thm13"] = thm13 ? Verdict::pass : Verdict::fail;

    v["thm51"] = !rep.Lambda.divergent && lambda_condition_lhs(d, rep.Lambda.value) < 1.0 ? Verdict::pass
                                                                                          : Verdict::fail;
    return v;
}

ConditionReport check_conditions(const Potential& V, const ConditionOptions& opts) {
    const int d = V.dimension();
    ConditionReport rep;
    const Constant a_pw = subordination_a_pointwise(V);
    const bool variational_ok = opts.variational && d == 3 && V.is_radial() && !V.is_zero() &&
                                V.origin_singularity_order() <= 2.0 && V.decay_order() >= 2.0;
    if (variational_ok)
        rep.a_variational = subordination_a_variational(V, RadialGrid::graded(opts.grid_n, opts.r_max, 2.0), opts.ell_max);
    if (!a_pw.divergent) {
        rep.a = a_pw.value;
        rep.a_method = AMethod::pointwise_hardy;
    } else if (rep.a_variational) {
        rep.a = *rep.a_variational;
        rep.a_method = AMethod::variational;
    } else {
        rep.a = kInf;
        rep.a_method = AMethod::pointwise_hardy;
    }
    if (d == 3) {
        rep.rollnik = rollnik_norm(V);
        const FrankResult fr = frank_l32(V);
        rep.frank_l32 = Constant{fr.value, fr.divergent};
        rep.sobolev_chain_a = sobolev_chain_a(V);
    }
    rep.Lambda = lambda_constant(V);
    const BConstants b = b_constants(V);
    rep.b1 = b.b1;
    rep.b2 = b.b2;
    rep.b3 = b.b3;
    rep.verdicts = evaluate_verdicts(rep, d);
    return rep;
}

}  // namespace spectra_cert
