#include <cmath>
#include <limits>

#include "spectra_cert/potential.hpp"

namespace spectra_cert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
    const char* name;
    PotentialKind kind;
    std::vector<std::string> keys;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e{
        {"zero", PotentialKind::zero, {}},
        {"hardy", PotentialKind::hardy, {"a"}},
        {"coulomb_repulsive", PotentialKind::coulomb_repulsive, {"c"}},
        {"imaginary_hardy", PotentialKind::imaginary_hardy, {"beta"}},
        {"gaussian", PotentialKind::gaussian, {"V0", "c_im"}},
        {"yukawa", PotentialKind::yukawa, {"g", "mu"}},
        {"square_well", PotentialKind::square_well, {"V0", "R0"}},
    };
    return e;
}

const Entry& entry_for(PotentialKind k) {
    for (const auto& e : entries())
        if (e.kind == k) return e;
    throw PreconditionError("potential: unknown kind");
}

void require_positive(const ParamMap& p, const char* key, const std::string& name) {
    if (!(p.at(key) > 0.0))
        throw PreconditionError("potential " + name + ": parameter " + key + " must be positive");
}

}  // namespace

Potential::Potential(PotentialKind kind, int dimension, ParamMap params)
    : kind_(kind), name_(entry_for(kind).name), d_(dimension), params_(std::move(params)) {
    if (d_ < 3) throw PreconditionError("potential: dimension must be >= 3");
    switch (kind_) {
        case PotentialKind::zero: singularity_ = 0.0, decay_ = kInf; break;
        case PotentialKind::hardy: singularity_ = 2.0, decay_ = 2.0; break;
        case PotentialKind::coulomb_repulsive: singularity_ = 1.0, decay_ = 1.0; break;
        case PotentialKind::imaginary_hardy: singularity_ = 2.0, decay_ = 2.0; break;
        case PotentialKind::gaussian: singularity_ = 0.0, decay_ = kInf; break;
        case PotentialKind::yukawa: singularity_ = 1.0, decay_ = kInf; break;
        case PotentialKind::square_well: singularity_ = 0.0, decay_ = kInf; break;
    }
}

double Potential::p(const char* key) const { return params_.at(key); }

cplx Potential::radial_profile(double r) const {
    cplx v;
    switch (kind_) {
        case PotentialKind::zero: v = 0.0; break;
        case PotentialKind::hardy: {
            const double c = 0.5 * (d_ - 2);
            v = -p("a") * c * c / (r * r);
            break;
        }
        case PotentialKind::coulomb_repulsive: v = p("c") / r; break;
        case PotentialKind::imaginary_hardy: v = cplx(0.0, p("beta") / (r * r)); break;
        case PotentialKind::gaussian: v = cplx(-p("V0"), p("c_im")) * std::exp(-r * r); break;
        case PotentialKind::yukawa: v = -p("g") * std::exp(-p("mu") * r) / r; break;
        case PotentialKind::square_well: v = r < p("R0") ? -p("V0") : 0.0; break;
    }
    return scale_ * v;
}

cplx Potential::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != d_) throw PreconditionError("potential: point has wrong dimension");
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return radial_profile(std::sqrt(r2));
}

double Potential::d_r_rReV(double r) const {
    double v = 0.0;
    switch (kind_) {
        case PotentialKind::zero:
        case PotentialKind::coulomb_repulsive:
        case PotentialKind::imaginary_hardy: v = 0.0; break;
        case PotentialKind::hardy: {
            const double c = 0.5 * (d_ - 2);
            v = p("a") * c * c / (r * r);
            break;
        }
        case PotentialKind::gaussian: v = -p("V0") * (1.0 - 2.0 * r * r) * std::exp(-r * r); break;
        case PotentialKind::yukawa: v = p("g") * p("mu") * std::exp(-p("mu") * r); break;
        case PotentialKind::square_well: v = r < p("R0") ? -p("V0") : 0.0; break;
    }
    return scale_ * v;
}

double Potential::re_plus(double r) const { return std::max(radial_profile(r).real(), 0.0); }
double Potential::re_minus(double r) const { return std::max(-radial_profile(r).real(), 0.0); }

double Potential::effective_radius() const {
    switch (kind_) {
        case PotentialKind::zero: return 1.0;
        case PotentialKind::gaussian: return std::sqrt(50.0);
        case PotentialKind::yukawa: return 50.0 / p("mu");
        case PotentialKind::square_well: return p("R0");
        default: return kInf;
    }
}

std::vector<double> Potential::breakpoints() const {
    if (kind_ == PotentialKind::square_well) return {p("R0")};
    return {};
}

std::vector<double> Potential::r_ReV_jumps() const {
    if (kind_ == PotentialKind::square_well) return {scale_ * p("V0") * p("R0")};
    return {};
}

Potential Potential::scaled(double t) const {
    Potential q = *this;
    q.scale_ *= t;
    return q;
}

Potential catalog(const std::string& name, const ParamMap& params, int dimension) {
    const Entry* e = nullptr;
    for (const auto& cand : entries())
        if (name == cand.name) e = &cand;
    if (e == nullptr) throw PreconditionError("potential: unknown name '" + name + "'");
    for (const auto& [k, v] : params) {
        bool known = false;
        for (const auto& key : e->keys) known = known || key == k;
        if (!known) throw PreconditionError("potential " + name + ": unknown parameter '" + k + "'");
        if (!std::isfinite(v)) throw PreconditionError("potential " + name + ": parameter " + k + " must be finite");
    }
    ParamMap full = params;
    if (e->kind == PotentialKind::gaussian && !full.count("c_im")) full["c_im"] = 0.0;
    for (const auto& key : e->keys)
        if (!full.count(key)) throw PreconditionError("potential " + name + ": missing parameter '" + key + "'");

    switch (e->kind) {
        case PotentialKind::hardy: require_positive(full, "a", name); break;
        case PotentialKind::coulomb_repulsive: require_positive(full, "c", name); break;
        case PotentialKind::imaginary_hardy: require_positive(full, "beta", name); break;
        case PotentialKind::yukawa:
            require_positive(full, "g", name);
            require_positive(full, "mu", name);
            break;
        case PotentialKind::square_well:
            require_positive(full, "V0", name);
            require_positive(full, "R0", name);
            break;
        default: break;
    }
    return Potential(e->kind, dimension, std::move(full));
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.emplace_back(e.name);
    return out;
}

std::vector<std::string> catalog_param_keys(const std::string& name) {
    for (const auto& e : entries())
        if (name == e.name) return e.keys;
    throw PreconditionError("potential: unknown name '" + name + "'");
}

cplx complex_signum(cplx v) {
    const double a = std::abs(v);
    return a == 0.0 ? cplx{0.0} : v / a;
}

}  // namespace spectra_cert
