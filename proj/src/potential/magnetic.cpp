#include <cmath>

#include "spectra_cert/potential.hpp"

namespace spectra_cert {

MagneticPotential::MagneticPotential(MagneticKind kind, int dimension, double strength)
    : kind_(kind), d_(dimension), strength_(strength) {
    if (d_ < 3) throw PreconditionError("magnetic potential: dimension must be >= 3");
    switch (kind_) {
        case MagneticKind::zero: name_ = "zero"; break;
        case MagneticKind::azimuthal_inverse_square: name_ = "azimuthal_inverse_square"; break;
        case MagneticKind::uniform: name_ = "uniform"; break;
    }
}

MagneticPotential MagneticPotential::zero(int dimension) { return {MagneticKind::zero, dimension, 0.0}; }

MagneticPotential MagneticPotential::azimuthal_inverse_square(double c) {
    return {MagneticKind::azimuthal_inverse_square, 3, c};
}

MagneticPotential MagneticPotential::uniform(double b) { return {MagneticKind::uniform, 3, b}; }

MagneticPotential MagneticPotential::finite_difference_only() const {
    MagneticPotential m = *this;
    m.analytic_ = false;
    return m;
}

std::vector<double> MagneticPotential::A(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != d_) throw PreconditionError("magnetic potential: wrong point dimension");
    std::vector<double> a(d_, 0.0);
    switch (kind_) {
        case MagneticKind::zero: break;
        case MagneticKind::azimuthal_inverse_square: {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            a[0] = -strength_ * x[1] / r2;
            a[1] = strength_ * x[0] / r2;
            break;
        }
        case MagneticKind::uniform:
            a[0] = -0.5 * strength_ * x[1];
            a[1] = 0.5 * strength_ * x[0];
            break;
    }
    return a;
}

double MagneticPotential::divergence(std::span<const double>) const { return 0.0; }

std::vector<double> MagneticPotential::B_analytic(std::span<const double> x) const {
    std::vector<double> B(d_ * d_, 0.0);
    auto set = [&](int i, int j, double v) {
        B[i * d_ + j] = v;
        B[j * d_ + i] = -v;
    };
    switch (kind_) {
        case MagneticKind::zero: break;
        case MagneticKind::azimuthal_inverse_square: {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            const double r4 = r2 * r2, c = strength_;
            set(0, 1, 2.0 * c * (r2 - x[0] * x[0] - x[1] * x[1]) / r4);
            for (int k = 2; k < d_; ++k) {
                set(0, k, -2.0 * c * x[1] * x[k] / r4);
                set(1, k, 2.0 * c * x[0] * x[k] / r4);
            }
            break;
        }
        case MagneticKind::uniform: set(0, 1, strength_); break;
    }
    return B;
}

std::vector<double> MagneticPotential::B_finite_difference(std::span<const double> x, double h) const {
    double scale = 1.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    const double step = h * scale;
    // J[i][j] = d_i A_j
    std::vector<double> J(d_ * d_);
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    for (int i = 0; i < d_; ++i) {
        xp[i] = x[i] + step;
        xm[i] = x[i] - step;
        const auto ap = A(xp), am = A(xm);
        for (int j = 0; j < d_; ++j) J[i * d_ + j] = (ap[j] - am[j]) / (2.0 * step);
        xp[i] = xm[i] = x[i];
    }
    std::vector<double> B(d_ * d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) B[i * d_ + j] = J[i * d_ + j] - J[j * d_ + i];
    return B;
}

std::vector<double> MagneticPotential::B(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != d_) throw PreconditionError("magnetic potential: wrong point dimension");
    return analytic_ ? B_analytic(x) : B_finite_difference(x);
}

MagneticPotential magnetic_catalog(const std::string& name, const ParamMap& params, int dimension) {
    auto get = [&](const char* k, double def) {
        auto it = params.find(k);
        return it == params.end() ? def : it->second;
    };
    if (name == "zero") return MagneticPotential::zero(dimension);
    if (dimension != 3) throw PreconditionError("magnetic potential " + name + ": defined for dimension 3 only");
    if (name == "azimuthal_inverse_square") return MagneticPotential::azimuthal_inverse_square(get("c", 1.0));
    if (name == "uniform") return MagneticPotential::uniform(get("b", 1.0));
    throw PreconditionError("magnetic potential: unknown name '" + name + "'");
}

std::vector<double> b_tau(const MagneticPotential& mag, std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    if (r2 == 0.0) throw PreconditionError("b_tau: x must be nonzero");
    const double r = std::sqrt(r2);
    const int d = mag.dimension();
    const auto B = mag.B(x);
    std::vector<double> out(d, 0.0);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) out[j] += x[i] / r * B[i * d + j];
    return out;
}

}  // namespace spectra_cert
