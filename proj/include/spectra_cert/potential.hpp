#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spectra_cert/errors.hpp"

namespace spectra_cert {

using cplx = std::complex<double>;
using ParamMap = std::map<std::string, double>;

enum class PotentialKind { zero, hardy, coulomb_repulsive, imaginary_hardy, gaussian, yukawa, square_well };

// Closed-form radial complex potential on R^d. All catalog entries are radial;
// `scale` multiplies the whole profile (used for scaling-law checks).
class Potential {
public:
    Potential() = default;
    Potential(PotentialKind kind, int dimension, ParamMap params);

    PotentialKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const ParamMap& params() const { return params_; }
    int dimension() const { return d_; }
    bool is_radial() const { return true; }
    bool is_zero() const { return kind_ == PotentialKind::zero || scale_ == 0.0; }

    cplx eval(std::span<const double> x) const;
    cplx radial_profile(double r) const;
    // d/dr (r Re V(r)), away from breakpoints.
    double d_r_rReV(double r) const;

    double re_plus(double r) const;
    double re_minus(double r) const;
    double im_part(double r) const { return radial_profile(r).imag(); }
    double abs(double r) const { return std::abs(radial_profile(r)); }

    // s with |V| = O(|x|^-s) at the origin.
    double origin_singularity_order() const { return singularity_; }
    // t with |V| = O(|x|^-t) at infinity; +inf when decay is exponential or
    // the support is compact.
    double decay_order() const { return decay_; }
    // Radius beyond which |V| < 1e-20 * (typical size); +inf for algebraic decay.
    double effective_radius() const;
    // Radii where the profile jumps.
    std::vector<double> breakpoints() const;
    // Jump of r Re V across each breakpoint (value outside minus inside).
    std::vector<double> r_ReV_jumps() const;

    Potential scaled(double t) const;
    double scale() const { return scale_; }

private:
    PotentialKind kind_ = PotentialKind::zero;
    std::string name_ = "zero";
    int d_ = 3;
    ParamMap params_;
    double scale_ = 1.0;
    double singularity_ = 0.0;
    double decay_ = 0.0;
    double p(const char* key) const;
};

Potential catalog(const std::string& name, const ParamMap& params, int dimension);
std::vector<std::string> catalog_names();
// Parameter keys for a catalog entry, in display order.
std::vector<std::string> catalog_param_keys(const std::string& name);

// sgn(v) = v/|v|, sgn(0) = 0.
cplx complex_signum(cplx v);

enum class MagneticKind { zero, azimuthal_inverse_square, uniform };

// Vector potential A on R^d with field B_ij = d_i A_j - d_j A_i.
class MagneticPotential {
public:
    MagneticPotential() = default;
    MagneticPotential(MagneticKind kind, int dimension, double strength);

    static MagneticPotential zero(int dimension);
    // A(x) = c |x|^-2 (-x2, x1, 0)
    static MagneticPotential azimuthal_inverse_square(double c = 1.0);
    // A(x) = (b/2) (-x2, x1, 0); B_12 = b
    static MagneticPotential uniform(double b);

    MagneticKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int dimension() const { return d_; }
    double strength() const { return strength_; }
    bool analytic_B() const { return analytic_; }
    // Copy that evaluates B by finite differences only.
    MagneticPotential finite_difference_only() const;

    std::vector<double> A(std::span<const double> x) const;
    double divergence(std::span<const double> x) const;
    // Row-major d x d antisymmetric matrix.
    std::vector<double> B(std::span<const double> x) const;
    std::vector<double> B_finite_difference(std::span<const double> x, double h = 1e-5) const;

private:
    MagneticKind kind_ = MagneticKind::zero;
    std::string name_ = "zero";
    int d_ = 3;
    double strength_ = 0.0;
    bool analytic_ = true;
    std::vector<double> B_analytic(std::span<const double> x) const;
};

MagneticPotential magnetic_catalog(const std::string& name, const ParamMap& params, int dimension);

// (x/|x|) B(x) as a row vector; x = 0 is rejected.
std::vector<double> b_tau(const MagneticPotential& mag, std::span<const double> x);

}  // namespace spectra_cert
