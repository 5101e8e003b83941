#pragma once

#include <map>
#include <optional>
#include <string>

#include "spectra_cert/numerics.hpp"
#include "spectra_cert/potential.hpp"

namespace spectra_cert {

// A nonnegative constant that may be +inf; `divergent` is set exactly when
// value is +inf.
struct Constant {
    double value = 0.0;
    bool divergent = false;
};

double hardy_constant(int d);

// sup |V| r^2 / ((d-2)/2)^2 on a fine radial scan.
Constant subordination_a_pointwise(const Potential& V);

// Largest singular value of the z = 0 Birman-Schwinger matrix on `grid`.
double subordination_a_variational(const Potential& V, const RadialGrid& grid, int ell_max = 32);

// Variational value on graded grids with n in `ns`, extrapolated in n by
// log_richardson.
struct ExtrapolatedConstant {
    std::vector<int> ns;
    std::vector<double> values;
    double extrapolated = 0.0;
};

ExtrapolatedConstant subordination_a_extrapolated(const Potential& V, std::span<const int> ns, double r_max = 40.0,
                                                  int ell_max = 0);

// ||V||_R = sqrt(int int |V(x)| |V(y)| / |x - y|^2 dx dy), d = 3.
Constant rollnik_norm(const Potential& V);

struct FrankResult {
    double value = 0.0;
    bool divergent = false;
    bool passes = false;
};

// int |V|^(3/2) against the threshold 3^(3/2) / (4 pi^2).
FrankResult frank_l32(const Potential& V);
double frank_threshold();

// (int |V|^(3/2))^(2/3) 2^(4/3) / (3 pi^(4/3)).
Constant sobolev_chain_a(const Potential& V);
double sobolev_chain_factor();

// sup |x|^2 |V(x)| 2/(d-2).
Constant lambda_constant(const Potential& V);

struct Thresholds {
    double thm12_b_max = 0.0;
    double lambda_star = 0.0;
    double sqrt_b3_max = 0.0;
};

Thresholds thresholds(int d);

// Left-hand side 2(2d-3)/(d-2) L + sqrt(2/(d-2)) L^(3/2) of the Lambda condition.
double lambda_condition_lhs(int d, double Lambda);

struct BConstants {
    Constant b1, b2, b3;
};

// Pointwise Hardy certificates. A positive jump of r Re V makes b2 infinite.
BConstants b_constants(const Potential& V);

// Best constants of the weighted Hardy forms for the three weights, from the
// z = 0 Birman-Schwinger norm (d = 3 only).
struct BConstantsVariational {
    double b1 = 0.0, b2 = 0.0, b3 = 0.0;
};

BConstantsVariational b_constants_variational(const Potential& V, const RadialGrid& grid, int ell_max = 4);

// Largest singular value of sqrt(W) H_0^(-1) sqrt(W) for a radial weight W >= 0
// in d = 3, i.e. the best constant in int W |psi|^2 <= c int |grad psi|^2.
double weighted_form_constant(const std::function<double(double)>& W, const RadialGrid& grid, int ell_max = 4);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

enum class AMethod { pointwise_hardy, variational };
std::string to_string(AMethod m);

struct ConditionReport {
    double a = 0.0;
    AMethod a_method = AMethod::pointwise_hardy;
    // Defined for d = 3 only; empty otherwise.
    std::optional<Constant> rollnik;
    std::optional<Constant> frank_l32;
    std::optional<Constant> sobolev_chain_a;
    Constant Lambda;
    Constant b1, b2, b3;
    std::map<std::string, Verdict> verdicts;
    // Variational a, when it was computed (d = 3, radial).
    std::optional<double> a_variational;
};

std::map<std::string, Verdict> evaluate_verdicts(const ConditionReport& report, int d);

struct ConditionOptions {
    bool variational = true;
    int grid_n = 256;
    double r_max = 40.0;
    int ell_max = 32;
};

ConditionReport check_conditions(const Potential& V, const ConditionOptions& opts = {});

}  // namespace spectra_cert
