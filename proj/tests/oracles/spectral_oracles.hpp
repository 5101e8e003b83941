#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// Bound-state energies E < 0 of -u'' - V0 1_{r < R0} u in the s-wave sector,
// from the matching condition q cot(q R0) = -kappa with q = sqrt(V0 - |E|),
// kappa = sqrt(|E|). Found by sign scan and bisection, deepest first.
inline std::vector<double> square_well_s_wave_energies(double V0, double R0) {
    auto f = [&](double b) {  // b = |E| in (0, V0)
        const double q = std::sqrt(V0 - b);
        return q * std::cos(q * R0) + std::sqrt(b) * std::sin(q * R0);
    };
    std::vector<double> out;
    const int m = 200000;
    double prev_b = V0 * 1e-12, prev = f(prev_b);
    for (int i = 1; i <= m; ++i) {
        const double b = V0 * (1e-12 + (1.0 - 2e-12) * i / m);
        const double cur = f(b);
        if ((prev > 0.0) != (cur > 0.0)) {
            double lo = prev_b, hi = b, flo = prev;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi), fm = f(mid);
                if ((fm > 0.0) == (flo > 0.0)) lo = mid, flo = fm;
                else hi = mid;
            }
            out.push_back(-0.5 * (lo + hi));
        }
        prev_b = b;
        prev = cur;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracle
