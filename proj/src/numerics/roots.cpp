#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "spectra_cert/numerics.hpp"

namespace spectra_cert {

double find_root_increasing(const std::function<double(double)>& f, double lo, double hi) {
    if (!(lo < hi)) throw PreconditionError("find_root_increasing: need lo < hi");
    const double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0) || !(fhi > 0.0))
        throw PreconditionError("find_root_increasing: sign condition f(lo) < 0 < f(hi) violated");
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= 1e-12 || mid <= lo || mid >= hi) return mid;
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw PreconditionError("loglog_slope: need >= 2 pairs");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw PreconditionError("loglog_slope: data must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double log_richardson(std::span<const int> ns, std::span<const double> values) {
    if (ns.size() != 3 || values.size() != 3) throw PreconditionError("log_richardson: need exactly three points");
    for (std::size_t i = 0; i < 3; ++i)
        if (ns[i] < 2 || (i > 0 && ns[i] <= ns[i - 1]))
            throw PreconditionError("log_richardson: n must be increasing and >= 2");
    // Fit A, C through the first two points; the residual at the third fixes delta.
    auto fit = [&](double delta, double& A) {
        double x[3];
        for (int i = 0; i < 3; ++i) x[i] = 1.0 / std::pow(std::log(ns[i]) + delta, 2);
        const double C = (values[1] - values[0]) / (x[0] - x[1]);
        A = values[0] + C * x[0];
        return A - C * x[2] - values[2];
    };
    double A = 0.0;
    const double lo_min = -std::log(ns[0]) + 0.05;
    std::vector<double> grid;
    for (double d = lo_min; d <= 200.0; d += 0.05) grid.push_back(d);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double a = grid[i], b = grid[i + 1];
        double fa = fit(a, A), fb = fit(b, A);
        if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0)) continue;
        for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
            const double m = 0.5 * (a + b);
            const double fm = fit(m, A);
            if ((fm > 0.0) == (fa > 0.0)) a = m, fa = fm;
            else b = m;
        }
        fit(0.5 * (a + b), A);
        return A;
    }
    throw ConvergenceError("log_richardson: no logarithmic model fits the data");
}

int thread_cap() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SPECTRA_CERT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, hw));
    }
    return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(thread_cap()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace spectra_cert
