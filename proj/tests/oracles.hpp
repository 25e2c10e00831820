#pragma once

// Reference computations kept deliberately naive: plain bisection, dense
// scans and textbook quadrature. None of them call into the library solvers.

#include <cmath>
#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

/// Plain bisection on a sign change; stops when the bracket is below
/// `rel_width` relative to its midpoint (or absolutely below 1e-300).
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_width = 1e-14) {
    double flo = f(lo);
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_width * std::abs(mid) || hi - lo < 1e-300) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Bisection with a geometric midpoint, for positive unknowns spanning many decades.
inline double bisect_geometric(const std::function<double(double)>& f, double lo, double hi, double rel_width = 1e-14) {
    double flo = f(lo);
    for (int i = 0; i < 4000; ++i) {
        if (hi / lo - 1.0 <= rel_width) break;
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi)) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo) * std::sqrt(hi);
}

/// Residual of the normalized charge relation, written out directly.
inline double charge_residual(double q, double psi, double n, double gamma, double v_c) {
    const double a = 2.0 * n / gamma;
    return std::log(q) + std::log(a * (a * q + 2.0 * std::sqrt(psi - 2.0 * q))) + 2.0 * q - (psi - v_c);
}

/// Smallest root of the charge relation in (0, psi/2], or nullopt when the
/// residual never changes sign. Brute force: a dense scan in ln q over the
/// whole admissible range plus a linear scan near the square-root edge, then
/// geometric bisection on the first sign change.
inline std::optional<double> charge_root(double psi, double n, double gamma, double v_c) {
    auto f = [&](double q) { return charge_residual(q, psi, n, gamma, v_c); };
    const double q_top = 0.5 * psi;
    std::vector<double> grid;
    const double ln_lo = -700.0;
    const double ln_hi = std::log(q_top);
    constexpr int kLogPoints = 6000;
    for (int i = 0; i < kLogPoints; ++i) grid.push_back(std::exp(ln_lo + (ln_hi - ln_lo) * i / (kLogPoints - 1)));
    constexpr int kLinPoints = 2000;
    for (int i = 1; i <= kLinPoints; ++i) grid.push_back(q_top * (0.5 + 0.5 * i / kLinPoints));
    grid.back() = q_top;
    std::sort(grid.begin(), grid.end());

    double prev_q = grid.front();
    double prev_f = f(prev_q);
    if (prev_f >= 0.0) return std::nullopt;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double q = grid[i];
        const double fq = f(q);
        if (fq >= 0.0) return bisect_geometric(f, prev_q, q);
        prev_q = q;
        prev_f = fq;
    }
    return std::nullopt;
}

/// Pinch-off relation with the accumulation-form bulk term, written out directly.
inline double pinch_off_residual(double psi, double alpha, double gamma, double overdrive_norm) {
    return psi + alpha * psi / (1.0 + alpha * psi) + gamma * std::sqrt(std::exp(-psi) + psi - 1.0) - overdrive_norm;
}

inline double pinch_off_root(double alpha, double gamma, double overdrive_norm) {
    if (overdrive_norm <= 0.0) return 0.0;
    return bisect([&](double psi) { return pinch_off_residual(psi, alpha, gamma, overdrive_norm); }, 0.0,
                  overdrive_norm);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Cumulative trapezoid integral, same length as x (first entry 0).
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) out[i] = out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return out;
}

inline double thermal_voltage(double t) { return 1.380649e-23 * t / 1.602176634e-19; }

}  // namespace oracle
