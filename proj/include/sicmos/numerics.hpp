#pragma once

// Scalar root finding, damped fixed-point iteration and a bounded
// Nelder-Mead simplex. Everything here is pure: no state survives a call.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "sicmos/errors.hpp"

namespace sicmos {

struct SolverOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iter = 200;
    double damping = 0.5;

    /// Throws DomainError when a field violates its invariant.
    void validate() const;
};

struct SolveOutcome {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Function value together with its derivative. Callables passed to
/// solve_bracketed may return this instead of a plain double to supply an
/// analytic slope for the Newton steps.
struct ValueSlope {
    double value;
    double slope;
};

namespace detail {

template <typename F>
concept ReturnsSlope = requires(F f, double x) {
    { f(x) } -> std::same_as<ValueSlope>;
};

template <typename F>
concept ReturnsValue = requires(F f, double x) {
    { f(x) } -> std::convertible_to<double>;
};

inline void require_finite(double v, double x, const char* what) {
    if (!std::isfinite(v)) {
        throw NonFinite(std::string(what) + ": non-finite value at x = " + std::to_string(x));
    }
}

}  // namespace detail

template <typename F>
concept ScalarFunction = detail::ReturnsSlope<F> || detail::ReturnsValue<F>;

/// Bracketed hybrid root finder.
///
/// Newton steps are taken while they land strictly inside the current
/// bracket and shrink fast enough; otherwise the step is a bisection. The
/// slope comes from the callable when it returns ValueSlope, else from a
/// central difference with step max(1e-7, 1e-7*|x|) clipped to the bracket.
/// f is never evaluated outside [lo, hi].
template <ScalarFunction F>
SolveOutcome solve_bracketed(F&& f, double lo, double hi, const SolverOptions& opts,
                             std::optional<double> guess = std::nullopt) {
    opts.validate();
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("solve_bracketed: invalid interval");
    }

    auto evaluate = [&](double x) -> ValueSlope {
        if constexpr (detail::ReturnsSlope<F>) {
            ValueSlope vs = f(x);
            detail::require_finite(vs.value, x, "solve_bracketed");
            return vs;
        } else {
            const double v = static_cast<double>(f(x));
            detail::require_finite(v, x, "solve_bracketed");
            return {v, std::numeric_limits<double>::quiet_NaN()};
        }
    };
    auto finite_difference = [&](double x) {
        const double h = std::max(1e-7, 1e-7 * std::abs(x));
        const double xp = std::min(hi, x + h);
        const double xm = std::max(lo, x - h);
        if (xp <= xm) return std::numeric_limits<double>::quiet_NaN();
        return (evaluate(xp).value - evaluate(xm).value) / (xp - xm);
    };

    ValueSlope flo = evaluate(lo);
    if (std::abs(flo.value) <= opts.abs_tol) return {lo, flo.value, 0, true};
    ValueSlope fhi = evaluate(hi);
    if (std::abs(fhi.value) <= opts.abs_tol) return {hi, fhi.value, 0, true};
    if (std::signbit(flo.value) == std::signbit(fhi.value)) {
        throw NoBracket("solve_bracketed: f(lo) and f(hi) have the same sign");
    }
    const bool rising = fhi.value > 0.0;

    double x = guess ? std::clamp(*guess, lo, hi) : 0.5 * (lo + hi);
    if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
    double step_before_last = hi - lo;
    double last_step = hi - lo;

    SolveOutcome out;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        ValueSlope fx = evaluate(x);
        out = {x, fx.value, iter, false};
        if (std::abs(fx.value) <= opts.abs_tol) {
            out.converged = true;
            return out;
        }
        if ((fx.value > 0.0) == rising) {
            hi = x;
        } else {
            lo = x;
        }
        const double width = hi - lo;
        if (width <= opts.rel_tol * std::abs(x) || width <= std::numeric_limits<double>::min()) {
            out.converged = true;
            return out;
        }

        double slope = fx.slope;
        if constexpr (!detail::ReturnsSlope<F>) slope = finite_difference(x);

        double next = x - fx.value / slope;
        const double newton_step = std::abs(next - x);
        const bool accept = std::isfinite(next) && next > lo && next < hi && newton_step > 0.0 &&
                            newton_step <= 0.5 * step_before_last;
        if (!accept) next = 0.5 * (lo + hi);
        if (next <= lo || next >= hi) {
            // Bracket has collapsed to adjacent doubles.
            out.converged = true;
            return out;
        }
        step_before_last = last_step;
        last_step = std::abs(next - x);
        x = next;
    }
    return out;
}

/// Damped fixed-point iteration x <- x + damping*(g(x) - x).
///
/// Converged when |g(x) - x| <= abs_tol + rel_tol*|x|. On exhaustion the
/// iterate with the smallest residual is returned with converged = false.
template <typename G>
    requires std::invocable<G, double>
SolveOutcome fixed_point(G&& g, double x0, const SolverOptions& opts) {
    opts.validate();
    if (!std::isfinite(x0)) throw DomainError("fixed_point: non-finite start");

    double x = x0;
    SolveOutcome best{x0, std::numeric_limits<double>::infinity(), 0, false};
    for (int iter = 0;; ++iter) {
        const double gx = static_cast<double>(g(x));
        detail::require_finite(gx, x, "fixed_point");
        const double r = gx - x;
        if (std::abs(r) < std::abs(best.residual)) best = {x, r, iter, false};
        if (std::abs(r) <= opts.abs_tol + opts.rel_tol * std::abs(x)) {
            return {x, r, iter, true};
        }
        if (iter == opts.max_iter) break;
        x += opts.damping * r;
    }
    best.iterations = opts.max_iter;
    return best;
}

struct SimplexResult {
    std::vector<double> x_best;
    double f_best = 0.0;
    /// Best objective value after each iteration (index 0 is the initial simplex).
    std::vector<double> trace;
    int iterations = 0;
    int evaluations = 0;
};

using Bounds = std::vector<std::pair<double, double>>;

/// Bounded Nelder-Mead minimizer.
///
/// Points are clipped to `bounds` (empty means unbounded) before every
/// evaluation. `initial_step` is the simplex edge as a fraction of each
/// coordinate's bound width, or of |x0_i| when that coordinate is unbounded.
/// Terminates on simplex diameter < 1e-8*(1+|x_best|), f-spread
/// < 1e-12*(1+|f_best|), or opts.max_iter iterations.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> x0, const Bounds& bounds, const SolverOptions& opts,
                          double initial_step = 0.05);

}  // namespace sicmos
