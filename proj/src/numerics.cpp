#include "sicmos/numerics.hpp"

#include <numeric>

namespace sicmos {

void SolverOptions::validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("SolverOptions: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw DomainError("SolverOptions: rel_tol must be > 0");
    if (max_iter < 1) throw DomainError("SolverOptions: max_iter must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("SolverOptions: damping must lie in (0, 1]");
}

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double norm(const std::vector<double>& a) {
    return std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> x0, const Bounds& bounds, const SolverOptions& opts,
                          double initial_step) {
    opts.validate();
    const std::size_t dim = x0.size();
    if (dim == 0) throw DomainError("nelder_mead: empty parameter vector");
    if (!bounds.empty() && bounds.size() != dim) throw DomainError("nelder_mead: bounds size mismatch");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (!(bounds[i].first <= bounds[i].second)) throw DomainError("nelder_mead: bound with lo > hi");
        if (x0[i] < bounds[i].first || x0[i] > bounds[i].second) {
            throw DomainError("nelder_mead: x0 outside bounds");
        }
    }

    SimplexResult result;
    auto clip = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < bounds.size(); ++i) x[i] = std::clamp(x[i], bounds[i].first, bounds[i].second);
    };
    auto eval = [&](std::vector<double>& x) {
        clip(x);
        ++result.evaluations;
        return objective(std::span<const double>(x));
    };

    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    {
        const double f0 = eval(x0);
        if (!std::isfinite(f0)) throw NonFinite("nelder_mead: objective is non-finite at x0");
        simplex.push_back({x0, f0});
    }
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> x = x0;
        double step;
        if (!bounds.empty() && std::isfinite(bounds[i].second - bounds[i].first)) {
            step = initial_step * (bounds[i].second - bounds[i].first);
            if (x[i] + step > bounds[i].second) step = -step;
        } else {
            step = x[i] != 0.0 ? initial_step * std::abs(x[i]) : 2.5e-4;
        }
        if (step == 0.0) step = 2.5e-4;
        x[i] += step;
        const double f = eval(x);
        simplex.push_back({std::move(x), std::isfinite(f) ? f : std::numeric_limits<double>::infinity()});
    }

    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    auto safe = [](double f) { return std::isfinite(f) ? f : std::numeric_limits<double>::infinity(); };

    order();
    result.trace.push_back(simplex.front().f);

    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const Vertex& best = simplex.front();
        double diameter = 0.0;
        for (std::size_t k = 1; k <= dim; ++k) diameter = std::max(diameter, distance(simplex[k].x, best.x));
        const double spread = simplex.back().f - best.f;
        if (diameter < 1e-8 * (1.0 + norm(best.x)) || spread < 1e-12 * (1.0 + std::abs(best.f))) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t k = 0; k < dim; ++k) {
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[k].x[i] / static_cast<double>(dim);
        }
        Vertex& worst = simplex.back();
        auto along = [&](double coeff) {
            std::vector<double> x(dim);
            for (std::size_t i = 0; i < dim; ++i) x[i] = centroid[i] + coeff * (worst.x[i] - centroid[i]);
            return x;
        };

        std::vector<double> xr = along(-kReflect);
        const double fr = safe(eval(xr));
        if (fr < simplex.front().f) {
            std::vector<double> xe = along(-kExpand);
            const double fe = safe(eval(xe));
            if (fe < fr) {
                worst = {std::move(xe), fe};
            } else {
                worst = {std::move(xr), fr};
            }
        } else if (fr < simplex[dim - 1].f) {
            worst = {std::move(xr), fr};
        } else {
            const bool outside = fr < worst.f;
            std::vector<double> xc = along(outside ? -kContract : kContract);
            const double fc = safe(eval(xc));
            if (fc < std::min(fr, worst.f)) {
                worst = {std::move(xc), fc};
            } else {
                for (std::size_t k = 1; k <= dim; ++k) {
                    for (std::size_t i = 0; i < dim; ++i) {
                        simplex[k].x[i] = simplex[0].x[i] + kShrink * (simplex[k].x[i] - simplex[0].x[i]);
                    }
                    simplex[k].f = safe(eval(simplex[k].x));
                }
            }
        }
        order();
        result.trace.push_back(simplex.front().f);
        result.iterations = iter;
    }

    result.x_best = simplex.front().x;
    result.f_best = simplex.front().f;
    return result;
}

}  // namespace sicmos
