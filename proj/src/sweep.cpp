#include "sicmos/sweep.hpp"

#include <cmath>

#include <fmt/format.h>

#include "sicmos/parallel.hpp"

namespace sicmos {

std::vector<double> make_grid(double start, double stop, int points, GridScale scale) {
    if (points < 2) throw DomainError("make_grid: points must be >= 2");
    if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop)) {
        throw DomainError("make_grid: need finite start < stop");
    }
    if (scale == GridScale::log && !(start > 0.0)) throw DomainError("make_grid: log grid needs start > 0");

    std::vector<double> grid(static_cast<std::size_t>(points));
    const double last = static_cast<double>(points - 1);
    if (scale == GridScale::linear) {
        const double step = (stop - start) / last;
        for (int i = 0; i < points; ++i) grid[i] = start + step * i;
    } else {
        const double log_start = std::log(start);
        const double log_step = (std::log(stop) - log_start) / last;
        for (int i = 0; i < points; ++i) grid[i] = std::exp(log_start + log_step * i);
    }
    grid.front() = start;
    grid.back() = stop;
    return grid;
}

std::string curve_label(SweepAxis fixed_axis, double value) {
    return fmt::format("{}={}V", fixed_axis == SweepAxis::vgs ? "vgs" : "vds", value);
}

namespace {

std::vector<Curve> run_sweep(const ModelParams& p, const SweepSpec& spec, const SweepOptions& opts) {
    p.validate();
    const std::vector<double> grid = make_grid(spec.start, spec.stop, spec.points, spec.scale);
    const SweepAxis fixed_axis = spec.axis == SweepAxis::vgs ? SweepAxis::vds : SweepAxis::vgs;

    std::vector<Curve> curves(spec.fixed_bias.size());
    for (std::size_t c = 0; c < curves.size(); ++c) {
        curves[c].label = curve_label(fixed_axis, spec.fixed_bias[c]);
        curves[c].fixed_bias = spec.fixed_bias[c];
        curves[c].x = grid;
        curves[c].y.assign(grid.size(), 0.0);
        curves[c].meta.assign(grid.size(), {});
    }

    BiasOptions bias = opts.bias;
    bias.self_heating = spec.self_heating;
    const std::size_t per_curve = grid.size();
    parallel_for(curves.size() * per_curve, opts.threads, [&](std::size_t k) {
        Curve& curve = curves[k / per_curve];
        const std::size_t i = k % per_curve;
        OperatingPoint op{0.0, 0.0, spec.t_case};
        if (spec.axis == SweepAxis::vgs) {
            op.vgs = grid[i];
            op.vds = curve.fixed_bias;
        } else {
            op.vgs = curve.fixed_bias;
            op.vds = grid[i];
        }
        try {
            const BiasSolution s = solve_bias_point(p, op, bias);
            curve.y[i] = s.id;
            curve.meta[i] = {s.t_j, s.converged};
        } catch (const SolverFailure&) {
            curve.y[i] = std::nan("");
            curve.meta[i] = {spec.t_case, false};
        } catch (const NonFinite&) {
            curve.y[i] = std::nan("");
            curve.meta[i] = {spec.t_case, false};
        }
    });
    return curves;
}

}  // namespace

std::vector<Curve> transfer_sweep(const ModelParams& p, const SweepSpec& spec, const SweepOptions& opts) {
    if (spec.axis != SweepAxis::vgs) throw DomainError("transfer_sweep: sweep axis must be vgs");
    return run_sweep(p, spec, opts);
}

std::vector<Curve> output_sweep(const ModelParams& p, const SweepSpec& spec, const SweepOptions& opts) {
    if (spec.axis != SweepAxis::vds) throw DomainError("output_sweep: sweep axis must be vds");
    return run_sweep(p, spec, opts);
}

std::vector<Curve> transconductance(const ModelParams& p, const SweepSpec& spec, const SweepOptions& opts) {
    if (spec.axis != SweepAxis::vgs) throw DomainError("transconductance: sweep axis must be vgs");
    std::vector<Curve> curves = run_sweep(p, spec, opts);
    for (Curve& c : curves) {
        const std::size_t m = c.x.size();
        std::vector<double> gm(m);
        std::vector<PointMeta> meta(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == m ? m - 1 : i + 1;
            gm[i] = (c.y[hi] - c.y[lo]) / (c.x[hi] - c.x[lo]);
            meta[i] = {c.meta[i].t_j, c.meta[lo].converged && c.meta[i].converged && c.meta[hi].converged};
        }
        c.y = std::move(gm);
        c.meta = std::move(meta);
    }
    return curves;
}

}  // namespace sicmos
