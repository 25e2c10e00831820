#include "sicmos/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "sicmos/parallel.hpp"

namespace sicmos {

std::string_view to_string(Weighting weighting) {
    return weighting == Weighting::relative ? "relative" : "log_current";
}

std::optional<Weighting> parse_weighting(std::string_view text) {
    if (text == "relative") return Weighting::relative;
    if (text == "log_current") return Weighting::log_current;
    return std::nullopt;
}

namespace {

struct PointModel {
    double id = 0.0;
    bool ok = false;
};

std::vector<PointModel> simulate(const ModelParams& p, const MeasurementSet& set, std::span<const std::size_t> subset,
                                 const ErrorOptions& opts) {
    std::vector<PointModel> out(subset.size());
    parallel_for(subset.size(), opts.threads, [&](std::size_t k) {
        const MeasurementRecord& r = set.records[subset[k]];
        try {
            const BiasSolution s = solve_bias_point(p, {r.vgs, r.vds, r.t_case}, opts.bias);
            out[k] = {s.id, s.converged && std::isfinite(s.id)};
        } catch (const DomainError&) {
            throw;
        } catch (const Error&) {
            out[k] = {0.0, false};
        }
    });
    return out;
}

double point_error(double model, double measured, Weighting weighting) {
    if (weighting == Weighting::relative) {
        return (model - measured) / std::max(std::abs(measured), kCurrentFloor);
    }
    return std::log10(std::max(model, kCurrentFloor)) - std::log10(std::max(measured, kCurrentFloor));
}

std::vector<std::size_t> all_indices(const MeasurementSet& set) {
    std::vector<std::size_t> idx(set.records.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

}  // namespace

double model_error(const ModelParams& p, const MeasurementSet& set, std::span<const std::size_t> subset,
                   Weighting weighting, const ErrorOptions& opts) {
    if (subset.empty()) throw DomainError("model_error: empty measurement set");
    const std::vector<PointModel> model = simulate(p, set, subset, opts);
    double sum = 0.0;
    double weight = 0.0;
    for (std::size_t k = 0; k < subset.size(); ++k) {
        const MeasurementRecord& r = set.records[subset[k]];
        const double e = model[k].ok ? point_error(model[k].id, r.id, weighting) : kNonConvergedPenalty;
        sum += r.count * e * e;
        weight += r.count;
    }
    return std::sqrt(sum / weight);
}

double model_error(const ModelParams& p, const MeasurementSet& set, Weighting weighting, const ErrorOptions& opts) {
    const auto idx = all_indices(set);
    return model_error(p, set, idx, weighting, opts);
}

std::pair<double, std::size_t> worst_deviation(const ModelParams& p, const MeasurementSet& set,
                                               std::span<const std::size_t> subset, const ErrorOptions& opts) {
    const std::vector<PointModel> model = simulate(p, set, subset, opts);
    std::pair<double, std::size_t> worst{0.0, subset.empty() ? 0 : subset.front()};
    for (std::size_t k = 0; k < subset.size(); ++k) {
        const double e = model[k].ok ? std::abs(point_error(model[k].id, set.records[subset[k]].id, Weighting::relative))
                                     : kNonConvergedPenalty;
        if (e > worst.first) worst = {e, subset[k]};
    }
    return worst;
}

void FitStageSpec::validate() const {
    if (free_params.empty()) throw DomainError("stage '" + name + "': no free parameters");
    std::set<std::string> seen;
    for (const auto& n : free_params) {
        if (!find_param(n)) throw DomainError("stage '" + name + "': unknown parameter '" + n + "'");
        if (!seen.insert(n).second) throw DomainError("stage '" + name + "': duplicate parameter '" + n + "'");
    }
    if (!bounds.empty()) {
        if (bounds.size() != free_params.size()) throw DomainError("stage '" + name + "': bounds size mismatch");
        for (const auto& [lo, hi] : bounds) {
            if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
                throw DomainError("stage '" + name + "': bounds must be finite with lo < hi");
            }
        }
    }
}

std::pair<double, double> default_bounds(std::string_view name, const ModelParams& p0) {
    const auto info = find_param(name);
    if (!info) throw DomainError("default_bounds: unknown parameter '" + std::string(name) + "'");
    const double v = p0.*(info->member);
    if (name == "vfb0") return {v - 2.0, v + 2.0};
    if (name == "k_vfb") return {std::min(-0.06, 3.0 * v), 0.0};
    if (name == "alpha") return {0.0, std::max(0.5, 3.0 * v)};
    if (name == "r_s" || name == "r_d_contact") return {0.0, std::max(0.1, 3.0 * v)};
    if (name == "r_th") return {0.0, std::max(0.02, 5.0 * v)};
    if (name == "beta_r") return {1.0, std::max(10.0, 2.0 * v)};
    if (name == "p_mu" || name == "p_mud") return {v - 2.0, v + 2.0};
    if (v > 0.0) return {v / 3.0, v * 3.0};
    if (v < 0.0) return {v * 3.0, v / 3.0};
    return {-1.0, 1.0};
}

FitStageSpec stage1_spec() {
    return {"stage1_linear", {"vfb0", "alpha", "gamma_b", "mu_ch0"}, Region::linear_lowV, Weighting::log_current, {}};
}

FitStageSpec stage2_spec() {
    return {"stage2_output", {"r_s", "r_d_contact", "mu_d0"}, Region::output_midV, Weighting::relative, {}};
}

FitStageSpec stage3_spec() {
    return {"stage3_highpower", {"beta_r", "v_sat", "r_th", "k_vfb", "p_mu"}, Region::high_power,
            Weighting::relative, {}};
}

FitStageSpec polish_spec() {
    FitStageSpec s = stage3_spec();
    s.name = "polish";
    s.free_params.push_back("mu_ch0");
    s.region = std::nullopt;
    return s;
}

std::vector<FitStageSpec> default_schedule(bool polish) {
    std::vector<FitStageSpec> s{stage1_spec(), stage2_spec(), stage3_spec()};
    if (polish) s.push_back(polish_spec());
    return s;
}

namespace {

// Maps a parameter onto [0, 1]: logarithmically when its bounds are positive
// and span a decade or more, linearly otherwise.
struct Coordinate {
    double ModelParams::*member;
    double lo;
    double hi;
    bool log_scale;

    double to_unit(double v) const {
        v = std::clamp(v, lo, hi);
        return log_scale ? std::log(v / lo) / std::log(hi / lo) : (v - lo) / (hi - lo);
    }
    double from_unit(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        return log_scale ? lo * std::exp(u * std::log(hi / lo)) : lo + u * (hi - lo);
    }
};

}  // namespace

ModelParams run_stage(const ModelParams& p, const MeasurementSet& set, const FitStageSpec& stage,
                      const FitOptions& opts, StageReport* report) {
    stage.validate();
    const std::vector<std::size_t> subset = stage.region ? set.indices(*stage.region) : all_indices(set);
    if (subset.empty()) {
        throw DomainError("stage '" + stage.name + "': region '" +
                          std::string(stage.region ? to_string(*stage.region) : "all") + "' has no records");
    }

    std::vector<Coordinate> coords;
    for (std::size_t k = 0; k < stage.free_params.size(); ++k) {
        const auto info = find_param(stage.free_params[k]);
        const auto [lo, hi] = stage.bounds.empty() ? default_bounds(info->name, p) : stage.bounds[k];
        coords.push_back({info->member, lo, hi, lo > 0.0 && hi / lo >= 10.0});
    }

    ModelParams start = p;
    for (const auto& c : coords) start.*(c.member) = std::clamp(p.*(c.member), c.lo, c.hi);
    auto apply = [&](std::span<const double> u) {
        ModelParams q = start;
        for (std::size_t k = 0; k < coords.size(); ++k) q.*(coords[k].member) = coords[k].from_unit(u[k]);
        return q;
    };
    auto objective = [&](std::span<const double> u) {
        const ModelParams q = apply(u);
        try {
            q.validate();
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
        return model_error(q, set, subset, stage.weighting, opts.eval);
    };

    double start_error = std::numeric_limits<double>::quiet_NaN();
    try {
        start.validate();
        start_error = model_error(start, set, subset, stage.weighting, opts.eval);
    } catch (const DomainError& e) {
        throw NonFinite("stage '" + stage.name + "': objective undefined at start (" + e.what() + ")");
    }
    if (!std::isfinite(start_error)) throw NonFinite("stage '" + stage.name + "': objective non-finite at start");

    std::vector<double> u0;
    for (const auto& c : coords) u0.push_back(c.to_unit(start.*(c.member)));
    const Bounds unit(coords.size(), {0.0, 1.0});
    SolverOptions nm;
    nm.max_iter = opts.max_iter;

    StageReport local{stage.name, 0, 0, start_error, start_error, {start_error}};
    std::vector<double> u_best = u0;
    double f_best = objective(u0);
    for (int run = 0; run <= opts.restarts; ++run) {
        const SimplexResult r = nelder_mead(objective, u_best, unit, nm, opts.initial_step);
        local.iterations += r.iterations;
        local.evaluations += r.evaluations;
        local.trace.insert(local.trace.end(), r.trace.begin() + 1, r.trace.end());
        const bool improved = r.f_best < f_best;
        if (improved) {
            f_best = r.f_best;
            u_best = r.x_best;
        }
        if (!improved || r.iterations == 0) break;
    }

    ModelParams result = start;
    if (f_best < start_error) {
        result = apply(u_best);
        local.end_error = f_best;
    } else {
        local.end_error = start_error;
    }
    // Running minimum so the concatenated trace stays nonincreasing.
    for (std::size_t i = 1; i < local.trace.size(); ++i) local.trace[i] = std::min(local.trace[i], local.trace[i - 1]);
    if (report) *report = std::move(local);
    return result;
}

ModelParams stage1_fit_linear(const ModelParams& p0, const MeasurementSet& set, const FitOptions& opts) {
    return run_stage(p0, set, stage1_spec(), opts);
}

ModelParams stage2_fit_output(const ModelParams& p, const MeasurementSet& set, const FitOptions& opts) {
    return run_stage(p, set, stage2_spec(), opts);
}

ModelParams stage3_fit_highpower(const ModelParams& p, const MeasurementSet& set, const FitOptions& opts) {
    return run_stage(p, set, stage3_spec(), opts);
}

FitReport fit_all(const ModelParams& p0, const MeasurementSet& set, const std::vector<FitStageSpec>& schedule,
                  const FitOptions& opts) {
    p0.validate();
    FitReport report;
    report.initial_params = p0;
    report.final_params = p0;
    for (const FitStageSpec& stage : schedule) {
        StageReport sr;
        try {
            report.final_params = run_stage(report.final_params, set, stage, opts, &sr);
        } catch (const Error& e) {
            report.completed = false;
            report.failure = e.what();
            break;
        }
        report.objective_trace.insert(report.objective_trace.end(), sr.trace.begin(), sr.trace.end());
        report.per_stage.push_back(std::move(sr));
    }
    for (Region region : kAllRegions) {
        const auto idx = set.indices(region);
        report.per_region_rms[region] =
            idx.empty() ? std::nullopt
                        : std::optional<double>(model_error(report.final_params, set, idx, Weighting::relative, opts.eval));
    }
    if (!set.records.empty()) report.overall_rms = model_error(report.final_params, set, Weighting::relative, opts.eval);
    return report;
}

}  // namespace sicmos
