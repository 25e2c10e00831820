#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sicmos/dataset.hpp"
#include "sicmos/model.hpp"

namespace sicmos {

enum class Weighting { relative, log_current };

std::string_view to_string(Weighting weighting);
std::optional<Weighting> parse_weighting(std::string_view text);

/// Current floor of the error metrics, A.
inline constexpr double kCurrentFloor = 1e-9;
/// Error term charged for a record whose bias point did not converge.
inline constexpr double kNonConvergedPenalty = 1e3;

struct ErrorOptions {
    BiasOptions bias{};
    unsigned threads = 0;
};

/// Weighted RMS model-vs-measurement error over all records.
double model_error(const ModelParams& p, const MeasurementSet& set, Weighting weighting,
                   const ErrorOptions& opts = {});

/// Same over the records listed in `subset`.
double model_error(const ModelParams& p, const MeasurementSet& set, std::span<const std::size_t> subset,
                   Weighting weighting, const ErrorOptions& opts = {});

/// Worst single-record relative deviation over `subset`, and its index.
std::pair<double, std::size_t> worst_deviation(const ModelParams& p, const MeasurementSet& set,
                                               std::span<const std::size_t> subset, const ErrorOptions& opts = {});

struct FitStageSpec {
    std::string name;
    std::vector<std::string> free_params;
    /// nullopt fits against every record.
    std::optional<Region> region;
    Weighting weighting = Weighting::relative;
    /// One [lo, hi] per free parameter; empty selects default_bounds.
    std::vector<std::pair<double, double>> bounds;

    /// DomainError on unknown/duplicate names or malformed bounds.
    void validate() const;
};

struct StageReport {
    std::string name;
    int iterations = 0;
    int evaluations = 0;
    double start_error = 0.0;
    double end_error = 0.0;
    std::vector<double> trace;
};

struct FitReport {
    ModelParams initial_params;
    ModelParams final_params;
    std::vector<StageReport> per_stage;
    std::map<Region, std::optional<double>> per_region_rms;
    double overall_rms = 0.0;
    /// Concatenated best-value traces of all stages.
    std::vector<double> objective_trace;
    bool completed = true;
    std::string failure;
};

struct FitOptions {
    ErrorOptions eval{};
    /// Nelder-Mead iterations per run.
    int max_iter = 400;
    /// Additional simplex restarts from the best point.
    int restarts = 2;
    /// Initial simplex edge as a fraction of the scaled bound width.
    double initial_step = 0.1;
};

/// Default search interval for a parameter, centered on its value in `p0`.
std::pair<double, double> default_bounds(std::string_view name, const ModelParams& p0);

FitStageSpec stage1_spec();
FitStageSpec stage2_spec();
FitStageSpec stage3_spec();
FitStageSpec polish_spec();

/// Stages 1-3, plus the all-region polish stage when `polish` is set.
std::vector<FitStageSpec> default_schedule(bool polish = true);

/// Runs one stage. DomainError when its region holds no records; NonFinite
/// when the objective is non-finite at the start.
ModelParams run_stage(const ModelParams& p, const MeasurementSet& set, const FitStageSpec& stage,
                      const FitOptions& opts = {}, StageReport* report = nullptr);

/// Threshold, subthreshold slope and channel mobility on linear_lowV data.
ModelParams stage1_fit_linear(const ModelParams& p0, const MeasurementSet& set, const FitOptions& opts = {});
/// Terminal resistances and drift mobility on output_midV data.
ModelParams stage2_fit_output(const ModelParams& p, const MeasurementSet& set, const FitOptions& opts = {});
/// Drift saturation, thermal and temperature coefficients on high_power data.
ModelParams stage3_fit_highpower(const ModelParams& p, const MeasurementSet& set, const FitOptions& opts = {});

/// Runs `schedule` in order. A stage that throws halts the schedule; the
/// report then carries completed = false and the parameters reached so far.
FitReport fit_all(const ModelParams& p0, const MeasurementSet& set, const std::vector<FitStageSpec>& schedule,
                  const FitOptions& opts = {});

}  // namespace sicmos
