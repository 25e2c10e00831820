#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sicmos/dataset.hpp"
#include "sicmos/extraction.hpp"
#include "sicmos/sweep.hpp"

namespace sicmos {

enum class SweepKind { output, transfer, transconductance };

struct SweepJob {
    std::string name;
    SweepKind kind = SweepKind::output;
    SweepSpec spec;
};

/// Contents of an INI-style run configuration:
///
///   [model]        preset = <name> | card = <path>
///   [sweep.NAME]   kind, start, stop, points, scale, fixed_bias, t_case, self_heating
///   [fit]          vds_lin_max, vds_mid_max, polish, restarts, max_iter
///   [fit.NAME]     free, region, weighting, bounds.<param> = lo,hi
///
/// `fixed_bias` is a comma list or `start:stop:step`. Unknown sections or keys
/// are schema errors.
struct RunConfig {
    std::optional<std::string> preset;
    std::optional<std::filesystem::path> card;
    std::vector<SweepJob> sweeps;
    RegionThresholds thresholds;
    bool polish = true;
    int restarts = 2;
    int max_iter = 400;
    /// Explicit stages in file order; empty selects default_schedule(polish).
    std::vector<FitStageSpec> stages;

    std::vector<FitStageSpec> schedule() const;
};

/// Throws SchemaError on malformed content.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

/// Throws Error when the file cannot be opened, SchemaError when malformed.
RunConfig read_config(const std::filesystem::path& path);

}  // namespace sicmos
