#pragma once

#include <cstdint>

#include "sicmos/dataset.hpp"
#include "sicmos/model.hpp"

namespace sicmos {

struct SyntheticPlan {
    /// Multiplicative Gaussian noise (relative standard deviation).
    double noise = 0.01;
    std::uint64_t seed = 20240901;
    double t_case = 300.0;
    /// Points below this current are dropped as unmeasurable, A.
    double min_current = 1e-8;
    unsigned threads = 0;
};

/// Pulsed full-plane data set emulating the three characterization setups:
/// low-Vds transfer curves (curve tracer), output/transfer curves up to
/// 15 V (pulsed), and output/transfer curves to 800 V (double-pulse derived).
/// Deterministic for a given plan.
MeasurementSet synthesize_full_plane(const ModelParams& p, const SyntheticPlan& plan = {});

}  // namespace sicmos
