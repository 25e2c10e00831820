#pragma once

#include <string>
#include <vector>

#include "sicmos/model.hpp"

namespace sicmos {

enum class SweepAxis { vgs, vds };
enum class GridScale { linear, log };

struct SweepSpec {
    SweepAxis axis = SweepAxis::vds;
    double start = 0.0;
    double stop = 1.0;
    int points = 2;
    GridScale scale = GridScale::linear;
    /// Values of the voltage that is not swept; one curve per entry.
    std::vector<double> fixed_bias;
    double t_case = 300.0;
    bool self_heating = true;
};

struct PointMeta {
    double t_j = 0.0;
    bool converged = true;
};

struct Curve {
    std::string label;
    double fixed_bias = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<PointMeta> meta;
};

struct SweepOptions {
    BiasOptions bias{};
    /// 0 = all available cores.
    unsigned threads = 0;
};

/// Inclusive grid: arithmetic for linear, geometric for log.
std::vector<double> make_grid(double start, double stop, int points, GridScale scale);

/// Id(Vgs), one curve per fixed Vds.
std::vector<Curve> transfer_sweep(const ModelParams& p, const SweepSpec& spec, const SweepOptions& opts = {});

/// Id(Vds), one curve per fixed Vgs.
std::vector<Curve> output_sweep(const ModelParams& p, const SweepSpec& spec, const SweepOptions& opts = {});

/// gm(Vgs) by finite differences of the solved transfer curves.
std::vector<Curve> transconductance(const ModelParams& p, const SweepSpec& spec, const SweepOptions& opts = {});

/// Curve label for a fixed bias, e.g. "vgs=6.5V".
std::string curve_label(SweepAxis fixed_axis, double value);

}  // namespace sicmos
