#pragma once

// Charge-based I-V model of a vertical SiC power MOSFET.
//
// Potentials inside the pinch-off and charge relations are normalized by the
// thermal voltage at the junction temperature; channel charge q is the
// inversion sheet charge in units of Cox*Vt. The terminal current comes from
// a self-consistent solve of the intrinsic channel, the extrinsic/drift
// resistor network and the junction temperature.

#include "sicmos/numerics.hpp"
#include "sicmos/params.hpp"

namespace sicmos {

inline constexpr double kBoltzmann = 1.380649e-23;           // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

/// Lower bound applied to psi_p when evaluating channel charge.
inline constexpr double kPsiFloorCharge = 1e-6;
/// Lower bound applied to psi_p inside the slope factor.
inline constexpr double kPsiFloorSlope = 1.0;
/// Probe voltage used for the on-resistance.
inline constexpr double kRonProbeVds = 5e-3;

struct OperatingPoint {
    double vgs = 0.0;
    double vds = 0.0;
    double t_case = 300.0;
};

struct BiasSolution {
    double id = 0.0;        // A
    double psi_p = 0.0;     // pinch-off potential / Vt
    double q_src = 0.0;     // normalized source-end charge
    double q_drn = 0.0;     // normalized intrinsic-drain charge
    double vds_int = 0.0;   // V
    double r_drift = 0.0;   // ohm
    double t_j = 0.0;       // K
    double n_slope = 1.0;
    bool converged = false;
    int iterations = 0;     // thermal iterations (inner solves are not counted)
};

struct BiasOptions {
    /// Tolerances for the pinch-off and charge solves.
    SolverOptions root{};
    /// Relative tolerance of the terminal-current solve.
    double current_rel_tol = 1e-10;
    /// Thermal loop: absolute tolerance on t_j in kelvin and damping.
    double thermal_tol = 1e-4;
    double thermal_damping = 0.5;
    int thermal_max_iter = 200;
    bool self_heating = true;
};

double thermal_voltage(double t);

/// vfb0 + k_vfb*(t - t0).
double flat_band(const ModelParams& p, double t);

/// Solves the pinch-off relation for psi_p (normalized). Returns 0 at or
/// below flat band.
double pinch_off_potential(const ModelParams& p, double vg, double t, const SolverOptions& opts = {});

/// Residual of the pinch-off relation in normalized units and its slope.
ValueSlope pinch_off_residual(const ModelParams& p, double psi_p, double overdrive_norm);

/// 1 + gamma/(2*sqrt(max(psi_p, 1))).
double slope_factor(const ModelParams& p, double psi_p);

/// Solves the normalized charge relation for q at channel potential v_c
/// (normalized). Where the relation has two roots the smaller (physical)
/// branch is returned; SolverFailure when it has none.
double channel_charge(const ModelParams& p, double psi_p, double n, double v_c, const SolverOptions& opts = {});

/// 2n (W/L) mu_ch(t) Cox (q_src - q_drn)(q_src + q_drn + 1) Vt^2.
double intrinsic_drain_current(const ModelParams& p, double q_src, double q_drn, double n, double t);

double channel_mobility(const ModelParams& p, double t);
double drift_mobility(const ModelParams& p, double t);

/// L_d / (mu_d(t) q N_d A_d).
double drift_resistance_linear(const ModelParams& p, double t);

/// v_sat q N_d A_d.
double max_drift_current(const ModelParams& p);

double drift_resistance(const ModelParams& p, double i_ds, double t);

double junction_temperature(const ModelParams& p, double power, double t_case);

/// Intrinsic channel evaluation at given internal voltages and temperature.
struct ChannelState {
    double id = 0.0;
    double psi_p = 0.0;
    double n = 1.0;
    double q_src = 0.0;
    double q_drn = 0.0;
    double gm = 0.0;   // d id / d vgs
    double gds = 0.0;  // d id / d vds
};

ChannelState evaluate_channel(const ModelParams& p, double vgs, double vds, double t, const SolverOptions& opts = {});

/// Self-consistent electro-thermal bias point. Non-convergence is reported
/// through BiasSolution::converged, never thrown. DomainError for vds < 0,
/// t_case <= 0 or non-finite inputs.
BiasSolution solve_bias_point(const ModelParams& p, const OperatingPoint& op, const BiasOptions& opts = {});

/// vds/id at vds = 5 mV.
double on_resistance(const ModelParams& p, double vgs, double t_case, const BiasOptions& opts = {});

}  // namespace sicmos
