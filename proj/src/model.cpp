#include "sicmos/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sicmos {

namespace {

void require_temperature(double t, const char* where) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(where) + ": temperature must be > 0");
}

// Bulk-charge term B(psi) of the pinch-off relation and dB/dpsi.
ValueSlope bulk_term(BulkForm form, double psi) {
    if (psi <= 0.0) {
        return {0.0, form == BulkForm::accumulation ? std::sqrt(0.5) : std::numeric_limits<double>::infinity()};
    }
    if (form == BulkForm::accumulation) {
        // exp(-psi) + psi - 1, series below 1e-3 to avoid cancellation.
        const double s = psi < 1e-3 ? psi * psi * (0.5 - psi / 6.0 + psi * psi / 24.0) : std::expm1(-psi) + psi;
        const double b = std::sqrt(s);
        return {b, -std::expm1(-psi) / (2.0 * b)};
    }
    if (psi > 30.0) {
        // exp(psi/2) * sqrt(1 + (psi - 1) exp(-psi)); overflow-safe.
        const double tail = (psi - 1.0) * std::exp(-psi);
        const double half = std::exp(0.5 * psi);
        const double b = half * std::sqrt(1.0 + tail);
        return {b, half * (1.0 + std::exp(-psi)) / (2.0 * std::sqrt(1.0 + tail))};
    }
    const double s = psi < 1e-3 ? psi * (2.0 + psi * (0.5 + psi / 6.0)) : std::expm1(psi) + psi;
    const double b = std::sqrt(s);
    return {b, (std::exp(psi) + 1.0) / (2.0 * b)};
}

// Left side of the normalized charge relation as a function of q, with its
// partial derivatives with respect to q and psi_p.
struct ChargeTerms {
    double lhs;
    double d_q;
    double d_psi;
};

ChargeTerms charge_terms(double q, double psi, double a) {
    const double s = std::max(0.0, psi - 2.0 * q);
    const double root = std::sqrt(s);
    const double inner = a * q + 2.0 * root;
    const double lhs = std::log(q) + std::log(a * inner) + 2.0 * q;
    const double d_q = 1.0 / q + (a - 2.0 / root) / inner + 2.0;
    const double d_psi = 1.0 / (root * inner);
    return {lhs, d_q, d_psi};
}

constexpr double kDeepWeakLogCharge = -645.0;

struct ChargeSolution {
    double q;
    double dq_dvc;
    double dq_dpsi;
};

ChargeSolution solve_charge(const ModelParams& p, double psi, double n, double v_c, const SolverOptions& opts) {
    if (!(psi > 0.0) || !std::isfinite(psi)) throw DomainError("channel_charge: psi_p must be > 0");
    if (!(v_c >= 0.0) || !std::isfinite(v_c)) throw DomainError("channel_charge: v_c must be >= 0");
    if (!(p.gamma_b > 0.0)) throw DomainError("channel_charge: gamma_b must be > 0");
    if (!(n >= 1.0)) throw DomainError("channel_charge: slope factor must be >= 1");

    const double a = 2.0 * n / p.gamma_b;
    const double rhs = psi - v_c;

    // Work in u = ln q: q spans tens of decades between strong inversion and
    // deep subthreshold.
    auto residual = [&](double u) -> ValueSlope {
        const double q = std::exp(u);
        const ChargeTerms t = charge_terms(q, psi, a);
        return {t.lhs - rhs, q * t.d_q};
    };

    double u_hi = std::log(0.5 * psi);
    // Weak-inversion asymptote ln q ~ rhs - ln(2 a sqrt(psi)).
    const double u_weak = rhs - std::log(2.0 * a * std::sqrt(psi));
    if (u_weak < kDeepWeakLogCharge) {
        // q < 1e-280: the q-dependent terms are below double resolution and
        // the weak-inversion asymptote is exact.
        const double q = std::exp(u_weak);
        return {q, -q, q * (1.0 - 0.5 / psi)};
    }
    double u_lo = std::min(u_weak, u_hi) - 2.0;
    for (int k = 0; residual(u_lo).value >= 0.0; ++k) {
        if (k == 64 || u_lo < -700.0) throw SolverFailure("channel_charge: no lower bracket");
        u_lo -= 8.0;
    }

    if (residual(u_hi).value < 0.0) {
        // The left side is concave in q and falls steeply at the square-root
        // edge; the physical root sits on the rising branch below the peak.
        auto slope = [&](double u) { return residual(u).slope; };
        double u_edge = std::nextafter(u_hi, u_lo);
        while (!(slope(u_edge) < 0.0) && u_edge > u_lo) u_edge = std::nextafter(u_edge, u_lo);
        double u_peak = u_edge;
        if (slope(u_lo) > 0.0) {
            SolverOptions peak_opts = opts;
            peak_opts.abs_tol = std::numeric_limits<double>::min();
            peak_opts.rel_tol = 1e-15;
            u_peak = solve_bracketed(slope, u_lo, u_edge, peak_opts).value;
        }
        if (residual(u_peak).value < 0.0) {
            throw SolverFailure("channel_charge: relation has no root for psi_p = " + std::to_string(psi) +
                                ", v_c = " + std::to_string(v_c));
        }
        u_hi = u_peak;
    }

    double guess = u_weak < 0.0 ? u_weak : std::log(std::max(0.5 * (rhs - std::log(a * a * 0.25 * rhs)), 0.5));
    guess = std::clamp(guess, u_lo, u_hi);
    const SolveOutcome out = solve_bracketed(residual, u_lo, u_hi, opts, guess);
    if (!out.converged) throw SolverFailure("channel_charge: solve did not converge");

    const double q = std::exp(out.value);
    const ChargeTerms t = charge_terms(q, psi, a);
    return {q, -1.0 / t.d_q, (1.0 - t.d_psi) / t.d_q};
}

}  // namespace

double thermal_voltage(double t) {
    require_temperature(t, "thermal_voltage");
    return kBoltzmann * t / kElementaryCharge;
}

double flat_band(const ModelParams& p, double t) {
    require_temperature(t, "flat_band");
    return p.vfb0 + p.k_vfb * (t - p.t0);
}

ValueSlope pinch_off_residual(const ModelParams& p, double psi, double overdrive_norm) {
    const ValueSlope bulk = bulk_term(p.bulk_form, psi);
    const double ap = p.alpha * psi;
    const double interface = ap / (1.0 + ap);
    const double d_interface = p.alpha / ((1.0 + ap) * (1.0 + ap));
    return {psi + interface + p.gamma_b * bulk.value - overdrive_norm,
            1.0 + d_interface + p.gamma_b * bulk.slope};
}

double pinch_off_potential(const ModelParams& p, double vg, double t, const SolverOptions& opts) {
    const double overdrive = (vg - flat_band(p, t)) / thermal_voltage(t);
    if (!std::isfinite(overdrive)) throw DomainError("pinch_off_potential: non-finite gate voltage");
    if (overdrive <= 0.0) return 0.0;
    auto residual = [&](double psi) { return pinch_off_residual(p, psi, overdrive); };
    const SolveOutcome out = solve_bracketed(residual, 0.0, overdrive, opts);
    if (!out.converged) throw SolverFailure("pinch_off_potential: solve did not converge");
    return out.value;
}

double slope_factor(const ModelParams& p, double psi_p) {
    if (!(psi_p >= 0.0)) throw DomainError("slope_factor: psi_p must be >= 0");
    return 1.0 + p.gamma_b / (2.0 * std::sqrt(std::max(psi_p, kPsiFloorSlope)));
}

double channel_charge(const ModelParams& p, double psi_p, double n, double v_c, const SolverOptions& opts) {
    return solve_charge(p, psi_p, n, v_c, opts).q;
}

double channel_mobility(const ModelParams& p, double t) {
    require_temperature(t, "channel_mobility");
    return p.mu_ch0 * std::pow(t / p.t0, -p.p_mu);
}

double drift_mobility(const ModelParams& p, double t) {
    require_temperature(t, "drift_mobility");
    return p.mu_d0 * std::pow(t / p.t0, -p.p_mud);
}

double intrinsic_drain_current(const ModelParams& p, double q_src, double q_drn, double n, double t) {
    const double vt = thermal_voltage(t);
    return 2.0 * n * (p.w / p.l) * channel_mobility(p, t) * p.cox * (q_src - q_drn) * (q_src + q_drn + 1.0) * vt * vt;
}

double drift_resistance_linear(const ModelParams& p, double t) {
    return p.l_d / (drift_mobility(p, t) * kElementaryCharge * p.n_d * p.a_d);
}

double max_drift_current(const ModelParams& p) { return p.v_sat * kElementaryCharge * p.n_d * p.a_d; }

double drift_resistance(const ModelParams& p, double i_ds, double t) {
    if (!(i_ds >= 0.0)) throw DomainError("drift_resistance: current must be >= 0");
    const double r_lin = drift_resistance_linear(p, t);
    const double ratio = i_ds / max_drift_current(p);
    if (p.drift_form == DriftForm::printed) {
        return r_lin / std::pow(1.0 + std::pow(ratio, p.beta_r), 1.0 / p.beta_r);
    }
    const double r = std::min(ratio, 1.0 - p.eps_clamp);
    return r_lin / std::pow(1.0 - std::pow(r, p.beta_r), 1.0 / p.beta_r);
}

double junction_temperature(const ModelParams& p, double power, double t_case) {
    if (!(power >= 0.0)) throw DomainError("junction_temperature: power must be >= 0");
    return t_case + p.r_th * power;
}

ChannelState evaluate_channel(const ModelParams& p, double vgs, double vds, double t, const SolverOptions& opts) {
    const double vt = thermal_voltage(t);
    ChannelState s;
    s.psi_p = pinch_off_potential(p, vgs, t, opts);
    s.n = slope_factor(p, s.psi_p);
    const double psi = std::max(s.psi_p, kPsiFloorCharge);
    const double vc_src = p.phi0 / vt;
    const ChargeSolution src = solve_charge(p, psi, s.n, vc_src, opts);
    const ChargeSolution drn = vds > 0.0 ? solve_charge(p, psi, s.n, vc_src + vds / vt, opts) : src;
    s.q_src = src.q;
    s.q_drn = drn.q;
    s.id = intrinsic_drain_current(p, s.q_src, s.q_drn, s.n, t);

    // Partial derivatives at fixed slope factor; used as Newton slopes.
    const double k = 2.0 * s.n * (p.w / p.l) * channel_mobility(p, t) * p.cox * vt * vt;
    const double di_dqs = k * (2.0 * s.q_src + 1.0);
    const double di_dqd = -k * (2.0 * s.q_drn + 1.0);
    s.gds = di_dqd * drn.dq_dvc / vt;
    if (s.psi_p > kPsiFloorCharge) {
        const double overdrive = (vgs - flat_band(p, t)) / vt;
        const double dpsi_dvg = 1.0 / (vt * pinch_off_residual(p, s.psi_p, overdrive).slope);
        s.gm = (di_dqs * src.dq_dpsi + di_dqd * drn.dq_dpsi) * dpsi_dvg;
    }
    return s;
}

namespace {

struct ElectricalResult {
    ChannelState channel;
    double id = 0.0;
    double vds_int = 0.0;
    double r_drift = 0.0;
    bool converged = true;
};

// Terminal current at a fixed junction temperature: a bracketed solve on the
// current normalized by the zero-drop channel current.
ElectricalResult solve_electrical(const ModelParams& p, double vgs, double vds, double t, const BiasOptions& opts) {
    ElectricalResult res;
    const ChannelState open = evaluate_channel(p, vgs, vds, t, opts.root);
    res.channel = open;
    res.r_drift = drift_resistance(p, 0.0, t);
    const double scale = open.id;
    if (!(scale > 0.0)) {
        res.vds_int = vds;
        return res;
    }

    const double i_max = max_drift_current(p);
    struct Eval {
        double x = -1.0;
        ElectricalResult state;
    } last;

    auto residual = [&](double x) -> ValueSlope {
        const double id = x * scale;
        const double r_drift = drift_resistance(p, id, t);
        const double r_series = r_drift + p.r_s + p.r_d_contact;
        const double vds_int = vds - id * r_series;
        last.x = x;
        last.state.id = id;
        last.state.r_drift = r_drift;
        if (vds_int <= 0.0) {
            last.state.vds_int = 0.0;
            last.state.channel = evaluate_channel(p, vgs - id * p.r_s, 0.0, t, opts.root);
            return {x, 1.0};
        }
        const ChannelState ch = evaluate_channel(p, vgs - id * p.r_s, vds_int, t, opts.root);
        last.state.vds_int = vds_int;
        last.state.channel = ch;

        double dr_di = 0.0;
        if (p.drift_form == DriftForm::saturating) {
            const double r = id / i_max;
            if (r < 1.0 - p.eps_clamp && r > 0.0) {
                const double rb = std::pow(r, p.beta_r);
                dr_di = r_drift / (1.0 - rb) * rb / id;
            }
        }
        const double slope = 1.0 + ch.gm * p.r_s + ch.gds * (r_series + id * dr_di);
        return {x - ch.id / scale, slope};
    };

    SolverOptions current_opts = opts.root;
    current_opts.abs_tol = opts.current_rel_tol;
    current_opts.rel_tol = 1e-15;
    const double guess = 1.0 / (1.0 + open.gm * p.r_s + open.gds * (res.r_drift + p.r_s + p.r_d_contact));
    const SolveOutcome out = solve_bracketed(residual, 0.0, 1.0, current_opts, guess);
    if (last.x != out.value) residual(out.value);
    res = last.state;
    res.converged = out.converged;
    return res;
}

}  // namespace

BiasSolution solve_bias_point(const ModelParams& p, const OperatingPoint& op, const BiasOptions& opts) {
    if (!std::isfinite(op.vgs) || !std::isfinite(op.vds) || !std::isfinite(op.t_case)) {
        throw DomainError("solve_bias_point: non-finite operating point");
    }
    if (op.vds < 0.0) throw DomainError("solve_bias_point: vds must be >= 0");
    require_temperature(op.t_case, "solve_bias_point");

    auto fill = [&](const ElectricalResult& e, double t_j, bool converged, int iterations) {
        BiasSolution s;
        s.id = e.id;
        s.psi_p = e.channel.psi_p;
        s.q_src = e.channel.q_src;
        s.q_drn = e.channel.q_drn;
        s.vds_int = e.vds_int;
        s.r_drift = e.r_drift;
        s.t_j = t_j;
        s.n_slope = e.channel.n;
        s.converged = converged && e.converged;
        s.iterations = iterations;
        return s;
    };

    const ElectricalResult cold = solve_electrical(p, op.vgs, op.vds, op.t_case, opts);
    if (!opts.self_heating || p.r_th == 0.0 || cold.id == 0.0) {
        return fill(cold, op.t_case, true, 0);
    }

    ElectricalResult latest = cold;
    double latest_t = op.t_case;
    auto heat = [&](double t_j) {
        latest = solve_electrical(p, op.vgs, op.vds, t_j, opts);
        latest_t = t_j;
        return junction_temperature(p, latest.id * op.vds, op.t_case);
    };

    SolverOptions thermal;
    thermal.abs_tol = opts.thermal_tol;
    thermal.rel_tol = 1e-15;
    thermal.max_iter = opts.thermal_max_iter;
    thermal.damping = opts.thermal_damping;
    // First step undamped: start from the cold-channel heating estimate.
    const double t_start = junction_temperature(p, cold.id * op.vds, op.t_case);
    const SolveOutcome out = fixed_point(heat, t_start, thermal);
    if (latest_t != out.value) heat(out.value);
    return fill(latest, junction_temperature(p, latest.id * op.vds, op.t_case), out.converged, out.iterations);
}

double on_resistance(const ModelParams& p, double vgs, double t_case, const BiasOptions& opts) {
    const BiasSolution s = solve_bias_point(p, {vgs, kRonProbeVds, t_case}, opts);
    if (!s.converged) throw SolverFailure("on_resistance: bias point did not converge");
    if (!(s.id > 0.0)) return std::numeric_limits<double>::infinity();
    return kRonProbeVds / s.id;
}

}  // namespace sicmos
