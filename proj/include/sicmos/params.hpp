#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sicmos {

/// Form of the bulk-charge term in the pinch-off relation.
enum class BulkForm {
    /// gamma*sqrt(exp(-psi) + psi - 1): smooth through flat band, linear-ish
    /// growth of psi with gate drive.
    accumulation,
    /// gamma*sqrt(exp(psi) + psi - 1); psi_p then grows only logarithmically
    /// with gate drive. Kept for A/B comparison.
    printed,
};

/// Form of the current dependence of the drift resistance.
enum class DriftForm {
    /// R_lin / (1 - r^beta)^(1/beta), r clamped below 1: resistance rises
    /// and diverges as the current approaches I_max.
    saturating,
    /// R_lin / (1 + r^beta)^(1/beta): resistance falls with current. Kept for A/B comparison.
    printed,
};

/// Device and model parameters, SI units. Immutable once handed to the model.
struct ModelParams {
    double vfb0 = -2.0;          // V, flat-band voltage at t0
    double k_vfb = -18e-3;       // V/K, flat-band temperature coefficient
    double alpha = 0.05;         // 1/(normalized potential), interface-charge shape
    double gamma_b = 12.0;       // sqrt(normalized potential), body-effect coefficient
    double phi0 = 2.8;           // V, surface potential at inversion onset
    double w = 0.4;              // m, channel width
    double l = 1.0e-6;           // m, channel length
    double cox = 6.9e-4;         // F/m^2
    double mu_ch0 = 2.0e-3;      // m^2/(V s), channel mobility at t0
    double p_mu = 0.1;           // channel mobility temperature exponent
    double l_d = 1.0e-5;         // m, drift region length
    double a_d = 2.5e-6;         // m^2, drift region area
    double n_d = 8.0e21;         // 1/m^3, drift doping
    double mu_d0 = 0.09;         // m^2/(V s), drift mobility at t0
    double p_mud = 2.4;          // drift mobility temperature exponent
    double v_sat = 5.0e4;        // m/s, drift saturation velocity
    double beta_r = 2.0;         // drift-resistance transition exponent
    double r_s = 0.010;          // ohm, extrinsic source resistance
    double r_d_contact = 0.010;  // ohm, extrinsic drain contact resistance
    double r_th = 2.0e-3;        // K/W, junction-to-case thermal resistance
    double t0 = 300.0;           // K, reference temperature
    double eps_clamp = 1e-6;     // drift-current clamp margin
    BulkForm bulk_form = BulkForm::accumulation;
    DriftForm drift_form = DriftForm::saturating;

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// Name, unit and member of one real-valued ModelParams field.
struct ParamInfo {
    std::string_view name;
    std::string_view unit;
    double ModelParams::*member;
};

/// All real-valued fields in declaration order.
std::span<const ParamInfo> param_table();

/// Lookup by field name; nullopt for unknown names.
std::optional<ParamInfo> find_param(std::string_view name);

std::string_view to_string(BulkForm form);
std::string_view to_string(DriftForm form);
BulkForm parse_bulk_form(std::string_view text);
DriftForm parse_drift_form(std::string_view text);

/// Preset for the 160 mOhm / 1200 V device.
ModelParams dut_160mohm_1200v();

inline constexpr std::string_view kDut160Name = "DUT-160mΩ-1200V";

/// Resolves a preset by name (the ASCII spelling "DUT-160mOhm-1200V" is accepted too).
std::optional<ModelParams> preset_by_name(std::string_view name);

}  // namespace sicmos
