#include "sicmos/params.hpp"

#include <array>
#include <cmath>
#include <string>

#include "sicmos/errors.hpp"

namespace sicmos {

namespace {

constexpr std::array kParams = {
    ParamInfo{"vfb0", "V", &ModelParams::vfb0},
    ParamInfo{"k_vfb", "V/K", &ModelParams::k_vfb},
    ParamInfo{"alpha", "1", &ModelParams::alpha},
    ParamInfo{"gamma_b", "1", &ModelParams::gamma_b},
    ParamInfo{"phi0", "V", &ModelParams::phi0},
    ParamInfo{"w", "m", &ModelParams::w},
    ParamInfo{"l", "m", &ModelParams::l},
    ParamInfo{"cox", "F/m^2", &ModelParams::cox},
    ParamInfo{"mu_ch0", "m^2/(V*s)", &ModelParams::mu_ch0},
    ParamInfo{"p_mu", "1", &ModelParams::p_mu},
    ParamInfo{"l_d", "m", &ModelParams::l_d},
    ParamInfo{"a_d", "m^2", &ModelParams::a_d},
    ParamInfo{"n_d", "1/m^3", &ModelParams::n_d},
    ParamInfo{"mu_d0", "m^2/(V*s)", &ModelParams::mu_d0},
    ParamInfo{"p_mud", "1", &ModelParams::p_mud},
    ParamInfo{"v_sat", "m/s", &ModelParams::v_sat},
    ParamInfo{"beta_r", "1", &ModelParams::beta_r},
    ParamInfo{"r_s", "Ohm", &ModelParams::r_s},
    ParamInfo{"r_d_contact", "Ohm", &ModelParams::r_d_contact},
    ParamInfo{"r_th", "K/W", &ModelParams::r_th},
    ParamInfo{"t0", "K", &ModelParams::t0},
    ParamInfo{"eps_clamp", "1", &ModelParams::eps_clamp},
};

void require(bool ok, const char* message) {
    if (!ok) throw DomainError(std::string("ModelParams: ") + message);
}

}  // namespace

std::span<const ParamInfo> param_table() { return kParams; }

std::optional<ParamInfo> find_param(std::string_view name) {
    for (const auto& info : kParams) {
        if (info.name == name) return info;
    }
    return std::nullopt;
}

void ModelParams::validate() const {
    for (const auto& info : kParams) {
        if (!std::isfinite(this->*info.member)) {
            throw DomainError("ModelParams: " + std::string(info.name) + " is not finite");
        }
    }
    require(w > 0 && l > 0 && cox > 0, "w, l and cox must be > 0");
    require(mu_ch0 > 0 && mu_d0 > 0, "mobilities must be > 0");
    require(l_d > 0 && a_d > 0 && n_d > 0 && v_sat > 0, "drift region magnitudes must be > 0");
    require(t0 > 0, "t0 must be > 0");
    require(alpha >= 0 && gamma_b >= 0 && phi0 >= 0, "alpha, gamma_b and phi0 must be >= 0");
    require(r_s >= 0 && r_d_contact >= 0 && r_th >= 0, "resistances must be >= 0");
    require(beta_r >= 1, "beta_r must be >= 1");
    require(eps_clamp > 0 && eps_clamp < 1e-2, "eps_clamp must lie in (0, 1e-2)");
}

std::string_view to_string(BulkForm form) {
    return form == BulkForm::accumulation ? "accumulation" : "printed";
}

std::string_view to_string(DriftForm form) {
    return form == DriftForm::saturating ? "saturating" : "printed";
}

BulkForm parse_bulk_form(std::string_view text) {
    if (text == "accumulation") return BulkForm::accumulation;
    if (text == "printed") return BulkForm::printed;
    throw DomainError("unknown bulk_form '" + std::string(text) + "'");
}

DriftForm parse_drift_form(std::string_view text) {
    if (text == "saturating") return DriftForm::saturating;
    if (text == "printed") return DriftForm::printed;
    throw DomainError("unknown drift_form '" + std::string(text) + "'");
}

ModelParams dut_160mohm_1200v() { return ModelParams{}; }

std::optional<ModelParams> preset_by_name(std::string_view name) {
    if (name == kDut160Name || name == "DUT-160mOhm-1200V") return dut_160mohm_1200v();
    return std::nullopt;
}

}  // namespace sicmos
