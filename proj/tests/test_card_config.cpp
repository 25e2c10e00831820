#include <gtest/gtest.h>

#include <sstream>

#include "sicmos/config.hpp"
#include "sicmos/errors.hpp"
#include "sicmos/model_card.hpp"

using namespace sicmos;

namespace {

ModelCard sample_card() {
    ModelCard c;
    c.device_name = "sample";
    c.params = dut_160mohm_1200v();
    c.params.r_s = 0.1 + 0.2;  // not exactly representable as a short decimal
    c.params.mu_ch0 = 1.0 / 3.0 * 1e-3;
    c.params.drift_form = DriftForm::printed;
    c.provenance = {{"fit_date", "2026-01-01T00:00:00Z"}, {"note", "x"}};
    return c;
}

std::string json_of(const ModelCard& c) {
    std::ostringstream out;
    write_card(out, c);
    return out.str();
}

ModelCard card_from(const std::string& text) {
    std::istringstream in(text);
    return read_card(in);
}

RunConfig config_from(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST(ModelCard, JsonRoundTripIsLossless) {
    const ModelCard c = sample_card();
    EXPECT_EQ(card_from(json_of(c)), c);
}

TEST(ModelCard, UnknownKeysRejected) {
    std::string text = json_of(sample_card());
    const auto pos = text.find("\"device_name\"");
    text.insert(pos, "\"extra\": 1, ");
    EXPECT_THROW(card_from(text), SchemaError);
}

TEST(ModelCard, SchemaViolations) {
    const std::string good = json_of(sample_card());
    auto replaced = [&](const std::string& from, const std::string& to) {
        std::string t = good;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    EXPECT_THROW(card_from(replaced("\"schema_version\": 1", "\"schema_version\": 2")), SchemaError);
    EXPECT_THROW(card_from(replaced("\"F/m^2\"", "\"F/cm^2\"")), SchemaError);
    EXPECT_THROW(card_from(replaced("\"cox\"", "\"cox_typo\"")), SchemaError);
    EXPECT_THROW(card_from(replaced("\"printed\"", "\"other\"")), SchemaError);
    EXPECT_THROW(card_from("{not json"), SchemaError);
    EXPECT_THROW(read_card(std::filesystem::path("/nonexistent/card.json")), IoError);
}

TEST(ModelCard, FlatExportRoundTrip) {
    const ModelCard c = sample_card();
    std::stringstream flat;
    export_flat(flat, c);
    const std::string text = flat.str();
    EXPECT_NE(text.find("cox=0.00069 # F/m^2"), std::string::npos);
    const ModelCard back = import_flat(flat);
    EXPECT_EQ(back.params, c.params);
    EXPECT_EQ(back.device_name, c.device_name);
}

TEST(ModelCard, FlatExportKeyOrderIsDeterministic) {
    std::ostringstream a;
    std::ostringstream b;
    export_flat(a, sample_card());
    export_flat(b, sample_card());
    EXPECT_EQ(a.str(), b.str());
    std::size_t last = 0;
    for (const auto& info : param_table()) {
        const auto pos = a.str().find("\n" + std::string(info.name) + "=");
        ASSERT_NE(pos, std::string::npos) << info.name;
        EXPECT_GT(pos, last);
        last = pos;
    }
}

TEST(ModelCard, FlatImportRejectsUnknownNames) {
    std::istringstream in("bogus=1 # V\n");
    EXPECT_THROW(import_flat(in), SchemaError);
}

TEST(ModelCard, ShippedPresetMatchesBuiltIn) {
    const ModelCard c = preset_card(kDut160Name);
    EXPECT_EQ(c.params, dut_160mohm_1200v());
    EXPECT_EQ(c.device_name, kDut160Name);
    EXPECT_EQ(preset_card("dut_160mohm_1200v").params, dut_160mohm_1200v());
    EXPECT_TRUE(std::filesystem::exists(preset_directory() / "dut_160mohm_1200v.json"));
    EXPECT_THROW(preset_card("no-such-device"), SchemaError);
}

TEST(Config, FullExample) {
    const auto cfg = config_from(R"(
; comment
[model]
preset = DUT-160mOhm-1200V

[sweep.fig6]
kind = output
start = 0.005
stop = 800
points = 50
scale = log
fixed_bias = 6:20:0.5
t_case = 325
self_heating = false

[sweep.transfer]
kind = transfer
start = 0
stop = 20
points = 41
fixed_bias = 0.1, 5, 10

[fit]
vds_lin_max = 0.4
vds_mid_max = 20
polish = false
restarts = 1
max_iter = 50

[fit.only]
free = r_s, mu_d0
region = output_midV
weighting = relative
bounds.r_s = 0, 0.05
bounds.mu_d0 = 0.01, 0.5
)");
    EXPECT_EQ(cfg.preset, "DUT-160mOhm-1200V");
    ASSERT_EQ(cfg.sweeps.size(), 2u);
    EXPECT_EQ(cfg.sweeps[0].name, "sweep.fig6");
    EXPECT_EQ(cfg.sweeps[0].spec.fixed_bias.size(), 29u);
    EXPECT_DOUBLE_EQ(cfg.sweeps[0].spec.fixed_bias.back(), 20.0);
    EXPECT_EQ(cfg.sweeps[0].spec.scale, GridScale::log);
    EXPECT_EQ(cfg.sweeps[0].spec.t_case, 325.0);
    EXPECT_FALSE(cfg.sweeps[0].spec.self_heating);
    EXPECT_EQ(cfg.sweeps[1].kind, SweepKind::transfer);
    EXPECT_EQ(cfg.sweeps[1].spec.axis, SweepAxis::vgs);
    EXPECT_EQ(cfg.sweeps[1].spec.fixed_bias, (std::vector<double>{0.1, 5.0, 10.0}));
    EXPECT_EQ(cfg.thresholds.vds_lin_max, 0.4);
    EXPECT_FALSE(cfg.polish);
    EXPECT_EQ(cfg.restarts, 1);
    EXPECT_EQ(cfg.max_iter, 50);
    const auto schedule = cfg.schedule();
    ASSERT_EQ(schedule.size(), 1u);
    EXPECT_EQ(schedule[0].name, "only");
    EXPECT_EQ(schedule[0].region, Region::output_midV);
    EXPECT_EQ(schedule[0].bounds[1], (std::pair<double, double>{0.01, 0.5}));
}

TEST(Config, DefaultScheduleWhenNoStages) {
    const auto cfg = config_from("[fit]\npolish = true\n");
    EXPECT_EQ(cfg.schedule().size(), 4u);
    const auto all = config_from("[fit.x]\nfree = r_th\nregion = all\n");
    EXPECT_FALSE(all.schedule()[0].region.has_value());
}

TEST(Config, SchemaErrors) {
    EXPECT_THROW(config_from("[bogus]\na = 1\n"), SchemaError);
    EXPECT_THROW(config_from("[model]\ncolour = red\n"), SchemaError);
    EXPECT_THROW(config_from("[sweep]\nkind = output\nstart = 1\nstop = 0\npoints = 3\nfixed_bias = 1\n"), SchemaError);
    EXPECT_THROW(config_from("[sweep]\nkind = sideways\nstart = 0\nstop = 1\npoints = 3\nfixed_bias = 1\n"),
                 SchemaError);
    EXPECT_THROW(config_from("[sweep]\nstart = 0\nstop = 1\npoints = 3\n"), SchemaError);
    EXPECT_THROW(config_from("[sweep]\nstart = 0\nstop = x\npoints = 3\nfixed_bias = 1\n"), SchemaError);
    EXPECT_THROW(config_from("[fit]\nvds_lin_max = 10\nvds_mid_max = 5\n"), SchemaError);
    EXPECT_THROW(config_from("[fit.a]\nfree = nope\n"), SchemaError);
    EXPECT_THROW(config_from("[fit.a]\nfree = r_s\nregion = middle\n"), SchemaError);
    EXPECT_THROW(config_from("[fit.a]\nfree = r_s, r_th\nbounds.r_s = 0, 1\n"), SchemaError);
    EXPECT_THROW(read_config("/nonexistent/config.ini"), SchemaError);
}
