#include "sicmos/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "sicmos/config.hpp"
#include "sicmos/dataset.hpp"
#include "sicmos/errors.hpp"
#include "sicmos/extraction.hpp"
#include "sicmos/model_card.hpp"
#include "sicmos/sweep.hpp"

namespace sicmos::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalArgs {
    std::string config;
    std::string output;
    unsigned threads = 0;
    std::string preset;
    std::string card;
    std::string data;
    std::string format = "flat";
};

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
    char buffer[1 << 16];
    while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buffer, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &length);
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::optional<RunConfig> load_config(const GlobalArgs& args, bool required) {
    if (args.config.empty()) {
        if (required) throw SchemaError("--config is required for this command");
        return std::nullopt;
    }
    return read_config(args.config);
}

/// Card selection: --card, then --preset, then [model] in the config, then the built-in preset.
ModelCard select_card(const GlobalArgs& args, const std::optional<RunConfig>& cfg) {
    if (!args.card.empty()) return read_card(fs::path(args.card));
    if (!args.preset.empty()) return preset_card(args.preset);
    if (cfg && cfg->card) return read_card(*cfg->card);
    if (cfg && cfg->preset) return preset_card(*cfg->preset);
    return preset_card(kDut160Name);
}

MeasurementSet load_data(const GlobalArgs& args, const std::optional<RunConfig>& cfg) {
    if (args.data.empty()) throw SchemaError("--data is required for this command");
    MeasurementSet set = load_measurements(fs::path(args.data));
    if (cfg) set = partition_regions(std::move(set), cfg->thresholds);
    return set;
}

/// Writes to `path`, or to `out` when path is empty or "-".
template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer&& write) {
    if (path.empty() || path == "-") {
        write(out);
        return;
    }
    std::ofstream file(path);
    if (!file) throw IoError("cannot write " + path);
    write(file);
    file.flush();
    if (!file) throw IoError("write failed for " + path);
}

int cmd_sweep(const GlobalArgs& args, std::ostream& out) {
    const auto cfg = load_config(args, true);
    if (cfg->sweeps.empty()) throw SchemaError("config has no [sweep] section");
    const ModelCard card = select_card(args, cfg);

    std::vector<std::pair<std::string, std::vector<Curve>>> results;
    for (const auto& job : cfg->sweeps) {
        SweepOptions opts;
        opts.threads = args.threads;
        std::vector<Curve> curves;
        switch (job.kind) {
            case SweepKind::output:
                curves = output_sweep(card.params, job.spec, opts);
                break;
            case SweepKind::transfer:
                curves = transfer_sweep(card.params, job.spec, opts);
                break;
            case SweepKind::transconductance:
                curves = transconductance(card.params, job.spec, opts);
                break;
        }
        results.emplace_back(job.name, std::move(curves));
    }

    const bool prefix = results.size() > 1;
    emit(args.output, out, [&](std::ostream& os) {
        os << "label,x_V,y,converged,tj_K\n";
        for (const auto& [name, curves] : results) {
            for (const auto& curve : curves) {
                const std::string label = prefix ? name + "/" + curve.label : curve.label;
                for (std::size_t i = 0; i < curve.x.size(); ++i) {
                    os << fmt::format("{},{},{},{},{}\n", label, curve.x[i], curve.y[i],
                                      curve.meta[i].converged ? 1 : 0, curve.meta[i].t_j);
                }
            }
        }
    });
    return kExitOk;
}

void write_report(std::ostream& os, const FitReport& report, const std::vector<FitStageSpec>& schedule) {
    os << "# sicmos fit report\n";
    os << fmt::format("completed={}\n", report.completed);
    if (!report.completed) os << "failure=" << report.failure << '\n';
    for (const auto& stage : schedule) {
        os << fmt::format("schedule {} region={} weighting={} free={}\n", stage.name,
                          stage.region ? to_string(*stage.region) : "all", to_string(stage.weighting),
                          fmt::join(stage.free_params, ","));
    }
    for (const auto& s : report.per_stage) {
        os << fmt::format("stage {} iterations={} evaluations={} start_error={} end_error={}\n", s.name, s.iterations,
                          s.evaluations, s.start_error, s.end_error);
    }
    for (const auto& [region, rms] : report.per_region_rms) {
        os << fmt::format("region {} rms={}\n", to_string(region), rms ? fmt::format("{}", *rms) : "n/a");
    }
    os << fmt::format("overall rms={}\n", report.overall_rms);
    for (const auto& info : param_table()) {
        os << fmt::format("param {} initial={} final={} unit={}\n", info.name, report.initial_params.*(info.member),
                          report.final_params.*(info.member), info.unit);
    }
    for (const auto& s : report.per_stage) {
        os << fmt::format("trace {} {}\n", s.name, fmt::join(s.trace, " "));
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

int cmd_fit(const GlobalArgs& args, std::ostream& out) {
    if (args.output.empty() || args.output == "-") throw SchemaError("fit needs --output <card.json>");
    const auto cfg = load_config(args, false);
    const ModelCard initial = select_card(args, cfg);
    const MeasurementSet set = load_data(args, cfg);

    const RunConfig defaults;
    const RunConfig& run = cfg ? *cfg : defaults;
    const auto schedule = run.schedule();
    FitOptions opts;
    opts.eval.threads = args.threads;
    opts.restarts = run.restarts;
    opts.max_iter = run.max_iter;
    const FitReport report = fit_all(initial.params, set, schedule, opts);

    ModelCard card;
    card.device_name = initial.device_name;
    card.params = report.final_params;
    card.provenance = {
        {"fit_date", utc_timestamp()},
        {"data_file", fs::path(args.data).filename().string()},
        {"data_sha256", sha256_file(args.data)},
        {"initial_card", initial.device_name},
    };
    const fs::path card_path = args.output;
    write_card(card_path, card);
    fs::path report_path = card_path;
    report_path.replace_extension(".report.txt");
    emit(report_path.string(), out, [&](std::ostream& os) { write_report(os, report, schedule); });

    out << fmt::format("card={} report={} overall_rms={}\n", card_path.string(), report_path.string(),
                       report.overall_rms);
    if (!report.completed) {
        out << "stage aborted: " << report.failure << '\n';
        return kExitStageAbort;
    }
    return kExitOk;
}

int cmd_validate(const GlobalArgs& args, std::ostream& out) {
    const auto cfg = load_config(args, false);
    const ModelCard card = select_card(args, cfg);
    const MeasurementSet set = load_data(args, cfg);
    ErrorOptions opts;
    opts.threads = args.threads;

    out << fmt::format("device={}\n", card.device_name);
    for (Region region : kAllRegions) {
        const auto idx = set.indices(region);
        if (idx.empty()) {
            out << fmt::format("region={} n=0 rms=n/a worst=n/a\n", to_string(region));
            continue;
        }
        const double rms = model_error(card.params, set, idx, Weighting::relative, opts);
        const auto [worst, at] = worst_deviation(card.params, set, idx, opts);
        const auto& r = set.records[at];
        out << fmt::format("region={} n={} rms={} worst={} worst_vgs={} worst_vds={}\n", to_string(region), idx.size(),
                           rms, worst, r.vgs, r.vds);
    }
    out << fmt::format("overall n={} rms={}\n", set.size(), model_error(card.params, set, Weighting::relative, opts));
    return kExitOk;
}

int cmd_export(const GlobalArgs& args, std::ostream& out) {
    const auto cfg = load_config(args, false);
    const ModelCard card = select_card(args, cfg);
    emit(args.output, out, [&](std::ostream& os) { export_flat(os, card); });
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"SiC power MOSFET compact model: sweeps, fitting, validation and export", "sicmos"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs args;
    app.add_option("--config", args.config, "Run configuration (INI)");
    app.add_option("--output", args.output, "Output file ('-' for stdout)");
    app.add_option("--threads", args.threads, "Worker threads (0 = all cores)");
    app.add_option("--preset", args.preset, "Preset device name");
    app.add_option("--card", args.card, "Model card (JSON)");
    app.add_option("--data", args.data, "Measurement CSV");

    auto* sweep = app.add_subcommand("sweep", "Evaluate the [sweep] sections of --config to CSV");
    auto* fit = app.add_subcommand("fit", "Fit the model to --data and write a card to --output");
    auto* validate = app.add_subcommand("validate", "Report model-vs-data RMS per region");
    auto* exporter = app.add_subcommand("export", "Write the card in a flat name=value format");
    exporter->add_option("--format", args.format, "Export format")->check(CLI::IsMember({"flat"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(args, out);
        if (fit->parsed()) return cmd_fit(args, out);
        if (validate->parsed()) return cmd_validate(args, out);
        if (exporter->parsed()) return cmd_export(args, out);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitConfig;
}

}  // namespace sicmos::cli
