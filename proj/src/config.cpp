#include "sicmos/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sicmos/errors.hpp"

namespace sicmos {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
        throw SchemaError(where + ": expected a number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& text, const std::string& where) {
    int v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        throw SchemaError(where + ": expected an integer, got '" + text + "'");
    }
    return v;
}

bool to_bool(const std::string& text, const std::string& where) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw SchemaError(where + ": expected a boolean, got '" + text + "'");
}

std::vector<double> parse_bias_list(const std::string& text, const std::string& where) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw SchemaError(where + ": range must be start:stop:step");
        const double start = to_double(parts[0], where);
        const double stop = to_double(parts[1], where);
        const double step = to_double(parts[2], where);
        if (!(step > 0.0) || stop < start) throw SchemaError(where + ": invalid range");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long k = 0; k <= count; ++k) values.push_back(start + step * static_cast<double>(k));
        return values;
    }
    for (const auto& item : split(text, ',')) values.push_back(to_double(item, where));
    return values;
}

void check_keys(const pt::ptree& section, const std::string& name, const std::set<std::string>& allowed,
                const std::string& prefix_allowed = {}) {
    for (const auto& [key, _] : section) {
        if (allowed.contains(key)) continue;
        if (!prefix_allowed.empty() && key.starts_with(prefix_allowed)) continue;
        throw SchemaError("config: unknown key '" + key + "' in [" + name + "]");
    }
}

SweepJob parse_sweep(const std::string& name, const pt::ptree& s) {
    check_keys(s, name, {"kind", "start", "stop", "points", "scale", "fixed_bias", "t_case", "self_heating"});
    auto get = [&](const char* key) -> std::optional<std::string> {
        if (auto v = s.get_optional<std::string>(pt::ptree::path_type(key, '/'))) return trim(*v);
        return std::nullopt;
    };
    auto require = [&](const char* key) {
        auto v = get(key);
        if (!v) throw SchemaError("config: [" + name + "] needs '" + key + "'");
        return *v;
    };
    const std::string where = "config [" + name + "]";

    SweepJob job;
    job.name = name;
    const std::string kind = get("kind").value_or("output");
    if (kind == "output") {
        job.kind = SweepKind::output;
    } else if (kind == "transfer") {
        job.kind = SweepKind::transfer;
    } else if (kind == "transconductance") {
        job.kind = SweepKind::transconductance;
    } else {
        throw SchemaError(where + ": unknown kind '" + kind + "'");
    }
    job.spec.axis = job.kind == SweepKind::output ? SweepAxis::vds : SweepAxis::vgs;
    job.spec.start = to_double(require("start"), where + " start");
    job.spec.stop = to_double(require("stop"), where + " stop");
    job.spec.points = to_int(require("points"), where + " points");
    const std::string scale = get("scale").value_or("linear");
    if (scale == "linear") {
        job.spec.scale = GridScale::linear;
    } else if (scale == "log") {
        job.spec.scale = GridScale::log;
    } else {
        throw SchemaError(where + ": unknown scale '" + scale + "'");
    }
    job.spec.fixed_bias = parse_bias_list(require("fixed_bias"), where + " fixed_bias");
    if (auto t = get("t_case")) job.spec.t_case = to_double(*t, where + " t_case");
    if (auto h = get("self_heating")) job.spec.self_heating = to_bool(*h, where + " self_heating");
    if (job.spec.points < 2 || !(job.spec.start < job.spec.stop) ||
        (job.spec.scale == GridScale::log && !(job.spec.start > 0.0)) || !(job.spec.t_case > 0.0)) {
        throw SchemaError(where + ": invalid sweep range");
    }
    return job;
}

FitStageSpec parse_stage(const std::string& name, const pt::ptree& s) {
    check_keys(s, name, {"free", "region", "weighting"}, "bounds.");
    const std::string where = "config [" + name + "]";
    FitStageSpec stage;
    stage.name = name.substr(4);
    const auto free = s.get_optional<std::string>(pt::ptree::path_type("free", '/'));
    if (!free) throw SchemaError(where + ": needs 'free'");
    stage.free_params = split(*free, ',');

    const std::string region = trim(s.get<std::string>(pt::ptree::path_type("region", '/'), "all"));
    if (region != "all") {
        stage.region = parse_region(region);
        if (!stage.region) throw SchemaError(where + ": unknown region '" + region + "'");
    }
    const std::string weighting = trim(s.get<std::string>(pt::ptree::path_type("weighting", '/'), "relative"));
    const auto w = parse_weighting(weighting);
    if (!w) throw SchemaError(where + ": unknown weighting '" + weighting + "'");
    stage.weighting = *w;

    std::size_t bound_count = 0;
    for (const auto& [key, _] : s) bound_count += key.starts_with("bounds.");
    if (bound_count > 0) {
        for (const auto& param : stage.free_params) {
            const auto text = s.get_optional<std::string>(pt::ptree::path_type("bounds." + param, '/'));
            if (!text) throw SchemaError(where + ": bounds given for some but not all free parameters");
            const auto parts = split(*text, ',');
            if (parts.size() != 2) throw SchemaError(where + ": bounds." + param + " must be lo,hi");
            stage.bounds.emplace_back(to_double(parts[0], where), to_double(parts[1], where));
        }
        if (bound_count != stage.free_params.size()) throw SchemaError(where + ": bounds for non-free parameters");
    }
    try {
        stage.validate();
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }
    return stage;
}

}  // namespace

std::vector<FitStageSpec> RunConfig::schedule() const { return stages.empty() ? default_schedule(polish) : stages; }

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }

    RunConfig cfg;
    for (const auto& [name, section] : tree) {
        if (section.empty() && !section.data().empty()) {
            throw SchemaError("config: key '" + name + "' outside a section");
        }
        const std::string where = "config [" + name + "]";
        if (name == "model") {
            check_keys(section, name, {"preset", "card"});
            if (auto p = section.get_optional<std::string>("preset")) cfg.preset = trim(*p);
            if (auto c = section.get_optional<std::string>("card")) {
                std::filesystem::path path = trim(*c);
                cfg.card = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
            }
        } else if (name == "sweep" || name.starts_with("sweep.")) {
            cfg.sweeps.push_back(parse_sweep(name, section));
        } else if (name == "fit") {
            check_keys(section, name, {"vds_lin_max", "vds_mid_max", "polish", "restarts", "max_iter"});
            for (const auto& [key, node] : section) {
                const std::string value = trim(node.data());
                if (key == "vds_lin_max") cfg.thresholds.vds_lin_max = to_double(value, where);
                if (key == "vds_mid_max") cfg.thresholds.vds_mid_max = to_double(value, where);
                if (key == "polish") cfg.polish = to_bool(value, where);
                if (key == "restarts") cfg.restarts = to_int(value, where);
                if (key == "max_iter") cfg.max_iter = to_int(value, where);
            }
            if (!(cfg.thresholds.vds_lin_max > 0.0 && cfg.thresholds.vds_lin_max < cfg.thresholds.vds_mid_max)) {
                throw SchemaError(where + ": need 0 < vds_lin_max < vds_mid_max");
            }
            if (cfg.restarts < 0 || cfg.max_iter < 1) throw SchemaError(where + ": invalid restarts/max_iter");
        } else if (name.starts_with("fit.")) {
            cfg.stages.push_back(parse_stage(name, section));
        } else {
            throw SchemaError("config: unknown section [" + name + "]");
        }
    }
    return cfg;
}

RunConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file " + path.string());
    return parse_config(in, path.parent_path());
}

}  // namespace sicmos
