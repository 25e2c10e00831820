#include "sicmos/model_card.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "sicmos/errors.hpp"

#ifndef SICMOS_PRESET_DIR
#define SICMOS_PRESET_DIR "presets"
#endif

namespace sicmos {

using nlohmann::json;

namespace {

void expect_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw SchemaError("unknown key '" + key + "' in " + where);
    }
}

}  // namespace

ModelCard read_card(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("model card is not valid JSON: ") + e.what());
    }
    expect_keys(doc, {"schema_version", "device_name", "parameters", "options", "provenance"}, "model card");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
        throw SchemaError("model card: missing integer schema_version");
    }
    ModelCard card;
    card.schema_version = doc["schema_version"].get<int>();
    if (card.schema_version != kCardSchemaVersion) {
        throw SchemaError(fmt::format("model card: schema_version {} unsupported (expected {})", card.schema_version,
                                      kCardSchemaVersion));
    }
    if (!doc.contains("device_name") || !doc["device_name"].is_string()) throw SchemaError("model card: missing device_name");
    card.device_name = doc["device_name"].get<std::string>();

    if (!doc.contains("parameters")) throw SchemaError("model card: missing parameters");
    const json& params = doc["parameters"];
    std::set<std::string> names;
    for (const auto& info : param_table()) names.emplace(info.name);
    expect_keys(params, names, "parameters");
    for (const auto& info : param_table()) {
        const std::string name(info.name);
        if (!params.contains(name)) throw SchemaError("model card: missing parameter '" + name + "'");
        const json& entry = params[name];
        expect_keys(entry, {"value", "unit"}, "parameter '" + name + "'");
        if (!entry.contains("value") || !entry["value"].is_number()) {
            throw SchemaError("model card: parameter '" + name + "' needs a numeric value");
        }
        if (!entry.contains("unit") || entry["unit"] != std::string(info.unit)) {
            throw SchemaError("model card: parameter '" + name + "' must carry unit '" + std::string(info.unit) + "'");
        }
        card.params.*(info.member) = entry["value"].get<double>();
    }

    if (doc.contains("options")) {
        const json& opts = doc["options"];
        expect_keys(opts, {"bulk_form", "drift_form"}, "options");
        try {
            if (opts.contains("bulk_form")) card.params.bulk_form = parse_bulk_form(opts["bulk_form"].get<std::string>());
            if (opts.contains("drift_form")) card.params.drift_form = parse_drift_form(opts["drift_form"].get<std::string>());
        } catch (const std::exception& e) {
            throw SchemaError(std::string("model card options: ") + e.what());
        }
    }
    if (doc.contains("provenance")) {
        if (!doc["provenance"].is_object()) throw SchemaError("model card: provenance must be an object");
        for (const auto& [key, value] : doc["provenance"].items()) {
            if (!value.is_string()) throw SchemaError("model card: provenance values must be strings");
            card.provenance[key] = value.get<std::string>();
        }
    }
    try {
        card.params.validate();
    } catch (const DomainError& e) {
        throw SchemaError(std::string("model card: ") + e.what());
    }
    return card;
}

ModelCard read_card(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model card " + path.string());
    return read_card(in);
}

void write_card(std::ostream& out, const ModelCard& card) {
    json doc;
    doc["schema_version"] = card.schema_version;
    doc["device_name"] = card.device_name;
    json params = json::object();
    for (const auto& info : param_table()) {
        params[std::string(info.name)] = {{"value", card.params.*(info.member)}, {"unit", std::string(info.unit)}};
    }
    doc["parameters"] = std::move(params);
    doc["options"] = {{"bulk_form", std::string(to_string(card.params.bulk_form))},
                      {"drift_form", std::string(to_string(card.params.drift_form))}};
    doc["provenance"] = card.provenance;
    out << doc.dump(2) << '\n';
}

void write_card(const std::filesystem::path& path, const ModelCard& card) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model card " + path.string());
    write_card(out, card);
    if (!out) throw IoError("write failed for " + path.string());
}

void export_flat(std::ostream& out, const ModelCard& card) {
    out << "# sicmos model card: " << card.device_name << '\n';
    out << "# schema_version=" << card.schema_version << '\n';
    for (const auto& info : param_table()) {
        out << fmt::format("{}={} # {}\n", info.name, card.params.*(info.member), info.unit);
    }
    out << "bulk_form=" << to_string(card.params.bulk_form) << " # switch\n";
    out << "drift_form=" << to_string(card.params.drift_form) << " # switch\n";
}

ModelCard import_flat(std::istream& in) {
    ModelCard card;
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("# sicmos model card: ")) {
            card.device_name = line.substr(std::string_view("# sicmos model card: ").size());
            continue;
        }
        if (line.starts_with("# schema_version=")) {
            card.schema_version = std::stoi(line.substr(17));
            if (card.schema_version != kCardSchemaVersion) throw SchemaError("flat export: unsupported schema_version");
            continue;
        }
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SchemaError("flat export: malformed line '" + line + "'");
        const std::string name = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (const auto hash = value.find(" #"); hash != std::string::npos) value.resize(hash);
        try {
            if (name == "bulk_form") {
                card.params.bulk_form = parse_bulk_form(value);
            } else if (name == "drift_form") {
                card.params.drift_form = parse_drift_form(value);
            } else if (const auto info = find_param(name)) {
                std::size_t used = 0;
                card.params.*(info->member) = std::stod(value, &used);
                if (used != value.size()) throw SchemaError("flat export: trailing characters in '" + line + "'");
            } else {
                throw SchemaError("flat export: unknown parameter '" + name + "'");
            }
        } catch (const std::invalid_argument&) {
            throw SchemaError("flat export: bad value in '" + line + "'");
        } catch (const DomainError& e) {
            throw SchemaError(e.what());
        }
    }
    return card;
}

std::filesystem::path preset_directory() { return SICMOS_PRESET_DIR; }

ModelCard preset_card(std::string_view name) {
    const std::filesystem::path dir = preset_directory();
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.path().extension() != ".json") continue;
        ModelCard card = read_card(entry.path());
        if (card.device_name == name || entry.path().stem() == name) return card;
    }
    if (auto builtin = preset_by_name(name)) {
        return {kCardSchemaVersion, std::string(kDut160Name), *builtin, {{"source", "built-in preset"}}};
    }
    throw SchemaError("unknown preset '" + std::string(name) + "'");
}

}  // namespace sicmos
