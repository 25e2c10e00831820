#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "sicmos/params.hpp"

namespace sicmos {

inline constexpr int kCardSchemaVersion = 1;

/// Serialized parameter set with provenance. JSON on disk.
struct ModelCard {
    int schema_version = kCardSchemaVersion;
    std::string device_name;
    ModelParams params;
    /// Free-form provenance entries (fit date, data hashes, notes).
    std::map<std::string, std::string> provenance;

    bool operator==(const ModelCard&) const = default;
};

/// Throws SchemaError on unknown keys, missing parameters, unit mismatch or
/// an unsupported schema version.
ModelCard read_card(std::istream& in);
ModelCard read_card(const std::filesystem::path& path);

void write_card(std::ostream& out, const ModelCard& card);
void write_card(const std::filesystem::path& path, const ModelCard& card);

/// Flat `name=value # unit` listing for circuit-simulator decks, in
/// param_table() order followed by the equation-form switches.
void export_flat(std::ostream& out, const ModelCard& card);

/// Reads the flat listing back. Missing names keep the ModelParams defaults;
/// unknown names throw SchemaError.
ModelCard import_flat(std::istream& in);

/// Lookup in the preset directory, by preset name or file stem.
ModelCard preset_card(std::string_view name);

/// Directory the CLI searches for presets.
std::filesystem::path preset_directory();

}  // namespace sicmos
