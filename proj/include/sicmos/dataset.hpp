#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sicmos {

/// Characterization setup a record belongs to.
enum class Region { linear_lowV, output_midV, high_power };

inline constexpr std::array kAllRegions = {Region::linear_lowV, Region::output_midV, Region::high_power};

std::string_view to_string(Region region);
std::optional<Region> parse_region(std::string_view text);

struct MeasurementRecord {
    double vgs = 0.0;
    double vds = 0.0;
    double id = 0.0;
    double t_case = 300.0;
    bool pulsed = true;
    std::string source_tag;
    /// Number of raw rows averaged into this record.
    int count = 1;
};

struct MeasurementSet {
    std::vector<MeasurementRecord> records;
    std::vector<Region> region_labels;
    bool units_validated = false;

    std::size_t size() const { return records.size(); }
    /// Indices of records labelled `region`, in record order.
    std::vector<std::size_t> indices(Region region) const;
};

struct RegionThresholds {
    double vds_lin_max = 0.5;
    double vds_mid_max = 15.0;
};

inline constexpr std::string_view kMeasurementHeader = "vgs_V,vds_V,id_A,tcase_K,pulsed,source_tag";

/// Parses the measurement CSV. Duplicate (vgs, vds, t_case) rows collapse into
/// the first occurrence with averaged current. Records are labelled with the
/// default thresholds.
MeasurementSet load_measurements(std::istream& in);
MeasurementSet load_measurements(const std::filesystem::path& path);

/// Writes the CSV format read by load_measurements; doubles are written in
/// shortest round-trip form.
void write_measurements(std::ostream& out, const MeasurementSet& set);

enum class ViolationKind { current_floor, monotonicity, soa };

struct Violation {
    std::size_t record = 0;
    ViolationKind kind = ViolationKind::current_floor;
    std::string message;
};

struct ValidationLimits {
    double current_floor = -1e-6;  // A
    double noise_band = 0.05;      // relative
    double noise_floor = 1e-9;     // A, absolute slack of the monotonicity check
    double soa_power = 1e5;        // W
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool clean() const { return violations.empty(); }
    std::size_t count(ViolationKind kind) const;
};

ValidationReport validate_measurements(const MeasurementSet& set, const ValidationLimits& limits = {});

/// Relabels every record from its vds. DomainError unless 0 < lin < mid.
MeasurementSet partition_regions(MeasurementSet set, const RegionThresholds& thresholds = {});

}  // namespace sicmos
