#include "sicmos/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include <fmt/format.h>

#include "sicmos/errors.hpp"

namespace sicmos {

std::string_view to_string(Region region) {
    switch (region) {
        case Region::linear_lowV: return "linear_lowV";
        case Region::output_midV: return "output_midV";
        case Region::high_power: return "high_power";
    }
    return "unknown";
}

std::optional<Region> parse_region(std::string_view text) {
    for (Region r : kAllRegions) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

std::vector<std::size_t> MeasurementSet::indices(Region region) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < region_labels.size(); ++i) {
        if (region_labels[i] == region) out.push_back(i);
    }
    return out;
}

std::size_t ValidationReport::count(ViolationKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
    field = trim(field);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size() || field.empty()) {
        throw ParseError("not a number: '" + std::string(field) + "'", line, column);
    }
    if (!std::isfinite(value)) throw ParseError("non-finite value: '" + std::string(field) + "'", line, column);
    return value;
}

Region classify(double vds, const RegionThresholds& t) {
    if (vds <= t.vds_lin_max) return Region::linear_lowV;
    if (vds <= t.vds_mid_max) return Region::output_midV;
    return Region::high_power;
}

}  // namespace

MeasurementSet load_measurements(std::istream& in) {
    MeasurementSet set;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    using Key = std::tuple<double, double, double>;
    std::map<Key, std::size_t> seen;
    std::vector<double> id_sums;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kMeasurementHeader) {
                throw UnitHeaderError("expected header '" + std::string(kMeasurementHeader) + "', got '" +
                                      std::string(line) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 6) {
            throw ParseError("expected 6 fields, found " + std::to_string(fields.size()), line_no,
                             std::min<std::size_t>(fields.size(), 6));
        }
        MeasurementRecord rec;
        rec.vgs = parse_number(fields[0], line_no, 1);
        rec.vds = parse_number(fields[1], line_no, 2);
        rec.id = parse_number(fields[2], line_no, 3);
        rec.t_case = parse_number(fields[3], line_no, 4);
        const std::string_view pulsed = trim(fields[4]);
        if (pulsed != "0" && pulsed != "1") throw ParseError("pulsed must be 0 or 1", line_no, 5);
        rec.pulsed = pulsed == "1";
        rec.source_tag = std::string(trim(fields[5]));
        if (rec.vds < 0.0) throw ParseError("vds must be >= 0", line_no, 2);
        if (!(rec.t_case > 0.0)) throw ParseError("tcase must be > 0", line_no, 4);

        const Key key{rec.vgs, rec.vds, rec.t_case};
        if (auto it = seen.find(key); it != seen.end()) {
            MeasurementRecord& first = set.records[it->second];
            id_sums[it->second] += rec.id;
            first.count += 1;
            first.id = id_sums[it->second] / first.count;
            continue;
        }
        seen.emplace(key, set.records.size());
        id_sums.push_back(rec.id);
        set.records.push_back(std::move(rec));
    }
    if (!header_seen) throw UnitHeaderError("missing header '" + std::string(kMeasurementHeader) + "'");

    return partition_regions(std::move(set));
}

MeasurementSet load_measurements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open measurement file " + path.string());
    return load_measurements(in);
}

void write_measurements(std::ostream& out, const MeasurementSet& set) {
    out << kMeasurementHeader << '\n';
    for (const auto& r : set.records) {
        out << fmt::format("{},{},{},{},{},{}\n", r.vgs, r.vds, r.id, r.t_case, r.pulsed ? 1 : 0, r.source_tag);
    }
}

ValidationReport validate_measurements(const MeasurementSet& set, const ValidationLimits& limits) {
    ValidationReport report;
    std::map<std::pair<double, double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        const auto& r = set.records[i];
        if (r.id < limits.current_floor) {
            report.violations.push_back(
                {i, ViolationKind::current_floor, fmt::format("id = {} A below floor {} A", r.id, limits.current_floor)});
        }
        if (r.id * r.vds > limits.soa_power) {
            report.violations.push_back(
                {i, ViolationKind::soa, fmt::format("power {} W above SOA ceiling {} W", r.id * r.vds, limits.soa_power)});
        }
        groups[{r.vds, r.t_case}].push_back(i);
    }
    for (auto& [key, members] : groups) {
        std::stable_sort(members.begin(), members.end(),
                         [&](std::size_t a, std::size_t b) { return set.records[a].vgs < set.records[b].vgs; });
        for (std::size_t k = 1; k < members.size(); ++k) {
            const double prev = set.records[members[k - 1]].id;
            const double cur = set.records[members[k]].id;
            if (cur < prev - limits.noise_band * std::abs(prev) - limits.noise_floor) {
                report.violations.push_back({members[k], ViolationKind::monotonicity,
                                             fmt::format("id drops from {} A to {} A as vgs increases at vds = {} V",
                                                         prev, cur, key.first)});
            }
        }
    }
    std::stable_sort(report.violations.begin(), report.violations.end(),
                     [](const Violation& a, const Violation& b) { return a.record < b.record; });
    return report;
}

MeasurementSet partition_regions(MeasurementSet set, const RegionThresholds& thresholds) {
    if (!(thresholds.vds_lin_max > 0.0 && thresholds.vds_lin_max < thresholds.vds_mid_max)) {
        throw DomainError("partition_regions: need 0 < vds_lin_max < vds_mid_max");
    }
    set.region_labels.resize(set.records.size());
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        set.region_labels[i] = classify(set.records[i].vds, thresholds);
    }
    return set;
}

}  // namespace sicmos
