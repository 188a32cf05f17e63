#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tidp/geo.hpp"
#include "tidp/timeutil.hpp"

namespace tidp {

/// One incident report with its derived duration target. Baseline feature
/// values align with IncidentDataset::baseline_names.
struct IncidentRecord {
    std::string id;
    GeoPoint location;
    EpochMinutes start_time = 0;
    EpochMinutes end_time = 0;
    int severity = 0;
    std::string description;
    std::vector<double> baseline;
    std::int64_t duration_min = 0;

    bool operator==(const IncidentRecord&) const = default;
};

struct IncidentDataset {
    std::vector<std::string> baseline_names;
    std::vector<IncidentRecord> records;

    bool operator==(const IncidentDataset&) const = default;
};

struct SpeedFlow {
    double speed = 0.0;
    double flow = 0.0;
};

/// Per-station 5-minute readings keyed by slot index.
struct StationSeries {
    std::string station_id;
    GeoPoint location;
    std::map<Slot, SpeedFlow> readings;

    Slot first_slot() const { return readings.empty() ? 0 : readings.begin()->first; }
    Slot last_slot() const { return readings.empty() ? -1 : readings.rbegin()->first; }
};

struct RejectedRow {
    std::int64_t row_number = 0;  // 1-based data row number (header excluded)
    std::string reason;
};

struct RejectionReport {
    std::int64_t rows_in = 0;
    std::int64_t rows_accepted = 0;
    std::vector<RejectedRow> rejected;

    std::int64_t rows_rejected() const { return static_cast<std::int64_t>(rejected.size()); }
};

/// Which CSV columns feed the baseline feature vector. Categorical columns
/// are one-hot expanded ("name=value") over the values observed in accepted
/// rows, sorted lexicographically.
struct BaselineSchema {
    std::vector<std::string> numeric;
    std::vector<std::string> categorical;
};

struct IncidentParseResult {
    IncidentDataset dataset;
    RejectionReport report;
};

/// Required columns: id, latitude, longitude, start_time, end_time,
/// severity, description. Rows violating record invariants are dropped and
/// listed in the report; a missing required column throws SchemaError.
IncidentParseResult parse_incidents(std::istream& in, const BaselineSchema& schema);
IncidentParseResult parse_incidents_file(const std::string& path, const BaselineSchema& schema);

struct StationParseResult {
    std::vector<StationSeries> stations;
    RejectionReport report;
};

/// Columns: station_id, timestamp, speed, flow. Readings are grouped per
/// station and keyed by slot; negative values and duplicate (station, slot)
/// pairs are rejected row-wise.
StationParseResult parse_station_readings(std::istream& in);
StationParseResult parse_station_readings_file(const std::string& path);

/// Re-reads an incidents cache written by write_incidents_csv: every column
/// after the seven core ones is taken as a numeric baseline feature.
IncidentParseResult parse_incident_cache(std::istream& in);
IncidentParseResult parse_incident_cache_file(const std::string& path);

/// Sidecar metadata: station_id, latitude, longitude. Stations without a
/// metadata row keep (0, 0) and are reported back.
std::vector<std::string> load_station_coordinates(std::istream& in,
                                                  std::vector<StationSeries>& stations);

/// True iff all n_slots slots ending at end_slot (inclusive) are present.
bool validate_window(const StationSeries& series, Slot end_slot, int n_slots);

// Canonical CSV dumps of validated datasets (the ingest caches).
void write_incidents_csv(std::ostream& out, const IncidentDataset& dataset);
void write_stations_csv(std::ostream& out, const std::vector<StationSeries>& stations);
void write_station_coordinates_csv(std::ostream& out, const std::vector<StationSeries>& stations);
void write_rejection_report(std::ostream& out, const RejectionReport& report);

struct DurationLaw {
    double depth_coeff = 0.8;    // minutes per km/h of speed drop
    double length_coeff = 0.5;   // minutes per minute of drop length
    double intercept = 0.0;
    double noise_sd_min = 5.0;   // duration noise, minutes
};

struct SyntheticConfig {
    int n_incidents = 100;
    int n_stations = 8;
    std::uint64_t seed = 1;
    double drop_depth_min = 15.0;  // km/h
    double drop_depth_max = 60.0;
    DurationLaw duration_law;
    double noise_sd = 2.0;  // per-channel reading noise
};

struct SyntheticData {
    IncidentDataset incidents;
    std::vector<StationSeries> stations;
};

/// Deterministic desk-scale dataset. Every incident sits within 500 m of
/// exactly one station; that station's speed series carries a pre-incident
/// drop whose depth and length determine the duration through duration_law.
SyntheticData generate_synthetic(const SyntheticConfig& config);

}  // namespace tidp
