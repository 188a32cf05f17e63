#include "tidp/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "tidp/csv.hpp"
#include "tidp/errors.hpp"

namespace tidp {

namespace {

std::size_t require_column(const csv::Table& table, const std::string& name) {
    auto idx = table.column(name);
    if (!idx) throw SchemaError("missing required column '" + name + "'");
    return *idx;
}

std::optional<double> try_parse_double(const std::string& s) {
    try {
        return csv::parse_double(s);
    } catch (const SchemaError&) {
        return std::nullopt;
    }
}

}  // namespace

IncidentParseResult parse_incidents(std::istream& in, const BaselineSchema& schema) {
    const csv::Table table = csv::read_csv(in);
    const std::size_t col_id = require_column(table, "id");
    const std::size_t col_lat = require_column(table, "latitude");
    const std::size_t col_lon = require_column(table, "longitude");
    const std::size_t col_start = require_column(table, "start_time");
    const std::size_t col_end = require_column(table, "end_time");
    const std::size_t col_sev = require_column(table, "severity");
    const std::size_t col_desc = require_column(table, "description");

    std::vector<std::size_t> numeric_cols;
    for (const auto& name : schema.numeric) numeric_cols.push_back(require_column(table, name));
    std::vector<std::size_t> categorical_cols;
    for (const auto& name : schema.categorical) categorical_cols.push_back(require_column(table, name));

    IncidentParseResult result;
    auto& report = result.report;
    report.rows_in = static_cast<std::int64_t>(table.rows.size());

    struct Accepted {
        IncidentRecord record;
        std::vector<double> numeric;
        std::vector<std::string> categorical;
    };
    std::vector<Accepted> accepted;

    std::int64_t row_number = 0;
    for (const auto& row : table.rows) {
        ++row_number;
        auto reject = [&](const std::string& reason) {
            report.rejected.push_back({row_number, reason});
        };
        if (row.size() != table.header.size()) {
            reject("field count mismatch");
            continue;
        }

        IncidentRecord rec;
        rec.id = row[col_id];
        if (rec.id.empty()) {
            reject("empty id");
            continue;
        }
        auto lat = try_parse_double(row[col_lat]);
        auto lon = try_parse_double(row[col_lon]);
        if (!lat || !lon) {
            reject("unparseable coordinate");
            continue;
        }
        rec.location = {*lat, *lon};
        if (!rec.location.valid()) {
            reject("coordinate out of range");
            continue;
        }
        auto start = parse_iso8601_minutes(row[col_start]);
        auto end = parse_iso8601_minutes(row[col_end]);
        if (!start || !end) {
            reject("unparseable timestamp");
            continue;
        }
        rec.start_time = *start;
        rec.end_time = *end;
        if (rec.end_time <= rec.start_time) {
            reject("end_time not after start_time");
            continue;
        }
        rec.duration_min = rec.end_time - rec.start_time;

        auto sev = try_parse_double(row[col_sev]);
        if (!sev || *sev != std::floor(*sev) || *sev < 1 || *sev > 4) {
            reject("severity out of range");
            continue;
        }
        rec.severity = static_cast<int>(*sev);

        rec.description = row[col_desc];
        if (rec.description.empty()) {
            reject("empty description");
            continue;
        }

        Accepted acc;
        acc.record = std::move(rec);
        bool ok = true;
        for (std::size_t i = 0; i < numeric_cols.size(); ++i) {
            auto v = try_parse_double(row[numeric_cols[i]]);
            if (!v || !std::isfinite(*v)) {
                reject("unparseable baseline value in '" + schema.numeric[i] + "'");
                ok = false;
                break;
            }
            acc.numeric.push_back(*v);
        }
        if (!ok) continue;
        for (std::size_t i = 0; i < categorical_cols.size(); ++i) {
            acc.categorical.push_back(row[categorical_cols[i]]);
        }
        accepted.push_back(std::move(acc));
    }
    report.rows_accepted = static_cast<std::int64_t>(accepted.size());

    // One-hot expansion over values observed in accepted rows.
    std::vector<std::vector<std::string>> category_values(schema.categorical.size());
    for (std::size_t c = 0; c < schema.categorical.size(); ++c) {
        std::set<std::string> values;
        for (const auto& acc : accepted) values.insert(acc.categorical[c]);
        category_values[c].assign(values.begin(), values.end());
    }

    auto& dataset = result.dataset;
    dataset.baseline_names = schema.numeric;
    for (std::size_t c = 0; c < schema.categorical.size(); ++c) {
        for (const auto& value : category_values[c]) {
            dataset.baseline_names.push_back(schema.categorical[c] + "=" + value);
        }
    }
    for (auto& acc : accepted) {
        acc.record.baseline = acc.numeric;
        for (std::size_t c = 0; c < schema.categorical.size(); ++c) {
            for (const auto& value : category_values[c]) {
                acc.record.baseline.push_back(acc.categorical[c] == value ? 1.0 : 0.0);
            }
        }
        dataset.records.push_back(std::move(acc.record));
    }
    return result;
}

IncidentParseResult parse_incidents_file(const std::string& path, const BaselineSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot open " + path);
    return parse_incidents(in, schema);
}

StationParseResult parse_station_readings(std::istream& in) {
    const csv::Table table = csv::read_csv(in);
    const std::size_t col_station = require_column(table, "station_id");
    const std::size_t col_ts = require_column(table, "timestamp");
    const std::size_t col_speed = require_column(table, "speed");
    const std::size_t col_flow = require_column(table, "flow");

    StationParseResult result;
    auto& report = result.report;
    report.rows_in = static_cast<std::int64_t>(table.rows.size());

    std::map<std::string, StationSeries> by_id;
    std::int64_t row_number = 0;
    for (const auto& row : table.rows) {
        ++row_number;
        auto reject = [&](const std::string& reason) {
            report.rejected.push_back({row_number, reason});
        };
        if (row.size() != table.header.size()) {
            reject("field count mismatch");
            continue;
        }
        const std::string& sid = row[col_station];
        if (sid.empty()) {
            reject("empty station_id");
            continue;
        }
        auto ts = parse_iso8601_minutes(row[col_ts]);
        if (!ts) {
            reject("unparseable timestamp");
            continue;
        }
        auto speed = try_parse_double(row[col_speed]);
        auto flow = try_parse_double(row[col_flow]);
        if (!speed || !flow) {
            reject("unparseable reading");
            continue;
        }
        if (*speed < 0.0 || *flow < 0.0) {
            reject("negative reading");
            continue;
        }
        const Slot slot = slot_of(*ts);
        auto& series = by_id[sid];
        series.station_id = sid;
        auto [it, inserted] = series.readings.emplace(slot, SpeedFlow{*speed, *flow});
        if (!inserted) {
            reject("duplicate slot for station " + sid);
            continue;
        }
        ++report.rows_accepted;
    }

    for (auto& [id, series] : by_id) result.stations.push_back(std::move(series));
    std::sort(result.stations.begin(), result.stations.end(),
              [](const StationSeries& a, const StationSeries& b) {
                  return a.station_id < b.station_id;
              });
    // Sides with zero accepted readings can linger as empty map entries.
    std::erase_if(result.stations, [](const StationSeries& s) { return s.readings.empty(); });
    return result;
}

StationParseResult parse_station_readings_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot open " + path);
    return parse_station_readings(in);
}

std::vector<std::string> load_station_coordinates(std::istream& in,
                                                  std::vector<StationSeries>& stations) {
    const csv::Table table = csv::read_csv(in);
    const std::size_t col_station = require_column(table, "station_id");
    const std::size_t col_lat = require_column(table, "latitude");
    const std::size_t col_lon = require_column(table, "longitude");

    std::map<std::string, GeoPoint> coords;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) continue;
        GeoPoint p{csv::parse_double(row[col_lat]), csv::parse_double(row[col_lon])};
        if (!p.valid()) throw SchemaError("station coordinate out of range: " + row[col_station]);
        coords[row[col_station]] = p;
    }

    std::vector<std::string> missing;
    for (auto& station : stations) {
        auto it = coords.find(station.station_id);
        if (it == coords.end()) {
            missing.push_back(station.station_id);
        } else {
            station.location = it->second;
        }
    }
    return missing;
}

bool validate_window(const StationSeries& series, Slot end_slot, int n_slots) {
    if (n_slots <= 0) return false;
    const Slot begin = end_slot - n_slots + 1;
    if (series.readings.empty() || begin < series.first_slot() || end_slot > series.last_slot()) {
        return false;
    }
    auto it = series.readings.lower_bound(begin);
    for (Slot s = begin; s <= end_slot; ++s, ++it) {
        if (it == series.readings.end() || it->first != s) return false;
    }
    return true;
}

void write_incidents_csv(std::ostream& out, const IncidentDataset& dataset) {
    std::vector<std::string> header = {"id",       "latitude",  "longitude", "start_time",
                                       "end_time", "severity",  "description"};
    header.insert(header.end(), dataset.baseline_names.begin(), dataset.baseline_names.end());
    csv::write_row(out, header);
    for (const auto& rec : dataset.records) {
        std::vector<std::string> row = {
            rec.id,
            csv::format_double(rec.location.latitude),
            csv::format_double(rec.location.longitude),
            format_iso8601_minutes(rec.start_time),
            format_iso8601_minutes(rec.end_time),
            std::to_string(rec.severity),
            rec.description,
        };
        for (double v : rec.baseline) row.push_back(csv::format_double(v));
        csv::write_row(out, row);
    }
}

void write_stations_csv(std::ostream& out, const std::vector<StationSeries>& stations) {
    csv::write_row(out, {"station_id", "timestamp", "speed", "flow"});
    for (const auto& station : stations) {
        for (const auto& [slot, reading] : station.readings) {
            csv::write_row(out, {station.station_id,
                                 format_iso8601_minutes(slot_start_minutes(slot)),
                                 csv::format_double(reading.speed),
                                 csv::format_double(reading.flow)});
        }
    }
}

void write_station_coordinates_csv(std::ostream& out, const std::vector<StationSeries>& stations) {
    csv::write_row(out, {"station_id", "latitude", "longitude"});
    for (const auto& station : stations) {
        csv::write_row(out, {station.station_id,
                             csv::format_double(station.location.latitude),
                             csv::format_double(station.location.longitude)});
    }
}

void write_rejection_report(std::ostream& out, const RejectionReport& report) {
    csv::write_row(out, {"row_number", "reason"});
    for (const auto& rejected : report.rejected) {
        csv::write_row(out, {std::to_string(rejected.row_number), rejected.reason});
    }
}

IncidentParseResult parse_incident_cache(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    static const std::vector<std::string> core = {"id",       "latitude", "longitude",  "start_time",
                                                  "end_time", "severity", "description"};
    std::istringstream header_stream(text);
    const csv::Table table = csv::read_csv(header_stream);
    BaselineSchema schema;
    for (const auto& name : table.header) {
        if (std::find(core.begin(), core.end(), name) == core.end()) schema.numeric.push_back(name);
    }
    std::istringstream data_stream(text);
    return parse_incidents(data_stream, schema);
}

IncidentParseResult parse_incident_cache_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open incidents file: " + path);
    return parse_incident_cache(in);
}

}  // namespace tidp
