#include "tidp/match.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tidp/csv.hpp"
#include "tidp/errors.hpp"
#include "tidp/geo.hpp"

namespace tidp {

const std::array<const char*, kSeriesChannels> kChannelNames = {"Speed", "Flow",  "Speed7",
                                                                "Flow7", "SD", "FD"};

int channel_index(FeatureSource source) {
    switch (source) {
        case FeatureSource::speed: return 0;
        case FeatureSource::flow: return 1;
        case FeatureSource::speed7: return 2;
        case FeatureSource::flow7: return 3;
        case FeatureSource::sd: return 4;
        case FeatureSource::fd: return 5;
        case FeatureSource::lstm_sent: break;
    }
    throw ConfigError("feature source has no series channel: " + std::string(to_string(source)));
}

NormConstants dataset_maxima(const std::vector<StationSeries>& stations) {
    NormConstants norm;
    for (const auto& station : stations) {
        for (const auto& [slot, reading] : station.readings) {
            norm.speed_max = std::max(norm.speed_max, reading.speed);
            norm.flow_max = std::max(norm.flow_max, reading.flow);
        }
    }
    if (norm.speed_max <= 0.0 || norm.flow_max <= 0.0)
        throw NumericError("normalization constants must be positive");
    return norm;
}

WindowPair extract_window(const StationSeries& series, Slot start_slot, int offset_days) {
    const Slot end_slot = start_slot - 1 - static_cast<Slot>(offset_days) * kSlotsPerDay;
    WindowPair window;
    window.speed.reserve(kWindowSlots);
    window.flow.reserve(kWindowSlots);
    for (Slot slot = end_slot - kWindowSlots + 1; slot <= end_slot; ++slot) {
        const auto it = series.readings.find(slot);
        if (it == series.readings.end())
            throw InsufficientDataError("station " + series.station_id + ": window missing slot " +
                                        std::to_string(slot));
        window.speed.push_back(it->second.speed);
        window.flow.push_back(it->second.flow);
    }
    return window;
}

namespace {

MatchedWindows derive_channels(const IncidentRecord& incident, const StationSeries& station,
                               double distance_m, const WindowPair& day_of,
                               const WindowPair& week_before, const NormConstants& norm) {
    MatchedWindows result;
    result.incident_id = incident.id;
    result.station_id = station.station_id;
    result.distance_m = distance_m;
    for (auto& channel : result.channels) channel.resize(kWindowSlots);
    for (int i = 0; i < kWindowSlots; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double speed = day_of.speed[idx] / norm.speed_max;
        const double flow = day_of.flow[idx] / norm.flow_max;
        const double speed7 = week_before.speed[idx] / norm.speed_max;
        const double flow7 = week_before.flow[idx] / norm.flow_max;
        result.channels[0][idx] = speed;
        result.channels[1][idx] = flow;
        result.channels[2][idx] = speed7;
        result.channels[3][idx] = flow7;
        result.channels[4][idx] = speed - speed7;
        result.channels[5][idx] = flow - flow7;
    }
    return result;
}

}  // namespace

std::optional<MatchedWindows> match_incident(const IncidentRecord& incident,
                                             const std::vector<StationSeries>& stations,
                                             const NormConstants& norm, double radius_m,
                                             std::string* reason) {
    const Slot start_slot = slot_of(incident.start_time);

    const StationSeries* best = nullptr;
    double best_distance = 0.0;
    bool any_in_radius = false;

    for (const auto& station : stations) {
        const double distance = haversine(incident.location, station.location);
        if (distance > radius_m) continue;
        any_in_radius = true;
        const Slot day_of_end = start_slot - 1;
        const Slot week_before_end = day_of_end - 7 * static_cast<Slot>(kSlotsPerDay);
        if (!validate_window(station, day_of_end, kWindowSlots)) continue;
        if (!validate_window(station, week_before_end, kWindowSlots)) continue;
        const bool closer =
            best == nullptr || distance < best_distance ||
            (distance == best_distance && station.station_id < best->station_id);
        if (closer) {
            best = &station;
            best_distance = distance;
        }
    }

    if (best == nullptr) {
        if (reason != nullptr)
            *reason = any_in_radius ? "station series window incomplete"
                                    : "no station within radius";
        return std::nullopt;
    }
    const WindowPair day_of = extract_window(*best, start_slot, 0);
    const WindowPair week_before = extract_window(*best, start_slot, 7);
    return derive_channels(incident, *best, best_distance, day_of, week_before, norm);
}

MatchResult match_all(const IncidentDataset& incidents,
                      const std::vector<StationSeries>& stations, double radius_m,
                      const NormConstants* norm) {
    MatchResult result;
    result.norm = norm != nullptr ? *norm : dataset_maxima(stations);
    for (const auto& incident : incidents.records) {
        std::string reason;
        auto matched = match_incident(incident, stations, result.norm, radius_m, &reason);
        if (matched) {
            result.matched.push_back(std::move(*matched));
        } else {
            result.unmatched.push_back({incident.id, reason});
        }
    }
    return result;
}

void write_matched_csv(std::ostream& out, const std::vector<MatchedWindows>& matched) {
    std::vector<std::string> header = {"incident_id", "station_id", "distance_m"};
    for (const char* name : kChannelNames) {
        for (int i = 0; i < kWindowSlots; ++i)
            header.push_back(std::string(name) + "_" + std::to_string(i));
    }
    csv::write_row(out, header);
    for (const auto& m : matched) {
        std::vector<std::string> row = {m.incident_id, m.station_id,
                                        csv::format_double(m.distance_m)};
        for (const auto& channel : m.channels)
            for (double v : channel) row.push_back(csv::format_double(v));
        csv::write_row(out, row);
    }
}

std::vector<MatchedWindows> read_matched_csv(std::istream& in) {
    const csv::Table table = csv::read_csv(in);
    const std::size_t expected = 3 + static_cast<std::size_t>(kSeriesChannels) * kWindowSlots;
    if (table.header.size() != expected)
        throw SchemaError("matched cache has wrong column count");
    std::vector<MatchedWindows> matched;
    for (const auto& row : table.rows) {
        if (row.size() != expected) throw SchemaError("matched cache row has wrong field count");
        MatchedWindows m;
        m.incident_id = row[0];
        m.station_id = row[1];
        m.distance_m = csv::parse_double(row[2]);
        std::size_t col = 3;
        for (auto& channel : m.channels) {
            channel.resize(kWindowSlots);
            for (int i = 0; i < kWindowSlots; ++i)
                channel[static_cast<std::size_t>(i)] = csv::parse_double(row[col++]);
        }
        matched.push_back(std::move(m));
    }
    return matched;
}

std::vector<MatchedWindows> read_matched_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open matched cache: " + path);
    return read_matched_csv(in);
}

void write_norm_constants_csv(std::ostream& out, const NormConstants& norm) {
    csv::write_row(out, {"speed_max", "flow_max"});
    csv::write_row(out, {csv::format_double(norm.speed_max), csv::format_double(norm.flow_max)});
}

NormConstants read_norm_constants_csv(std::istream& in) {
    const csv::Table table = csv::read_csv(in);
    const auto col_speed = table.column("speed_max");
    const auto col_flow = table.column("flow_max");
    if (!col_speed || !col_flow || table.rows.size() != 1)
        throw SchemaError("norm constants cache malformed");
    NormConstants norm;
    norm.speed_max = csv::parse_double(table.rows[0][*col_speed]);
    norm.flow_max = csv::parse_double(table.rows[0][*col_flow]);
    return norm;
}

NormConstants read_norm_constants_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("cannot open norm constants cache: " + path);
    return read_norm_constants_csv(in);
}

void write_match_rejections(std::ostream& out, const std::vector<UnmatchedIncident>& unmatched) {
    csv::write_row(out, {"incident_id", "reason"});
    for (const auto& u : unmatched) csv::write_row(out, {u.incident_id, u.reason});
}

}  // namespace tidp
