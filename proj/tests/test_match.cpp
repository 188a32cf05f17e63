#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tidp/errors.hpp"
#include "tidp/ingest.hpp"
#include "tidp/match.hpp"

using namespace tidp;

namespace {

SyntheticData small_synth(std::uint64_t seed, int n = 40) {
    SyntheticConfig config;
    config.n_incidents = n;
    config.n_stations = 4;
    config.seed = seed;
    return generate_synthetic(config);
}

}  // namespace

TEST_CASE("match: every synthetic incident finds a station") {
    const SyntheticData data = small_synth(1);
    const MatchResult result = match_all(data.incidents, data.stations, kMatchRadiusMeters);
    CHECK(result.matched.size() == data.incidents.records.size());
    CHECK(result.unmatched.empty());
    // Matched rows keep input record order.
    for (std::size_t i = 0; i < result.matched.size(); ++i)
        CHECK(result.matched[i].incident_id == data.incidents.records[i].id);
}

TEST_CASE("match: zero radius matches nothing") {
    const SyntheticData data = small_synth(2);
    const MatchResult result = match_all(data.incidents, data.stations, 0.0);
    CHECK(result.matched.empty());
    CHECK(result.unmatched.size() == data.incidents.records.size());
    for (const auto& u : result.unmatched) CHECK_FALSE(u.reason.empty());
}

TEST_CASE("match: channels are complete and normalized") {
    const SyntheticData data = small_synth(3);
    const MatchResult result = match_all(data.incidents, data.stations, kMatchRadiusMeters);
    REQUIRE_FALSE(result.matched.empty());
    CHECK(result.norm.speed_max > 0.0);
    CHECK(result.norm.flow_max > 0.0);
    for (const auto& m : result.matched) {
        CHECK(m.distance_m <= kMatchRadiusMeters);
        for (int c = 0; c < kSeriesChannels; ++c) {
            const auto& channel = m.channels[static_cast<std::size_t>(c)];
            REQUIRE(channel.size() == static_cast<std::size_t>(kWindowSlots));
            for (const double v : channel) {
                if (c < 4) {
                    CHECK(v >= 0.0);
                    CHECK(v <= 1.0);
                } else {
                    CHECK(v >= -1.0);
                    CHECK(v <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("match: difference channels are day-of minus week-before") {
    const SyntheticData data = small_synth(4, 10);
    const MatchResult result = match_all(data.incidents, data.stations, kMatchRadiusMeters);
    REQUIRE_FALSE(result.matched.empty());
    const MatchedWindows& m = result.matched.front();
    for (int t = 0; t < kWindowSlots; ++t) {
        const auto i = static_cast<std::size_t>(t);
        CHECK(m.channels[4][i] == doctest::Approx(m.channels[0][i] - m.channels[2][i]));
        CHECK(m.channels[5][i] == doctest::Approx(m.channels[1][i] - m.channels[3][i]));
    }
}

TEST_CASE("match: norm override replaces dataset maxima") {
    const SyntheticData data = small_synth(5, 10);
    const NormConstants fixed{200.0, 4000.0};
    const MatchResult result = match_all(data.incidents, data.stations, kMatchRadiusMeters,
                                         &fixed);
    CHECK(result.norm.speed_max == 200.0);
    CHECK(result.norm.flow_max == 4000.0);
    const MatchResult defaulted = match_all(data.incidents, data.stations, kMatchRadiusMeters);
    REQUIRE_FALSE(result.matched.empty());
    REQUIRE(defaulted.matched.size() == result.matched.size());
    // Same raw windows, different scale.
    const double ratio = defaulted.norm.speed_max / 200.0;
    const auto& a = result.matched[0].channels[0];
    const auto& b = defaulted.matched[0].channels[0];
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i] * ratio));
}

TEST_CASE("match: extract_window demands completeness") {
    StationSeries series;
    series.station_id = "s";
    const Slot start = 30000;
    for (Slot s = start - kWindowSlots; s < start; ++s) series.readings[s] = {60.0, 100.0};
    const WindowPair window = extract_window(series, start, 0);
    CHECK(window.speed.size() == static_cast<std::size_t>(kWindowSlots));
    CHECK(window.flow.size() == static_cast<std::size_t>(kWindowSlots));
    CHECK_THROWS_AS(extract_window(series, start + 1, 0), InsufficientDataError);
    CHECK_THROWS_AS(extract_window(series, start, 7), InsufficientDataError);
}

TEST_CASE("match: dataset maxima scan every reading") {
    StationSeries a, b;
    a.station_id = "a";
    b.station_id = "b";
    a.readings[0] = {70.0, 100.0};
    a.readings[1] = {65.0, 140.0};
    b.readings[5] = {72.5, 90.0};
    const NormConstants norm = dataset_maxima({a, b});
    CHECK(norm.speed_max == 72.5);
    CHECK(norm.flow_max == 140.0);
}

TEST_CASE("match: matched cache round-trips bytes") {
    const SyntheticData data = small_synth(6, 12);
    const MatchResult result = match_all(data.incidents, data.stations, kMatchRadiusMeters);
    std::ostringstream out;
    write_matched_csv(out, result.matched);
    std::istringstream in(out.str());
    const auto reparsed = read_matched_csv(in);
    REQUIRE(reparsed.size() == result.matched.size());
    for (std::size_t i = 0; i < reparsed.size(); ++i) {
        CHECK(reparsed[i].incident_id == result.matched[i].incident_id);
        CHECK(reparsed[i].station_id == result.matched[i].station_id);
        CHECK(reparsed[i].distance_m == result.matched[i].distance_m);
        for (int c = 0; c < kSeriesChannels; ++c)
            CHECK(reparsed[i].channels[static_cast<std::size_t>(c)] ==
                  result.matched[i].channels[static_cast<std::size_t>(c)]);
    }
    // Re-serialization is byte-identical.
    std::ostringstream out2;
    write_matched_csv(out2, reparsed);
    CHECK(out2.str() == out.str());
}

TEST_CASE("match: norm constants round-trip") {
    const NormConstants norm{68.125, 1234.5};
    std::ostringstream out;
    write_norm_constants_csv(out, norm);
    std::istringstream in(out.str());
    const NormConstants back = read_norm_constants_csv(in);
    CHECK(back.speed_max == norm.speed_max);
    CHECK(back.flow_max == norm.flow_max);
}

TEST_CASE("match: nearest station wins, ties break on station id") {
    // One incident equidistant from two stations; both have full windows.
    IncidentDataset incidents;
    incidents.baseline_names = {};
    IncidentRecord rec;
    rec.id = "i1";
    rec.location = {37.0, -122.0};
    rec.start_time = 40000 * kSlotMinutes;
    rec.end_time = rec.start_time + 30;
    rec.severity = 2;
    rec.description = "test";
    rec.duration_min = 30;
    incidents.records.push_back(rec);

    const Slot start_slot = slot_of(rec.start_time);
    auto make_station = [&](const char* id, double lat_offset) {
        StationSeries s;
        s.station_id = id;
        s.location = {37.0 + lat_offset, -122.0};
        for (Slot t = start_slot - 8 * kSlotsPerDay; t < start_slot; ++t)
            s.readings[t] = {60.0, 100.0};
        return s;
    };
    // Offsets chosen equal: both ~111 m away.
    const std::vector<StationSeries> stations{make_station("s2", 0.001),
                                              make_station("s1", -0.001)};
    const MatchResult result = match_all(incidents, stations, 500.0);
    REQUIRE(result.matched.size() == 1);
    CHECK(result.matched[0].station_id == "s1");
}
