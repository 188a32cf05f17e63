#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tidp/errors.hpp"
#include "tidp/geo.hpp"
#include "tidp/ingest.hpp"
#include "tidp/rng.hpp"
#include "tidp/timeutil.hpp"

namespace tidp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGridLat = 37.75;
constexpr double kGridLon = -122.45;
// 0.03 deg latitude ~= 3.3 km, 0.04 deg longitude ~= 3.5 km at this latitude,
// so neighbouring stations stay several times farther apart than the 500 m
// matching radius.
constexpr double kLatStep = 0.03;
constexpr double kLonStep = 0.04;

const char* const kRoads[] = {"I-80 E", "I-280 N", "US-101 S", "CA-1 N", "I-580 W", "US-101 N"};

GeoPoint offset_point(const GeoPoint& origin, double distance_m, double bearing_rad) {
    const double dlat = distance_m * std::cos(bearing_rad) / kEarthRadiusMeters * 180.0 / kPi;
    const double coslat = std::cos(origin.latitude * kPi / 180.0);
    const double dlon =
        distance_m * std::sin(bearing_rad) / (kEarthRadiusMeters * coslat) * 180.0 / kPi;
    return {origin.latitude + dlat, origin.longitude + dlon};
}

// Smooth double-peaked congestion profile in [0, 1]; peaks at the morning and
// evening commute slots.
double commute_profile(int slot_of_day) {
    const double morning = std::exp(-0.5 * std::pow((slot_of_day - 96) / 18.0, 2.0));
    const double evening = std::exp(-0.5 * std::pow((slot_of_day - 204) / 18.0, 2.0));
    return std::min(1.0, morning + evening);
}

std::string describe(int incident_index, int severity, const std::string& road) {
    const std::string where = road + " at mile " + std::to_string(3 + incident_index % 40);
    switch (severity) {
        case 4:
            return "Multi-vehicle accident on " + where + ", all lanes blocked";
        case 3:
            return "Second lane blocked due to accident on " + where;
        case 2:
            return "Right hand shoulder blocked due to accident on " + where;
        default:
            return "Accident on " + where + ", traffic slow";
    }
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& config) {
    if (config.n_incidents < 1 || config.n_stations < 1)
        throw ConfigError("synthetic dataset needs at least one incident and one station");
    if (config.drop_depth_max < config.drop_depth_min)
        throw ConfigError("drop_depth_max below drop_depth_min");

    Rng rng(config.seed);

    // First incident day is 8 so that the 7-days-back window is always whole.
    const int n_days = 9 + (config.n_incidents - 1) / config.n_stations;
    const auto base_minutes = parse_iso8601_minutes("2019-03-01T00:00");
    const Slot base_slot = slot_of(*base_minutes);

    struct StationPlan {
        GeoPoint location;
        double base_speed = 0;
        double base_flow = 0;
        double dip_scale = 0;
        // slot -> remaining speed after the incident drop, applied on top of
        // the diurnal pattern
        std::vector<std::pair<Slot, double>> drops;
    };
    std::vector<StationPlan> plans(static_cast<std::size_t>(config.n_stations));
    const int grid_cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(config.n_stations))));
    for (int s = 0; s < config.n_stations; ++s) {
        StationPlan& plan = plans[static_cast<std::size_t>(s)];
        plan.location = {kGridLat + (s / grid_cols) * kLatStep, kGridLon + (s % grid_cols) * kLonStep};
        plan.base_speed = rng.uniform(90.0, 110.0);
        plan.base_flow = rng.uniform(150.0, 350.0);
        plan.dip_scale = rng.uniform(0.8, 1.2);
    }

    SyntheticData data;
    // Clear weather is the reference level (both indicators zero); an
    // exhaustive indicator set would alias the intercept of linear fits.
    data.incidents.baseline_names = {"severity", "start_hour", "affected_extent",
                                     "weather=fog", "weather=rain"};

    for (int i = 0; i < config.n_incidents; ++i) {
        const int s = i % config.n_stations;
        const int day = 8 + i / config.n_stations;
        StationPlan& plan = plans[static_cast<std::size_t>(s)];

        const int start_of_day = static_cast<int>(rng.uniform_int(96, 216));  // 08:00..18:00
        const Slot start_slot = base_slot + static_cast<Slot>(day) * kSlotsPerDay + start_of_day;

        const double depth = rng.uniform(config.drop_depth_min, config.drop_depth_max);
        const int len_slots = static_cast<int>(rng.uniform_int(6, 24));  // 30..120 minutes
        const double length_min = len_slots * static_cast<double>(kSlotMinutes);
        for (int t = 1; t <= len_slots; ++t) plan.drops.emplace_back(start_slot - t, depth);

        const DurationLaw& law = config.duration_law;
        const double raw = law.depth_coeff * depth + law.length_coeff * length_min + law.intercept +
                           rng.normal() * law.noise_sd_min;
        const std::int64_t duration = std::max<std::int64_t>(1, std::llround(raw));

        // Severity follows the depth quartile but with occasional off-by-one
        // labels, so it is informative without giving the law away.
        const double frac =
            (depth - config.drop_depth_min) /
            std::max(1e-9, config.drop_depth_max - config.drop_depth_min);
        int severity = 1 + std::min(3, static_cast<int>(frac * 4.0));
        if (rng.uniform() < 0.2) severity += rng.uniform() < 0.5 ? -1 : 1;
        severity = std::clamp(severity, 1, 4);

        const double bearing = rng.uniform(0.0, 2.0 * kPi);
        const double dist = rng.uniform(100.0, 400.0);

        const double extent_noise = rng.normal();
        const double extent = std::clamp(std::round(length_min / 30.0 + extent_noise), 0.0, 5.0);
        const double weather_pick = rng.uniform();
        const int weather = weather_pick < 0.5 ? 0 : (weather_pick < 0.75 ? 1 : 2);

        IncidentRecord rec;
        rec.id = "inc-" + std::to_string(1000 + i);
        rec.location = offset_point(plan.location, dist, bearing);
        rec.start_time = slot_start_minutes(start_slot);
        rec.end_time = rec.start_time + duration;
        rec.severity = severity;
        rec.description = describe(i, severity, kRoads[i % 6]);
        rec.duration_min = duration;
        rec.baseline = {static_cast<double>(severity),
                        static_cast<double>((start_of_day * kSlotMinutes) / 60),
                        extent,
                        weather == 1 ? 1.0 : 0.0,
                        weather == 2 ? 1.0 : 0.0};
        data.incidents.records.push_back(std::move(rec));
    }

    for (int s = 0; s < config.n_stations; ++s) {
        StationPlan& plan = plans[static_cast<std::size_t>(s)];
        std::sort(plan.drops.begin(), plan.drops.end());

        StationSeries series;
        series.station_id = "vds-" + std::to_string(400000 + s);
        series.location = plan.location;
        for (Slot slot = base_slot; slot < base_slot + static_cast<Slot>(n_days) * kSlotsPerDay;
             ++slot) {
            const int slot_of_day = static_cast<int>(slot % kSlotsPerDay);
            const double profile = commute_profile(slot_of_day);
            double speed = plan.base_speed - 25.0 * plan.dip_scale * profile +
                           rng.normal() * config.noise_sd;
            double flow = plan.base_flow * (0.35 + 0.65 * profile) + rng.normal() * config.noise_sd;

            const auto it = std::lower_bound(
                plan.drops.begin(), plan.drops.end(), slot,
                [](const std::pair<Slot, double>& d, Slot value) { return d.first < value; });
            if (it != plan.drops.end() && it->first == slot) speed -= it->second;

            series.readings[slot] = {std::max(3.0, speed), std::max(0.0, flow)};
        }
        data.stations.push_back(std::move(series));
    }

    return data;
}

}  // namespace tidp
