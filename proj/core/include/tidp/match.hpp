#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tidp/feature_source.hpp"
#include "tidp/ingest.hpp"
#include "tidp/timeutil.hpp"

namespace tidp {

inline constexpr int kWindowSlots = 288;  // one day of 5-minute slots
inline constexpr double kMatchRadiusMeters = 500.0;
inline constexpr int kSeriesChannels = 6;

/// Column-name prefixes for the derived channels, in storage order.
extern const std::array<const char*, kSeriesChannels> kChannelNames;

/// Storage index of a series-backed feature source; lstm_sent has none.
int channel_index(FeatureSource source);

/// Global normalization constants: maxima over every reading of every station.
struct NormConstants {
    double speed_max = 0.0;
    double flow_max = 0.0;
};

NormConstants dataset_maxima(const std::vector<StationSeries>& stations);

/// Raw (unnormalized) one-day speed and flow windows.
struct WindowPair {
    std::vector<double> speed;
    std::vector<double> flow;
};

/// The kWindowSlots slots strictly before start_slot, shifted back offset_days
/// whole days, ordered oldest to newest. Throws InsufficientDataError naming
/// the first missing slot when the window is incomplete.
WindowPair extract_window(const StationSeries& series, Slot start_slot, int offset_days);

/// One incident joined to its detector station: six derived channels, each
/// kWindowSlots values normalized into [0, 1] (SD and FD into [-1, 1]).
struct MatchedWindows {
    std::string incident_id;
    std::string station_id;
    double distance_m = 0.0;
    std::array<std::vector<double>, kSeriesChannels> channels;
};

struct UnmatchedIncident {
    std::string incident_id;
    std::string reason;
};

struct MatchResult {
    std::vector<MatchedWindows> matched;  // input record order
    std::vector<UnmatchedIncident> unmatched;
    NormConstants norm;
};

/// Joins an incident to the nearest station within radius_m whose day-of and
/// week-before windows are both complete. Distance ties pick the lowest
/// station_id.
std::optional<MatchedWindows> match_incident(const IncidentRecord& incident,
                                             const std::vector<StationSeries>& stations,
                                             const NormConstants& norm,
                                             double radius_m = kMatchRadiusMeters,
                                             std::string* reason = nullptr);

/// When `norm` is null the normalization constants come from dataset_maxima.
MatchResult match_all(const IncidentDataset& incidents,
                      const std::vector<StationSeries>& stations,
                      double radius_m = kMatchRadiusMeters,
                      const NormConstants* norm = nullptr);

void write_matched_csv(std::ostream& out, const std::vector<MatchedWindows>& matched);
std::vector<MatchedWindows> read_matched_csv(std::istream& in);
std::vector<MatchedWindows> read_matched_csv_file(const std::string& path);

void write_norm_constants_csv(std::ostream& out, const NormConstants& norm);
NormConstants read_norm_constants_csv(std::istream& in);
NormConstants read_norm_constants_csv_file(const std::string& path);

void write_match_rejections(std::ostream& out, const std::vector<UnmatchedIncident>& unmatched);

}  // namespace tidp
