#pragma once

#include <array>
#include <string>
#include <string_view>

#include "tidp/errors.hpp"

namespace tidp {

/// The seven additional-feature channels a scenario can fuse with the
/// baseline: the encoded text description plus the six traffic series.
enum class FeatureSource {
    lstm_sent,
    speed,
    flow,
    speed7,
    flow7,
    sd,
    fd,
};

inline constexpr std::array<FeatureSource, 7> kAllSources = {
    FeatureSource::lstm_sent, FeatureSource::speed, FeatureSource::flow,
    FeatureSource::speed7,    FeatureSource::flow7, FeatureSource::sd,
    FeatureSource::fd,
};

inline std::string to_string(FeatureSource s) {
    switch (s) {
        case FeatureSource::lstm_sent: return "LSTM-sent";
        case FeatureSource::speed: return "Speed";
        case FeatureSource::flow: return "Flow";
        case FeatureSource::speed7: return "Speed7";
        case FeatureSource::flow7: return "Flow7";
        case FeatureSource::sd: return "SD";
        case FeatureSource::fd: return "FD";
    }
    return "?";
}

inline FeatureSource source_from_string(std::string_view name) {
    for (FeatureSource s : kAllSources) {
        if (to_string(s) == name) return s;
    }
    throw ConfigError("unknown feature source: " + std::string(name));
}

}  // namespace tidp
