#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tidp {

/// Minutes since the Unix epoch, UTC.
using EpochMinutes = std::int64_t;

/// Index of a 5-minute slot since the Unix epoch.
using Slot = std::int64_t;

inline constexpr int kSlotMinutes = 5;
inline constexpr int kSlotsPerDay = 288;

/// Parses "YYYY-MM-DD[T or space]HH:MM[:SS][Z]". Seconds, when present, are
/// floored away (timestamps are minute precision). Returns nullopt on any
/// malformed input.
std::optional<EpochMinutes> parse_iso8601_minutes(std::string_view text);

std::string format_iso8601_minutes(EpochMinutes minutes);

/// Floor to the enclosing 5-minute slot, correct for pre-epoch times.
inline Slot slot_of(EpochMinutes minutes) {
    return (minutes >= 0) ? minutes / kSlotMinutes
                          : -((-minutes + kSlotMinutes - 1) / kSlotMinutes);
}

inline EpochMinutes slot_start_minutes(Slot slot) { return slot * kSlotMinutes; }

}  // namespace tidp
