#pragma once
// Canonical names of the four collaboration styles.

#include <array>

namespace coact::styles {

inline constexpr const char* kTakeover = "Takeover";
inline constexpr const char* kHandsOn = "Hands-on";
inline constexpr const char* kHandsOff = "Hands-off";
inline constexpr const char* kCollaborative = "Collaborative";

inline constexpr std::array<const char*, 4> kAll = {kTakeover, kHandsOn, kHandsOff,
                                                    kCollaborative};

}  // namespace coact::styles
