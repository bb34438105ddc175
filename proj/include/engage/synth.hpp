#pragma once

#include <cstdint>

#include "engage/frame_table.hpp"

namespace engage {

// Generator targets. Engagement alternates between ES and DS with lognormal
// durations; the DS median and the overall engaged fraction are honored
// directly, the ES scale is derived from them. Features draw from
// state-conditioned Gaussians with larger variance while disengaged, plus
// per-participant and per-session offsets.
struct SynthConfig {
    int participants = 4;
    int sessions_per_participant = 3;
    double session_length_s = 600.0;
    double engagement_rate = 0.65;       // long-run engaged fraction at mid-intervention
    double ds_duration_median_s = 4.0;
    double es_duration_median_s = 11.0;
    double trend_slope = 0.0;            // engagement change per session; negative = decline
    double visual_noise_scale = 1.0;
    double audio_noise_scale = 1.0;
    double game_noise_scale = 1.0;
    // Robot speech gets rarer while disengaged by this factor; 1.0 decouples
    // speech from engagement entirely.
    double speech_coupling = 2.5;
    double frame_drop_rate = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

FrameTable generate_synthetic(const SynthConfig& cfg);

}  // namespace engage
