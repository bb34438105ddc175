#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engage/window.hpp"

namespace engage {

enum class SegmentKind { ES, DS };

// Maximal run of constant engagement state on the 0.5 s window grid. Each
// window owns one stride-length cell, so duration = run length * stride.
struct Segment {
    SegmentKind kind = SegmentKind::ES;
    std::string participant_id;
    std::string session_id;
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    double duration_s = 0.0;
};

std::vector<Segment> segment_labels(const WindowTable& windows, double stride_s = 0.5);

struct DurationStats {
    std::size_t count = 0;
    double median = 0.0;
    double lower_quartile = 0.0;
    double upper_quartile = 0.0;
};

struct SequenceStats {
    std::optional<DurationStats> es;
    std::optional<DurationStats> ds;
    // DS duration >= upper quartile counts as long; < lower quartile as short.
    // The strict (>) long count is also reported since the boundary rule is a
    // reading of the paper, not stated by it.
    std::size_t n_long_ds = 0;
    std::size_t n_long_ds_strict = 0;
    std::size_t n_short_ds = 0;
    double long_ds_time_share = 0.0;
    double mid_ds_time_share = 0.0;
    double short_ds_time_share = 0.0;
};

SequenceStats sequence_stats(const std::vector<Segment>& segments);

struct TrendResult {
    std::vector<double> bin_rates;  // chronological equal-count bins
    double slope = 0.0;             // per bin index
    double p = 1.0;                 // two-sided regression t-test
};

// Chronological engagement trend for a single participant's windows.
TrendResult engagement_trend(const WindowTable& windows, int n_bins = 10);

struct SpeechConditioning {
    std::optional<double> rate_recent_speech;     // robot spoke within the horizon
    std::optional<double> rate_no_recent_speech;  // robot silent for longer
    std::size_t n_recent = 0;
    std::size_t n_no_recent = 0;
};

SpeechConditioning engagement_by_robot_speech(const WindowTable& windows,
                                              double horizon_s = 60.0,
                                              const std::string& elapsed_column =
                                                  kRobotElapsedColumn);

}  // namespace engage
