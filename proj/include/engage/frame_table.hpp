#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "engage/schema.hpp"

namespace engage {

struct FrameRecord {
    std::string participant_id;
    std::string session_id;
    double timestamp_s = 0.0;  // seconds from session start, nominal 30 Hz spacing
    std::vector<double> features;  // one value per schema column; NaN = missing
    int engaged = 0;
};

struct SessionKey {
    std::string participant_id;
    std::string session_id;
    bool operator==(const SessionKey&) const = default;
    // Natural ordering so "s2" sorts before "s10"; defines session chronology.
    bool operator<(const SessionKey& other) const;
};

// Immutable after construction; rows grouped by (participant, session) with
// strictly increasing timestamps within each session.
class FrameTable {
public:
    FrameTable() = default;
    FrameTable(FeatureSchema schema, std::vector<FrameRecord> rows);

    const FeatureSchema& schema() const { return schema_; }
    const std::vector<FrameRecord>& rows() const { return rows_; }
    std::size_t row_count() const { return rows_.size(); }

    std::vector<std::string> participant_ids() const;
    std::vector<SessionKey> session_keys() const;
    // Row index range [begin, end) of one session.
    std::pair<std::size_t, std::size_t> session_range(const SessionKey& key) const;

    std::string to_csv() const;
    void save_csv(const std::string& path) const;

private:
    FeatureSchema schema_;
    std::vector<FrameRecord> rows_;
    std::map<SessionKey, std::pair<std::size_t, std::size_t>> session_ranges_;
};

struct LoadOptions {
    // Tutorial sessions and other exporter-side exclusions.
    std::set<std::string> exclude_sessions;
};

FrameTable load_frames(const std::string& path, const FeatureSchema& schema,
                       const LoadOptions& options = {});
FrameTable load_frames_from_string(const std::string& csv_text, const FeatureSchema& schema,
                                   const LoadOptions& options = {});

struct GameBounds {
    double first_game_start_s = 0.0;
    double last_game_end_s = 0.0;
};

// Keeps only rows with first_game_start <= t <= last_game_end per session.
// Every session present in `frames` must have bounds.
FrameTable truncate_to_games(const FrameTable& frames,
                             const std::map<SessionKey, GameBounds>& game_bounds);

}  // namespace engage
