#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engage/frame_table.hpp"

namespace engage {

enum class DerivedKind { Median, Variance, Change };

struct DerivedColumn {
    std::string name;            // base name, or base + "_var" / "_chg"
    DerivedKind derived = DerivedKind::Median;
    std::string base_name;
    ColumnKind base_kind = ColumnKind::Continuous;
    Modality modality = Modality::Visual;
    bool is_key = false;
};

struct WindowSample {
    std::string participant_id;
    std::string session_id;
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    std::vector<double> features;  // one per derived column
    int engaged = 0;               // median frame label, even split -> 0
    int n_frames = 0;
};

// The model's feature space: half-second-stride, one-second aggregates.
// Rows are chronological within each session; sessions ordered naturally.
class WindowTable {
public:
    WindowTable() = default;
    WindowTable(std::vector<DerivedColumn> columns, std::vector<WindowSample> rows);

    const std::vector<DerivedColumn>& columns() const { return columns_; }
    const std::vector<WindowSample>& rows() const { return rows_; }
    std::size_t row_count() const { return rows_.size(); }
    std::size_t feature_count() const { return columns_.size(); }

    std::optional<std::size_t> index_of(const std::string& name) const;
    std::vector<std::string> feature_names() const;
    std::vector<std::string> participant_ids() const;
    std::vector<SessionKey> session_keys() const;
    std::pair<std::size_t, std::size_t> session_range(const SessionKey& key) const;

    // Rows restricted to one participant, original order preserved.
    std::vector<std::size_t> participant_rows(const std::string& participant_id) const;

    WindowTable subset(const std::vector<std::size_t>& row_indices) const;

    std::string to_csv() const;
    void save_csv(const std::string& path) const;
    static WindowTable load_csv(const std::string& path);

private:
    std::vector<DerivedColumn> columns_;
    std::vector<WindowSample> rows_;
};

WindowTable window_aggregate(const FrameTable& frames, double window_s = 1.0,
                             double stride_s = 0.5);

// Standardization statistics estimated from a training table only.
struct Scaler {
    std::vector<std::string> feature_names;
    std::vector<double> means;
    std::vector<double> stds;  // 0 recorded for constant columns
};

Scaler fit_scaler(const WindowTable& train);
WindowTable apply_scaler(const Scaler& scaler, const WindowTable& table);

enum class FeatureGroup { All, Visual, Audio, Game, Key };

FeatureGroup feature_group_from_string(const std::string& s);
std::string to_string(FeatureGroup group);

WindowTable select_features(const WindowTable& table, FeatureGroup group);
// Explicit base-name selection; derived columns follow their base.
WindowTable select_features(const WindowTable& table,
                            const std::vector<std::string>& base_names);

// Restores kind/modality/key metadata on a table loaded from CSV, which
// carries column names only.
WindowTable annotate_columns(const WindowTable& table, const FeatureSchema& schema);

}  // namespace engage
