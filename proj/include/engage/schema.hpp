#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace engage {

enum class ColumnKind { Continuous, Discrete, Binary };
enum class Modality { Visual, Audio, Game, Meta };

std::string to_string(ColumnKind kind);
std::string to_string(Modality modality);
ColumnKind column_kind_from_string(const std::string& s);
Modality modality_from_string(const std::string& s);

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    Modality modality = Modality::Visual;
    bool is_key = false;  // one of the seven key features
};

// Ordered feature inventory for a frame-level export. Meta columns
// (participant_id, session_id, timestamp_s) and the binary `engaged`
// label are implicit and always present; `columns` lists the feature
// columns only, in CSV order.
class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<Column> columns);

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    const Column& at(std::size_t i) const { return columns_[i]; }

    std::optional<std::size_t> index_of(const std::string& name) const;

    // Full CSV header: participant_id, session_id, timestamp_s, <features...>, engaged.
    std::vector<std::string> csv_header() const;

    // Names of columns flagged as key features.
    std::vector<std::string> key_names() const;

    std::string to_json() const;
    static FeatureSchema from_json(const std::string& json_text);
    static FeatureSchema load(const std::string& path);
    void save(const std::string& path) const;

    // The paper-shaped default: visual / audio / game feature families with
    // the seven key features flagged. Ships as a config so real exports can
    // remap names without code changes.
    static FeatureSchema default_schema();

    bool operator==(const FeatureSchema& other) const;

private:
    std::vector<Column> columns_;
};

inline const char* kMetaParticipant = "participant_id";
inline const char* kMetaSession = "session_id";
inline const char* kMetaTimestamp = "timestamp_s";
inline const char* kLabelColumn = "engaged";
inline const char* kRobotElapsedColumn = "robot_talked_elapsed_s";

}  // namespace engage
