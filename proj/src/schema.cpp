#include "engage/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace engage {

std::string to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Continuous: return "continuous";
        case ColumnKind::Discrete: return "discrete";
        case ColumnKind::Binary: return "binary";
    }
    return "continuous";
}

std::string to_string(Modality modality) {
    switch (modality) {
        case Modality::Visual: return "visual";
        case Modality::Audio: return "audio";
        case Modality::Game: return "game";
        case Modality::Meta: return "meta";
    }
    return "meta";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::Continuous;
    if (s == "discrete") return ColumnKind::Discrete;
    if (s == "binary") return ColumnKind::Binary;
    throw std::runtime_error("unknown column kind: " + s);
}

Modality modality_from_string(const std::string& s) {
    if (s == "visual") return Modality::Visual;
    if (s == "audio") return Modality::Audio;
    if (s == "game") return Modality::Game;
    if (s == "meta") return Modality::Meta;
    throw std::runtime_error("unknown modality: " + s);
}

FeatureSchema::FeatureSchema(std::vector<Column> columns) : columns_(std::move(columns)) {
    std::set<std::string> seen{kMetaParticipant, kMetaSession, kMetaTimestamp, kLabelColumn};
    for (const auto& c : columns_) {
        if (c.name.empty()) throw std::runtime_error("schema column with empty name");
        if (!seen.insert(c.name).second) {
            throw std::runtime_error("duplicate schema column: " + c.name);
        }
        if (c.modality == Modality::Meta) {
            throw std::runtime_error("meta columns are implicit; '" + c.name +
                                     "' must not be listed as a feature");
        }
    }
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::string> FeatureSchema::csv_header() const {
    std::vector<std::string> header{kMetaParticipant, kMetaSession, kMetaTimestamp};
    for (const auto& c : columns_) header.push_back(c.name);
    header.push_back(kLabelColumn);
    return header;
}

std::vector<std::string> FeatureSchema::key_names() const {
    std::vector<std::string> names;
    for (const auto& c : columns_) {
        if (c.is_key) names.push_back(c.name);
    }
    return names;
}

std::string FeatureSchema::to_json() const {
    nlohmann::json doc;
    doc["columns"] = nlohmann::json::array();
    for (const auto& c : columns_) {
        nlohmann::json col;
        col["name"] = c.name;
        col["kind"] = to_string(c.kind);
        col["modality"] = to_string(c.modality);
        if (c.is_key) col["key"] = true;
        doc["columns"].push_back(col);
    }
    return doc.dump(2);
}

FeatureSchema FeatureSchema::from_json(const std::string& json_text) {
    const auto doc = nlohmann::json::parse(json_text);
    std::vector<Column> columns;
    for (const auto& col : doc.at("columns")) {
        Column c;
        c.name = col.at("name").get<std::string>();
        c.kind = column_kind_from_string(col.at("kind").get<std::string>());
        c.modality = modality_from_string(col.at("modality").get<std::string>());
        c.is_key = col.value("key", false);
        columns.push_back(std::move(c));
    }
    return FeatureSchema(std::move(columns));
}

FeatureSchema FeatureSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void FeatureSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write schema file: " + path);
    out << to_json() << "\n";
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
    if (columns_.size() != other.columns_.size()) return false;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const auto& a = columns_[i];
        const auto& b = other.columns_[i];
        if (a.name != b.name || a.kind != b.kind || a.modality != b.modality ||
            a.is_key != b.is_key) {
            return false;
        }
    }
    return true;
}

FeatureSchema FeatureSchema::default_schema() {
    const auto C = ColumnKind::Continuous;
    const auto D = ColumnKind::Discrete;
    const auto B = ColumnKind::Binary;
    const auto V = Modality::Visual;
    const auto A = Modality::Audio;
    const auto G = Modality::Game;
    std::vector<Column> cols{
        {"face_confidence", C, V, true},
        {"face_success", B, V, false},
        {"gaze_direction", C, V, true},
        {"gaze_distance", C, V, false},
        {"head_pitch", C, V, false},
        {"head_yaw", C, V, false},
        {"head_distance", C, V, true},
        {"au_brow_raiser", C, V, false},
        {"au_lip_corner_puller", C, V, false},
        {"au_jaw_drop", C, V, false},
        {"au_blink", C, V, false},
        {"people_count", D, V, true},
        {"harmonicity", C, A, false},
        {"intensity", C, A, false},
        {"mfcc_1", C, A, false},
        {"mfcc_2", C, A, false},
        {"pitch", C, A, false},
        {"challenge_level", D, G, false},
        {"games_played", D, G, false},
        {"game_type", D, G, false},
        {"incorrect_count_game", D, G, false},
        {"incorrect_count_session", D, G, true},
        {"session_time_s", C, G, true},
        {"game_time_s", C, G, false},
        {kRobotElapsedColumn, C, G, true},
    };
    return FeatureSchema(std::move(cols));
}

}  // namespace engage
