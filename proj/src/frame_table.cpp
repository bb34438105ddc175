#include "engage/frame_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "engage/csv.hpp"
#include "engage/numeric.hpp"

namespace engage {

bool SessionKey::operator<(const SessionKey& other) const {
    if (participant_id != other.participant_id) {
        return natural_less(participant_id, other.participant_id);
    }
    return natural_less(session_id, other.session_id);
}

FrameTable::FrameTable(FeatureSchema schema, std::vector<FrameRecord> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
    if (rows_.empty()) throw std::runtime_error("frame table has no rows");
    SessionKey current{rows_[0].participant_id, rows_[0].session_id};
    std::size_t begin = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (r.features.size() != schema_.size()) {
            throw std::runtime_error("row " + std::to_string(i + 1) +
                                     " does not conform to schema width");
        }
        if (r.engaged != 0 && r.engaged != 1) {
            throw std::runtime_error("row " + std::to_string(i + 1) + ": label outside {0,1}");
        }
        if (r.timestamp_s < 0.0) {
            throw std::runtime_error("row " + std::to_string(i + 1) + ": negative timestamp");
        }
        SessionKey key{r.participant_id, r.session_id};
        if (key != current) {
            if (session_ranges_.count(key)) {
                throw std::runtime_error("session rows not contiguous: " + key.participant_id +
                                         "/" + key.session_id);
            }
            session_ranges_[current] = {begin, i};
            current = key;
            begin = i;
        } else if (i > begin && rows_[i - 1].timestamp_s >= r.timestamp_s) {
            throw std::runtime_error("non-monotonic timestamps in session " +
                                     key.participant_id + "/" + key.session_id + " at row " +
                                     std::to_string(i + 1));
        }
    }
    session_ranges_[current] = {begin, rows_.size()};
}

std::vector<std::string> FrameTable::participant_ids() const {
    std::vector<std::string> ids;
    for (const auto& [key, range] : session_ranges_) {
        if (std::find(ids.begin(), ids.end(), key.participant_id) == ids.end()) {
            ids.push_back(key.participant_id);
        }
    }
    return ids;
}

std::vector<SessionKey> FrameTable::session_keys() const {
    std::vector<SessionKey> keys;
    keys.reserve(session_ranges_.size());
    for (const auto& [key, range] : session_ranges_) keys.push_back(key);
    return keys;
}

std::pair<std::size_t, std::size_t> FrameTable::session_range(const SessionKey& key) const {
    const auto it = session_ranges_.find(key);
    if (it == session_ranges_.end()) {
        throw std::runtime_error("unknown session: " + key.participant_id + "/" + key.session_id);
    }
    return it->second;
}

std::string FrameTable::to_csv() const {
    csv::Table table;
    table.header = schema_.csv_header();
    table.rows.reserve(rows_.size());
    for (const auto& r : rows_) {
        std::vector<std::string> cells;
        cells.reserve(3 + r.features.size() + 1);
        cells.push_back(r.participant_id);
        cells.push_back(r.session_id);
        cells.push_back(csv::format_double(r.timestamp_s));
        for (const double v : r.features) {
            cells.push_back(std::isnan(v) ? std::string() : csv::format_double(v));
        }
        cells.push_back(r.engaged ? "1" : "0");
        table.rows.push_back(std::move(cells));
    }
    return csv::write_string(table);
}

void FrameTable::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << to_csv();
}

namespace {

FrameTable parse_table(const csv::Table& raw, const FeatureSchema& schema,
                       const LoadOptions& options) {
    const auto expected = schema.csv_header();
    if (raw.header != expected) {
        std::string message = "header does not match schema;";
        for (const auto& name : expected) {
            bool found = false;
            for (const auto& got : raw.header) found = found || got == name;
            if (!found) message += " missing column '" + name + "'";
        }
        for (const auto& got : raw.header) {
            bool known = false;
            for (const auto& name : expected) known = known || got == name;
            if (!known) message += " extra column '" + got + "'";
        }
        throw std::runtime_error(message);
    }
    if (raw.rows.empty()) throw std::runtime_error("empty table: file has a header but no rows");

    const std::size_t n_features = schema.size();
    std::vector<FrameRecord> rows;
    rows.reserve(raw.rows.size());
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        const auto& cells = raw.rows[i];
        const std::size_t row_1based = i + 2;  // header is row 1
        if (cells.size() != expected.size()) {
            throw std::runtime_error("row " + std::to_string(row_1based) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(expected.size()));
        }
        FrameRecord r;
        r.participant_id = cells[0];
        r.session_id = cells[1];
        if (!options.exclude_sessions.empty() && options.exclude_sessions.count(r.session_id)) {
            continue;
        }
        const auto ts = csv::parse_cell(cells[2], row_1based, kMetaTimestamp);
        if (!ts) throw std::runtime_error("row " + std::to_string(row_1based) + ": empty timestamp");
        r.timestamp_s = *ts;
        r.features.resize(n_features);
        for (std::size_t f = 0; f < n_features; ++f) {
            const auto v = csv::parse_cell(cells[3 + f], row_1based, schema.at(f).name);
            r.features[f] = v ? *v : std::numeric_limits<double>::quiet_NaN();
        }
        const auto label = csv::parse_cell(cells.back(), row_1based, kLabelColumn);
        if (!label || (*label != 0.0 && *label != 1.0)) {
            throw std::runtime_error("row " + std::to_string(row_1based) +
                                     ": label outside {0,1}");
        }
        r.engaged = static_cast<int>(*label);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error("empty table: all rows excluded");
    return FrameTable(schema, std::move(rows));
}

}  // namespace

FrameTable load_frames(const std::string& path, const FeatureSchema& schema,
                       const LoadOptions& options) {
    return parse_table(csv::read_file(path), schema, options);
}

FrameTable load_frames_from_string(const std::string& csv_text, const FeatureSchema& schema,
                                   const LoadOptions& options) {
    return parse_table(csv::read_string(csv_text), schema, options);
}

FrameTable truncate_to_games(const FrameTable& frames,
                             const std::map<SessionKey, GameBounds>& game_bounds) {
    for (const auto& key : frames.session_keys()) {
        if (!game_bounds.count(key)) {
            throw std::runtime_error("session missing game bounds: " + key.participant_id + "/" +
                                     key.session_id);
        }
    }
    std::vector<FrameRecord> kept;
    kept.reserve(frames.row_count());
    for (const auto& r : frames.rows()) {
        const auto& b = game_bounds.at({r.participant_id, r.session_id});
        if (r.timestamp_s >= b.first_game_start_s && r.timestamp_s <= b.last_game_end_s) {
            kept.push_back(r);
        }
    }
    if (kept.empty()) throw std::runtime_error("truncation removed every row");
    return FrameTable(frames.schema(), std::move(kept));
}

}  // namespace engage
