#include "engage/window.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "engage/csv.hpp"
#include "engage/numeric.hpp"

namespace engage {

namespace {

constexpr double kTimeEps = 1e-9;

std::vector<DerivedColumn> derive_columns(const FeatureSchema& schema) {
    std::vector<DerivedColumn> cols;
    for (const auto& c : schema.columns()) {
        cols.push_back({c.name, DerivedKind::Median, c.name, c.kind, c.modality, c.is_key});
        if (c.kind == ColumnKind::Continuous) {
            cols.push_back(
                {c.name + "_var", DerivedKind::Variance, c.name, c.kind, c.modality, c.is_key});
        } else {
            cols.push_back(
                {c.name + "_chg", DerivedKind::Change, c.name, c.kind, c.modality, c.is_key});
        }
    }
    return cols;
}

}  // namespace

WindowTable::WindowTable(std::vector<DerivedColumn> columns, std::vector<WindowSample> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
    for (const auto& r : rows_) {
        if (r.features.size() != columns_.size()) {
            throw std::runtime_error("window row does not conform to derived schema width");
        }
    }
}

std::optional<std::size_t> WindowTable::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::string> WindowTable::feature_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& c : columns_) names.push_back(c.name);
    return names;
}

std::vector<std::string> WindowTable::participant_ids() const {
    std::vector<std::string> ids;
    for (const auto& r : rows_) {
        if (std::find(ids.begin(), ids.end(), r.participant_id) == ids.end()) {
            ids.push_back(r.participant_id);
        }
    }
    return ids;
}

std::vector<SessionKey> WindowTable::session_keys() const {
    std::vector<SessionKey> keys;
    for (const auto& r : rows_) {
        SessionKey key{r.participant_id, r.session_id};
        if (keys.empty() || !(keys.back() == key)) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
    }
    return keys;
}

std::pair<std::size_t, std::size_t> WindowTable::session_range(const SessionKey& key) const {
    std::size_t begin = rows_.size(), end = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].participant_id == key.participant_id &&
            rows_[i].session_id == key.session_id) {
            begin = std::min(begin, i);
            end = i + 1;
        }
    }
    if (begin >= end) {
        throw std::runtime_error("unknown session: " + key.participant_id + "/" + key.session_id);
    }
    return {begin, end};
}

std::vector<std::size_t> WindowTable::participant_rows(const std::string& participant_id) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].participant_id == participant_id) idx.push_back(i);
    }
    return idx;
}

WindowTable WindowTable::subset(const std::vector<std::size_t>& row_indices) const {
    std::vector<WindowSample> rows;
    rows.reserve(row_indices.size());
    for (const std::size_t i : row_indices) rows.push_back(rows_[i]);
    return WindowTable(columns_, std::move(rows));
}

WindowTable window_aggregate(const FrameTable& frames, double window_s, double stride_s) {
    if (window_s <= 0.0) throw std::runtime_error("window length must be > 0");
    if (stride_s <= 0.0 || stride_s > window_s) {
        throw std::runtime_error("stride must lie in (0, window]");
    }
    const auto columns = derive_columns(frames.schema());
    const std::size_t n_base = frames.schema().size();
    std::vector<WindowSample> out;

    for (const auto& key : frames.session_keys()) {
        const auto [begin, end] = frames.session_range(key);
        const auto& rows = frames.rows();
        const double t0 = rows[begin].timestamp_s;
        const double t_last = rows[end - 1].timestamp_s;
        const double span = t_last - t0;
        if (span + kTimeEps < window_s) continue;
        const auto n_windows =
            static_cast<std::size_t>(std::floor((span - window_s) / stride_s + kTimeEps)) + 1;

        std::size_t lo_idx = begin;
        std::vector<double> values;
        std::vector<int> labels;
        for (std::size_t k = 0; k < n_windows; ++k) {
            const double lo = t0 + static_cast<double>(k) * stride_s;
            const double hi = lo + window_s;
            while (lo_idx < end && rows[lo_idx].timestamp_s < lo - kTimeEps) ++lo_idx;
            std::size_t hi_idx = lo_idx;
            while (hi_idx < end && rows[hi_idx].timestamp_s <= hi + kTimeEps) ++hi_idx;
            if (hi_idx == lo_idx) continue;  // gap in the recording

            WindowSample w;
            w.participant_id = key.participant_id;
            w.session_id = key.session_id;
            w.t_start_s = lo;
            w.t_end_s = hi;
            w.n_frames = static_cast<int>(hi_idx - lo_idx);
            w.features.resize(columns.size());

            int engaged_count = 0;
            for (std::size_t i = lo_idx; i < hi_idx; ++i) engaged_count += rows[i].engaged;
            const int disengaged_count = w.n_frames - engaged_count;
            w.engaged = engaged_count > disengaged_count ? 1 : 0;

            std::size_t col = 0;
            for (std::size_t f = 0; f < n_base; ++f) {
                values.clear();
                for (std::size_t i = lo_idx; i < hi_idx; ++i) {
                    const double v = rows[i].features[f];
                    if (!std::isnan(v)) values.push_back(v);
                }
                const double nan = std::numeric_limits<double>::quiet_NaN();
                w.features[col++] = values.empty() ? nan : median(values);
                if (frames.schema().at(f).kind == ColumnKind::Continuous) {
                    w.features[col++] = values.empty() ? nan : population_variance(values);
                } else {
                    double chg = nan;
                    if (!values.empty()) {
                        chg = 0.0;
                        for (const double v : values) {
                            if (v != values.front()) {
                                chg = 1.0;
                                break;
                            }
                        }
                    }
                    w.features[col++] = chg;
                }
            }
            out.push_back(std::move(w));
        }
    }
    return WindowTable(columns, std::move(out));
}

Scaler fit_scaler(const WindowTable& train) {
    if (train.row_count() == 0) throw std::runtime_error("cannot fit scaler on empty table");
    const std::size_t n = train.feature_count();
    Scaler s;
    s.feature_names = train.feature_names();
    s.means.assign(n, 0.0);
    s.stds.assign(n, 0.0);
    std::vector<double> counts(n, 0.0);
    for (const auto& r : train.rows()) {
        for (std::size_t f = 0; f < n; ++f) {
            if (!std::isnan(r.features[f])) {
                s.means[f] += r.features[f];
                counts[f] += 1.0;
            }
        }
    }
    for (std::size_t f = 0; f < n; ++f) {
        if (counts[f] > 0.0) s.means[f] /= counts[f];
    }
    for (const auto& r : train.rows()) {
        for (std::size_t f = 0; f < n; ++f) {
            if (!std::isnan(r.features[f])) {
                const double d = r.features[f] - s.means[f];
                s.stds[f] += d * d;
            }
        }
    }
    for (std::size_t f = 0; f < n; ++f) {
        s.stds[f] = counts[f] > 0.0 ? std::sqrt(s.stds[f] / counts[f]) : 0.0;
    }
    return s;
}

WindowTable apply_scaler(const Scaler& scaler, const WindowTable& table) {
    if (scaler.feature_names != table.feature_names()) {
        throw std::runtime_error("scaler feature set does not match table");
    }
    std::vector<WindowSample> rows = table.rows();
    const std::size_t n = table.feature_count();
    for (auto& r : rows) {
        for (std::size_t f = 0; f < n; ++f) {
            const double denom = scaler.stds[f] > 0.0 ? scaler.stds[f] : 1.0;
            r.features[f] = (r.features[f] - scaler.means[f]) / denom;
        }
    }
    return WindowTable(table.columns(), std::move(rows));
}

FeatureGroup feature_group_from_string(const std::string& s) {
    if (s == "all") return FeatureGroup::All;
    if (s == "visual") return FeatureGroup::Visual;
    if (s == "audio") return FeatureGroup::Audio;
    if (s == "game") return FeatureGroup::Game;
    if (s == "key") return FeatureGroup::Key;
    throw std::runtime_error("unknown feature group: " + s);
}

std::string to_string(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::All: return "all";
        case FeatureGroup::Visual: return "visual";
        case FeatureGroup::Audio: return "audio";
        case FeatureGroup::Game: return "game";
        case FeatureGroup::Key: return "key";
    }
    return "all";
}

namespace {

WindowTable project(const WindowTable& table, const std::vector<std::size_t>& keep) {
    std::vector<DerivedColumn> columns;
    columns.reserve(keep.size());
    for (const std::size_t i : keep) columns.push_back(table.columns()[i]);
    std::vector<WindowSample> rows = table.rows();
    for (auto& r : rows) {
        std::vector<double> projected;
        projected.reserve(keep.size());
        for (const std::size_t i : keep) projected.push_back(r.features[i]);
        r.features = std::move(projected);
    }
    return WindowTable(std::move(columns), std::move(rows));
}

}  // namespace

WindowTable select_features(const WindowTable& table, FeatureGroup group) {
    if (group == FeatureGroup::All) return table;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < table.columns().size(); ++i) {
        const auto& c = table.columns()[i];
        const bool match = (group == FeatureGroup::Key && c.is_key) ||
                           (group == FeatureGroup::Visual && c.modality == Modality::Visual) ||
                           (group == FeatureGroup::Audio && c.modality == Modality::Audio) ||
                           (group == FeatureGroup::Game && c.modality == Modality::Game);
        if (match) keep.push_back(i);
    }
    if (keep.empty()) throw std::runtime_error("feature group selects no columns");
    return project(table, keep);
}

WindowTable select_features(const WindowTable& table,
                            const std::vector<std::string>& base_names) {
    std::set<std::string> wanted(base_names.begin(), base_names.end());
    std::set<std::string> known;
    for (const auto& c : table.columns()) known.insert(c.base_name);
    for (const auto& name : wanted) {
        if (!known.count(name)) throw std::runtime_error("unknown feature column: " + name);
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < table.columns().size(); ++i) {
        if (wanted.count(table.columns()[i].base_name)) keep.push_back(i);
    }
    return project(table, keep);
}

WindowTable annotate_columns(const WindowTable& table, const FeatureSchema& schema) {
    std::vector<DerivedColumn> columns = table.columns();
    for (auto& c : columns) {
        const auto idx = schema.index_of(c.base_name);
        if (!idx) throw std::runtime_error("window column has no schema base: " + c.base_name);
        const Column& base = schema.at(*idx);
        c.base_kind = base.kind;
        c.modality = base.modality;
        c.is_key = base.is_key;
    }
    return WindowTable(std::move(columns), table.rows());
}

std::string WindowTable::to_csv() const {
    csv::Table t;
    t.header = {kMetaParticipant, kMetaSession, "t_start_s", "t_end_s", "n_frames", kLabelColumn};
    for (const auto& c : columns_) t.header.push_back(c.name);
    for (const auto& r : rows_) {
        std::vector<std::string> cells{r.participant_id,
                                       r.session_id,
                                       csv::format_double(r.t_start_s),
                                       csv::format_double(r.t_end_s),
                                       std::to_string(r.n_frames),
                                       r.engaged ? "1" : "0"};
        for (const double v : r.features) {
            cells.push_back(std::isnan(v) ? std::string() : csv::format_double(v));
        }
        t.rows.push_back(std::move(cells));
    }
    return csv::write_string(t);
}

void WindowTable::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << to_csv();
}

WindowTable WindowTable::load_csv(const std::string& path) {
    const auto raw = csv::read_file(path);
    if (raw.header.size() < 6) throw std::runtime_error("window csv header too short");
    std::vector<DerivedColumn> columns;
    for (std::size_t i = 6; i < raw.header.size(); ++i) {
        const std::string& name = raw.header[i];
        DerivedColumn c;
        c.name = name;
        if (name.size() > 4 && name.substr(name.size() - 4) == "_var") {
            c.derived = DerivedKind::Variance;
            c.base_name = name.substr(0, name.size() - 4);
        } else if (name.size() > 4 && name.substr(name.size() - 4) == "_chg") {
            c.derived = DerivedKind::Change;
            c.base_name = name.substr(0, name.size() - 4);
        } else {
            c.derived = DerivedKind::Median;
            c.base_name = name;
        }
        columns.push_back(std::move(c));
    }
    std::vector<WindowSample> rows;
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        const auto& cells = raw.rows[i];
        if (cells.size() != raw.header.size()) {
            throw std::runtime_error("window csv row " + std::to_string(i + 2) + " malformed");
        }
        WindowSample w;
        w.participant_id = cells[0];
        w.session_id = cells[1];
        w.t_start_s = *csv::parse_cell(cells[2], i + 2, "t_start_s");
        w.t_end_s = *csv::parse_cell(cells[3], i + 2, "t_end_s");
        w.n_frames = static_cast<int>(*csv::parse_cell(cells[4], i + 2, "n_frames"));
        w.engaged = static_cast<int>(*csv::parse_cell(cells[5], i + 2, kLabelColumn));
        for (std::size_t f = 6; f < cells.size(); ++f) {
            const auto v = csv::parse_cell(cells[f], i + 2, raw.header[f]);
            w.features.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
        }
        rows.push_back(std::move(w));
    }
    return WindowTable(std::move(columns), std::move(rows));
}

}  // namespace engage
