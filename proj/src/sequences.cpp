#include "engage/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "engage/numeric.hpp"
#include "engage/stats.hpp"

namespace engage {

std::vector<Segment> segment_labels(const WindowTable& windows, double stride_s) {
    if (stride_s <= 0.0) throw std::runtime_error("segment_labels: stride must be > 0");
    std::vector<Segment> segments;
    const auto& rows = windows.rows();

    std::size_t i = 0;
    while (i < rows.size()) {
        const auto& first = rows[i];
        std::size_t j = i;
        // Run ends on label change, session change, or a hole in the grid.
        while (j + 1 < rows.size()) {
            const auto& cur = rows[j];
            const auto& nxt = rows[j + 1];
            if (nxt.participant_id != cur.participant_id || nxt.session_id != cur.session_id ||
                nxt.engaged != cur.engaged ||
                std::fabs(nxt.t_start_s - cur.t_start_s - stride_s) > 1e-6) {
                break;
            }
            ++j;
        }
        Segment seg;
        seg.kind = first.engaged ? SegmentKind::ES : SegmentKind::DS;
        seg.participant_id = first.participant_id;
        seg.session_id = first.session_id;
        seg.t_start_s = first.t_start_s;
        seg.t_end_s = rows[j].t_start_s + stride_s;
        seg.duration_s = static_cast<double>(j - i + 1) * stride_s;
        segments.push_back(std::move(seg));
        i = j + 1;
    }
    return segments;
}

SequenceStats sequence_stats(const std::vector<Segment>& segments) {
    std::vector<double> es_durations, ds_durations;
    for (const auto& s : segments) {
        (s.kind == SegmentKind::ES ? es_durations : ds_durations).push_back(s.duration_s);
    }
    const auto kind_stats = [](const std::vector<double>& d) -> std::optional<DurationStats> {
        if (d.empty()) return std::nullopt;
        DurationStats st;
        st.count = d.size();
        st.median = quantile(d, 0.5);
        st.lower_quartile = quantile(d, 0.25);
        st.upper_quartile = quantile(d, 0.75);
        return st;
    };

    SequenceStats stats;
    stats.es = kind_stats(es_durations);
    stats.ds = kind_stats(ds_durations);
    if (stats.ds) {
        const double q1 = stats.ds->lower_quartile;
        const double q3 = stats.ds->upper_quartile;
        double total = 0.0, long_time = 0.0, short_time = 0.0, mid_time = 0.0;
        for (const double d : ds_durations) {
            total += d;
            if (d >= q3) {
                long_time += d;
                ++stats.n_long_ds;
                if (d > q3) ++stats.n_long_ds_strict;
            } else if (d < q1) {
                short_time += d;
                ++stats.n_short_ds;
            } else {
                mid_time += d;
            }
        }
        if (total > 0.0) {
            stats.long_ds_time_share = long_time / total;
            stats.short_ds_time_share = short_time / total;
            stats.mid_ds_time_share = mid_time / total;
        }
    }
    return stats;
}

TrendResult engagement_trend(const WindowTable& windows, int n_bins) {
    if (n_bins < 3) throw std::runtime_error("engagement_trend: need at least 3 bins");
    const std::size_t n = windows.row_count();
    if (n == 0) throw std::runtime_error("engagement_trend: empty table");

    // Chronological order across sessions.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = windows.rows()[a];
        const auto& rb = windows.rows()[b];
        const SessionKey ka{ra.participant_id, ra.session_id};
        const SessionKey kb{rb.participant_id, rb.session_id};
        if (ka < kb) return true;
        if (kb < ka) return false;
        return ra.t_start_s < rb.t_start_s;
    });

    TrendResult res;
    std::vector<double> xs;
    for (int b = 0; b < n_bins; ++b) {
        const std::size_t lo = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(n_bins);
        const std::size_t hi =
            n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(n_bins);
        if (hi == lo) continue;
        double engaged = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            engaged += static_cast<double>(windows.rows()[order[i]].engaged);
        }
        res.bin_rates.push_back(engaged / static_cast<double>(hi - lo));
        xs.push_back(static_cast<double>(b));
    }
    const std::size_t k = res.bin_rates.size();
    if (k < 3) throw std::runtime_error("engagement_trend: fewer than 3 non-empty bins");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += xs[i];
        my += res.bin_rates[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (res.bin_rates[i] - my);
    }
    res.slope = sxy / sxx;

    double sse = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double fitted = my + res.slope * (xs[i] - mx);
        sse += (res.bin_rates[i] - fitted) * (res.bin_rates[i] - fitted);
    }
    const double dof = static_cast<double>(k) - 2.0;
    if (sse <= 1e-15) {
        res.p = std::fabs(res.slope) <= 1e-15 ? 1.0 : 0.0;
        return res;
    }
    const double se = std::sqrt(sse / dof / sxx);
    res.p = stats::t_test_p_two_sided(res.slope / se, dof);
    return res;
}

SpeechConditioning engagement_by_robot_speech(const WindowTable& windows, double horizon_s,
                                              const std::string& elapsed_column) {
    const auto col = windows.index_of(elapsed_column);
    if (!col) {
        throw std::runtime_error("engagement_by_robot_speech: column not found: " +
                                 elapsed_column);
    }
    SpeechConditioning out;
    double recent_engaged = 0.0, old_engaged = 0.0;
    for (const auto& r : windows.rows()) {
        const double elapsed = r.features[*col];
        if (std::isnan(elapsed)) continue;
        if (elapsed <= horizon_s) {
            ++out.n_recent;
            recent_engaged += static_cast<double>(r.engaged);
        } else {
            ++out.n_no_recent;
            old_engaged += static_cast<double>(r.engaged);
        }
    }
    if (out.n_recent > 0) {
        out.rate_recent_speech = recent_engaged / static_cast<double>(out.n_recent);
    }
    if (out.n_no_recent > 0) {
        out.rate_no_recent_speech = old_engaged / static_cast<double>(out.n_no_recent);
    }
    return out;
}

}  // namespace engage
