#include "engage/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace engage {

double auroc(const ScoredLabels& data) {
    const std::size_t n = data.labels.size();
    if (n == 0 || data.scores.size() != n) {
        throw std::runtime_error("auroc: labels and scores must be parallel and non-empty");
    }
    std::size_t n_pos = 0;
    for (const int y : data.labels) {
        if (y != 0 && y != 1) throw std::runtime_error("auroc: label outside {0,1}");
        n_pos += static_cast<std::size_t>(y);
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::runtime_error("auroc undefined: only one class present");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.scores[a] < data.scores[b];
    });

    // Sum of positive midranks; every midrank is a multiple of 1/2, so the
    // accumulation is exact and agrees bit-for-bit with pairwise counting.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && data.scores[order[j]] == data.scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            if (data.labels[order[k]] == 1) rank_sum_pos += midrank;
        }
        i = j;
    }
    const double numerator =
        rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return numerator / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ClassificationReport classification_report(const ScoredLabels& data, double threshold) {
    const std::size_t n = data.labels.size();
    if (n == 0 || data.scores.size() != n) {
        throw std::runtime_error("classification_report: empty or mismatched input");
    }
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool predicted = data.scores[i] >= threshold;
        const bool actual = data.labels[i] == 1;
        if (predicted && actual) ++tp;
        else if (predicted && !actual) ++fp;
        else if (!predicted && !actual) ++tn;
        else ++fn;
    }
    ClassificationReport rep;
    rep.threshold = threshold;
    rep.accuracy = static_cast<double>(tp + tn) / static_cast<double>(n);
    const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    rep.engaged.precision = ratio(tp, tp + fp);
    rep.engaged.recall = ratio(tp, tp + fn);
    rep.disengaged.precision = ratio(tn, tn + fn);
    rep.disengaged.recall = ratio(tn, tn + fp);
    return rep;
}

namespace {

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

CorrelationTable feature_correlations(const WindowTable& windows) {
    if (windows.row_count() < 2) {
        throw std::runtime_error("feature_correlations: need at least 2 rows");
    }
    std::vector<double> label;
    label.reserve(windows.row_count());
    for (const auto& r : windows.rows()) label.push_back(static_cast<double>(r.engaged));
    bool constant = true;
    for (const double v : label) constant = constant && v == label.front();
    if (constant) throw std::runtime_error("feature_correlations: constant label");

    CorrelationTable table;
    std::vector<double> x, y;
    for (std::size_t f = 0; f < windows.feature_count(); ++f) {
        x.clear();
        y.clear();
        for (std::size_t i = 0; i < windows.row_count(); ++i) {
            const double v = windows.rows()[i].features[f];
            if (!std::isnan(v)) {
                x.push_back(v);
                y.push_back(label[i]);
            }
        }
        table.entries.push_back({windows.columns()[f].name, windows.columns()[f].base_name,
                                 pearson(x, y)});
    }
    return table;
}

std::vector<std::string> key_features(const CorrelationTable& corrs, double threshold) {
    std::vector<std::string> out;
    for (const auto& e : corrs.entries) {
        if (e.r && std::abs(*e.r) > threshold) {
            if (std::find(out.begin(), out.end(), e.base_name) == out.end()) {
                out.push_back(e.base_name);
            }
        }
    }
    return out;
}

}  // namespace engage
