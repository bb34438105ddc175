#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engage/window.hpp"

namespace engage {

struct ScoredLabels {
    std::vector<int> labels;    // 0/1
    std::vector<double> scores; // [0, 1]
};

// Mann-Whitney AUROC via midranks: P(score+ > score-) + 0.5 P(tie).
// Matches the O(n^2) pairwise count exactly. Throws on single-class input.
double auroc(const ScoredLabels& data);

struct ClassMetrics {
    std::optional<double> precision;  // nullopt when the class is never predicted
    std::optional<double> recall;     // nullopt when the class never occurs
};

struct ClassificationReport {
    double accuracy = 0.0;
    ClassMetrics engaged;
    ClassMetrics disengaged;
    double threshold = 0.5;
};

ClassificationReport classification_report(const ScoredLabels& data, double threshold = 0.5);

struct FeatureCorrelation {
    std::string name;
    std::string base_name;
    std::optional<double> r;  // nullopt for constant features
};

struct CorrelationTable {
    std::vector<FeatureCorrelation> entries;
};

// Pearson r of every window feature against the engagement label.
CorrelationTable feature_correlations(const WindowTable& windows);

// Base feature names whose best |r| exceeds the threshold, derived columns
// mapped back to their base.
std::vector<std::string> key_features(const CorrelationTable& corrs, double threshold = 0.20);

}  // namespace engage
