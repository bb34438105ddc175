#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "engage/window.hpp"

namespace engage {

struct EarlyStoppingConfig {
    double validation_fraction = 0.1;
    int patience_rounds = 10;
};

struct BaggingConfig {
    int n_bags = 5;
    double subsample_fraction = 0.8;
};

struct GbdtConfig {
    int n_trees = 100;
    int max_depth = 6;       // 0 trains root-only stumps
    double learning_rate = 0.3;
    int min_samples_leaf = 1;
    double leaf_l2 = 1.0;    // L2 regularization on leaf values
    EarlyStoppingConfig early_stopping;
    BaggingConfig bagging;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // x[feature] < threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;      // log-odds contribution at leaves
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double predict(std::span<const double> x) const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    int depth() const;

private:
    std::vector<TreeNode> nodes_;
};

struct BagEnsemble {
    double base_score = 0.0;  // log-odds of the bag's training prior
    std::vector<RegressionTree> trees;
};

// Bagged boosted ensemble; immutable after training. Prediction is the mean
// over bags of sigmoid(base + learning_rate * sum of tree outputs).
class GbdtModel {
public:
    GbdtModel() = default;

    double predict_proba(std::span<const double> x) const;
    std::vector<double> predict_proba(const WindowTable& table) const;

    const GbdtConfig& config() const { return config_; }
    const std::vector<BagEnsemble>& bags() const { return bags_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    bool degenerate() const { return degenerate_; }

    std::string to_json() const;
    static GbdtModel from_json(const std::string& json_text);
    void save(const std::string& path) const;
    static GbdtModel load(const std::string& path);

    static GbdtModel make(GbdtConfig cfg, std::vector<std::string> feature_names,
                          std::vector<BagEnsemble> bags, bool degenerate,
                          double degenerate_proba);

private:
    GbdtConfig config_;
    std::vector<std::string> feature_names_;
    std::vector<BagEnsemble> bags_;
    bool degenerate_ = false;
    double degenerate_proba_ = 0.5;
};

GbdtModel train_gbdt(const WindowTable& train, const GbdtConfig& cfg);
GbdtModel train_gbdt(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<std::string>& feature_names, const GbdtConfig& cfg);

struct LinearModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double intercept = 0.0;

    double predict_proba(std::span<const double> x) const;
    std::vector<double> predict_proba(const WindowTable& table) const;
};

struct BaselineConfig {
    double l2_penalty = 1.0;
    double tolerance = 1e-6;
    int max_iterations = 1000;
};

LinearModel train_baseline(const WindowTable& train, const BaselineConfig& cfg = {});
LinearModel train_baseline(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                           const std::vector<std::string>& feature_names,
                           const BaselineConfig& cfg = {});

double sigmoid(double z);

}  // namespace engage
