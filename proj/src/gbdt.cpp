#include "engage/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "engage/rng.hpp"

namespace engage {

namespace {

constexpr double kPriorClip = 1e-6;    // degenerate single-class probability clip
constexpr double kProbaClip = 1e-12;   // keeps predictions strictly inside (0,1)
constexpr double kGainEps = 1e-12;

double log_loss(const std::vector<double>& scores, const std::vector<int>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double p = std::clamp(sigmoid(scores[i]), kProbaClip, 1.0 - kProbaClip);
        total += y[i] ? -std::log(p) : -std::log1p(-p);
    }
    return total / static_cast<double>(scores.size());
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& columns;  // column-major features
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    int max_depth;
    int min_samples_leaf;
    double lambda;

    std::vector<TreeNode> nodes;
    std::vector<std::array<double, 3>> scratch;  // (value, grad, hess) sorted per feature

    int build(std::vector<std::uint32_t>& rows, int depth) {
        double g_total = 0.0, h_total = 0.0;
        for (const auto r : rows) {
            g_total += grad[r];
            h_total += hess[r];
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = kGainEps;
        const double parent_score = g_total * g_total / (h_total + lambda);

        if (depth < max_depth && rows.size() >= 2 * static_cast<std::size_t>(min_samples_leaf)) {
            for (std::size_t f = 0; f < columns.size(); ++f) {
                scratch.clear();
                for (const auto r : rows) {
                    scratch.push_back({columns[f][r], grad[r], hess[r]});
                }
                std::sort(scratch.begin(), scratch.end(),
                          [](const auto& a, const auto& b) { return a[0] < b[0]; });
                double g_left = 0.0, h_left = 0.0;
                for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
                    g_left += scratch[i][1];
                    h_left += scratch[i][2];
                    if (scratch[i][0] == scratch[i + 1][0]) continue;
                    const auto n_left = i + 1;
                    const auto n_right = scratch.size() - n_left;
                    if (n_left < static_cast<std::size_t>(min_samples_leaf) ||
                        n_right < static_cast<std::size_t>(min_samples_leaf)) {
                        continue;
                    }
                    const double g_right = g_total - g_left;
                    const double h_right = h_total - h_left;
                    const double gain =
                        0.5 * (g_left * g_left / (h_left + lambda) +
                               g_right * g_right / (h_right + lambda) - parent_score);
                    // Strict comparison: ties resolve to the lowest feature
                    // index, then the lowest threshold.
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_feature = static_cast<int>(f);
                        best_threshold = 0.5 * (scratch[i][0] + scratch[i + 1][0]);
                    }
                }
            }
        }

        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (best_feature < 0) {
            nodes[node_id].value = -g_total / (h_total + lambda);
            return node_id;
        }

        std::vector<std::uint32_t> left_rows, right_rows;
        for (const auto r : rows) {
            (columns[static_cast<std::size_t>(best_feature)][r] < best_threshold ? left_rows
                                                                                 : right_rows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        nodes[node_id].left = build(left_rows, depth + 1);
        nodes[node_id].right = build(right_rows, depth + 1);
        return node_id;
    }
};

BagEnsemble train_bag(const std::vector<std::vector<double>>& columns,
                      const std::vector<int>& y, const GbdtConfig& cfg, Rng rng) {
    const std::size_t n = y.size();
    const auto n_sub = std::max<std::size_t>(
        2, static_cast<std::size_t>(cfg.bagging.subsample_fraction * static_cast<double>(n)));
    auto sub = rng.sample_without_replacement(n, std::min(n_sub, n));

    // Chronologically last slice of the subsample is held out for early
    // stopping; the table's row order is the chronology.
    auto n_val = static_cast<std::size_t>(
        std::round(cfg.early_stopping.validation_fraction * static_cast<double>(sub.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, sub.size() - 1);
    const std::size_t n_fit = sub.size() - n_val;

    std::vector<std::uint32_t> fit_rows(sub.begin(), sub.begin() + n_fit);
    std::vector<std::uint32_t> val_rows(sub.begin() + n_fit, sub.end());

    std::vector<int> y_fit(n_fit), y_val(n_val);
    for (std::size_t i = 0; i < n_fit; ++i) y_fit[i] = y[fit_rows[i]];
    for (std::size_t i = 0; i < n_val; ++i) y_val[i] = y[val_rows[i]];

    double prior = 0.0;
    for (const int v : y_fit) prior += v;
    prior = std::clamp(prior / static_cast<double>(n_fit), kPriorClip, 1.0 - kPriorClip);

    BagEnsemble bag;
    bag.base_score = std::log(prior / (1.0 - prior));

    std::vector<double> fit_scores(n_fit, bag.base_score);
    std::vector<double> val_scores(n_val, bag.base_score);
    std::vector<double> grad(n), hess(n);  // indexed by original row id

    double best_val_loss = log_loss(val_scores, y_val);
    double prev_fit_loss = log_loss(fit_scores, y_fit);
    std::size_t best_count = 0;
    int rounds_without_improvement = 0;

    for (int round = 0; round < cfg.n_trees; ++round) {
        for (std::size_t i = 0; i < n_fit; ++i) {
            const double p = sigmoid(fit_scores[i]);
            grad[fit_rows[i]] = p - static_cast<double>(y_fit[i]);
            hess[fit_rows[i]] = std::max(p * (1.0 - p), 1e-16);
        }
        TreeBuilder builder{columns, grad, hess, cfg.max_depth, cfg.min_samples_leaf,
                            cfg.leaf_l2,  {},   {}};
        std::vector<std::uint32_t> rows = fit_rows;
        builder.build(rows, 0);
        bag.trees.emplace_back(std::move(builder.nodes));

        const auto& tree = bag.trees.back();
        const auto apply = [&](const std::vector<std::uint32_t>& idx,
                               std::vector<double>& scores) {
            std::vector<double> x(columns.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                for (std::size_t f = 0; f < columns.size(); ++f) x[f] = columns[f][idx[i]];
                scores[i] += cfg.learning_rate * tree.predict(x);
            }
        };
        apply(fit_rows, fit_scores);
        apply(val_rows, val_scores);

        const double fit_loss = log_loss(fit_scores, y_fit);
        if (fit_loss > prev_fit_loss + 1e-9) {
            throw std::logic_error("gbdt: training log-loss increased within a bag");
        }
        prev_fit_loss = fit_loss;

        const double val_loss = log_loss(val_scores, y_val);
        if (val_loss < best_val_loss - 1e-12) {
            best_val_loss = val_loss;
            best_count = bag.trees.size();
            rounds_without_improvement = 0;
        } else {
            ++rounds_without_improvement;
            if (rounds_without_improvement >= cfg.early_stopping.patience_rounds) break;
        }
    }
    bag.trees.resize(std::max<std::size_t>(best_count, 1));
    return bag;
}

}  // namespace

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void GbdtConfig::validate() const {
    if (n_trees < 1) throw std::runtime_error("gbdt config: n_trees must be >= 1");
    if (max_depth < 0) throw std::runtime_error("gbdt config: max_depth must be >= 0");
    if (learning_rate <= 0.0) throw std::runtime_error("gbdt config: learning rate must be > 0");
    if (min_samples_leaf < 1) throw std::runtime_error("gbdt config: min_samples_leaf >= 1");
    if (leaf_l2 < 0.0) throw std::runtime_error("gbdt config: leaf_l2 must be >= 0");
    if (!(early_stopping.validation_fraction > 0.0 && early_stopping.validation_fraction < 1.0)) {
        throw std::runtime_error("gbdt config: validation fraction must lie in (0,1)");
    }
    if (early_stopping.patience_rounds < 1) {
        throw std::runtime_error("gbdt config: patience must be >= 1");
    }
    if (bagging.n_bags < 1) throw std::runtime_error("gbdt config: n_bags must be >= 1");
    if (!(bagging.subsample_fraction > 0.0 && bagging.subsample_fraction <= 1.0)) {
        throw std::runtime_error("gbdt config: subsample fraction must lie in (0,1]");
    }
}

double RegressionTree::predict(std::span<const double> x) const {
    int node = 0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& n = nodes_[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(node)].value;
}

int RegressionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
        const auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const auto& n = nodes_[static_cast<std::size_t>(id)];
        if (n.feature >= 0) {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return deepest;
}

double GbdtModel::predict_proba(std::span<const double> x) const {
    if (x.size() != feature_names_.size()) {
        throw std::runtime_error("gbdt predict: feature vector does not match schema");
    }
    if (degenerate_) return degenerate_proba_;
    double total = 0.0;
    for (const auto& bag : bags_) {
        double score = bag.base_score;
        for (const auto& tree : bag.trees) score += config_.learning_rate * tree.predict(x);
        total += sigmoid(score);
    }
    const double p = total / static_cast<double>(bags_.size());
    return std::clamp(p, kProbaClip, 1.0 - kProbaClip);
}

std::vector<double> GbdtModel::predict_proba(const WindowTable& table) const {
    if (table.feature_names() != feature_names_) {
        throw std::runtime_error("gbdt predict: table columns do not match training schema");
    }
    std::vector<double> out;
    out.reserve(table.row_count());
    for (const auto& r : table.rows()) out.push_back(predict_proba(r.features));
    return out;
}

GbdtModel GbdtModel::make(GbdtConfig cfg, std::vector<std::string> feature_names,
                          std::vector<BagEnsemble> bags, bool degenerate,
                          double degenerate_proba) {
    GbdtModel m;
    m.config_ = std::move(cfg);
    m.feature_names_ = std::move(feature_names);
    m.bags_ = std::move(bags);
    m.degenerate_ = degenerate;
    m.degenerate_proba_ = degenerate_proba;
    return m;
}

GbdtModel train_gbdt(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<std::string>& feature_names, const GbdtConfig& cfg) {
    cfg.validate();
    const std::size_t n = X.size();
    if (n == 0) throw std::runtime_error("gbdt: empty training set");
    if (y.size() != n) throw std::runtime_error("gbdt: labels do not match rows");
    const std::size_t n_feat = feature_names.size();
    for (const auto& row : X) {
        if (row.size() != n_feat) throw std::runtime_error("gbdt: ragged feature matrix");
        for (const double v : row) {
            if (!std::isfinite(v)) throw std::runtime_error("gbdt: non-finite feature value");
        }
    }

    std::size_t positives = 0;
    for (const int v : y) positives += static_cast<std::size_t>(v);
    if (positives == 0 || positives == n) {
        const double p = positives == 0 ? kPriorClip : 1.0 - kPriorClip;
        return GbdtModel::make(cfg, feature_names, {}, true, p);
    }
    if (n < 2) throw std::runtime_error("gbdt: need at least 2 rows");

    std::vector<std::vector<double>> columns(n_feat, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < n_feat; ++f) columns[f][i] = X[i][f];
    }

    const Rng root(cfg.seed);
    std::vector<std::future<BagEnsemble>> futures;
    futures.reserve(static_cast<std::size_t>(cfg.bagging.n_bags));
    for (int b = 0; b < cfg.bagging.n_bags; ++b) {
        futures.push_back(std::async(std::launch::async, [&, b]() {
            return train_bag(columns, y, cfg, root.child("bagging", static_cast<std::uint64_t>(b)));
        }));
    }
    std::vector<BagEnsemble> bags;
    bags.reserve(futures.size());
    for (auto& f : futures) bags.push_back(f.get());
    return GbdtModel::make(cfg, feature_names, std::move(bags), false, 0.5);
}

GbdtModel train_gbdt(const WindowTable& train, const GbdtConfig& cfg) {
    std::vector<std::vector<double>> X;
    X.reserve(train.row_count());
    std::vector<int> y;
    y.reserve(train.row_count());
    for (const auto& r : train.rows()) {
        X.push_back(r.features);
        y.push_back(r.engaged);
    }
    return train_gbdt(X, y, train.feature_names(), cfg);
}

namespace {

nlohmann::json node_to_json(const std::vector<TreeNode>& nodes, int id) {
    const auto& n = nodes[static_cast<std::size_t>(id)];
    nlohmann::json j;
    if (n.feature < 0) {
        j["value"] = n.value;
    } else {
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = node_to_json(nodes, n.left);
        j["right"] = node_to_json(nodes, n.right);
    }
    return j;
}

int node_from_json(const nlohmann::json& j, std::vector<TreeNode>& nodes) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (j.contains("value")) {
        nodes[static_cast<std::size_t>(id)].value = j.at("value").get<double>();
        return id;
    }
    nodes[static_cast<std::size_t>(id)].feature = j.at("feature").get<int>();
    nodes[static_cast<std::size_t>(id)].threshold = j.at("threshold").get<double>();
    const int left = node_from_json(j.at("left"), nodes);
    const int right = node_from_json(j.at("right"), nodes);
    nodes[static_cast<std::size_t>(id)].left = left;
    nodes[static_cast<std::size_t>(id)].right = right;
    return id;
}

}  // namespace

std::string GbdtModel::to_json() const {
    nlohmann::json doc;
    doc["format"] = "engage-gbdt";
    doc["version"] = 1;
    doc["config"] = {
        {"n_trees", config_.n_trees},
        {"max_depth", config_.max_depth},
        {"learning_rate", config_.learning_rate},
        {"min_samples_leaf", config_.min_samples_leaf},
        {"leaf_l2", config_.leaf_l2},
        {"validation_fraction", config_.early_stopping.validation_fraction},
        {"patience_rounds", config_.early_stopping.patience_rounds},
        {"n_bags", config_.bagging.n_bags},
        {"subsample_fraction", config_.bagging.subsample_fraction},
        {"seed", config_.seed},
    };
    doc["feature_names"] = feature_names_;
    doc["degenerate"] = degenerate_;
    if (degenerate_) doc["degenerate_proba"] = degenerate_proba_;
    doc["bags"] = nlohmann::json::array();
    for (const auto& bag : bags_) {
        nlohmann::json b;
        b["base_score"] = bag.base_score;
        b["trees"] = nlohmann::json::array();
        for (const auto& tree : bag.trees) b["trees"].push_back(node_to_json(tree.nodes(), 0));
        doc["bags"].push_back(std::move(b));
    }
    return doc.dump(2);
}

GbdtModel GbdtModel::from_json(const std::string& json_text) {
    const auto doc = nlohmann::json::parse(json_text);
    if (doc.value("format", "") != "engage-gbdt") {
        throw std::runtime_error("model json: unexpected format tag");
    }
    if (doc.value("version", 0) != 1) {
        throw std::runtime_error("model json: unsupported version");
    }
    GbdtConfig cfg;
    const auto& c = doc.at("config");
    cfg.n_trees = c.at("n_trees").get<int>();
    cfg.max_depth = c.at("max_depth").get<int>();
    cfg.learning_rate = c.at("learning_rate").get<double>();
    cfg.min_samples_leaf = c.at("min_samples_leaf").get<int>();
    cfg.leaf_l2 = c.at("leaf_l2").get<double>();
    cfg.early_stopping.validation_fraction = c.at("validation_fraction").get<double>();
    cfg.early_stopping.patience_rounds = c.at("patience_rounds").get<int>();
    cfg.bagging.n_bags = c.at("n_bags").get<int>();
    cfg.bagging.subsample_fraction = c.at("subsample_fraction").get<double>();
    cfg.seed = c.at("seed").get<std::uint64_t>();

    std::vector<BagEnsemble> bags;
    for (const auto& b : doc.at("bags")) {
        BagEnsemble bag;
        bag.base_score = b.at("base_score").get<double>();
        for (const auto& t : b.at("trees")) {
            std::vector<TreeNode> nodes;
            node_from_json(t, nodes);
            bag.trees.emplace_back(std::move(nodes));
        }
        bags.push_back(std::move(bag));
    }
    return make(cfg, doc.at("feature_names").get<std::vector<std::string>>(), std::move(bags),
                doc.value("degenerate", false), doc.value("degenerate_proba", 0.5));
}

void GbdtModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << to_json() << "\n";
}

GbdtModel GbdtModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace engage
