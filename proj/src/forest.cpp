#include "cryptoscan/forest.hpp"
#include "cryptoscan/errors.hpp"
#include "cryptoscan/parallel.hpp"
#include "cryptoscan/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace cryptoscan {

using nlohmann::json;

namespace {

double gini(long long pos, long long total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXi& y;
    int max_depth;
    int m_features;
    std::mt19937_64 rng;
    std::vector<TreeNode> nodes;
    Eigen::VectorXd* importances;
    double n_total;

    int build(std::vector<int>& rows, int depth) {
        long long pos = 0;
        for (int r : rows) pos += y[r];
        const long long n = static_cast<long long>(rows.size());
        const double node_impurity = gini(pos, n);

        const bool stop = n < 2 || pos == 0 || pos == n ||
                          (max_depth > 0 && depth >= max_depth);
        BestSplit best;
        if (!stop) best = find_split(rows, node_impurity);

        if (stop || best.feature < 0) {
            TreeNode leaf;
            leaf.p_malicious = n == 0 ? 0.0 : static_cast<double>(pos) / static_cast<double>(n);
            nodes.push_back(leaf);
            return static_cast<int>(nodes.size()) - 1;
        }

        std::vector<int> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (int r : rows)
            (X(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);

        if (importances)
            (*importances)[best.feature] += (static_cast<double>(n) / n_total) * best.gain;

        const int idx = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[idx].feature = best.feature;
        nodes[idx].threshold = best.threshold;
        rows.clear();
        rows.shrink_to_fit();
        const int li = build(left_rows, depth + 1);
        const int ri = build(right_rows, depth + 1);
        nodes[idx].left = li;
        nodes[idx].right = ri;
        return idx;
    }

    BestSplit find_split(const std::vector<int>& rows, double node_impurity) {
        const int p = static_cast<int>(X.cols());
        std::vector<int> feats(p);
        std::iota(feats.begin(), feats.end(), 0);
        // partial Fisher-Yates for the feature subsample
        const int m = std::min(m_features, p);
        for (int i = 0; i < m; ++i) {
            const int j = i + static_cast<int>(rng() % (p - i));
            std::swap(feats[i], feats[j]);
        }

        BestSplit best;
        const long long n = static_cast<long long>(rows.size());
        std::vector<std::pair<double, int>> vals(rows.size());
        for (int fi = 0; fi < m; ++fi) {
            const int f = feats[fi];
            for (std::size_t i = 0; i < rows.size(); ++i)
                vals[i] = {X(rows[i], f), y[rows[i]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;

            long long pos_total = 0;
            for (const auto& v : vals) pos_total += v.second;
            long long left_n = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                ++left_n;
                left_pos += vals[i].second;
                if (vals[i].first == vals[i + 1].first) continue;
                const long long right_n = n - left_n;
                const double child =
                    (static_cast<double>(left_n) / n) * gini(left_pos, left_n) +
                    (static_cast<double>(right_n) / n) * gini(pos_total - left_pos, right_n);
                const double gain = node_impurity - child;
                if (gain > best.gain + 1e-15) {
                    best.gain = gain;
                    best.feature = f;
                    best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        return best;
    }
};

} // namespace

DecisionTree DecisionTree::train(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                 const std::vector<int>& rows, int max_depth,
                                 int features_per_split, std::uint64_t seed,
                                 Eigen::VectorXd* importance_accum) {
    TreeBuilder b{X, y, max_depth, features_per_split, std::mt19937_64(seed), {}, importance_accum,
                  static_cast<double>(rows.size())};
    std::vector<int> r = rows;
    b.build(r, 0);
    DecisionTree t;
    t.nodes_ = std::move(b.nodes);
    return t;
}

double DecisionTree::predict_proba(const Eigen::RowVectorXd& x) const {
    int i = 0;
    while (nodes_[i].feature >= 0)
        i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    return nodes_[i].p_malicious;
}

RandomForest RandomForest::train(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                 const ForestParams& params, std::uint64_t seed, int workers) {
    if (params.n_trees < 1) throw ValidationError("forest: n_trees must be >= 1");
    const int n = static_cast<int>(X.rows());
    long long pos = 0;
    for (int i = 0; i < n; ++i) pos += y[i];
    if (pos < 2 || n - pos < 2) throw DegenerateLabels("forest: need >= 2 samples per class");

    RandomForest f;
    f.params_ = params;
    f.seed_ = seed;
    f.n_features_ = static_cast<int>(X.cols());
    const int m = params.features_per_split > 0
                      ? params.features_per_split
                      : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(X.cols()))));

    f.trees_.resize(params.n_trees);
    std::vector<Eigen::VectorXd> tree_imps(params.n_trees);
    parallel_for(static_cast<std::size_t>(params.n_trees), workers, [&](std::size_t t) {
        auto rng = make_rng(seed, t);
        std::vector<int> rows;
        rows.reserve(n);
        if (params.bootstrap) {
            for (int i = 0; i < n; ++i) rows.push_back(static_cast<int>(rng() % n));
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), 0);
        }
        tree_imps[t] = Eigen::VectorXd::Zero(X.cols());
        f.trees_[t] = DecisionTree::train(X, y, rows, params.max_depth, m,
                                          derive_seed(seed, t + 1000003), &tree_imps[t]);
    });

    f.importances_ = Eigen::VectorXd::Zero(X.cols());
    for (const auto& imp : tree_imps) f.importances_ += imp;
    f.importances_ /= static_cast<double>(params.n_trees);
    return f;
}

double RandomForest::predict_proba(const Eigen::RowVectorXd& x) const {
    if (x.size() != n_features_) throw DimensionMismatch("predict: wrong dimensionality");
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict_proba(x);
    return sum / static_cast<double>(trees_.size());
}

Eigen::VectorXd RandomForest::predict_proba(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out[i] = predict_proba(Eigen::RowVectorXd(X.row(i)));
    return out;
}

std::string RandomForest::to_json(const std::vector<std::string>& feature_names) const {
    json j;
    j["schema_version"] = 1;
    j["n_features"] = n_features_;
    j["seed"] = seed_;
    j["params"] = {{"n_trees", params_.n_trees},
                   {"max_depth", params_.max_depth},
                   {"features_per_split", params_.features_per_split},
                   {"bootstrap", params_.bootstrap}};
    if (!feature_names.empty()) j["feature_names"] = feature_names;
    json trees = json::array();
    for (const auto& t : trees_) {
        json nodes = json::array();
        for (const auto& n : t.nodes())
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.p_malicious});
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
    json imp = json::array();
    for (Eigen::Index i = 0; i < importances_.size(); ++i) imp.push_back(importances_[i]);
    j["importances"] = std::move(imp);
    return j.dump() + "\n";
}

RandomForest RandomForest::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    RandomForest f;
    try {
    f.n_features_ = j.at("n_features").get<int>();
    f.seed_ = j.value("seed", 0ULL);
    const auto& p = j.at("params");
    f.params_.n_trees = p.at("n_trees").get<int>();
    f.params_.max_depth = p.at("max_depth").get<int>();
    f.params_.features_per_split = p.at("features_per_split").get<int>();
    f.params_.bootstrap = p.at("bootstrap").get<bool>();
    for (const auto& jt : j.at("trees")) {
        DecisionTree t;
        for (const auto& jn : jt) {
            TreeNode n;
            n.feature = jn.at(0).get<int>();
            n.threshold = jn.at(1).get<double>();
            n.left = jn.at(2).get<int>();
            n.right = jn.at(3).get<int>();
            n.p_malicious = jn.at(4).get<double>();
            t.nodes().push_back(n);
        }
        f.trees_.push_back(std::move(t));
    }
    if (j.contains("importances")) {
        const auto& imp = j.at("importances");
        f.importances_ = Eigen::VectorXd(imp.size());
        for (std::size_t i = 0; i < imp.size(); ++i) f.importances_[i] = imp[i].get<double>();
    }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
    return f;
}

Metrics compute_metrics(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred) {
    if (y_true.size() != y_pred.size()) throw DimensionMismatch("metrics: size mismatch");
    Metrics m;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        if (y_pred[i] == 1) {
            (y_true[i] == 1 ? m.tp : m.fp)++;
        } else {
            (y_true[i] == 1 ? m.fn : m.tn)++;
        }
    }
    m.precision = (m.tp + m.fp) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
    m.recall = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

namespace {

// per-class index shuffle shared by the split and fold builders
std::array<std::vector<int>, 2> shuffled_class_indices(const Eigen::VectorXi& y,
                                                       std::uint64_t seed) {
    std::array<std::vector<int>, 2> by_class;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        by_class[y[i] == 1 ? 1 : 0].push_back(static_cast<int>(i));
    auto rng = make_rng(seed);
    for (auto& v : by_class) std::shuffle(v.begin(), v.end(), rng);
    return by_class;
}

} // namespace

SplitResult split_train_test(const Eigen::VectorXi& y, double test_fraction, std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ValidationError("split: test_fraction must be in (0,1)");
    auto by_class = shuffled_class_indices(y, seed);
    SplitResult out;
    for (const auto& v : by_class) {
        const std::size_t n_test = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(v.size())));
        if (!v.empty() && (n_test == 0 || n_test == v.size()))
            throw InsufficientData("split: class too small for the requested ratio");
        for (std::size_t i = 0; i < v.size(); ++i)
            (i < n_test ? out.test_rows : out.train_rows).push_back(v[i]);
    }
    std::sort(out.train_rows.begin(), out.train_rows.end());
    std::sort(out.test_rows.begin(), out.test_rows.end());
    return out;
}

CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                        const std::vector<ForestParams>& grid, int k, std::uint64_t seed,
                        int workers) {
    if (grid.empty()) throw ValidationError("cv: empty grid");
    auto by_class = shuffled_class_indices(y, seed);
    const std::size_t minority = std::min(by_class[0].size(), by_class[1].size());
    if (minority < static_cast<std::size_t>(k))
        throw InsufficientData("cv: fewer minority samples than folds");

    std::vector<std::vector<int>> folds(k);
    for (const auto& v : by_class)
        for (std::size_t i = 0; i < v.size(); ++i) folds[i % k].push_back(v[i]);

    CvResult res;
    res.best_mean_f1 = -1.0;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        std::vector<double> fold_f1(k);
        for (int fi = 0; fi < k; ++fi) {
            std::vector<int> train_rows;
            for (int fj = 0; fj < k; ++fj)
                if (fj != fi) train_rows.insert(train_rows.end(), folds[fj].begin(), folds[fj].end());
            std::sort(train_rows.begin(), train_rows.end());
            Eigen::MatrixXd Xtr(train_rows.size(), X.cols());
            Eigen::VectorXi ytr(train_rows.size());
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                Xtr.row(i) = X.row(train_rows[i]);
                ytr[i] = y[train_rows[i]];
            }
            const RandomForest f =
                RandomForest::train(Xtr, ytr, grid[gi], derive_seed(seed, gi * 1000 + fi), workers);
            std::vector<int> test_rows = folds[fi];
            std::sort(test_rows.begin(), test_rows.end());
            Eigen::VectorXi yt(test_rows.size()), yp(test_rows.size());
            for (std::size_t i = 0; i < test_rows.size(); ++i) {
                yt[i] = y[test_rows[i]];
                yp[i] = f.predict(X.row(test_rows[i]));
            }
            fold_f1[fi] = compute_metrics(yt, yp).f1;
        }
        const double mean =
            std::accumulate(fold_f1.begin(), fold_f1.end(), 0.0) / static_cast<double>(k);
        res.scores.push_back({grid[gi], fold_f1});
        auto smaller = [](const ForestParams& a, const ForestParams& b) {
            if (a.n_trees != b.n_trees) return a.n_trees < b.n_trees;
            // depth 0 means unlimited, i.e. the largest model
            const int da = a.max_depth == 0 ? 1 << 30 : a.max_depth;
            const int db = b.max_depth == 0 ? 1 << 30 : b.max_depth;
            return da < db;
        };
        if (mean > res.best_mean_f1 + 1e-12 ||
            (std::abs(mean - res.best_mean_f1) <= 1e-12 && smaller(grid[gi], res.best))) {
            res.best_mean_f1 = mean;
            res.best = grid[gi];
        }
    }
    return res;
}

} // namespace cryptoscan
