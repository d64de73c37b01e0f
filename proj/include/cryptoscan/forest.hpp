#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace cryptoscan {

struct TreeNode {
    // leaf when feature < 0
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double p_malicious = 0.0;
};

class DecisionTree {
public:
    // Gini-impurity splits; thresholds are midpoints of consecutive sorted
    // unique feature values. max_depth <= 0 means unlimited.
    static DecisionTree train(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                              const std::vector<int>& rows, int max_depth,
                              int features_per_split, std::uint64_t seed,
                              Eigen::VectorXd* importance_accum = nullptr);

    double predict_proba(const Eigen::RowVectorXd& x) const;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::vector<TreeNode>& nodes() { return nodes_; }

private:
    std::vector<TreeNode> nodes_;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 0;           // 0 = unlimited
    int features_per_split = 0;  // 0 = ceil(sqrt(p))
    bool bootstrap = true;
};

class RandomForest {
public:
    static RandomForest train(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                              const ForestParams& params, std::uint64_t seed,
                              int workers = 1);

    double predict_proba(const Eigen::RowVectorXd& x) const;
    int predict(const Eigen::RowVectorXd& x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }
    Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const;

    // mean impurity decrease per feature, averaged over trees
    const Eigen::VectorXd& feature_importances() const { return importances_; }

    int n_features() const { return n_features_; }
    const ForestParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

    std::string to_json(const std::vector<std::string>& feature_names = {}) const;
    static RandomForest from_json(const std::string& text);

private:
    std::vector<DecisionTree> trees_;
    Eigen::VectorXd importances_;
    int n_features_ = 0;
    ForestParams params_;
    std::uint64_t seed_ = 0;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long tp = 0, fp = 0, tn = 0, fn = 0;
};

Metrics compute_metrics(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred);

struct SplitResult {
    std::vector<int> train_rows;
    std::vector<int> test_rows;
};

// Stratified train/test split. `test_fraction` in (0,1); 9:1 -> 0.1.
SplitResult split_train_test(const Eigen::VectorXi& y, double test_fraction, std::uint64_t seed);

struct CvResult {
    ForestParams best;
    double best_mean_f1 = 0.0;
    // (params, per-fold F1) in grid order
    std::vector<std::pair<ForestParams, std::vector<double>>> scores;
};

// Stratified k-fold grid search maximizing mean F1; ties break toward fewer
// trees, then shallower depth.
CvResult cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                        const std::vector<ForestParams>& grid, int k, std::uint64_t seed,
                        int workers = 1);

} // namespace cryptoscan
