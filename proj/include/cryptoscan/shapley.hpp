#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cryptoscan {

using ModelFn = std::function<double(const Eigen::RowVectorXd&)>;

struct Explanation {
    double base_value = 0.0;
    double prediction = 0.0;
    Eigen::VectorXd phi;
    Eigen::RowVectorXd x;

    std::string to_json(const std::vector<std::string>& feature_names) const;
};

// Exact interventional Shapley values by coalition enumeration (p <= 20).
// v(S) = mean over background rows b of f(x on S, b elsewhere).
Explanation shap_exact(const ModelFn& model, const Eigen::RowVectorXd& x,
                       const Eigen::MatrixXd& background);

// Permutation-sampling estimator of the same value function. The efficiency
// residual is redistributed proportionally to |phi| so base + sum(phi) equals
// the prediction exactly.
Explanation shap_sampling(const ModelFn& model, const Eigen::RowVectorXd& x,
                          const Eigen::MatrixXd& background, int n_permutations,
                          std::uint64_t seed);

struct GlobalImportance {
    std::vector<std::string> ranking; // descending mean |phi|, ties by name
    std::vector<double> values;       // aligned with ranking

    std::string to_csv() const;
};

GlobalImportance global_importance(const std::vector<Explanation>& explanations,
                                   const std::vector<std::string>& feature_names);

} // namespace cryptoscan
