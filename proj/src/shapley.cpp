#include "cryptoscan/shapley.hpp"
#include "cryptoscan/errors.hpp"
#include "cryptoscan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace cryptoscan {

std::string Explanation::to_json(const std::vector<std::string>& feature_names) const {
    nlohmann::json j;
    j["base_value"] = base_value;
    j["prediction"] = prediction;
    nlohmann::json jphi = nlohmann::json::object();
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const std::string name = static_cast<std::size_t>(i) < feature_names.size()
                                     ? feature_names[i]
                                     : "f" + std::to_string(i);
        jphi[name] = phi[i];
    }
    j["phi"] = std::move(jphi);
    return j.dump(2) + "\n";
}

namespace {

double coalition_value(const ModelFn& model, const Eigen::RowVectorXd& x,
                       const Eigen::MatrixXd& background, std::uint32_t mask) {
    double sum = 0.0;
    Eigen::RowVectorXd z(x.size());
    for (Eigen::Index b = 0; b < background.rows(); ++b) {
        for (Eigen::Index j = 0; j < x.size(); ++j)
            z[j] = (mask >> j) & 1u ? x[j] : background(b, j);
        sum += model(z);
    }
    return sum / static_cast<double>(background.rows());
}

} // namespace

Explanation shap_exact(const ModelFn& model, const Eigen::RowVectorXd& x,
                       const Eigen::MatrixXd& background) {
    const int p = static_cast<int>(x.size());
    if (p > 20) throw TooManyFeatures("shap_exact: enumeration limited to 20 features");
    if (background.rows() == 0 || background.cols() != x.size())
        throw DimensionMismatch("shap_exact: background shape mismatch");

    const std::uint32_t n_masks = 1u << p;
    std::vector<double> v(n_masks);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask)
        v[mask] = coalition_value(model, x, background, mask);

    // w[k] = k! (p-1-k)! / p!
    std::vector<double> w(p);
    for (int k = 0; k < p; ++k)
        w[k] = std::exp(std::lgamma(k + 1.0) + std::lgamma(p - k) - std::lgamma(p + 1.0));

    Explanation e;
    e.x = x;
    e.base_value = v[0];
    e.prediction = v[n_masks - 1];
    e.phi = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < p; ++i) {
        const std::uint32_t bit = 1u << i;
        double phi = 0.0;
        for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const int k = __builtin_popcount(mask);
            phi += w[k] * (v[mask | bit] - v[mask]);
        }
        e.phi[i] = phi;
    }
    return e;
}

Explanation shap_sampling(const ModelFn& model, const Eigen::RowVectorXd& x,
                          const Eigen::MatrixXd& background, int n_permutations,
                          std::uint64_t seed) {
    if (n_permutations < 1) throw ValidationError("shap_sampling: n_permutations must be >= 1");
    if (background.rows() == 0 || background.cols() != x.size())
        throw DimensionMismatch("shap_sampling: background shape mismatch");
    const int p = static_cast<int>(x.size());

    auto mean_over = [&](const Eigen::MatrixXd& Z) {
        double sum = 0.0;
        for (Eigen::Index b = 0; b < Z.rows(); ++b) sum += model(Z.row(b));
        return sum / static_cast<double>(Z.rows());
    };

    Explanation e;
    e.x = x;
    e.phi = Eigen::VectorXd::Zero(p);
    e.base_value = mean_over(background);
    e.prediction = model(x);

    auto rng = make_rng(seed);
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    Eigen::MatrixXd Z;
    for (int t = 0; t < n_permutations; ++t) {
        std::shuffle(order.begin(), order.end(), rng);
        Z = background;
        double prev = e.base_value;
        for (int i : order) {
            Z.col(i).setConstant(x[i]);
            const double cur = mean_over(Z);
            e.phi[i] += cur - prev;
            prev = cur;
        }
    }
    e.phi /= static_cast<double>(n_permutations);

    // enforce efficiency exactly; the residual is split proportionally to |phi|
    const double residual = e.prediction - e.base_value - e.phi.sum();
    const double total = e.phi.cwiseAbs().sum();
    if (total > 0.0) {
        e.phi += residual * (e.phi.cwiseAbs() / total);
    } else if (p > 0) {
        e.phi.array() += residual / p;
    }
    return e;
}

GlobalImportance global_importance(const std::vector<Explanation>& explanations,
                                   const std::vector<std::string>& feature_names) {
    if (explanations.empty()) throw EmptyCorpus("global_importance: no explanations");
    const Eigen::Index p = explanations.front().phi.size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    for (const auto& e : explanations) {
        if (e.phi.size() != p) throw DimensionMismatch("global_importance: phi size mismatch");
        mean += e.phi.cwiseAbs();
    }
    mean /= static_cast<double>(explanations.size());

    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    auto name_of = [&](int i) {
        return static_cast<std::size_t>(i) < feature_names.size() ? feature_names[i]
                                                                  : "f" + std::to_string(i);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (mean[a] != mean[b]) return mean[a] > mean[b];
        return name_of(a) < name_of(b);
    });

    GlobalImportance g;
    for (int i : idx) {
        g.ranking.push_back(name_of(i));
        g.values.push_back(mean[i]);
    }
    return g;
}

std::string GlobalImportance::to_csv() const {
    std::ostringstream os;
    os << "feature,mean_abs_shap\n";
    os.precision(10);
    for (std::size_t i = 0; i < ranking.size(); ++i)
        os << ranking[i] << ',' << values[i] << '\n';
    return os.str();
}

} // namespace cryptoscan
