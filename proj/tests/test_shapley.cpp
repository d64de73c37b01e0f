#include <doctest.h>

#include "cryptoscan/errors.hpp"
#include "cryptoscan/forest.hpp"
#include "cryptoscan/shapley.hpp"

#include <cmath>
#include <random>

using namespace cryptoscan;

namespace {

Eigen::MatrixXd zeros_background(int rows, int cols) {
    return Eigen::MatrixXd::Zero(rows, cols);
}

} // namespace

TEST_CASE("exact Shapley values for f = x1 * x2 match the hand computation") {
    // v({}) = 0, v({1}) = 0, v({2}) = 0, v({1,2}) = 6
    // phi_1 = phi_2 = 3 by symmetry of the marginal contributions
    const ModelFn f = [](const Eigen::RowVectorXd& x) { return x[0] * x[1]; };
    Eigen::RowVectorXd x(2);
    x << 2.0, 3.0;
    const Explanation e = shap_exact(f, x, zeros_background(1, 2));
    CHECK(e.base_value == doctest::Approx(0.0));
    CHECK(e.prediction == doctest::Approx(6.0));
    REQUIRE(e.phi.size() == 2);
    CHECK(e.phi[0] == doctest::Approx(3.0));
    CHECK(e.phi[1] == doctest::Approx(3.0));
}

TEST_CASE("exact Shapley values of a linear model are w_i * (x_i - mean(b_i))") {
    const int p = 5;
    Eigen::RowVectorXd w(p);
    w << 1.5, -2.0, 0.0, 3.25, 0.5;
    const ModelFn f = [&](const Eigen::RowVectorXd& x) { return w.dot(x); };

    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 2.0);
    Eigen::MatrixXd bg(20, p);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < p; ++j) bg(i, j) = g(rng);

    Eigen::RowVectorXd x(p);
    x << 1, 2, 3, 4, 5;
    const Explanation e = shap_exact(f, x, bg);
    const Eigen::RowVectorXd mean = bg.colwise().mean();
    for (int j = 0; j < p; ++j)
        CHECK(e.phi[j] == doctest::Approx(w[j] * (x[j] - mean[j])).epsilon(1e-12));
    // dummy feature (zero weight) gets exactly zero credit
    CHECK(e.phi[2] == doctest::Approx(0.0));
}

TEST_CASE("exact Shapley axioms hold on a random forest") {
    Eigen::MatrixXd X(60, 4);
    Eigen::VectorXi y(60);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 60; ++i) {
        for (int j = 0; j < 4; ++j) X(i, j) = u(rng);
        y[i] = (X(i, 0) + X(i, 1) > 1.0) ? 1 : 0;
    }
    ForestParams params;
    params.n_trees = 20;
    params.max_depth = 5;
    const RandomForest forest = RandomForest::train(X, y, params, 11, 1);
    const ModelFn f = [&](const Eigen::RowVectorXd& row) { return forest.predict_proba(row); };

    const Eigen::MatrixXd bg = X.topRows(15);
    for (int r = 0; r < 5; ++r) {
        const Eigen::RowVectorXd x = X.row(20 + r);
        const Explanation e = shap_exact(f, x, bg);

        // efficiency: base + sum(phi) == f(x)
        CHECK(e.base_value + e.phi.sum() == doctest::Approx(f(x)).epsilon(1e-12));
        // base value is the mean background prediction
        double mean_pred = 0.0;
        for (int b = 0; b < bg.rows(); ++b) mean_pred += f(bg.row(b));
        mean_pred /= bg.rows();
        CHECK(e.base_value == doctest::Approx(mean_pred).epsilon(1e-12));
    }
}

TEST_CASE("symmetry: interchangeable features receive equal credit") {
    // f depends symmetrically on x0 and x1
    const ModelFn f = [](const Eigen::RowVectorXd& x) { return x[0] + x[1] + 0.5 * x[0] * x[1]; };
    Eigen::RowVectorXd x(3);
    x << 2.0, 2.0, 9.0; // x2 is a dummy
    const Explanation e = shap_exact(f, x, zeros_background(1, 3));
    CHECK(e.phi[0] == doctest::Approx(e.phi[1]).epsilon(1e-12));
    CHECK(e.phi[2] == doctest::Approx(0.0));
}

TEST_CASE("additivity: Shapley values of a sum are the sum of Shapley values") {
    const ModelFn f1 = [](const Eigen::RowVectorXd& x) { return x[0] * x[0]; };
    const ModelFn f2 = [](const Eigen::RowVectorXd& x) { return 2.0 * x[1] + x[0] * x[1]; };
    const ModelFn fsum = [&](const Eigen::RowVectorXd& x) { return f1(x) + f2(x); };

    Eigen::MatrixXd bg(3, 2);
    bg << 0, 0, 1, -1, 2, 0.5;
    Eigen::RowVectorXd x(2);
    x << 1.5, -2.0;

    const Explanation a = shap_exact(f1, x, bg);
    const Explanation b = shap_exact(f2, x, bg);
    const Explanation s = shap_exact(fsum, x, bg);
    for (int j = 0; j < 2; ++j)
        CHECK(s.phi[j] == doctest::Approx(a.phi[j] + b.phi[j]).epsilon(1e-12));
}

TEST_CASE("sampling estimator converges to the exact values") {
    Eigen::MatrixXd X(80, 6);
    Eigen::VectorXi y(80);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 80; ++i) {
        for (int j = 0; j < 6; ++j) X(i, j) = u(rng);
        y[i] = (X(i, 0) > 0.5 || X(i, 3) > 0.8) ? 1 : 0;
    }
    ForestParams params;
    params.n_trees = 15;
    params.max_depth = 4;
    const RandomForest forest = RandomForest::train(X, y, params, 23, 1);
    const ModelFn f = [&](const Eigen::RowVectorXd& row) { return forest.predict_proba(row); };

    const Eigen::MatrixXd bg = X.topRows(10);
    const Eigen::RowVectorXd x = X.row(40);
    const Explanation exact = shap_exact(f, x, bg);
    const Explanation approx = shap_sampling(f, x, bg, 800, 5);

    for (int j = 0; j < 6; ++j)
        CHECK(std::abs(approx.phi[j] - exact.phi[j]) < 0.03);
    // the estimator also satisfies efficiency by construction
    CHECK(approx.base_value + approx.phi.sum() == doctest::Approx(f(x)).epsilon(1e-9));

    // seeded determinism
    const Explanation again = shap_sampling(f, x, bg, 800, 5);
    CHECK(approx.phi == again.phi);
    const Explanation other = shap_sampling(f, x, bg, 800, 6);
    CHECK(approx.phi != other.phi);
}

TEST_CASE("guards: feature-count cap and shape mismatches") {
    const ModelFn f = [](const Eigen::RowVectorXd& x) { return x.sum(); };
    Eigen::RowVectorXd big(21);
    big.setZero();
    CHECK_THROWS_AS(shap_exact(f, big, zeros_background(1, 21)), TooManyFeatures);

    Eigen::RowVectorXd x(3);
    x.setZero();
    CHECK_THROWS_AS(shap_exact(f, x, zeros_background(2, 4)), DimensionMismatch);
    CHECK_THROWS_AS(shap_sampling(f, x, zeros_background(2, 4), 10, 1), DimensionMismatch);
    CHECK_THROWS_AS(shap_sampling(f, x, zeros_background(2, 3), 0, 1), ValidationError);
}

TEST_CASE("global importance ranks by mean |phi| with name tie-breaks") {
    Explanation e1, e2;
    e1.phi.resize(3);
    e1.phi << 1.0, -4.0, 2.0;
    e2.phi.resize(3);
    e2.phi << -1.0, 2.0, 2.0;
    // mean |phi|: a = 1.0, b = 3.0, c = 2.0
    const GlobalImportance g = global_importance({e1, e2}, {"a", "b", "c"});
    REQUIRE(g.ranking.size() == 3);
    CHECK(g.ranking[0] == "b");
    CHECK(g.ranking[1] == "c");
    CHECK(g.ranking[2] == "a");
    CHECK(g.values[0] == doctest::Approx(3.0));
    CHECK(g.values[2] == doctest::Approx(1.0));

    // equal means tie-break alphabetically
    Explanation t;
    t.phi.resize(2);
    t.phi << 5.0, -5.0;
    const GlobalImportance tied = global_importance({t}, {"zeta", "alpha"});
    CHECK(tied.ranking[0] == "alpha");
    CHECK(tied.ranking[1] == "zeta");

    CHECK_THROWS_AS(global_importance({}, {"a"}), EmptyCorpus);

    const std::string csv = g.to_csv();
    CHECK(csv.find("feature,mean_abs_shap") != std::string::npos);
    CHECK(csv.find("b,3") != std::string::npos);
}

TEST_CASE("explanation JSON carries names, phi, and the bookkeeping values") {
    Explanation e;
    e.base_value = 0.25;
    e.prediction = 0.75;
    e.phi.resize(2);
    e.phi << 0.4, 0.1;
    e.x.resize(2);
    e.x << 7.0, 8.0;
    const std::string j = e.to_json({"f_one", "f_two"});
    CHECK(j.find("\"f_one\"") != std::string::npos);
    CHECK(j.find("base_value") != std::string::npos);
    CHECK(j.find("prediction") != std::string::npos);
    CHECK(j.find("0.4") != std::string::npos);
}
