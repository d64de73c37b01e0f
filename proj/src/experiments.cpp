#include "cryptoscan/experiments.hpp"
#include "cryptoscan/errors.hpp"
#include "cryptoscan/parallel.hpp"
#include "cryptoscan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace cryptoscan {

namespace {

FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<int>& rows) {
    FeatureMatrix out;
    out.names = m.names;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), m.X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = m.X.row(rows[i]);
        out.y[static_cast<Eigen::Index>(i)] = m.y[rows[i]];
    }
    return out;
}

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '$';
}

// occurrences of `prefix.` not preceded by an identifier character
int count_prefix_calls(const std::string& text, const std::string& prefix) {
    const std::string needle = prefix + ".";
    int count = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        if (pos == 0 || !is_ident_char(text[pos - 1])) ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace

std::vector<ForestParams> default_cv_grid() {
    std::vector<ForestParams> grid;
    for (int trees : {25, 50})
        for (int depth : {12, 0}) {
            ForestParams p;
            p.n_trees = trees;
            p.max_depth = depth;
            grid.push_back(p);
        }
    return grid;
}

CryptoOnlyResult run_crypto_only(const FeatureMatrix& m, const ExperimentConfig& cfg) {
    if (m.X.rows() == 0) throw EmptyCorpus("run_crypto_only: empty feature matrix");
    if (m.X.cols() == 0 || m.X.cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateFeatures("run_crypto_only: all feature values are zero");

    CryptoOnlyResult r;
    const SplitResult split = split_train_test(m.y, cfg.test_fraction, derive_seed(cfg.seed, 1));
    r.train_rows = split.train_rows;
    r.test_rows = split.test_rows;
    const FeatureMatrix train = take_rows(m, split.train_rows);
    const FeatureMatrix test = take_rows(m, split.test_rows);

    const SelectionResult pear = pearson_filter(train, cfg.pearson_threshold, derive_seed(cfg.seed, 2));
    const FeatureMatrix train_p = pear.apply(train);

    BorutaOptions bo = cfg.boruta;
    bo.workers = cfg.workers;
    const SelectionResult bor = boruta(train_p, bo, derive_seed(cfg.seed, 3));

    r.selection.kept = bor.kept;
    r.selection.dropped_by_correlation = pear.dropped_by_correlation;
    r.selection.boruta_verdicts = bor.boruta_verdicts;
    r.selection.seed = cfg.seed;
    // Boruta can reject everything when labels carry no signal; fall back to
    // the decorrelated set so the pipeline still produces a classifier.
    if (r.selection.kept.empty()) r.selection.kept = train_p.names;

    const FeatureMatrix train_sel = r.selection.apply(train);
    const FeatureMatrix test_sel = r.selection.apply(test);

    const std::vector<ForestParams> grid = cfg.cv_grid.empty() ? default_cv_grid() : cfg.cv_grid;
    r.cv = cross_validate(train_sel.X, train_sel.y, grid, cfg.cv_folds, derive_seed(cfg.seed, 4),
                          cfg.workers);

    r.model = RandomForest::train(train_sel.X, train_sel.y, r.cv.best, derive_seed(cfg.seed, 5),
                                  cfg.workers);

    Eigen::VectorXi pred(test_sel.X.rows());
    for (Eigen::Index i = 0; i < test_sel.X.rows(); ++i) pred[i] = r.model.predict(test_sel.X.row(i));
    r.test_metrics = compute_metrics(test_sel.y, pred);

    // background: seeded sample of training rows
    std::vector<int> bg_idx(static_cast<std::size_t>(train_sel.X.rows()));
    std::iota(bg_idx.begin(), bg_idx.end(), 0);
    auto bg_rng = make_rng(cfg.seed, 6);
    std::shuffle(bg_idx.begin(), bg_idx.end(), bg_rng);
    const int n_bg = std::min<int>(cfg.shap_background, static_cast<int>(bg_idx.size()));
    Eigen::MatrixXd background(n_bg, train_sel.X.cols());
    for (int i = 0; i < n_bg; ++i) background.row(i) = train_sel.X.row(bg_idx[static_cast<std::size_t>(i)]);

    const ModelFn model_fn = [&r](const Eigen::RowVectorXd& x) { return r.model.predict_proba(x); };

    std::vector<int> explain_rows;
    for (Eigen::Index i = 0; i < test_sel.X.rows() &&
                             static_cast<int>(explain_rows.size()) < cfg.shap_explain_samples;
         ++i)
        explain_rows.push_back(static_cast<int>(i));
    // make sure at least one malicious test sample is explained
    bool has_malicious = std::any_of(explain_rows.begin(), explain_rows.end(),
                                     [&](int i) { return test_sel.y[i] == 1; });
    if (!has_malicious) {
        for (Eigen::Index i = 0; i < test_sel.X.rows(); ++i) {
            if (test_sel.y[i] == 1) {
                explain_rows.push_back(static_cast<int>(i));
                has_malicious = true;
                break;
            }
        }
    }

    std::vector<Explanation> explanations(explain_rows.size());
    parallel_for(explain_rows.size(), cfg.workers, [&](std::size_t i) {
        explanations[i] = shap_sampling(model_fn, test_sel.X.row(explain_rows[i]), background,
                                        cfg.shap_permutations, derive_seed(cfg.seed, 7 + explain_rows[i]));
    });

    r.global = global_importance(explanations, train_sel.names);
    r.local_example = explanations.front();
    for (std::size_t i = 0; i < explain_rows.size(); ++i) {
        if (test_sel.y[explain_rows[i]] == 1) {
            r.local_example = explanations[i];
            break;
        }
    }
    return r;
}

std::vector<std::string> default_baseline_prefixes() {
    return {
        "android.accounts",   "android.app.admin",    "android.bluetooth",
        "android.content.pm", "android.database",     "android.graphics",
        "android.hardware",   "android.location",     "android.media",
        "android.net.wifi",   "android.os",           "android.provider",
        "android.telephony",  "android.view",         "android.webkit",
        "android.widget",     "java.io",              "java.lang.reflect",
        "java.net",           "java.util.concurrent", "java.util.zip",
        "javax.net.ssl",      "org.json",             "org.w3c.dom",
    };
}

FeatureMatrix baseline_matrix(const std::vector<ManifestEntry>& samples,
                              const SignatureDb& signatures,
                              const std::vector<std::string>& prefixes, int workers) {
    if (samples.empty()) throw EmptyCorpus("baseline_matrix: no samples");
    if (prefixes.empty()) throw ValidationError("baseline_matrix: no prefixes");

    FeatureMatrix m;
    for (const auto& p : prefixes) m.names.push_back("api_" + feature_slug(p));
    m.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(samples.size()),
                                static_cast<Eigen::Index>(prefixes.size()));
    m.y.resize(static_cast<Eigen::Index>(samples.size()));

    parallel_for(samples.size(), workers, [&](std::size_t s) {
        const ManifestEntry& e = samples[s];
        m.y[static_cast<Eigen::Index>(s)] = is_malicious(e) ? 1 : 0;
        if (!fs::exists(e.path) || !fs::is_directory(e.path))
            throw MissingSample("sample root not found: " + e.path);

        const fs::path root(e.path);
        std::vector<fs::path> files;
        for (auto it = fs::recursive_directory_iterator(root);
             it != fs::recursive_directory_iterator(); ++it) {
            if (it->is_regular_file() && it->path().extension() == ".java")
                files.push_back(it->path());
        }
        std::sort(files.begin(), files.end());

        for (const auto& f : files) {
            std::string pkg = fs::relative(f.parent_path(), root).generic_string();
            if (pkg == ".") pkg.clear();
            if (classify_class(pkg, signatures) != ClassOrigin::User) continue;
            std::ifstream in(f);
            if (!in) continue;
            std::stringstream buf;
            buf << in.rdbuf();
            const std::string text = strip_comments(buf.str());
            for (std::size_t j = 0; j < prefixes.size(); ++j)
                m.X(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) +=
                    count_prefix_calls(text, prefixes[j]);
        }
    });
    return m;
}

EnhancementResult run_enhancement(const FeatureMatrix& baseline, const FeatureMatrix& crypto,
                                  int n_trials, std::uint64_t seed, const ExperimentConfig& cfg) {
    if (n_trials < 1) throw ValidationError("run_enhancement: n_trials must be >= 1");
    if (baseline.X.rows() != crypto.X.rows() || baseline.y.size() != crypto.y.size())
        throw SplitMismatch("run_enhancement: baseline and crypto matrices cover different rows");
    for (Eigen::Index i = 0; i < baseline.y.size(); ++i)
        if (baseline.y[i] != crypto.y[i])
            throw SplitMismatch("run_enhancement: labels disagree at row " + std::to_string(i));

    const int pb = static_cast<int>(baseline.X.cols());
    constexpr int kTupleSize = 10;
    if (pb < kTupleSize)
        throw InsufficientBaselineFeatures("run_enhancement: need at least 10 baseline features, have " +
                                           std::to_string(pb));

    // pre-draw distinct sorted 10-feature tuples
    auto rng = make_rng(seed, 0);
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> tuples;
    std::vector<int> pool(static_cast<std::size_t>(pb));
    std::iota(pool.begin(), pool.end(), 0);
    long long attempts = 0;
    const long long max_attempts = 1000LL * n_trials;
    while (static_cast<int>(tuples.size()) < n_trials) {
        if (++attempts > max_attempts)
            throw InsufficientBaselineFeatures(
                "run_enhancement: cannot draw " + std::to_string(n_trials) +
                " distinct 10-feature tuples from " + std::to_string(pb) + " baseline features");
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<int> t(pool.begin(), pool.begin() + kTupleSize);
        std::sort(t.begin(), t.end());
        if (seen.insert(t).second) tuples.push_back(std::move(t));
    }

    const SplitResult split = split_train_test(baseline.y, cfg.test_fraction, derive_seed(seed, 1));

    auto cols_of = [](const Eigen::MatrixXd& X, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = X(rows[i], cols[j]);
        return out;
    };
    std::vector<int> all_crypto(static_cast<std::size_t>(crypto.X.cols()));
    std::iota(all_crypto.begin(), all_crypto.end(), 0);

    Eigen::VectorXi y_train(static_cast<Eigen::Index>(split.train_rows.size()));
    for (std::size_t i = 0; i < split.train_rows.size(); ++i) y_train[i] = baseline.y[split.train_rows[i]];
    Eigen::VectorXi y_test(static_cast<Eigen::Index>(split.test_rows.size()));
    for (std::size_t i = 0; i < split.test_rows.size(); ++i) y_test[i] = baseline.y[split.test_rows[i]];

    const Eigen::MatrixXd Xc_train = cols_of(crypto.X, split.train_rows, all_crypto);
    const Eigen::MatrixXd Xc_test = cols_of(crypto.X, split.test_rows, all_crypto);

    ForestParams fp;
    fp.n_trees = 50;
    fp.max_depth = 0;

    EnhancementResult res;
    res.seed = seed;
    res.n_trials = n_trials;
    res.trials.resize(static_cast<std::size_t>(n_trials));

    parallel_for(static_cast<std::size_t>(n_trials), cfg.workers, [&](std::size_t t) {
        const std::vector<int>& cols = tuples[t];
        EnhancementTrial& trial = res.trials[t];
        for (int c : cols) trial.baseline_features.push_back(baseline.names[static_cast<std::size_t>(c)]);

        const Eigen::MatrixXd Xb_train = cols_of(baseline.X, split.train_rows, cols);
        const Eigen::MatrixXd Xb_test = cols_of(baseline.X, split.test_rows, cols);

        const RandomForest base_model =
            RandomForest::train(Xb_train, y_train, fp, derive_seed(seed, 100 + t), 1);
        Eigen::VectorXi pred(Xb_test.rows());
        for (Eigen::Index i = 0; i < Xb_test.rows(); ++i) pred[i] = base_model.predict(Xb_test.row(i));
        trial.baseline = compute_metrics(y_test, pred);

        Eigen::MatrixXd Xe_train(Xb_train.rows(), Xb_train.cols() + Xc_train.cols());
        Xe_train << Xb_train, Xc_train;
        Eigen::MatrixXd Xe_test(Xb_test.rows(), Xb_test.cols() + Xc_test.cols());
        Xe_test << Xb_test, Xc_test;

        const RandomForest enh_model =
            RandomForest::train(Xe_train, y_train, fp, derive_seed(seed, 200 + t), 1);
        Eigen::VectorXi pred_e(Xe_test.rows());
        for (Eigen::Index i = 0; i < Xe_test.rows(); ++i) pred_e[i] = enh_model.predict(Xe_test.row(i));
        trial.enhanced = compute_metrics(y_test, pred_e);
        trial.delta_f1 = trial.enhanced.f1 - trial.baseline.f1;
    });

    double sum_dp = 0.0, sum_dr = 0.0, sum_df = 0.0;
    for (const auto& t : res.trials) {
        sum_dp += t.enhanced.precision - t.baseline.precision;
        sum_dr += t.enhanced.recall - t.baseline.recall;
        sum_df += t.delta_f1;
    }
    res.mean_delta_precision = sum_dp / n_trials;
    res.mean_delta_recall = sum_dr / n_trials;
    res.mean_delta_f1 = sum_df / n_trials;
    if (n_trials > 1) {
        double ss = 0.0;
        for (const auto& t : res.trials) {
            const double d = t.delta_f1 - res.mean_delta_f1;
            ss += d * d;
        }
        res.stdev_delta_f1 = std::sqrt(ss / (n_trials - 1));
    }
    return res;
}

std::string EnhancementResult::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["n_trials"] = n_trials;
    j["mean_delta_precision"] = mean_delta_precision;
    j["mean_delta_recall"] = mean_delta_recall;
    j["mean_delta_f1"] = mean_delta_f1;
    j["stdev_delta_f1"] = stdev_delta_f1;
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& t : trials) {
        nlohmann::json e;
        e["baseline_features"] = t.baseline_features;
        e["baseline"] = {{"precision", t.baseline.precision},
                         {"recall", t.baseline.recall},
                         {"f1", t.baseline.f1}};
        e["enhanced"] = {{"precision", t.enhanced.precision},
                         {"recall", t.enhanced.recall},
                         {"f1", t.enhanced.f1}};
        e["delta_f1"] = t.delta_f1;
        jt.push_back(std::move(e));
    }
    j["trials"] = std::move(jt);
    return j.dump(2) + "\n";
}

std::string EnhancementResult::summary_csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "trial,baseline_precision,baseline_recall,baseline_f1,"
          "enhanced_precision,enhanced_recall,enhanced_f1,delta_f1\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& t = trials[i];
        os << i << ',' << t.baseline.precision << ',' << t.baseline.recall << ',' << t.baseline.f1
           << ',' << t.enhanced.precision << ',' << t.enhanced.recall << ',' << t.enhanced.f1 << ','
           << t.delta_f1 << '\n';
    }
    return os.str();
}

std::vector<int> rescue_analysis(const RandomForest& baseline_model,
                                 const RandomForest& crypto_model,
                                 const Eigen::MatrixXd& Xbase_test,
                                 const Eigen::MatrixXd& Xcrypto_test,
                                 const Eigen::VectorXi& y_test) {
    if (Xbase_test.rows() != Xcrypto_test.rows() || Xbase_test.rows() != y_test.size())
        throw SplitMismatch("rescue_analysis: test partitions cover different rows");
    std::vector<int> rescued;
    for (Eigen::Index i = 0; i < y_test.size(); ++i) {
        if (y_test[i] != 1) continue;
        if (baseline_model.predict(Xbase_test.row(i)) == 0 &&
            crypto_model.predict(Xcrypto_test.row(i)) == 1)
            rescued.push_back(static_cast<int>(i));
    }
    return rescued;
}

} // namespace cryptoscan
