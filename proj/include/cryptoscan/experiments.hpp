#pragma once

#include "cryptoscan/features.hpp"
#include "cryptoscan/forest.hpp"
#include "cryptoscan/scanner.hpp"
#include "cryptoscan/shapley.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cryptoscan {

struct ExperimentConfig {
    std::uint64_t seed = 17;
    int workers = 1;
    double test_fraction = 0.1;
    double pearson_threshold = 0.95;
    BorutaOptions boruta;
    std::vector<ForestParams> cv_grid; // empty -> default_cv_grid()
    int cv_folds = 10;
    int shap_background = 100;
    int shap_permutations = 30;
    int shap_explain_samples = 10;
};

std::vector<ForestParams> default_cv_grid();

struct CryptoOnlyResult {
    Metrics test_metrics;
    RandomForest model;
    SelectionResult selection;
    CvResult cv;
    GlobalImportance global;
    Explanation local_example; // first malicious test sample
    std::vector<int> train_rows;
    std::vector<int> test_rows;
};

// Full pipeline: stratified split, Pearson filter, Boruta, CV, final train,
// test metrics, global and local explanations. Selection and CV see training
// rows only.
CryptoOnlyResult run_crypto_only(const FeatureMatrix& m, const ExperimentConfig& cfg);

// Frequencies of calls into non-crypto system API package prefixes; the
// weak baseline that crypto features enhance.
std::vector<std::string> default_baseline_prefixes();

FeatureMatrix baseline_matrix(const std::vector<ManifestEntry>& samples,
                              const SignatureDb& signatures,
                              const std::vector<std::string>& prefixes, int workers = 1);

struct EnhancementTrial {
    std::vector<std::string> baseline_features; // the 10 sampled names
    Metrics baseline;
    Metrics enhanced;
    double delta_f1 = 0.0;
};

struct EnhancementResult {
    std::vector<EnhancementTrial> trials;
    double mean_delta_precision = 0.0;
    double mean_delta_recall = 0.0;
    double mean_delta_f1 = 0.0;
    double stdev_delta_f1 = 0.0;
    std::uint64_t seed = 0;
    int n_trials = 0;

    std::string to_json() const;
    std::string summary_csv() const;
};

// Per trial: 10 baseline features drawn without repetition across trials
// (tuples pre-drawn), baseline forest vs the same rows with crypto columns
// appended.
EnhancementResult run_enhancement(const FeatureMatrix& baseline, const FeatureMatrix& crypto,
                                  int n_trials, std::uint64_t seed,
                                  const ExperimentConfig& cfg);

// Malicious test samples the baseline misses but the crypto model catches.
std::vector<int> rescue_analysis(const RandomForest& baseline_model,
                                 const RandomForest& crypto_model,
                                 const Eigen::MatrixXd& Xbase_test,
                                 const Eigen::MatrixXd& Xcrypto_test,
                                 const Eigen::VectorXi& y_test);

} // namespace cryptoscan
