#pragma once

#include "cryptoscan/catalog.hpp"
#include "cryptoscan/libfilter.hpp"
#include "cryptoscan/report.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cryptoscan {

enum class FeatureSet { A, B, C };

struct FeatureDef {
    std::string name;
    FeatureSet set = FeatureSet::B;
    // extraction plan
    enum Kind {
        JavaLibFlag,
        NativeLibFlag,
        ImportClass,
        ObfCtorClass,
        CtorPrimitive,
        TransformationCombo,
        CategoryCallSites,
        CategoryObfuscated,
        CategoryDistinctPrimitives,
        CategoryImports,
        CategoryImportingClasses,
        CategorySqrtCallSites,
        TotalCallSites,
        TotalObfuscated,
        SqrtTotalCallSites,
        TotalImports,
        UniqueImports,
        SqrtTotalImports,
        SqrtUniqueImports,
    } kind = TotalCallSites;
    std::string key;    // lib label / class / primitive / transformation
    int category = 0;   // for Category* kinds
};

class FeatureCatalog {
public:
    // Set A: one flag per third-party crypto library (Java + native).
    // Set B: constructor / import / transformation frequencies.
    // Set C: per-category and total aggregates. 300 features with the
    // shipped pattern catalog and signature DB.
    static FeatureCatalog build(const PatternCatalog& catalog, const SignatureDb& signatures);

    std::size_t size() const { return defs_.size(); }
    const std::vector<FeatureDef>& features() const { return defs_; }
    std::vector<std::string> names() const;
    int index_of(const std::string& name) const;

    Eigen::VectorXd featurize(const CryptoReport& report) const;

private:
    std::vector<FeatureDef> defs_;
    std::map<std::string, int> index_;
};

std::string feature_slug(const std::string& raw);

// Feature matrix with labels (1 = malicious).
struct FeatureMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd X;
    Eigen::VectorXi y;
};

FeatureMatrix build_matrix(const std::vector<CryptoReport>& reports, const FeatureCatalog& catalog);

std::string matrix_to_csv(const FeatureMatrix& m);
FeatureMatrix matrix_from_csv(const std::string& text);

enum class BorutaVerdict { Confirmed, Rejected, Tentative };

std::string verdict_name(BorutaVerdict v);

struct SelectionResult {
    std::vector<std::string> kept;
    // (dropped feature, surviving partner) from the Pearson pass
    std::vector<std::pair<std::string, std::string>> dropped_by_correlation;
    std::map<std::string, BorutaVerdict> boruta_verdicts;
    std::uint64_t seed = 0;

    // column subset of a matrix; uses names only, never labels
    FeatureMatrix apply(const FeatureMatrix& m) const;

    std::string to_json() const;
    static SelectionResult from_json(const std::string& text);
};

// Pairwise |r| > threshold drops a seeded-random member of the pair; greedy
// pass in canonical feature order. Correlation with a constant column is 0.
SelectionResult pearson_filter(const FeatureMatrix& m, double threshold = 0.95,
                               std::uint64_t seed = 0);

struct BorutaOptions {
    int max_iter = 100;
    double alpha = 0.05;
    int n_trees = 30;
    int max_depth = 12;
    int workers = 1;
};

// Shadow-feature selection: a feature scores a hit when its forest importance
// beats the best shadow; a two-sided binomial test settles the verdict.
SelectionResult boruta(const FeatureMatrix& m, const BorutaOptions& opts, std::uint64_t seed);

} // namespace cryptoscan
