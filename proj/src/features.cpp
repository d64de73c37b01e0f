#include "cryptoscan/features.hpp"
#include "cryptoscan/errors.hpp"
#include "cryptoscan/forest.hpp"
#include "cryptoscan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cryptoscan {

using nlohmann::json;

std::string feature_slug(const std::string& raw) {
    std::string out;
    for (char c : to_lower(raw)) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(c);
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

FeatureCatalog FeatureCatalog::build(const PatternCatalog& catalog, const SignatureDb& signatures) {
    FeatureCatalog fc;
    auto add = [&](FeatureDef d) {
        fc.index_[d.name] = static_cast<int>(fc.defs_.size());
        fc.defs_.push_back(std::move(d));
    };

    // Set A: third-party crypto library flags
    for (const auto& sig : signatures.signatures()) {
        if (sig.kind != SignatureKind::CryptoLibJava) continue;
        FeatureDef d;
        d.name = "java_lib_" + feature_slug(sig.label);
        d.set = FeatureSet::A;
        d.kind = FeatureDef::JavaLibFlag;
        d.key = sig.label;
        add(std::move(d));
    }
    for (const auto& lib : catalog.native_crypto_libs()) {
        FeatureDef d;
        d.name = "native_lib_" + feature_slug(lib);
        d.set = FeatureSet::A;
        d.kind = FeatureDef::NativeLibFlag;
        d.key = lib;
        add(std::move(d));
    }

    // Set B: per-class imports and obfuscated constructors
    for (const auto& cls : catalog.classes()) {
        FeatureDef d;
        d.name = "import_" + feature_slug(cls.simple_name);
        d.set = FeatureSet::B;
        d.kind = FeatureDef::ImportClass;
        d.key = cls.simple_name;
        add(std::move(d));
    }
    for (const auto& cls : catalog.classes()) {
        FeatureDef d;
        d.name = "obf_ctor_" + feature_slug(cls.simple_name);
        d.set = FeatureSet::B;
        d.kind = FeatureDef::ObfCtorClass;
        d.key = to_lower(cls.simple_name);
        add(std::move(d));
    }
    // Set B: per-primitive constructor frequencies
    for (const auto& prim : catalog.primitives()) {
        FeatureDef d;
        d.name = "ctor_" + feature_slug(prim.name);
        d.set = FeatureSet::B;
        d.kind = FeatureDef::CtorPrimitive;
        d.key = prim.name;
        add(std::move(d));
    }
    // Set B: transformation combinations for the non-PBE symmetric primitives
    static const CipherMode kModes[] = {CipherMode::Ecb, CipherMode::Cbc, CipherMode::Cfb,
                                        CipherMode::Ofb, CipherMode::Ctr, CipherMode::Gcm};
    static const CipherPadding kPads[] = {CipherPadding::NoPadding, CipherPadding::Pkcs5,
                                          CipherPadding::Pkcs7, CipherPadding::Iso10126,
                                          CipherPadding::Oaep, CipherPadding::ZeroByte};
    for (const auto& prim : catalog.primitives()) {
        if (prim.category != Category::SymmetricEnc) continue;
        if (to_lower(prim.name).rfind("pbe", 0) == 0) continue;
        for (CipherMode m : kModes) {
            for (CipherPadding p : kPads) {
                FeatureDef d;
                d.name = "tf_" + feature_slug(prim.name) + "_" + feature_slug(mode_name(m)) + "_" +
                         feature_slug(padding_name(p));
                d.set = FeatureSet::B;
                d.kind = FeatureDef::TransformationCombo;
                d.key = prim.name + "/" + mode_name(m) + "/" + padding_name(p);
                add(std::move(d));
            }
        }
    }

    // Set C: per-category aggregates over the eight categories
    for (int c = 0; c < kNumPlainCategories; ++c) {
        const std::string cat = feature_slug(category_name(static_cast<Category>(c)));
        auto add_cat = [&](const std::string& suffix, FeatureDef::Kind kind) {
            FeatureDef d;
            d.name = "cat_" + cat + "_" + suffix;
            d.set = FeatureSet::C;
            d.kind = kind;
            d.category = c;
            add(std::move(d));
        };
        add_cat("call_sites", FeatureDef::CategoryCallSites);
        add_cat("obfuscated", FeatureDef::CategoryObfuscated);
        add_cat("distinct_primitives", FeatureDef::CategoryDistinctPrimitives);
        add_cat("imports", FeatureDef::CategoryImports);
        add_cat("importing_classes", FeatureDef::CategoryImportingClasses);
        add_cat("sqrt_call_sites", FeatureDef::CategorySqrtCallSites);
    }
    auto add_total = [&](const std::string& name, FeatureDef::Kind kind) {
        FeatureDef d;
        d.name = name;
        d.set = FeatureSet::C;
        d.kind = kind;
        add(std::move(d));
    };
    add_total("total_call_sites", FeatureDef::TotalCallSites);
    add_total("total_obfuscated", FeatureDef::TotalObfuscated);
    add_total("sqrt_total_call_sites", FeatureDef::SqrtTotalCallSites);
    add_total("total_crypto_imports", FeatureDef::TotalImports);
    add_total("unique_crypto_imports", FeatureDef::UniqueImports);
    add_total("sqrt_total_crypto_imports", FeatureDef::SqrtTotalImports);
    add_total("sqrt_unique_crypto_imports", FeatureDef::SqrtUniqueImports);
    return fc;
}

std::vector<std::string> FeatureCatalog::names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& d : defs_) out.push_back(d.name);
    return out;
}

int FeatureCatalog::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

namespace {

// category attribution of imports, with Cipher folded into SymmetricEnc
std::array<std::int64_t, kNumPlainCategories> imports_by_category(const CryptoReport& r) {
    // import class names are keyed by simple name; map via a fixed table to
    // avoid needing the pattern catalog here
    static const std::map<std::string, Category> kTable = {
        {"MessageDigest", Category::Hash},
        {"Cipher", Category::SymmetricEnc},
        {"Mac", Category::Mac},
        {"Signature", Category::DigitalSignature},
        {"KeyAgreement", Category::KeyAgreement},
        {"SecureRandom", Category::Prng},
    };
    std::array<std::int64_t, kNumPlainCategories> out{};
    for (const auto& [cls, n] : r.imports) {
        auto it = kTable.find(cls);
        const Category c = it == kTable.end() ? Category::Other : it->second;
        out[static_cast<int>(c)] += n;
    }
    return out;
}

std::int64_t transformation_count(const CryptoReport& r, const std::string& key) {
    // fold CFB8 into CFB for the feature view
    auto it = r.transformations.find(key);
    std::int64_t n = it == r.transformations.end() ? 0 : it->second;
    const std::size_t slash = key.find('/');
    if (slash != std::string::npos && key.compare(slash, 5, "/CFB/") == 0) {
        std::string alt = key;
        alt.replace(slash, 5, "/CFB8/");
        auto it2 = r.transformations.find(alt);
        if (it2 != r.transformations.end()) n += it2->second;
    }
    return n;
}

} // namespace

Eigen::VectorXd FeatureCatalog::featurize(const CryptoReport& r) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(defs_.size()));
    const auto cat_imports = imports_by_category(r);
    for (std::size_t i = 0; i < defs_.size(); ++i) {
        const FeatureDef& d = defs_[i];
        double val = 0.0;
        switch (d.kind) {
            case FeatureDef::JavaLibFlag:
                val = r.java_libs.count(d.key) ? 1.0 : 0.0;
                break;
            case FeatureDef::NativeLibFlag:
                val = r.native_libs.count(d.key) ? 1.0 : 0.0;
                break;
            case FeatureDef::ImportClass: {
                auto it = r.imports.find(d.key);
                val = it == r.imports.end() ? 0.0 : static_cast<double>(it->second);
                break;
            }
            case FeatureDef::ObfCtorClass: {
                auto it = r.class_ctors.find(d.key);
                val = it == r.class_ctors.end() ? 0.0 : static_cast<double>(it->second.obfuscated);
                break;
            }
            case FeatureDef::CtorPrimitive: {
                double n = 0.0;
                for (const auto& c : r.categories) {
                    auto it = c.primitives.find(d.key);
                    if (it != c.primitives.end()) n += static_cast<double>(it->second);
                }
                val = n;
                break;
            }
            case FeatureDef::TransformationCombo:
                val = static_cast<double>(transformation_count(r, d.key));
                break;
            case FeatureDef::CategoryCallSites:
                val = static_cast<double>(r.categories[d.category].call_sites);
                break;
            case FeatureDef::CategoryObfuscated:
                val = static_cast<double>(r.categories[d.category].obfuscated);
                break;
            case FeatureDef::CategoryDistinctPrimitives:
                val = static_cast<double>(r.categories[d.category].primitives.size());
                break;
            case FeatureDef::CategoryImports:
                val = static_cast<double>(cat_imports[d.category]);
                break;
            case FeatureDef::CategoryImportingClasses:
                val = static_cast<double>(r.importing_classes[d.category]);
                break;
            case FeatureDef::CategorySqrtCallSites:
                val = std::sqrt(static_cast<double>(r.categories[d.category].call_sites));
                break;
            case FeatureDef::TotalCallSites:
                val = static_cast<double>(r.total_call_sites());
                break;
            case FeatureDef::TotalObfuscated: {
                std::int64_t n = 0;
                for (const auto& c : r.categories) n += c.obfuscated;
                val = static_cast<double>(n);
                break;
            }
            case FeatureDef::SqrtTotalCallSites:
                val = std::sqrt(static_cast<double>(r.total_call_sites()));
                break;
            case FeatureDef::TotalImports:
                val = static_cast<double>(r.total_imports());
                break;
            case FeatureDef::UniqueImports:
                val = static_cast<double>(r.unique_imports());
                break;
            case FeatureDef::SqrtTotalImports:
                val = std::sqrt(static_cast<double>(r.total_imports()));
                break;
            case FeatureDef::SqrtUniqueImports:
                val = std::sqrt(static_cast<double>(r.unique_imports()));
                break;
        }
        v[static_cast<Eigen::Index>(i)] = val;
    }
    return v;
}

FeatureMatrix build_matrix(const std::vector<CryptoReport>& reports, const FeatureCatalog& catalog) {
    FeatureMatrix m;
    m.names = catalog.names();
    m.X = Eigen::MatrixXd(reports.size(), catalog.size());
    m.y = Eigen::VectorXi(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        m.X.row(static_cast<Eigen::Index>(i)) = catalog.featurize(reports[i]).transpose();
        m.y[static_cast<Eigen::Index>(i)] = reports[i].label == "malicious" ? 1 : 0;
    }
    return m;
}

std::string matrix_to_csv(const FeatureMatrix& m) {
    std::ostringstream os;
    for (const auto& n : m.names) os << n << ',';
    os << "label\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < m.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.X.cols(); ++j) os << m.X(i, j) << ',';
        os << m.y[i] << '\n';
    }
    return os.str();
}

FeatureMatrix matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("matrix csv: empty");
    FeatureMatrix m;
    {
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) m.names.push_back(tok);
        if (m.names.empty() || m.names.back() != "label")
            throw ParseError("matrix csv: last column must be label");
        m.names.pop_back();
    }
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
        if (row.size() != m.names.size() + 1) throw ParseError("matrix csv: ragged row");
        labels.push_back(static_cast<int>(row.back()));
        row.pop_back();
        rows.push_back(std::move(row));
    }
    m.X = Eigen::MatrixXd(rows.size(), m.names.size());
    m.y = Eigen::VectorXi(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        m.y[static_cast<Eigen::Index>(i)] = labels[i];
    }
    return m;
}

std::string verdict_name(BorutaVerdict v) {
    switch (v) {
        case BorutaVerdict::Confirmed: return "Confirmed";
        case BorutaVerdict::Rejected: return "Rejected";
        case BorutaVerdict::Tentative: return "Tentative";
    }
    return "Tentative";
}

FeatureMatrix SelectionResult::apply(const FeatureMatrix& m) const {
    FeatureMatrix out;
    out.names = kept;
    out.X = Eigen::MatrixXd(m.X.rows(), kept.size());
    out.y = m.y;
    for (std::size_t j = 0; j < kept.size(); ++j) {
        auto it = std::find(m.names.begin(), m.names.end(), kept[j]);
        if (it == m.names.end()) throw ValidationError("selection: feature missing: " + kept[j]);
        out.X.col(static_cast<Eigen::Index>(j)) =
            m.X.col(static_cast<Eigen::Index>(it - m.names.begin()));
    }
    return out;
}

std::string SelectionResult::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["seed"] = seed;
    j["kept"] = kept;
    json dropped = json::array();
    for (const auto& [d, k] : dropped_by_correlation) dropped.push_back({d, k});
    j["dropped_by_correlation"] = std::move(dropped);
    json verdicts = json::object();
    for (const auto& [name, v] : boruta_verdicts) verdicts[name] = verdict_name(v);
    j["boruta_verdicts"] = std::move(verdicts);
    return j.dump(2) + "\n";
}

SelectionResult SelectionResult::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("selection: ") + e.what());
    }
    SelectionResult r;
    r.seed = j.value("seed", 0ULL);
    r.kept = j.at("kept").get<std::vector<std::string>>();
    if (j.contains("dropped_by_correlation"))
        for (const auto& p : j.at("dropped_by_correlation"))
            r.dropped_by_correlation.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
    if (j.contains("boruta_verdicts")) {
        for (const auto& [name, v] : j.at("boruta_verdicts").items()) {
            const std::string s = v.get<std::string>();
            r.boruta_verdicts[name] = s == "Confirmed"  ? BorutaVerdict::Confirmed
                                      : s == "Rejected" ? BorutaVerdict::Rejected
                                                        : BorutaVerdict::Tentative;
        }
    }
    return r;
}

SelectionResult pearson_filter(const FeatureMatrix& m, double threshold, std::uint64_t seed) {
    const Eigen::Index n = m.X.rows();
    const Eigen::Index p = m.X.cols();
    if (n < 2) throw InsufficientData("pearson_filter: need >= 2 samples");

    Eigen::MatrixXd Z = m.X;
    Eigen::VectorXd sd(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = Z.col(j).mean();
        Z.col(j).array() -= mean;
        sd[j] = std::sqrt(Z.col(j).squaredNorm() / static_cast<double>(n - 1));
    }

    auto rng = make_rng(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<bool> alive(p, true);
    SelectionResult res;
    res.seed = seed;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!alive[i]) continue;
        for (Eigen::Index j = i + 1; j < p; ++j) {
            if (!alive[i]) break;
            if (!alive[j]) continue;
            // constant columns correlate with nothing
            if (sd[i] == 0.0 || sd[j] == 0.0) continue;
            const double r =
                Z.col(i).dot(Z.col(j)) / (static_cast<double>(n - 1) * sd[i] * sd[j]);
            if (std::abs(r) > threshold) {
                const Eigen::Index victim = coin(rng) == 0 ? i : j;
                const Eigen::Index survivor = victim == i ? j : i;
                alive[victim] = false;
                res.dropped_by_correlation.push_back({m.names[victim], m.names[survivor]});
            }
        }
    }
    for (Eigen::Index j = 0; j < p; ++j)
        if (alive[j]) res.kept.push_back(m.names[j]);
    return res;
}

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P[X >= k] for X ~ Bin(n, 0.5)
double binom_sf(int k, int n) {
    if (k <= 0) return 1.0;
    double s = 0.0;
    for (int i = k; i <= n; ++i) s += std::exp(log_choose(n, i) - n * std::log(2.0));
    return std::min(1.0, s);
}

// P[X <= k]
double binom_cdf(int k, int n) {
    if (k >= n) return 1.0;
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += std::exp(log_choose(n, i) - n * std::log(2.0));
    return std::min(1.0, s);
}

} // namespace

SelectionResult boruta(const FeatureMatrix& m, const BorutaOptions& opts, std::uint64_t seed) {
    const Eigen::Index n = m.X.rows();
    const Eigen::Index p = m.X.cols();
    {
        bool has0 = false, has1 = false;
        for (Eigen::Index i = 0; i < n; ++i) (m.y[i] == 1 ? has1 : has0) = true;
        if (!has0 || !has1) throw DegenerateLabels("boruta: single-class labels");
    }
    if (n < 20) throw InsufficientData("boruta: need >= 20 samples");

    std::vector<BorutaVerdict> verdict(p, BorutaVerdict::Tentative);
    std::vector<bool> decided(p, false);
    std::vector<int> hits(p, 0), trials(p, 0);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // columns still in play: everything not rejected
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < p; ++j)
            if (verdict[j] != BorutaVerdict::Rejected) cols.push_back(j);
        if (cols.empty()) break;
        bool any_undecided = false;
        for (Eigen::Index j : cols)
            if (!decided[j]) any_undecided = true;
        if (!any_undecided) break;

        auto rng = make_rng(seed, static_cast<std::uint64_t>(iter));
        const Eigen::Index q = static_cast<Eigen::Index>(cols.size());
        Eigen::MatrixXd Xext(n, 2 * q);
        for (Eigen::Index c = 0; c < q; ++c) Xext.col(c) = m.X.col(cols[c]);
        std::vector<int> perm(n);
        for (Eigen::Index c = 0; c < q; ++c) {
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            for (Eigen::Index i = 0; i < n; ++i) Xext(i, q + c) = m.X(perm[i], cols[c]);
        }

        ForestParams fp;
        fp.n_trees = opts.n_trees;
        fp.max_depth = opts.max_depth;
        const RandomForest f = RandomForest::train(Xext, m.y, fp,
                                                   derive_seed(seed, 100000 + iter), opts.workers);
        const Eigen::VectorXd& imp = f.feature_importances();
        const double max_shadow = imp.tail(q).maxCoeff();

        for (Eigen::Index c = 0; c < q; ++c) {
            const Eigen::Index j = cols[c];
            if (decided[j]) continue;
            ++trials[j];
            if (imp[c] > max_shadow) ++hits[j];
            const double p_hi = binom_sf(hits[j], trials[j]);
            const double p_lo = binom_cdf(hits[j], trials[j]);
            // Bonferroni adjustment across attributes, as in reference Boruta
            const double alpha = opts.alpha / static_cast<double>(p);
            if (2.0 * p_hi < alpha) {
                verdict[j] = BorutaVerdict::Confirmed;
                decided[j] = true;
            } else if (2.0 * p_lo < alpha) {
                verdict[j] = BorutaVerdict::Rejected;
                decided[j] = true;
            }
        }
    }

    SelectionResult res;
    res.seed = seed;
    for (Eigen::Index j = 0; j < p; ++j) {
        res.boruta_verdicts[m.names[j]] = verdict[j];
        if (verdict[j] != BorutaVerdict::Rejected) res.kept.push_back(m.names[j]);
    }
    return res;
}

} // namespace cryptoscan
