// cryptoscan: extract cryptographic API usage from decompiled Java-style
// sources, aggregate corpus statistics, and run the classifier pipeline.

#include "cryptoscan/catalog.hpp"
#include "cryptoscan/corpusgen.hpp"
#include "cryptoscan/errors.hpp"
#include "cryptoscan/experiments.hpp"
#include "cryptoscan/features.hpp"
#include "cryptoscan/forest.hpp"
#include "cryptoscan/libfilter.hpp"
#include "cryptoscan/parallel.hpp"
#include "cryptoscan/report.hpp"
#include "cryptoscan/rng.hpp"
#include "cryptoscan/scanner.hpp"
#include "cryptoscan/shapley.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cryptoscan;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 17;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("short write to " + path);
}

PatternCatalog load_catalog_arg(const std::string& arg) {
    if (arg == "default") return default_catalog();
    return load_catalog(arg);
}

SignatureDb load_signatures_arg(const std::string& arg) {
    if (arg == "default") return default_signature_db();
    return load_signature_db(arg);
}

GenProfile load_profile_arg(const std::string& arg) {
    if (arg == "malicious-2012" || arg == "benign-2016") return default_profile(arg);
    return load_profile(arg);
}

struct GlobalOpts {
    std::uint64_t seed = kDefaultSeed;
    int workers = 1;
    std::string config;
    bool dry_run = false;
};

nlohmann::json forest_params_json(const ForestParams& p) {
    return {{"n_trees", p.n_trees},
            {"max_depth", p.max_depth},
            {"features_per_split", p.features_per_split},
            {"bootstrap", p.bootstrap}};
}

nlohmann::json experiment_config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["test_fraction"] = cfg.test_fraction;
    j["pearson_threshold"] = cfg.pearson_threshold;
    j["boruta"] = {{"max_iter", cfg.boruta.max_iter},
                   {"alpha", cfg.boruta.alpha},
                   {"n_trees", cfg.boruta.n_trees},
                   {"max_depth", cfg.boruta.max_depth}};
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& p : cfg.cv_grid.empty() ? default_cv_grid() : cfg.cv_grid)
        grid.push_back(forest_params_json(p));
    j["cv_grid"] = std::move(grid);
    j["cv_folds"] = cfg.cv_folds;
    j["shap"] = {{"background", cfg.shap_background},
                 {"permutations", cfg.shap_permutations},
                 {"explain_samples", cfg.shap_explain_samples}};
    return j;
}

// --config JSON overlays the built-in defaults; command-line flags still win
// for seed/workers, which are applied after this.
ExperimentConfig load_experiment_config(const std::string& path) {
    ExperimentConfig cfg;
    if (path.empty()) return cfg;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    try {
        cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
        cfg.pearson_threshold = j.value("pearson_threshold", cfg.pearson_threshold);
        if (j.contains("boruta")) {
            const auto& b = j.at("boruta");
            cfg.boruta.max_iter = b.value("max_iter", cfg.boruta.max_iter);
            cfg.boruta.alpha = b.value("alpha", cfg.boruta.alpha);
            cfg.boruta.n_trees = b.value("n_trees", cfg.boruta.n_trees);
            cfg.boruta.max_depth = b.value("max_depth", cfg.boruta.max_depth);
        }
        if (j.contains("cv_grid")) {
            cfg.cv_grid.clear();
            for (const auto& g : j.at("cv_grid")) {
                ForestParams p;
                p.n_trees = g.value("n_trees", p.n_trees);
                p.max_depth = g.value("max_depth", p.max_depth);
                p.features_per_split = g.value("features_per_split", p.features_per_split);
                p.bootstrap = g.value("bootstrap", p.bootstrap);
                cfg.cv_grid.push_back(p);
            }
        }
        cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
        if (j.contains("shap")) {
            const auto& s = j.at("shap");
            cfg.shap_background = s.value("background", cfg.shap_background);
            cfg.shap_permutations = s.value("permutations", cfg.shap_permutations);
            cfg.shap_explain_samples = s.value("explain_samples", cfg.shap_explain_samples);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config " + path + ": " + e.what());
    }
    return cfg;
}

bool maybe_dry_run(const GlobalOpts& g, const std::string& subcommand, nlohmann::json resolved) {
    if (!g.dry_run) return false;
    resolved["subcommand"] = subcommand;
    resolved["seed"] = g.seed;
    resolved["workers"] = g.workers;
    resolved["config"] = g.config;
    std::cout << resolved.dump(2) << "\n";
    return true;
}

Eigen::VectorXi predict_all(const RandomForest& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXi pred(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) pred[i] = model.predict(X.row(i));
    return pred;
}

nlohmann::json metrics_json(const Metrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
            {"tp", m.tp},               {"fp", m.fp},         {"tn", m.tn},
            {"fn", m.fn}};
}

// ---------------------------------------------------------------- scan

int cmd_scan(const GlobalOpts& g, const std::string& manifest_path, const std::string& catalog_arg,
             const std::string& signatures_arg, const std::string& out_dir, bool no_fingerprints) {
    if (maybe_dry_run(g, "scan",
                      {{"manifest", manifest_path},
                       {"catalog", catalog_arg},
                       {"signatures", signatures_arg},
                       {"out", out_dir},
                       {"fingerprints", !no_fingerprints}}))
        return 0;

    const PatternCatalog catalog = load_catalog_arg(catalog_arg);
    const SignatureDb signatures = load_signatures_arg(signatures_arg);
    const std::vector<ManifestEntry> manifest = load_manifest(manifest_path);
    if (manifest.empty()) throw EmptyCorpus("manifest has no samples: " + manifest_path);

    ScanOptions opts;
    opts.use_fingerprints = !no_fingerprints;

    fs::create_directories(out_dir);
    std::vector<std::string> outputs(manifest.size());
    parallel_for(manifest.size(), g.workers, [&](std::size_t i) {
        const SampleScan scan = scan_sample(manifest[i], catalog, signatures, opts);
        outputs[i] = report_to_json(evaluate(scan, catalog));
    });
    for (std::size_t i = 0; i < manifest.size(); ++i)
        write_file((fs::path(out_dir) / (manifest[i].id + ".json")).string(), outputs[i]);
    std::cerr << "scanned " << manifest.size() << " samples -> " << out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------- aggregate

int cmd_aggregate(const GlobalOpts& g, const std::string& reports_dir, const std::string& out_dir) {
    if (maybe_dry_run(g, "aggregate", {{"reports", reports_dir}, {"out", out_dir}})) return 0;

    if (!fs::is_directory(reports_dir)) throw IoError("not a directory: " + reports_dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(reports_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<CryptoReport> reports;
    reports.reserve(files.size());
    for (const auto& f : files) reports.push_back(report_from_json(read_file(f.string())));

    const CorpusStats stats = aggregate(reports);
    write_file((fs::path(out_dir) / "categories.csv").string(), categories_csv(stats));
    write_file((fs::path(out_dir) / "per10k.csv").string(), per10k_csv(stats));
    write_file((fs::path(out_dir) / "trends.csv").string(), trends_csv(stats));
    write_file((fs::path(out_dir) / "symmetric_schemes.csv").string(),
               symmetric_schemes_csv(stats));
    std::cerr << "aggregated " << reports.size() << " reports -> " << out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------- gen

int cmd_gen(const GlobalOpts& g, const std::vector<std::string>& profile_args, int n_per_profile,
            const std::string& out_root) {
    if (maybe_dry_run(g, "gen",
                      {{"profiles", profile_args}, {"n", n_per_profile}, {"out", out_root}}))
        return 0;

    std::vector<GenProfile> profiles;
    for (const auto& a : profile_args) profiles.push_back(load_profile_arg(a));
    const GeneratedCorpus corpus = generate_corpus(profiles, n_per_profile, g.seed, out_root,
                                                   g.workers);
    std::cerr << "generated " << profiles.size() * static_cast<std::size_t>(n_per_profile)
              << " samples under " << corpus.root << "\n";
    std::cout << corpus.manifest_path << "\n";
    return 0;
}

// ---------------------------------------------------------------- featurize

int cmd_featurize(const GlobalOpts& g, const std::string& manifest_path,
                  const std::string& reports_dir, const std::string& catalog_arg,
                  const std::string& signatures_arg, const std::string& out_path,
                  bool shuffle_labels) {
    if (maybe_dry_run(g, "featurize",
                      {{"manifest", manifest_path},
                       {"reports", reports_dir},
                       {"catalog", catalog_arg},
                       {"signatures", signatures_arg},
                       {"out", out_path},
                       {"shuffle_labels", shuffle_labels}}))
        return 0;
    if (manifest_path.empty() == reports_dir.empty())
        throw UsageError("featurize: provide exactly one of --manifest or --reports");

    const PatternCatalog catalog = load_catalog_arg(catalog_arg);
    const SignatureDb signatures = load_signatures_arg(signatures_arg);
    const FeatureCatalog fcat = FeatureCatalog::build(catalog, signatures);

    std::vector<CryptoReport> reports;
    if (!reports_dir.empty()) {
        if (!fs::is_directory(reports_dir)) throw IoError("not a directory: " + reports_dir);
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(reports_dir))
            if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) reports.push_back(report_from_json(read_file(f.string())));
    } else {
        const std::vector<ManifestEntry> manifest = load_manifest(manifest_path);
        if (manifest.empty()) throw EmptyCorpus("manifest has no samples: " + manifest_path);
        reports.resize(manifest.size());
        parallel_for(manifest.size(), g.workers, [&](std::size_t i) {
            reports[i] = evaluate(scan_sample(manifest[i], catalog, signatures), catalog);
        });
    }

    FeatureMatrix m = build_matrix(reports, fcat);
    if (shuffle_labels) {
        std::vector<int> labels(m.y.data(), m.y.data() + m.y.size());
        auto rng = make_rng(g.seed, 99); // distinct stream from the pipeline seeds
        std::shuffle(labels.begin(), labels.end(), rng);
        for (Eigen::Index i = 0; i < m.y.size(); ++i) m.y[i] = labels[static_cast<std::size_t>(i)];
    }
    write_file(out_path, matrix_to_csv(m));
    std::cerr << "featurized " << reports.size() << " samples (" << m.names.size()
              << " features) -> " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------- select

int cmd_select(const GlobalOpts& g, const std::string& features_path, const std::string& out_path,
               const std::string& out_matrix_path, const ExperimentConfig& cfg) {
    nlohmann::json resolved = experiment_config_json(cfg);
    resolved["features"] = features_path;
    resolved["out"] = out_path;
    resolved["out_matrix"] = out_matrix_path;
    if (maybe_dry_run(g, "select", std::move(resolved))) return 0;

    const FeatureMatrix m = matrix_from_csv(read_file(features_path));
    const SelectionResult pear = pearson_filter(m, cfg.pearson_threshold, derive_seed(g.seed, 2));
    const FeatureMatrix mp = pear.apply(m);
    BorutaOptions bo = cfg.boruta;
    bo.workers = g.workers;
    const SelectionResult bor = boruta(mp, bo, derive_seed(g.seed, 3));

    SelectionResult sel;
    sel.kept = bor.kept.empty() ? mp.names : bor.kept;
    sel.dropped_by_correlation = pear.dropped_by_correlation;
    sel.boruta_verdicts = bor.boruta_verdicts;
    sel.seed = g.seed;
    write_file(out_path, sel.to_json());
    if (!out_matrix_path.empty()) write_file(out_matrix_path, matrix_to_csv(sel.apply(m)));
    std::cerr << "selected " << sel.kept.size() << " of " << m.names.size() << " features -> "
              << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------- train

int cmd_train(const GlobalOpts& g, const std::string& features_path, const std::string& out_dir,
              ExperimentConfig cfg) {
    cfg.seed = g.seed;
    cfg.workers = g.workers;
    nlohmann::json resolved = experiment_config_json(cfg);
    resolved["features"] = features_path;
    resolved["out"] = out_dir;
    if (maybe_dry_run(g, "train", std::move(resolved))) return 0;

    const FeatureMatrix m = matrix_from_csv(read_file(features_path));
    const CryptoOnlyResult r = run_crypto_only(m, cfg);

    std::vector<std::string> selected = r.selection.kept;
    write_file((fs::path(out_dir) / "model.json").string(), r.model.to_json(selected));
    write_file((fs::path(out_dir) / "selection.json").string(), r.selection.to_json());

    nlohmann::json jm;
    jm["test"] = metrics_json(r.test_metrics);
    jm["cv_best"] = forest_params_json(r.cv.best);
    jm["cv_best_mean_f1"] = r.cv.best_mean_f1;
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& [p, scores] : r.cv.scores)
        folds.push_back({{"params", forest_params_json(p)}, {"fold_f1", scores}});
    jm["cv_scores"] = std::move(folds);
    jm["train_rows"] = r.train_rows;
    jm["test_rows"] = r.test_rows;
    write_file((fs::path(out_dir) / "metrics.json").string(), jm.dump(2) + "\n");

    write_file((fs::path(out_dir) / "global_shap.csv").string(), r.global.to_csv());
    write_file((fs::path(out_dir) / "local_example.json").string(),
               r.local_example.to_json(selected));

    std::cerr << "trained on " << r.train_rows.size() << " rows; test F1 = " << r.test_metrics.f1
              << " -> " << out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------- explain

int cmd_explain(const GlobalOpts& g, const std::string& model_path,
                const std::string& features_path, int row, int background_n, int permutations,
                bool exact, const std::string& out_path) {
    if (maybe_dry_run(g, "explain",
                      {{"model", model_path},
                       {"features", features_path},
                       {"row", row},
                       {"background", background_n},
                       {"permutations", permutations},
                       {"exact", exact},
                       {"out", out_path}}))
        return 0;

    const std::string model_text = read_file(model_path);
    const RandomForest model = RandomForest::from_json(model_text);
    FeatureMatrix m = matrix_from_csv(read_file(features_path));
    if (m.X.cols() != model.n_features()) {
        // a wider matrix is fine when the model recorded its feature names:
        // project onto exactly the columns it was trained on
        const nlohmann::json jm = nlohmann::json::parse(model_text);
        if (!jm.contains("feature_names"))
            throw DimensionMismatch("explain: matrix has " + std::to_string(m.X.cols()) +
                                    " features, model expects " +
                                    std::to_string(model.n_features()));
        SelectionResult sel;
        sel.kept = jm.at("feature_names").get<std::vector<std::string>>();
        m = sel.apply(m);
    }
    if (row < 0 || row >= m.X.rows())
        throw ValidationError("explain: row " + std::to_string(row) + " out of range (" +
                              std::to_string(m.X.rows()) + " rows)");

    std::vector<int> idx(static_cast<std::size_t>(m.X.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = make_rng(g.seed, 6);
    std::shuffle(idx.begin(), idx.end(), rng);
    const int n_bg = std::min<int>(background_n, static_cast<int>(idx.size()));
    Eigen::MatrixXd background(n_bg, m.X.cols());
    for (int i = 0; i < n_bg; ++i) background.row(i) = m.X.row(idx[static_cast<std::size_t>(i)]);

    const ModelFn fn = [&model](const Eigen::RowVectorXd& x) { return model.predict_proba(x); };
    const Explanation e = exact
                              ? shap_exact(fn, m.X.row(row), background)
                              : shap_sampling(fn, m.X.row(row), background, permutations,
                                              derive_seed(g.seed, 7 + row));
    const std::string out = e.to_json(m.names);
    if (out_path.empty())
        std::cout << out;
    else
        write_file(out_path, out);
    return 0;
}

// ---------------------------------------------------------------- enhance

int cmd_enhance(const GlobalOpts& g, const std::string& baseline_path,
                const std::string& manifest_path, const std::string& signatures_arg,
                const std::string& crypto_path, int n_trials, const std::string& out_dir,
                ExperimentConfig cfg) {
    cfg.seed = g.seed;
    cfg.workers = g.workers;
    nlohmann::json resolved = experiment_config_json(cfg);
    resolved["baseline"] = baseline_path;
    resolved["manifest"] = manifest_path;
    resolved["signatures"] = signatures_arg;
    resolved["features"] = crypto_path;
    resolved["trials"] = n_trials;
    resolved["out"] = out_dir;
    if (maybe_dry_run(g, "enhance", std::move(resolved))) return 0;
    if (baseline_path.empty() == manifest_path.empty())
        throw UsageError("enhance: provide exactly one of --baseline or --manifest");

    FeatureMatrix baseline;
    if (!baseline_path.empty()) {
        baseline = matrix_from_csv(read_file(baseline_path));
    } else {
        const SignatureDb signatures = load_signatures_arg(signatures_arg);
        const std::vector<ManifestEntry> manifest = load_manifest(manifest_path);
        baseline = baseline_matrix(manifest, signatures, default_baseline_prefixes(), g.workers);
        write_file((fs::path(out_dir) / "baseline_features.csv").string(),
                   matrix_to_csv(baseline));
    }
    const FeatureMatrix crypto = matrix_from_csv(read_file(crypto_path));

    const EnhancementResult res = run_enhancement(baseline, crypto, n_trials, g.seed, cfg);
    write_file((fs::path(out_dir) / "enhancement.json").string(), res.to_json());
    write_file((fs::path(out_dir) / "enhancement_summary.csv").string(), res.summary_csv());
    std::cerr << "mean dF1 over " << n_trials << " trials: " << res.mean_delta_f1 << " -> "
              << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crypto API usage scanner and classifier pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed (fixed default, never time-based)")
        ->capture_default_str();
    app.add_option("--workers", g.workers, "worker thread count")
        ->capture_default_str()
        ->check(CLI::Range(1, 256));
    app.add_option("--config", g.config, "JSON config file for pipeline stages");
    app.add_flag("--dry-run", g.dry_run, "print the resolved effective config and exit");

    // scan
    auto* scan = app.add_subcommand("scan", "scan samples listed in a manifest");
    std::string scan_manifest, scan_catalog = "default", scan_signatures = "default", scan_out;
    bool scan_no_fp = false;
    scan->add_option("--manifest", scan_manifest, "manifest JSONL")->required();
    scan->add_option("--catalog", scan_catalog, "pattern catalog JSON or 'default'");
    scan->add_option("--signatures", scan_signatures, "signature DB JSON or 'default'");
    scan->add_option("--out", scan_out, "output directory for per-sample reports")->required();
    scan->add_flag("--no-fingerprints", scan_no_fp, "disable structural package fingerprinting");

    // aggregate
    auto* agg = app.add_subcommand("aggregate", "aggregate per-sample reports into corpus CSVs");
    std::string agg_reports, agg_out;
    agg->add_option("reports", agg_reports, "directory of per-sample report JSONs")->required();
    agg->add_option("--out", agg_out, "output directory")->required();

    // gen
    auto* gen = app.add_subcommand("gen", "generate a seeded synthetic corpus");
    std::vector<std::string> gen_profiles;
    int gen_n = 500;
    std::string gen_out;
    gen->add_option("--profile", gen_profiles,
                    "profile JSON path or built-in name (malicious-2012, benign-2016); repeatable")
        ->required();
    gen->add_option("--n", gen_n, "samples per profile")->capture_default_str();
    gen->add_option("--out", gen_out, "corpus root directory")->required();

    // featurize
    auto* feat = app.add_subcommand("featurize", "build the feature matrix CSV");
    std::string feat_manifest, feat_reports, feat_catalog = "default",
                feat_signatures = "default", feat_out;
    bool feat_shuffle = false;
    feat->add_option("--manifest", feat_manifest, "manifest JSONL (scans samples)");
    feat->add_option("--reports", feat_reports, "directory of pre-scanned report JSONs");
    feat->add_option("--catalog", feat_catalog, "pattern catalog JSON or 'default'");
    feat->add_option("--signatures", feat_signatures, "signature DB JSON or 'default'");
    feat->add_option("--out", feat_out, "output CSV path")->required();
    feat->add_flag("--shuffle-labels", feat_shuffle, "randomly permute labels (control runs)");

    // select
    auto* sel = app.add_subcommand("select", "Pearson + Boruta feature selection");
    std::string sel_features, sel_out, sel_out_matrix;
    sel->add_option("--features", sel_features, "feature matrix CSV")->required();
    sel->add_option("--out", sel_out, "selection JSON output")->required();
    sel->add_option("--out-matrix", sel_out_matrix, "optional reduced matrix CSV");

    // train
    auto* train = app.add_subcommand("train", "full pipeline: split, select, CV, train, explain");
    std::string train_features, train_out;
    train->add_option("--features", train_features, "feature matrix CSV")->required();
    train->add_option("--out", train_out, "output directory")->required();

    // explain
    auto* expl = app.add_subcommand("explain", "Shapley explanation for one sample");
    std::string expl_model, expl_features, expl_out;
    int expl_row = 0, expl_bg = 100, expl_perm = 200;
    bool expl_exact = false;
    expl->add_option("--model", expl_model, "model JSON")->required();
    expl->add_option("--features", expl_features, "feature matrix CSV (row source + background)")
        ->required();
    expl->add_option("--row", expl_row, "row index to explain")->capture_default_str();
    expl->add_option("--background", expl_bg, "background sample count")->capture_default_str();
    expl->add_option("--permutations", expl_perm, "sampling permutations")->capture_default_str();
    expl->add_flag("--exact", expl_exact, "exact enumeration (max 20 features)");
    expl->add_option("--out", expl_out, "output JSON path (default: stdout)");

    // enhance
    auto* enh = app.add_subcommand("enhance", "baseline-enhancement experiment");
    std::string enh_baseline, enh_manifest, enh_signatures = "default", enh_features, enh_out;
    int enh_trials = 50;
    enh->add_option("--baseline", enh_baseline, "baseline feature matrix CSV");
    enh->add_option("--manifest", enh_manifest, "manifest JSONL (builds the baseline matrix)");
    enh->add_option("--signatures", enh_signatures, "signature DB JSON or 'default'");
    enh->add_option("--features", enh_features, "crypto feature matrix CSV (selected columns)")
        ->required();
    enh->add_option("--trials", enh_trials, "number of 10-feature baseline trials")
        ->capture_default_str();
    enh->add_option("--out", enh_out, "output directory")->required();

    auto* ver = app.add_subcommand("version", "print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion") {
            return app.exit(e);
        }
        app.exit(e);
        return 1;
    }

    try {
        const ExperimentConfig cfg = load_experiment_config(g.config);
        if (ver->parsed()) {
            std::cout << "cryptoscan " << kVersion << "\n";
            return 0;
        }
        if (scan->parsed())
            return cmd_scan(g, scan_manifest, scan_catalog, scan_signatures, scan_out, scan_no_fp);
        if (agg->parsed()) return cmd_aggregate(g, agg_reports, agg_out);
        if (gen->parsed()) return cmd_gen(g, gen_profiles, gen_n, gen_out);
        if (feat->parsed())
            return cmd_featurize(g, feat_manifest, feat_reports, feat_catalog, feat_signatures,
                                 feat_out, feat_shuffle);
        if (sel->parsed()) return cmd_select(g, sel_features, sel_out, sel_out_matrix, cfg);
        if (train->parsed()) return cmd_train(g, train_features, train_out, cfg);
        if (expl->parsed())
            return cmd_explain(g, expl_model, expl_features, expl_row, expl_bg, expl_perm,
                               expl_exact, expl_out);
        if (enh->parsed())
            return cmd_enhance(g, enh_baseline, enh_manifest, enh_signatures, enh_features,
                               enh_trials, enh_out, cfg);
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
