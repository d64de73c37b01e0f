#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

const std::string& cli_path() {
    static const std::string path = [] {
        const char* p = std::getenv("CRYPTOSCAN_CLI");
        REQUIRE_MESSAGE(p != nullptr, "CRYPTOSCAN_CLI must point at the cryptoscan binary");
        return std::string(p);
    }();
    return path;
}

RunResult run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fresh_dir(const std::string& name) {
    const std::string dir = "/tmp/cryptoscan_cli_test/" + name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open ", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture_manifest() {
    return std::string(DATA_DIR) + "/fixtures/corpus12/manifest.jsonl";
}

// relative-order-insensitive digest of a directory tree's bytes
std::string tree_digest(const std::string& root) {
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root).generic_string());
    std::sort(files.begin(), files.end());
    std::string digest;
    for (const auto& f : files)
        digest += f + ":" + std::to_string(std::hash<std::string>{}(slurp(root + "/" + f))) + ";";
    return digest;
}

} // namespace

TEST_CASE("version prints a semver and exits 0") {
    const RunResult r = run_cli("version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("scan").exit_code == 1);             // missing required options
    CHECK(run_cli("featurize --out /tmp/x.csv").exit_code == 1); // neither input source
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("data errors exit 2") {
    const std::string dir = fresh_dir("dataerr");
    const RunResult r =
        run_cli("scan --manifest /nonexistent/m.jsonl --out " + dir);
    CHECK(r.exit_code == 2);
    CHECK(!r.output.empty());
}

TEST_CASE("scan on the fixture corpus emits one valid report per sample") {
    const std::string out = fresh_dir("scan");
    const RunResult r = run_cli("scan --manifest " + fixture_manifest() + " --out " + out);
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);

    int reports = 0;
    for (const auto& e : fs::directory_iterator(out)) {
        if (e.path().extension() != ".json") continue;
        ++reports;
        const nlohmann::json j = nlohmann::json::parse(slurp(e.path().string()));
        CHECK(j.contains("id"));
        CHECK(j.contains("categories"));
        CHECK(j.contains("classes"));
    }
    CHECK(reports == 12);

    // s02 spot check: 6 call sites, 2 obfuscated Ciphers
    const nlohmann::json s02 = nlohmann::json::parse(slurp(out + "/s02.json"));
    std::int64_t sites = 0, obf = 0;
    for (const auto& c : s02.at("categories")) {
        sites += c.at("call_sites").get<std::int64_t>();
        obf += c.at("obfuscated").get<std::int64_t>();
    }
    CHECK(sites == 6);
    CHECK(obf == 2);
}

TEST_CASE("aggregate produces the fixture per-10k table") {
    const std::string scans = fresh_dir("agg_scans");
    REQUIRE(run_cli("scan --manifest " + fixture_manifest() + " --out " + scans).exit_code == 0);

    const std::string out = fresh_dir("agg_out");
    const RunResult r = run_cli("aggregate " + scans + " --out " + out);
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);

    const std::string p10k = slurp(out + "/per10k.csv");
    // 2012 malicious: 14 sites / 4 samples; 2016 malicious: 8 / 3; overall 30 / 12
    CHECK(p10k.find("2012,malicious,4,14,35000") != std::string::npos);
    CHECK(p10k.find("2016,malicious,3,8,26666") != std::string::npos);
    CHECK(p10k.find("all,all,12,30,25000") != std::string::npos);

    const std::string cats = slurp(out + "/categories.csv");
    CHECK(cats.find("Hash,8,") != std::string::npos);
    CHECK(fs::exists(out + "/trends.csv"));
    CHECK(fs::exists(out + "/symmetric_schemes.csv"));
}

TEST_CASE("--dry-run prints the resolved configuration and touches nothing") {
    const std::string out = "/tmp/cryptoscan_cli_test/neverwritten";
    fs::remove_all(out);
    const RunResult r = run_cli("scan --manifest " + fixture_manifest() + " --out " + out +
                                " --dry-run");
    CHECK(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.output);
    CHECK(j.at("subcommand") == "scan");
    CHECK(j.at("out") == out);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("gen then scan round-trips; workers do not change the bytes") {
    const std::string g1 = fresh_dir("gen_w1");
    const std::string g8 = fresh_dir("gen_w8");
    const RunResult r1 = run_cli("gen --profile malicious-2012 --profile benign-2016 --n 5 "
                                 "--seed 21 --out " + g1 + " --workers 1");
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    const RunResult r8 = run_cli("gen --profile malicious-2012 --profile benign-2016 --n 5 "
                                 "--seed 21 --out " + g8 + " --workers 8");
    REQUIRE(r8.exit_code == 0);
    CHECK(tree_digest(g1) == tree_digest(g8));

    // stdout reports the manifest path
    CHECK(r1.output.find("manifest.jsonl") != std::string::npos);

    const std::string s1 = fresh_dir("scan_w1");
    const std::string s8 = fresh_dir("scan_w8");
    REQUIRE(run_cli("scan --manifest " + g1 + "/manifest.jsonl --out " + s1 +
                    " --workers 1").exit_code == 0);
    REQUIRE(run_cli("scan --manifest " + g1 + "/manifest.jsonl --out " + s8 +
                    " --workers 8").exit_code == 0);
    CHECK(tree_digest(s1) == tree_digest(s8));
}

TEST_CASE("featurize writes a 300-column matrix; shuffle keeps the label histogram") {
    const std::string scans = fresh_dir("feat_scans");
    REQUIRE(run_cli("scan --manifest " + fixture_manifest() + " --out " + scans).exit_code == 0);

    const std::string out = fresh_dir("feat_out");
    const RunResult r = run_cli("featurize --reports " + scans + " --out " + out + "/m.csv");
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);

    const std::string csv = slurp(out + "/m.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(std::count(header.begin(), header.end(), ',') == 300); // label + 300 features
    int rows = 0;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 12);

    // shuffled labels: same multiset of labels, different assignment
    const RunResult rs = run_cli("featurize --reports " + scans + " --out " + out +
                                 "/s.csv --shuffle-labels --seed 4");
    REQUIRE(rs.exit_code == 0);
    auto labels = [](const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::getline(in, line); // header; label is the last column
        std::string all;
        int ones = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const std::string lab = line.substr(line.rfind(',') + 1);
            all += lab;
            ones += lab == "1";
        }
        return std::make_pair(all, ones);
    };
    const auto [orig, ones_orig] = labels(csv);
    const auto [shuf, ones_shuf] = labels(slurp(out + "/s.csv"));
    CHECK(ones_orig == ones_shuf);
    CHECK(orig != shuf);
}

TEST_CASE("the select/train/explain/enhance chain runs end to end on a small corpus") {
    const std::string gen = fresh_dir("pipe_gen");
    REQUIRE(run_cli("gen --profile malicious-2012 --profile benign-2016 --n 40 --seed 5 --out " +
                    gen).exit_code == 0);
    const std::string scans = fresh_dir("pipe_scans");
    REQUIRE(run_cli("scan --manifest " + gen + "/manifest.jsonl --out " + scans +
                    " --workers 2").exit_code == 0);
    const std::string work = fresh_dir("pipe_work");
    // --manifest keeps row order aligned with the manifest, which enhance needs
    REQUIRE(run_cli("featurize --manifest " + gen + "/manifest.jsonl --out " + work +
                    "/m.csv --workers 2").exit_code == 0);

    const RunResult sel = run_cli("select --features " + work + "/m.csv --out " + work +
                                  "/sel.json --out-matrix " + work + "/sel.csv --seed 5");
    REQUIRE_MESSAGE(sel.exit_code == 0, sel.output);
    const nlohmann::json sj = nlohmann::json::parse(slurp(work + "/sel.json"));
    CHECK(!sj.at("kept").empty());

    const RunResult tr = run_cli("train --features " + work + "/m.csv --out " + work +
                                 "/model --seed 5");
    REQUIRE_MESSAGE(tr.exit_code == 0, tr.output);
    for (const char* f : {"model.json", "selection.json", "metrics.json", "global_shap.csv",
                          "local_example.json"})
        CHECK_MESSAGE(fs::exists(work + "/model/" + f), f);
    const nlohmann::json metrics = nlohmann::json::parse(slurp(work + "/model/metrics.json"));
    CHECK(metrics.at("test").at("f1").get<double>() > 0.5);

    // the full matrix works too: explain projects onto the model's features
    const RunResult ex = run_cli("explain --model " + work + "/model/model.json --features " +
                                 work + "/m.csv --row 0 --background 20 --permutations 30 "
                                 "--out " + work + "/exp.json --seed 5");
    REQUIRE_MESSAGE(ex.exit_code == 0, ex.output);
    const nlohmann::json ej = nlohmann::json::parse(slurp(work + "/exp.json"));
    CHECK(ej.contains("phi"));
    CHECK(ej.contains("base_value"));

    const RunResult en = run_cli("enhance --manifest " + gen + "/manifest.jsonl --features " +
                                 work + "/sel.csv --trials 3 --out " + work + "/enh --seed 5");
    REQUIRE_MESSAGE(en.exit_code == 0, en.output);
    const nlohmann::json enh = nlohmann::json::parse(slurp(work + "/enh/enhancement.json"));
    CHECK(enh.at("trials").size() == 3);
}
