#include "cryptoscan/corpusgen.hpp"
#include "cryptoscan/errors.hpp"
#include "cryptoscan/parallel.hpp"
#include "cryptoscan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace cryptoscan {

using nlohmann::json;

namespace {

std::string class_for_category(Category c) {
    switch (c) {
        case Category::Hash: return "MessageDigest";
        case Category::SymmetricEnc: return "Cipher";
        case Category::PublicKeyEnc: return "Cipher";
        case Category::DigitalSignature: return "Signature";
        case Category::Mac: return "Mac";
        case Category::Prng: return "SecureRandom";
        case Category::KeyAgreement: return "KeyAgreement";
        default: return "KeyGenerator";
    }
}

std::string package_for_class(const std::string& simple) {
    static const char* kJavax[] = {"Cipher", "Mac", "KeyAgreement", "KeyGenerator", "SecretKeyFactory"};
    for (const char* c : kJavax)
        if (simple == c) return "javax.crypto";
    return "java.security";
}

struct CallPlan {
    std::string api_class;
    std::string literal; // empty => obfuscated
};

} // namespace

GenProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open profile: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("profile " + path + ": " + e.what());
    }
    GenProfile p;
    p.name = j.at("name").get<std::string>();
    p.label = j.at("label").get<std::string>();
    p.year = j.at("year").get<int>();
    p.crypto_free_prob = j.value("crypto_free_prob", 0.0);
    if (j.contains("primitive_intensity"))
        p.primitive_intensity = j.at("primitive_intensity").get<std::map<std::string, double>>();
    if (j.contains("obfuscation_prob"))
        p.obfuscation_prob = j.at("obfuscation_prob").get<std::map<std::string, double>>();
    p.explicit_mode_prob = j.value("explicit_mode_prob", 0.3);
    if (j.contains("third_party_packages"))
        p.third_party_packages = j.at("third_party_packages").get<std::vector<std::string>>();
    p.third_party_prob = j.value("third_party_prob", 0.0);
    if (j.contains("native_libs"))
        p.native_libs = j.at("native_libs").get<std::vector<std::string>>();
    p.native_prob = j.value("native_prob", 0.0);
    if (j.contains("baseline_intensity"))
        p.baseline_intensity = j.at("baseline_intensity").get<std::map<std::string, double>>();
    p.decoy_prob = j.value("decoy_prob", 0.5);
    for (const auto& [cat, prob] : p.obfuscation_prob) {
        if (!category_from_name(cat)) throw ValidationError("profile: unknown category " + cat);
        if (prob < 0.0 || prob > 1.0) throw ValidationError("profile: probability out of range");
    }
    for (const auto& [prim, lam] : p.primitive_intensity)
        if (lam < 0.0) throw ValidationError("profile: negative intensity for " + prim);
    if (p.crypto_free_prob < 0.0 || p.crypto_free_prob > 1.0)
        throw ValidationError("profile: crypto_free_prob out of range");
    return p;
}

std::string profile_to_json(const GenProfile& p) {
    json j;
    j["name"] = p.name;
    j["label"] = p.label;
    j["year"] = p.year;
    j["crypto_free_prob"] = p.crypto_free_prob;
    j["primitive_intensity"] = p.primitive_intensity;
    j["obfuscation_prob"] = p.obfuscation_prob;
    j["explicit_mode_prob"] = p.explicit_mode_prob;
    j["third_party_packages"] = p.third_party_packages;
    j["third_party_prob"] = p.third_party_prob;
    j["native_libs"] = p.native_libs;
    j["native_prob"] = p.native_prob;
    j["baseline_intensity"] = p.baseline_intensity;
    j["decoy_prob"] = p.decoy_prob;
    return j.dump(2) + "\n";
}

GenProfile default_malicious_2012() {
    GenProfile p;
    p.name = "malicious-2012";
    p.label = "malicious";
    p.year = 2012;
    p.crypto_free_prob = 0.05;
    p.primitive_intensity = {
        {"MD5", 4.0},      {"SHA-1", 0.5},  {"SHA-256", 0.05},
        {"DES", 2.0},      {"AES", 0.3},    {"DESede", 0.03},
        {"RSA", 0.10},     {"SHA1withRSA", 0.12},
        {"HmacSHA1", 0.15}, {"SHA1PRNG", 0.50}, {"ECDH", 0.01},
    };
    p.obfuscation_prob = {
        {"Hash", 0.17},            {"SymmetricEnc", 0.26},
        {"PublicKeyEnc", 0.26},    {"DigitalSignature", 0.80},
        {"MAC", 0.46},             {"PRNG", 0.07},
        {"KeyAgreement", 0.30},    {"Other", 0.20},
    };
    p.explicit_mode_prob = 0.25;
    p.third_party_packages = {"org/bouncycastle/crypto", "com/google/gson"};
    p.third_party_prob = 0.25;
    p.native_libs = {};
    p.native_prob = 0.0;
    p.baseline_intensity = {
        {"android.telephony", 2.2}, {"android.app.admin", 0.4},
        {"java.net", 1.4},          {"android.widget", 0.6},
        {"java.io", 1.0},           {"android.view", 0.4},
    };
    return p;
}

GenProfile default_benign_2016() {
    GenProfile p;
    p.name = "benign-2016";
    p.label = "benign";
    p.year = 2016;
    p.crypto_free_prob = 0.45;
    p.primitive_intensity = {
        {"MD5", 0.3},      {"SHA-1", 0.5},   {"SHA-256", 0.35},
        {"AES", 1.6},      {"DES", 0.10},    {"DESede", 0.05},
        {"RSA", 0.15},     {"SHA256withRSA", 0.10},
        {"HmacSHA256", 0.10}, {"SHA1PRNG", 0.10}, {"DH", 0.01},
    };
    p.obfuscation_prob = {
        {"Hash", 0.05},            {"SymmetricEnc", 0.10},
        {"PublicKeyEnc", 0.10},    {"DigitalSignature", 0.20},
        {"MAC", 0.10},             {"PRNG", 0.03},
        {"KeyAgreement", 0.10},    {"Other", 0.10},
    };
    p.explicit_mode_prob = 0.45;
    p.third_party_packages = {"net/sqlcipher", "com/google/gson", "com/squareup/okhttp"};
    p.third_party_prob = 0.5;
    p.native_libs = {"openssl"};
    p.native_prob = 0.02;
    p.baseline_intensity = {
        {"android.telephony", 0.15}, {"android.app.admin", 0.02},
        {"java.net", 1.2},           {"android.widget", 2.4},
        {"java.io", 1.2},            {"android.view", 2.0},
    };
    return p;
}

GenProfile default_profile(const std::string& name) {
    if (name == "malicious-2012") return default_malicious_2012();
    if (name == "benign-2016") return default_benign_2016();
    throw ValidationError("unknown default profile: " + name);
}

namespace {

struct SampleFiles {
    // relative path -> content
    std::vector<std::pair<std::string, std::string>> files;
};

SampleFiles generate_sample(const GenProfile& p, const PatternCatalog& catalog,
                            std::uint64_t seed, std::uint64_t global_index) {
    auto rng = make_rng(seed, global_index);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    SampleFiles out;

    const bool crypto_free = uni(rng) < p.crypto_free_prob;

    std::vector<CallPlan> calls;
    if (!crypto_free) {
        for (const auto& [prim_name, lambda] : p.primitive_intensity) {
            const PrimitiveSpec* prim = catalog.find_primitive(prim_name);
            if (!prim) throw ValidationError("profile references unknown primitive: " + prim_name);
            const int k = sample_poisson(rng, lambda);
            const auto obf_it = p.obfuscation_prob.find(category_name(prim->category));
            const double q = obf_it == p.obfuscation_prob.end() ? 0.0 : obf_it->second;
            for (int i = 0; i < k; ++i) {
                CallPlan cp;
                cp.api_class = class_for_category(prim->category);
                if (uni(rng) >= q) {
                    cp.literal = prim->name;
                    if (cp.api_class == "Cipher" && prim->category == Category::SymmetricEnc &&
                        uni(rng) < p.explicit_mode_prob) {
                        cp.literal += uni(rng) < 0.7 ? "/CBC/PKCS5Padding" : "/ECB/PKCS5Padding";
                    }
                }
                calls.push_back(std::move(cp));
            }
        }
    }

    const int n_files = 1 + static_cast<int>(rng() % 3);
    std::vector<std::vector<CallPlan>> per_file(n_files);
    for (auto& c : calls) per_file[rng() % n_files].push_back(std::move(c));

    std::vector<int> baseline_calls;
    std::vector<std::string> baseline_prefixes;
    for (const auto& [prefix, lambda] : p.baseline_intensity) {
        baseline_prefixes.push_back(prefix);
        baseline_calls.push_back(sample_poisson(rng, lambda));
    }

    const bool inject_third_party = uni(rng) < p.third_party_prob && !p.third_party_packages.empty();
    const std::size_t tp_pick = p.third_party_packages.empty() ? 0 : rng() % p.third_party_packages.size();
    const bool inject_native = uni(rng) < p.native_prob && !p.native_libs.empty();
    const std::size_t native_pick = p.native_libs.empty() ? 0 : rng() % p.native_libs.size();
    const bool with_decoys = uni(rng) < p.decoy_prob;

    for (int fi = 0; fi < n_files; ++fi) {
        std::ostringstream body;
        std::set<std::string> imports;
        int var = 0;
        for (const auto& c : per_file[fi]) {
            imports.insert(package_for_class(c.api_class) + "." + c.api_class);
            if (c.literal.empty()) {
                body << "        " << c.api_class << " v" << var << " = " << c.api_class
                     << ".getInstance(pick(" << var << "));\n";
            } else {
                body << "        " << c.api_class << " v" << var << " = " << c.api_class
                     << ".getInstance(\"" << c.literal << "\");\n";
            }
            ++var;
        }
        if (fi == 0) {
            for (std::size_t b = 0; b < baseline_prefixes.size(); ++b)
                for (int i = 0; i < baseline_calls[b]; ++i)
                    body << "        Object b" << var++ << " = " << baseline_prefixes[b]
                         << ".Api.call(" << i << ");\n";
            if (inject_native)
                body << "        System.loadLibrary(\"" << p.native_libs[native_pick] << "\");\n";
        }
        if (with_decoys && fi == 0) {
            body << "        // legacy path used Cipher.getInstance(\"DES\") before the rewrite\n";
            body << "        String doc" << var++
                 << " = \"MessageDigest.getInstance(\\\"MD5\\\") is documented here\";\n";
            body << "        /* Mac.getInstance(\"HmacSHA1\")\n           Signature.getInstance(\"SHA1withRSA\") */\n";
        }

        std::ostringstream file;
        file << "package com.generated.app;\n\n";
        for (const auto& imp : imports) file << "import " << imp << ";\n";
        if (!imports.empty()) file << "\n";
        file << "public class Worker" << fi << " {\n";
        file << "    private static String pick(int i) { return Integer.toHexString(i); }\n\n";
        file << "    public void run() throws Exception {\n";
        file << body.str();
        file << "        return;\n";
        file << "    }\n";
        file << "}\n";
        out.files.push_back({"com/generated/app/Worker" + std::to_string(fi) + ".java", file.str()});
    }

    if (inject_third_party) {
        const std::string& pkg = p.third_party_packages[tp_pick];
        std::string dotted = pkg;
        std::replace(dotted.begin(), dotted.end(), '/', '.');
        std::ostringstream file;
        file << "package " << dotted << ";\n\n";
        file << "import javax.crypto.Cipher;\n\n";
        file << "public class Vendor {\n";
        file << "    public void init() throws Exception {\n";
        file << "        Cipher c = Cipher.getInstance(\"DES\");\n";
        file << "        Cipher d = Cipher.getInstance(\"AES/CBC/PKCS5Padding\");\n";
        file << "    }\n";
        file << "}\n";
        out.files.push_back({pkg + "/Vendor.java", file.str()});
    }
    return out;
}

} // namespace

GeneratedCorpus generate_corpus(const std::vector<GenProfile>& profiles, int n_per_profile,
                                std::uint64_t seed, const std::string& out_root, int workers) {
    if (n_per_profile <= 0) throw ValidationError("generate_corpus: n_per_profile must be positive");
    const PatternCatalog catalog = default_catalog();
    fs::create_directories(out_root);

    struct Job {
        const GenProfile* profile;
        std::uint64_t global_index;
        std::string id;
    };
    std::vector<Job> jobs;
    for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
        for (int i = 0; i < n_per_profile; ++i) {
            Job j;
            j.profile = &profiles[pi];
            j.global_index = pi * static_cast<std::uint64_t>(n_per_profile) + i;
            std::ostringstream id;
            id << profiles[pi].name << "-" << std::setw(5) << std::setfill('0') << i;
            j.id = id.str();
            jobs.push_back(std::move(j));
        }
    }

    parallel_for(jobs.size(), workers, [&](std::size_t ji) {
        const Job& job = jobs[ji];
        const SampleFiles sf = generate_sample(*job.profile, catalog, seed, job.global_index);
        const fs::path sample_root = fs::path(out_root) / job.id;
        for (const auto& [rel, content] : sf.files) {
            const fs::path target = sample_root / rel;
            fs::create_directories(target.parent_path());
            std::ofstream f(target, std::ios::binary);
            if (!f) throw IoError("cannot write " + target.string());
            f << content;
        }
        if (sf.files.empty()) fs::create_directories(sample_root);
    });

    GeneratedCorpus gc;
    gc.root = out_root;
    gc.seed = seed;
    gc.manifest_path = (fs::path(out_root) / "manifest.jsonl").string();
    std::ofstream mf(gc.manifest_path, std::ios::binary);
    if (!mf) throw IoError("cannot write manifest: " + gc.manifest_path);
    for (const auto& job : jobs) {
        json j;
        j["id"] = job.id;
        j["label"] = job.profile->label;
        j["year"] = job.profile->year;
        j["path"] = job.id; // relative to the manifest's directory
        j["vt_flags"] = job.profile->label == "malicious" ? 7 : 0;
        j["market"] = "synthetic";
        mf << j.dump() << "\n";
    }
    return gc;
}

ExpectedCount expected_resolved_calls(const GenProfile& p, const std::string& primitive,
                                      int n_samples, const PatternCatalog& catalog) {
    const PrimitiveSpec* prim = catalog.find_primitive(primitive);
    if (!prim) throw ValidationError("unknown primitive: " + primitive);
    auto it = p.primitive_intensity.find(prim->name);
    const double lambda = it == p.primitive_intensity.end() ? 0.0 : it->second;
    const auto obf_it = p.obfuscation_prob.find(category_name(prim->category));
    const double q = obf_it == p.obfuscation_prob.end() ? 0.0 : obf_it->second;
    const double c = 1.0 - p.crypto_free_prob;
    const double m = lambda * (1.0 - q); // thinned Poisson mean per crypto-bearing sample
    ExpectedCount e;
    e.mean = n_samples * c * m;
    // per-sample: Bernoulli(c) mixture of Poisson(m) -> var = c*m + c*(1-c)*m^2
    e.sigma = std::sqrt(n_samples * (c * m + c * (1.0 - c) * m * m));
    return e;
}

} // namespace cryptoscan
