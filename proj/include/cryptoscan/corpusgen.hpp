#pragma once

#include "cryptoscan/catalog.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cryptoscan {

struct GenProfile {
    std::string name;   // used in sample ids
    std::string label;  // benign | malicious
    int year = 0;
    double crypto_free_prob = 0.0;
    std::map<std::string, double> primitive_intensity; // primitive -> expected calls/sample
    std::map<std::string, double> obfuscation_prob;    // category name -> probability
    double explicit_mode_prob = 0.3; // symmetric literal carries /MODE/PADDING
    std::vector<std::string> third_party_packages;
    double third_party_prob = 0.0;
    std::vector<std::string> native_libs;
    double native_prob = 0.0;
    std::map<std::string, double> baseline_intensity;  // dotted API prefix -> calls/sample
    double decoy_prob = 0.5;
};

GenProfile load_profile(const std::string& path);
std::string profile_to_json(const GenProfile& p);

// Headline contrasts baked in: malware hashes with MD5 and favors DES before
// 2015; goodware is AES-dominant.
GenProfile default_malicious_2012();
GenProfile default_benign_2016();
GenProfile default_profile(const std::string& name); // by the two names above

struct GeneratedCorpus {
    std::string root;
    std::string manifest_path;
    std::uint64_t seed = 0;
};

GeneratedCorpus generate_corpus(const std::vector<GenProfile>& profiles, int n_per_profile,
                                std::uint64_t seed, const std::string& out_root,
                                int workers = 1);

// Expected resolved (non-obfuscated) call sites for one primitive across the
// whole profile cohort, with the matching 1-sigma width; drives the
// generator<->scanner closed-loop check.
struct ExpectedCount {
    double mean = 0.0;
    double sigma = 0.0;
};

ExpectedCount expected_resolved_calls(const GenProfile& p, const std::string& primitive,
                                      int n_samples, const PatternCatalog& catalog);

} // namespace cryptoscan
