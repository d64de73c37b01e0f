#pragma once

#include "cryptoscan/catalog.hpp"
#include "cryptoscan/libfilter.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cryptoscan {

struct SourceClass {
    std::string path;         // file path on disk
    std::string package_path; // slash-separated package
    ClassOrigin origin = ClassOrigin::User;
    std::string text;
};

struct CallSite {
    std::string file;
    int line = 0; // 1-based
    int column = 0;
    std::string api_class;
    bool obfuscated = false;           // argument was not a single string literal
    std::string raw_arg;               // literal contents; empty when obfuscated/absent
    std::string primitive;             // canonical name, empty => Unknown
    Category category = Category::Other;
    std::optional<CipherMode> mode;    // Cipher literals only
    std::optional<CipherPadding> padding;
};

struct ImportRecord {
    std::string file;
    std::string imported_class; // fully qualified
    bool wildcard = false;
};

// Replaces // and /* */ comments with spaces; string and char literal
// contents and the line count are preserved.
std::string strip_comments(const std::string& text);

std::pair<std::vector<CallSite>, std::vector<ImportRecord>>
scan_class(const SourceClass& cls, const PatternCatalog& catalog);

struct ManifestEntry {
    std::string id;
    std::string label; // benign | malicious
    int year = 0;
    std::string path;
    int vt_flags = 0;
    std::string market;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);

bool is_malicious(const ManifestEntry& e, bool strict_vt = false);

struct SampleScan {
    ManifestEntry sample;
    std::vector<CallSite> call_sites; // sorted by (file, line, column)
    std::vector<ImportRecord> imports;
    CryptoLibDetection libs;
    int total_classes = 0;
    int user_classes = 0;
    int third_party_classes = 0;
    int system_classes = 0;
    int skipped_classes = 0;
};

struct ScanOptions {
    bool use_fingerprints = true;
};

SampleScan scan_sample(const ManifestEntry& sample, const PatternCatalog& catalog,
                       const SignatureDb& signatures, const ScanOptions& opts = {});

// Heuristic per-class method count used for package fingerprinting.
int count_methods(const std::string& stripped_text);

} // namespace cryptoscan
