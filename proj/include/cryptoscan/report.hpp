#pragma once

#include "cryptoscan/catalog.hpp"
#include "cryptoscan/scanner.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cryptoscan {

constexpr int kNumCategories = 9; // the eight categories plus Unresolved
constexpr int kReportSchemaVersion = 1;

struct CategoryCounts {
    std::int64_t call_sites = 0;
    std::int64_t obfuscated = 0;
    std::int64_t unknown = 0; // literal argument, unrecognized primitive
    std::map<std::string, std::int64_t> primitives; // resolved only
};

struct ClassCtorCounts {
    std::int64_t total = 0;
    std::int64_t obfuscated = 0;
};

struct CryptoReport {
    std::string id;
    std::string label;
    int year = 0;

    std::array<CategoryCounts, kNumCategories> categories; // indexed by Category
    std::map<std::string, ClassCtorCounts> class_ctors;    // by API class simple name
    std::map<std::string, std::int64_t> transformations;   // "AES/CBC/PKCS5" etc., Cipher literals
    std::map<std::string, std::int64_t> imports;           // by imported class simple name
    std::map<std::string, std::int64_t> wildcard_imports;  // by package
    std::array<std::int64_t, kNumCategories> importing_classes{}; // files importing a class of the category

    std::set<std::string> java_libs;
    std::set<std::string> native_libs;

    int total_classes = 0;
    int user_classes = 0;
    int third_party_classes = 0;
    int system_classes = 0;
    int skipped_classes = 0;

    std::int64_t total_call_sites() const;
    std::int64_t total_imports() const;
    std::int64_t unique_imports() const;
    bool has_crypto() const { return total_call_sites() > 0 || total_imports() > 0; }
    bool has_third_party() const { return third_party_classes > 0; }
};

// Import-side category of a JCA class; Cipher imports count as symmetric use.
Category import_category(const std::string& simple_name, const PatternCatalog& catalog);

CryptoReport evaluate(const SampleScan& scan, const PatternCatalog& catalog);

std::string report_to_json(const CryptoReport& r);
CryptoReport report_from_json(const std::string& text);

struct GroupStats {
    int year = 0;
    std::string label; // empty for the overall group
    std::int64_t samples = 0;
    std::int64_t samples_with_crypto = 0;
    std::int64_t samples_with_third_party = 0;
    std::int64_t total_call_sites = 0;
    std::array<CategoryCounts, kNumCategories> cats;
    std::array<std::int64_t, kNumCategories> apk_counts{};      // samples with >=1 site in category
    std::map<std::string, std::int64_t> primitive_calls;        // resolved call sites per primitive
    std::map<std::string, std::int64_t> primitive_presence;     // samples containing primitive
    std::map<std::string, std::int64_t> symmetric_schemes;      // canonical transformation -> calls
};

struct CorpusStats {
    GroupStats overall;
    std::vector<GroupStats> groups; // sorted by (year, label)
};

CorpusStats aggregate(const std::vector<CryptoReport>& reports);

// truncate(call_sites * 10000 / samples) toward zero
std::int64_t per_10k(std::int64_t call_sites, std::int64_t samples);

// half-up rounding to 1 decimal place
double round1(double x);

// share of a category's call sites of the total, in percent (1 decimal)
double category_share(const CorpusStats& stats, Category cat);

// obfuscated / call_sites within a category; nullopt when the category is empty
std::optional<double> obfuscation_rate(const CorpusStats& stats, Category cat);

std::string categories_csv(const CorpusStats& stats);
std::string per10k_csv(const CorpusStats& stats);
std::string trends_csv(const CorpusStats& stats);
std::string symmetric_schemes_csv(const CorpusStats& stats);

} // namespace cryptoscan
