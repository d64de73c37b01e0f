#include <doctest.h>

#include "cryptoscan/errors.hpp"
#include "cryptoscan/report.hpp"
#include "cryptoscan/scanner.hpp"

#include <string>
#include <vector>

using namespace cryptoscan;

namespace {

ManifestEntry fixture_entry(const std::string& id, const std::string& label, int year) {
    ManifestEntry e;
    e.id = id;
    e.label = label;
    e.year = year;
    e.path = std::string(DATA_DIR) + "/fixtures/corpus12/" + id;
    e.vt_flags = label == "malicious" ? 7 : 0;
    return e;
}

std::vector<CryptoReport> scan_fixture() {
    const PatternCatalog catalog = default_catalog();
    const SignatureDb db = default_signature_db();
    const char* ids[] = {"s01", "s02", "s03", "s04", "s05", "s06",
                         "s07", "s08", "s09", "s10", "s11", "s12"};
    const char* labels[] = {"malicious", "malicious", "malicious", "malicious",
                            "benign",    "benign",    "malicious", "malicious",
                            "benign",    "benign",    "benign",    "malicious"};
    const int years[] = {2012, 2012, 2012, 2012, 2012, 2012, 2016, 2016, 2016, 2016, 2016, 2016};
    std::vector<CryptoReport> reports;
    for (int i = 0; i < 12; ++i)
        reports.push_back(
            evaluate(scan_sample(fixture_entry(ids[i], labels[i], years[i]), catalog, db), catalog));
    return reports;
}

} // namespace

TEST_CASE("per-10k normalization truncates toward zero") {
    // published corpus rows recompute exactly
    CHECK(per_10k(81698, 39838) == 20507);
    CHECK(per_10k(125225, 39767) == 31489);
    CHECK(per_10k(208625, 39325) == 53051);
    CHECK(per_10k(20967, 145095) == 1445);

    // truncation, not rounding
    CHECK(per_10k(1, 3) == 3333);
    CHECK(per_10k(2, 3) == 6666);
    CHECK(per_10k(1, 10000) == 1);
    CHECK(per_10k(0, 5) == 0);
    CHECK_THROWS_AS(per_10k(10, 0), EmptyCorpus);
}

TEST_CASE("round1 rounds half up to one decimal") {
    CHECK(round1(0.05) == doctest::Approx(0.1));
    CHECK(round1(0.25) == doctest::Approx(0.3));
    CHECK(round1(0.24) == doctest::Approx(0.2));
    CHECK(round1(65.7598) == doctest::Approx(65.8));
    CHECK(round1(25.6937) == doctest::Approx(25.7));
}

TEST_CASE("category shares reproduce the published arithmetic") {
    CHECK(round1(100.0 * 424858.0 / 646018.0) == doctest::Approx(65.8));
    CHECK(round1(100.0 * 165994.0 / 646018.0) == doctest::Approx(25.7));
}

TEST_CASE("evaluate: per-category counts conserve the total") {
    const auto reports = scan_fixture();
    std::int64_t grand_total = 0;
    for (const auto& r : reports) {
        std::int64_t sum = 0;
        for (const auto& c : r.categories) sum += c.call_sites;
        CHECK(sum == r.total_call_sites());
        grand_total += sum;
    }
    CHECK(grand_total == 30);
}

TEST_CASE("evaluate: Cipher imports count toward symmetric use") {
    const PatternCatalog catalog = default_catalog();
    CHECK(import_category("Cipher", catalog) == Category::SymmetricEnc);
    CHECK(import_category("MessageDigest", catalog) == Category::Hash);
    CHECK(import_category("Mac", catalog) == Category::Mac);
}

TEST_CASE("report JSON round-trips everything aggregate needs") {
    const auto reports = scan_fixture();
    for (const auto& r : reports) {
        const CryptoReport back = report_from_json(report_to_json(r));
        CHECK(back.id == r.id);
        CHECK(back.label == r.label);
        CHECK(back.year == r.year);
        CHECK(back.total_call_sites() == r.total_call_sites());
        CHECK(back.transformations == r.transformations);
        CHECK(back.imports == r.imports);
        CHECK(back.wildcard_imports == r.wildcard_imports);
        CHECK(back.java_libs == r.java_libs);
        CHECK(back.native_libs == r.native_libs);
        CHECK(back.user_classes == r.user_classes);
        for (int i = 0; i < kNumCategories; ++i) {
            CHECK(back.categories[i].call_sites == r.categories[i].call_sites);
            CHECK(back.categories[i].obfuscated == r.categories[i].obfuscated);
            CHECK(back.categories[i].primitives == r.categories[i].primitives);
            CHECK(back.importing_classes[i] == r.importing_classes[i]);
        }
    }
    CHECK_THROWS_AS(report_from_json("{not json"), ParseError);
}

TEST_CASE("aggregate groups by (year, label) and sorts") {
    const auto reports = scan_fixture();
    const CorpusStats stats = aggregate(reports);

    CHECK(stats.overall.samples == 12);
    CHECK(stats.overall.total_call_sites == 30);
    REQUIRE(stats.groups.size() == 4);
    CHECK(stats.groups[0].year == 2012);
    CHECK(stats.groups[0].label == "benign");
    CHECK(stats.groups[1].year == 2012);
    CHECK(stats.groups[1].label == "malicious");
    CHECK(stats.groups[2].year == 2016);
    CHECK(stats.groups[3].year == 2016);

    // hand tallies: 2012 malicious = s01(4) + s02(6) + s03(4) + s04(0) = 14
    CHECK(stats.groups[1].samples == 4);
    CHECK(stats.groups[1].total_call_sites == 14);
    // 2012 benign = s05(4) + s06(0)
    CHECK(stats.groups[0].samples == 2);
    CHECK(stats.groups[0].total_call_sites == 4);
    // 2016 malicious = s07(3) + s08(5) + s12(0)
    CHECK(stats.groups[3].total_call_sites == 8);
    // 2016 benign = s09(4) + s10(0) + s11(0)
    CHECK(stats.groups[2].total_call_sites == 4);

    // per-10k on the overall group: truncate(30 * 10000 / 12)
    CHECK(per_10k(stats.overall.total_call_sites, stats.overall.samples) == 25000);

    // obfuscation totals: 5 of 30
    std::int64_t obf = 0;
    for (const auto& c : stats.overall.cats) obf += c.obfuscated;
    CHECK(obf == 5);

    CHECK_THROWS_AS(aggregate({}), EmptyCorpus);
}

TEST_CASE("obfuscation_rate is undefined for empty categories") {
    const CorpusStats stats = aggregate(scan_fixture());
    // every category in the fixture has at least one call site except none;
    // craft an empty one by looking at a category with zero sites in a group
    const auto rate = obfuscation_rate(stats, Category::Hash);
    REQUIRE(rate.has_value());
    CHECK(*rate == doctest::Approx(100.0 * 2.0 / 8.0)); // 2 obfuscated of 8

    CorpusStats empty_stats;
    empty_stats.overall.samples = 1;
    CHECK_FALSE(obfuscation_rate(empty_stats, Category::Mac).has_value());
}

TEST_CASE("category_share uses the grand total") {
    const CorpusStats stats = aggregate(scan_fixture());
    CHECK(category_share(stats, Category::Hash) == doctest::Approx(round1(100.0 * 8.0 / 30.0)));
    CHECK(category_share(stats, Category::SymmetricEnc) ==
          doctest::Approx(round1(100.0 * 5.0 / 30.0)));
}

TEST_CASE("CSV emitters carry the fixture numbers") {
    const CorpusStats stats = aggregate(scan_fixture());

    const std::string p10k = per10k_csv(stats);
    CHECK(p10k.find("2012,malicious,4,14,35000") != std::string::npos);
    CHECK(p10k.find("all,all,12,30,25000") != std::string::npos);

    const std::string cats = categories_csv(stats);
    CHECK(cats.find("Hash,8,") != std::string::npos);
    CHECK(cats.find("Unresolved,3,") != std::string::npos);

    const std::string schemes = symmetric_schemes_csv(stats);
    CHECK(schemes.find("AES/CBC/PKCS5") != std::string::npos);
    CHECK(schemes.find("AES/ECB/PKCS7") != std::string::npos);
    CHECK(schemes.find("Blowfish/CBC/NoPadding") != std::string::npos);
}
