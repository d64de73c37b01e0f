#include <doctest.h>

#include "cryptoscan/catalog.hpp"
#include "cryptoscan/errors.hpp"
#include "cryptoscan/scanner.hpp"

#include <cstdlib>
#include <fstream>
#include <tuple>

using namespace cryptoscan;

namespace {

SourceClass user_class(const std::string& text) {
    SourceClass c;
    c.path = "com/app/T.java";
    c.package_path = "com/app";
    c.origin = ClassOrigin::User;
    c.text = text;
    return c;
}

std::vector<CallSite> scan_text(const std::string& text) {
    static const PatternCatalog catalog = default_catalog();
    return scan_class(user_class(text), catalog).first;
}

} // namespace

TEST_CASE("strip_comments removes comments, keeps literals and line count") {
    CHECK(strip_comments("a // trailing\nb") == "a            \nb");
    CHECK(strip_comments("a /* x */ b") == "a         b");
    // newlines inside block comments survive so line numbers stay stable
    CHECK(strip_comments("a/*1\n2\n3*/b") == "a   \n \n   b");
    // comment markers inside string literals are content, not comments
    CHECK(strip_comments("s = \"// not a comment\";") == "s = \"// not a comment\";");
    CHECK(strip_comments("s = \"/* neither */\";") == "s = \"/* neither */\";");
    // quotes inside comments do not open literals
    CHECK(strip_comments("// say \"hi\"\nx") == "           \nx");
    // escaped quotes do not terminate the literal early
    CHECK(strip_comments("s = \"a\\\"b // c\";") == "s = \"a\\\"b // c\";");
    // char literals too
    CHECK(strip_comments("c = '\"'; // x") == "c = '\"';     ");
}

TEST_CASE("literal constructor argument resolves the primitive") {
    const auto sites = scan_text("class T { void f() throws Exception {\n"
                                 "  MessageDigest md = MessageDigest.getInstance(\"MD5\");\n"
                                 "} }");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].api_class == "MessageDigest");
    CHECK(sites[0].primitive == "MD5");
    CHECK(sites[0].category == Category::Hash);
    CHECK_FALSE(sites[0].obfuscated);
    CHECK(sites[0].line == 2);
}

TEST_CASE("non-literal arguments are obfuscated constructors") {
    SUBCASE("variable") {
        const auto s = scan_text("class T { void f(String a) throws Exception {\n"
                                 "  Cipher c = Cipher.getInstance(a);\n} }");
        REQUIRE(s.size() == 1);
        CHECK(s[0].obfuscated);
        CHECK(s[0].primitive.empty());
        CHECK(s[0].category == Category::Unresolved);
    }
    SUBCASE("concatenation starting with a literal") {
        const auto s = scan_text("class T { void f() throws Exception {\n"
                                 "  Cipher c = Cipher.getInstance(\"A\" + \"ES\");\n} }");
        REQUIRE(s.size() == 1);
        CHECK(s[0].obfuscated);
        CHECK(s[0].category == Category::Unresolved);
    }
    SUBCASE("method call") {
        const auto s = scan_text("class T { void f() throws Exception {\n"
                                 "  Cipher c = Cipher.getInstance(pick());\n} }");
        REQUIRE(s.size() == 1);
        CHECK(s[0].obfuscated);
    }
    SUBCASE("obfuscated MessageDigest falls back to the class default category") {
        const auto s = scan_text("class T { void f(String a) throws Exception {\n"
                                 "  MessageDigest m = MessageDigest.getInstance(a);\n} }");
        REQUIRE(s.size() == 1);
        CHECK(s[0].obfuscated);
        CHECK(s[0].category == Category::Hash);
    }
}

TEST_CASE("Cipher literals without mode fall back to ECB/PKCS7") {
    for (const char* alg : {"AES", "DES"}) {
        const auto s = scan_text(std::string("class T { void f() throws Exception {\n"
                                             "  Cipher c = Cipher.getInstance(\"") +
                                 alg + "\");\n} }");
        REQUIRE(s.size() == 1);
        REQUIRE(s[0].mode.has_value());
        REQUIRE(s[0].padding.has_value());
        CHECK(*s[0].mode == CipherMode::Ecb);
        CHECK(*s[0].padding == CipherPadding::Pkcs7);
    }
}

TEST_CASE("new SecureRandom() counts as a non-obfuscated PRNG constructor") {
    const auto s = scan_text("class T { void f() {\n"
                             "  SecureRandom r = new SecureRandom();\n} }");
    REQUIRE(s.size() == 1);
    CHECK(s[0].api_class == "SecureRandom");
    CHECK_FALSE(s[0].obfuscated);
    CHECK(s[0].primitive.empty());
    CHECK(s[0].category == Category::Prng);
}

TEST_CASE("matches in comments, strings, and partial identifiers are ignored") {
    const auto s = scan_text(
        "class T { void f() throws Exception {\n"
        "  // Cipher.getInstance(\"AES\")\n"
        "  /* MessageDigest.getInstance(\"MD5\") */\n"
        "  String x = \"Mac.getInstance(\\\"HmacSHA1\\\")\";\n"
        "  MyCipher c = MyCipher.getInstance(\"AES\");\n"
        "  Cipher2 d = Cipher2.getInstance(\"DES\");\n"
        "  Cipher real = Cipher.getInstance(\"AES\");\n"
        "} }");
    REQUIRE(s.size() == 1);
    CHECK(s[0].line == 7);
    CHECK(s[0].primitive == "AES");
}

TEST_CASE("two call sites on one line are ordered by column") {
    const auto s = scan_text(
        "class T { void f() throws Exception {\n"
        "  KeyAgreement a = KeyAgreement.getInstance(\"DH\"); KeyAgreement b = "
        "KeyAgreement.getInstance(\"ECDH\");\n} }");
    REQUIRE(s.size() == 2);
    CHECK(s[0].line == s[1].line);
    CHECK(s[0].column < s[1].column);
    CHECK(s[0].primitive == "DH");
    CHECK(s[1].primitive == "ECDH");
}

TEST_CASE("argument may continue on the next line") {
    const auto s = scan_text("class T { void f() throws Exception {\n"
                             "  Cipher c = Cipher.getInstance(\n"
                             "      \"AES/CBC/PKCS5Padding\");\n} }");
    REQUIRE(s.size() == 1);
    CHECK(s[0].primitive == "AES");
    CHECK(*s[0].mode == CipherMode::Cbc);
    CHECK(s[0].line == 2); // the call site is where the constructor is invoked
}

TEST_CASE("imports: only JCA packages, wildcard detection") {
    const auto [sites, imports] =
        scan_class(user_class("import javax.crypto.Cipher;\n"
                              "import java.security.MessageDigest;\n"
                              "import java.util.List;\n"
                              "import javax.crypto.*;\n"
                              "class T {}\n"),
                   default_catalog());
    CHECK(sites.empty());
    REQUIRE(imports.size() == 3);
    int wildcards = 0;
    for (const auto& imp : imports) {
        if (imp.wildcard) {
            ++wildcards;
            CHECK(imp.imported_class == "javax.crypto");
        }
    }
    CHECK(wildcards == 1);
}

TEST_CASE("manifest loading validates labels and resolves relative paths") {
    const std::string dir = "/tmp/cryptoscan_manifest_test";
    std::system(("mkdir -p " + dir).c_str());
    {
        std::ofstream out(dir + "/m.jsonl");
        out << R"({"id":"a","label":"malicious","year":2015,"path":"a","vt_flags":6})" << "\n";
        out << "\n"; // blank lines are skipped
        out << R"({"id":"b","label":"benign","year":2016,"path":"/abs/b"})" << "\n";
    }
    const auto entries = load_manifest(dir + "/m.jsonl");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].path == dir + "/a"); // resolved against the manifest directory
    CHECK(entries[1].path == "/abs/b");   // absolute paths pass through
    CHECK(is_malicious(entries[0]));
    CHECK_FALSE(is_malicious(entries[1]));
    // strict mode requires enough scanner flags
    ManifestEntry weak = entries[0];
    weak.vt_flags = 3;
    CHECK(is_malicious(weak));
    CHECK_FALSE(is_malicious(weak, /*strict_vt=*/true));

    {
        std::ofstream out(dir + "/bad.jsonl");
        out << R"({"id":"a","label":"suspicious","year":2015,"path":"a"})" << "\n";
    }
    CHECK_THROWS_AS(load_manifest(dir + "/bad.jsonl"), ValidationError);
    CHECK_THROWS_AS(load_manifest(dir + "/missing.jsonl"), ParseError);
}

TEST_CASE("scan_sample on a fixture sample: filtering and determinism") {
    ManifestEntry e;
    e.id = "s04";
    e.label = "malicious";
    e.year = 2012;
    e.path = std::string(DATA_DIR) + "/fixtures/corpus12/s04";
    e.vt_flags = 6;

    const PatternCatalog catalog = default_catalog();
    const SignatureDb db = default_signature_db();
    const SampleScan a = scan_sample(e, catalog, db);
    // the only crypto lives in com/google/gson -> third-party, excluded
    CHECK(a.call_sites.empty());
    CHECK(a.total_classes == 2);
    CHECK(a.user_classes == 1);
    CHECK(a.third_party_classes == 1);

    const SampleScan b = scan_sample(e, catalog, db);
    CHECK(a.call_sites.size() == b.call_sites.size());
    CHECK(a.total_classes == b.total_classes);

    ManifestEntry missing = e;
    missing.path = "/nonexistent/sample";
    CHECK_THROWS_AS(scan_sample(missing, catalog, db), MissingSample);
}

TEST_CASE("call sites come out sorted by (file, line, column)") {
    ManifestEntry e;
    e.id = "s02";
    e.label = "malicious";
    e.year = 2012;
    e.path = std::string(DATA_DIR) + "/fixtures/corpus12/s02";

    const SampleScan s = scan_sample(e, default_catalog(), default_signature_db());
    REQUIRE(s.call_sites.size() == 6);
    for (std::size_t i = 1; i < s.call_sites.size(); ++i) {
        const auto& p = s.call_sites[i - 1];
        const auto& c = s.call_sites[i];
        CHECK(std::tie(p.file, p.line, p.column) < std::tie(c.file, c.line, c.column));
    }
}
