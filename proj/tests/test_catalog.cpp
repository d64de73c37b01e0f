#include <doctest.h>

#include "cryptoscan/catalog.hpp"
#include "cryptoscan/errors.hpp"

#include <cstdio>
#include <fstream>

using namespace cryptoscan;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/cryptoscan_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("default catalog shape") {
    const PatternCatalog cat = default_catalog();
    CHECK(cat.primitives().size() == 22);
    CHECK(cat.classes().size() == 10);
    CHECK(cat.native_crypto_libs().size() == 10);

    // aliases resolve to the canonical primitive
    CHECK(cat.find_primitive("SHA1")->name == "SHA-1");
    CHECK(cat.find_primitive("sha")->name == "SHA-1");
    CHECK(cat.find_primitive("3DES")->name == "DESede");
    CHECK(cat.find_primitive("TripleDES")->name == "DESede");
    CHECK(cat.find_primitive("ARCFOUR")->name == "RC4");
    CHECK(cat.find_primitive("DiffieHellman")->name == "DH");
    CHECK(cat.find_primitive("nope") == nullptr);

    // weak set
    CHECK(cat.find_primitive("MD5")->strength == Strength::Weak);
    CHECK(cat.find_primitive("SHA-1")->strength == Strength::Weak);
    CHECK(cat.find_primitive("DES")->strength == Strength::Weak);
    CHECK(cat.find_primitive("RC4")->strength == Strength::Weak);
    CHECK(cat.find_primitive("AES")->strength == Strength::Accepted);

    // SecureRandom is the only class constructed with `new` as well
    const ApiClassSpec* sr = cat.find_class("SecureRandom");
    REQUIRE(sr != nullptr);
    bool has_new = false;
    for (const auto& m : sr->constructor_methods) has_new |= (m == "new");
    CHECK(has_new);
}

TEST_CASE("transformation parsing: omitted mode and padding default to ECB/PKCS7") {
    const PatternCatalog cat = default_catalog();

    Transformation t = cat.parse_transformation("AES");
    REQUIRE(t.primitive != nullptr);
    CHECK(t.primitive->name == "AES");
    CHECK(t.mode == CipherMode::Ecb);
    CHECK(t.padding == CipherPadding::Pkcs7);
    CHECK_FALSE(t.mode_explicit);
    CHECK_FALSE(t.padding_explicit);

    t = cat.parse_transformation("DES");
    CHECK(t.primitive->name == "DES");
    CHECK(t.mode == CipherMode::Ecb);
    CHECK(t.padding == CipherPadding::Pkcs7);
}

TEST_CASE("transformation parsing: explicit segments, case-insensitive") {
    const PatternCatalog cat = default_catalog();

    Transformation t = cat.parse_transformation("aes/cbc/pkcs5padding");
    REQUIRE(t.primitive != nullptr);
    CHECK(t.primitive->name == "AES");
    CHECK(t.mode == CipherMode::Cbc);
    CHECK(t.padding == CipherPadding::Pkcs5);
    CHECK(t.mode_explicit);
    CHECK(t.padding_explicit);

    t = cat.parse_transformation("DESede/CFB8/NoPadding");
    CHECK(t.primitive->name == "DESede");
    CHECK(t.mode == CipherMode::Cfb8);
    CHECK(t.padding == CipherPadding::NoPadding);

    t = cat.parse_transformation("AES/GCM/NoPadding");
    CHECK(t.mode == CipherMode::Gcm);

    // unknown everything stays total
    t = cat.parse_transformation("FOO/XYZ/BarPadding");
    CHECK(t.primitive == nullptr);
    CHECK(t.primitive_token == "FOO");
    CHECK(t.mode == CipherMode::Other);
    CHECK(t.padding == CipherPadding::Other);
}

TEST_CASE("transformation parsing is case-fold invariant for every primitive") {
    const PatternCatalog cat = default_catalog();
    for (const auto& p : cat.primitives()) {
        const Transformation lo = cat.parse_transformation(to_lower(p.name));
        std::string up = p.name;
        for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const Transformation hi = cat.parse_transformation(up);
        REQUIRE(lo.primitive != nullptr);
        REQUIRE(hi.primitive != nullptr);
        CHECK(lo.primitive == hi.primitive);
        CHECK(lo.mode == hi.mode);
        CHECK(lo.padding == hi.padding);
    }
}

TEST_CASE("categorize: resolved primitive wins, class default otherwise") {
    const PatternCatalog cat = default_catalog();
    const ApiClassSpec* cipher = cat.find_class("Cipher");
    const ApiClassSpec* md = cat.find_class("MessageDigest");
    const ApiClassSpec* kg = cat.find_class("KeyGenerator");
    REQUIRE(cipher);
    REQUIRE(md);
    REQUIRE(kg);

    CHECK(cat.categorize(*cipher, cat.find_primitive("AES")) == Category::SymmetricEnc);
    CHECK(cat.categorize(*cipher, cat.find_primitive("RSA")) == Category::PublicKeyEnc);
    // unresolved Cipher: symmetric and RSA variants are indistinguishable
    CHECK(cat.categorize(*cipher, nullptr) == Category::Unresolved);
    CHECK(cat.categorize(*md, nullptr) == Category::Hash);
    // KeyGenerator with a resolved symmetric primitive counts as symmetric use
    CHECK(cat.categorize(*kg, cat.find_primitive("AES")) == Category::SymmetricEnc);
    CHECK(cat.categorize(*kg, nullptr) == Category::Other);
}

TEST_CASE("normalize_padding folds PKCS5 into PKCS7") {
    CHECK(normalize_padding(CipherPadding::Pkcs5) == CipherPadding::Pkcs7);
    CHECK(normalize_padding(CipherPadding::Pkcs7) == CipherPadding::Pkcs7);
    CHECK(normalize_padding(CipherPadding::NoPadding) == CipherPadding::NoPadding);
}

TEST_CASE("catalog JSON loading and validation") {
    // the shipped serialized default parses back to the same shape
    const std::string path = write_temp("catalog_ok.json", default_catalog_json());
    const PatternCatalog cat = load_catalog(path);
    CHECK(cat.primitives().size() == default_catalog().primitives().size());
    CHECK(cat.classes().size() == default_catalog().classes().size());

    SUBCASE("duplicate primitive across entries is rejected") {
        const std::string bad = write_temp("catalog_dup.json", R"({
            "schema_version": 1,
            "defaults": {"mode": "ECB", "padding": "PKCS7"},
            "classes": [{"simple_name": "Cipher", "package": "javax.crypto",
                         "constructor_methods": ["getInstance"],
                         "default_category": "Unresolved"}],
            "primitives": [
              {"name": "AES", "category": "SymmetricEnc"},
              {"name": "Rijndael", "category": "SymmetricEnc", "aliases": ["AES"]}
            ]})");
        CHECK_THROWS_AS(load_catalog(bad), ValidationError);
    }

    SUBCASE("missing classes key is rejected") {
        const std::string bad = write_temp("catalog_noclasses.json",
                                           R"({"schema_version": 1, "primitives": []})");
        CHECK_THROWS_AS(load_catalog(bad), ValidationError);
    }

    SUBCASE("non-ECB default mode is rejected") {
        const std::string bad = write_temp("catalog_baddef.json", R"({
            "schema_version": 1,
            "defaults": {"mode": "CBC", "padding": "PKCS7"},
            "classes": [{"simple_name": "Cipher", "package": "javax.crypto",
                         "constructor_methods": ["getInstance"],
                         "default_category": "Unresolved"}],
            "primitives": [{"name": "AES", "category": "SymmetricEnc"}]})");
        CHECK_THROWS_AS(load_catalog(bad), ValidationError);
    }

    SUBCASE("missing file is an IO error") {
        CHECK_THROWS_AS(load_catalog("/nonexistent/catalog.json"), DataError);
    }
}

TEST_CASE("category names round-trip") {
    for (int i = 0; i < kNumPlainCategories + 1; ++i) {
        const Category c = static_cast<Category>(i);
        const auto back = category_from_name(category_name(c));
        REQUIRE(back.has_value());
        CHECK(*back == c);
    }
    CHECK_FALSE(category_from_name("NotACategory").has_value());
}
