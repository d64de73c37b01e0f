#include "cryptoscan/catalog.hpp"
#include "cryptoscan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cryptoscan {

using nlohmann::json;

std::string to_lower(const std::string& s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string category_name(Category c) {
    switch (c) {
        case Category::Hash: return "Hash";
        case Category::SymmetricEnc: return "SymmetricEnc";
        case Category::PublicKeyEnc: return "PublicKeyEnc";
        case Category::DigitalSignature: return "DigitalSignature";
        case Category::Mac: return "MAC";
        case Category::Prng: return "PRNG";
        case Category::KeyAgreement: return "KeyAgreement";
        case Category::Other: return "Other";
        case Category::Unresolved: return "Unresolved";
    }
    return "Other";
}

std::optional<Category> category_from_name(const std::string& name) {
    const std::string n = to_lower(name);
    if (n == "hash") return Category::Hash;
    if (n == "symmetricenc") return Category::SymmetricEnc;
    if (n == "publickeyenc") return Category::PublicKeyEnc;
    if (n == "digitalsignature") return Category::DigitalSignature;
    if (n == "mac") return Category::Mac;
    if (n == "prng") return Category::Prng;
    if (n == "keyagreement") return Category::KeyAgreement;
    if (n == "other") return Category::Other;
    if (n == "unresolved") return Category::Unresolved;
    return std::nullopt;
}

std::string mode_name(CipherMode m) {
    switch (m) {
        case CipherMode::Ecb: return "ECB";
        case CipherMode::Cbc: return "CBC";
        case CipherMode::Cfb: return "CFB";
        case CipherMode::Cfb8: return "CFB8";
        case CipherMode::Ofb: return "OFB";
        case CipherMode::Ctr: return "CTR";
        case CipherMode::Gcm: return "GCM";
        case CipherMode::Other: return "OTHER";
    }
    return "OTHER";
}

std::string padding_name(CipherPadding p) {
    switch (p) {
        case CipherPadding::NoPadding: return "NoPadding";
        case CipherPadding::Pkcs5: return "PKCS5";
        case CipherPadding::Pkcs7: return "PKCS7";
        case CipherPadding::Iso10126: return "ISO10126";
        case CipherPadding::Oaep: return "OAEP";
        case CipherPadding::ZeroByte: return "ZeroByte";
        case CipherPadding::Other: return "OTHER";
    }
    return "OTHER";
}

CipherPadding normalize_padding(CipherPadding p) {
    return p == CipherPadding::Pkcs5 ? CipherPadding::Pkcs7 : p;
}

namespace {

CipherMode parse_mode(const std::string& seg) {
    const std::string s = to_lower(seg);
    if (s == "ecb") return CipherMode::Ecb;
    if (s == "cbc") return CipherMode::Cbc;
    if (s == "cfb") return CipherMode::Cfb;
    if (s == "cfb8") return CipherMode::Cfb8;
    if (s == "ofb") return CipherMode::Ofb;
    if (s == "ctr") return CipherMode::Ctr;
    if (s == "gcm") return CipherMode::Gcm;
    return CipherMode::Other;
}

CipherPadding parse_padding(const std::string& seg) {
    const std::string s = to_lower(seg);
    if (s == "nopadding") return CipherPadding::NoPadding;
    if (s == "pkcs5padding" || s == "pkcs5") return CipherPadding::Pkcs5;
    if (s == "pkcs7padding" || s == "pkcs7") return CipherPadding::Pkcs7;
    if (s == "iso10126padding" || s == "iso10126") return CipherPadding::Iso10126;
    if (s.rfind("oaep", 0) == 0) return CipherPadding::Oaep;
    if (s == "zerobytepadding") return CipherPadding::ZeroByte;
    return CipherPadding::Other;
}

} // namespace

PatternCatalog::PatternCatalog(std::vector<ApiClassSpec> classes,
                               std::vector<PrimitiveSpec> primitives,
                               std::vector<std::string> native_crypto_libs)
    : classes_(std::move(classes)),
      primitives_(std::move(primitives)),
      native_libs_(std::move(native_crypto_libs)) {
    for (std::size_t i = 0; i < primitives_.size(); ++i) {
        auto& p = primitives_[i];
        if (p.name.empty()) throw ValidationError("primitive with empty name");
        auto insert = [&](const std::string& key) {
            const auto [it, inserted] = primitive_index_.emplace(to_lower(key), i);
            // an alias that repeats its own primitive's name is harmless
            if (!inserted && it->second != i)
                throw ValidationError("duplicate primitive name or alias: " + key);
        };
        insert(p.name);
        for (const auto& a : p.aliases) insert(a);
    }
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        auto& c = classes_[i];
        if (c.package != "javax.crypto" && c.package != "java.security")
            throw ValidationError("class " + c.simple_name + ": package must be a JCA package");
        if (c.constructor_methods.empty())
            throw ValidationError("class " + c.simple_name + ": no constructor methods");
        if (!class_index_.emplace(c.simple_name, i).second)
            throw ValidationError("duplicate class: " + c.simple_name);
    }
}

const ApiClassSpec* PatternCatalog::find_class(const std::string& simple_name) const {
    auto it = class_index_.find(simple_name);
    return it == class_index_.end() ? nullptr : &classes_[it->second];
}

const PrimitiveSpec* PatternCatalog::find_primitive(const std::string& name_or_alias) const {
    auto it = primitive_index_.find(to_lower(name_or_alias));
    return it == primitive_index_.end() ? nullptr : &primitives_[it->second];
}

Transformation PatternCatalog::parse_transformation(const std::string& raw) const {
    Transformation t;
    std::vector<std::string> segs;
    std::string cur;
    for (char ch : raw) {
        if (ch == '/') {
            segs.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    segs.push_back(cur);
    t.primitive_token = segs.empty() ? std::string() : segs[0];
    t.primitive = find_primitive(t.primitive_token);
    if (segs.size() >= 2 && !segs[1].empty()) {
        t.mode = parse_mode(segs[1]);
        t.mode_explicit = true;
    }
    if (segs.size() >= 3 && !segs[2].empty()) {
        t.padding = parse_padding(segs[2]);
        t.padding_explicit = true;
    }
    return t;
}

Category PatternCatalog::categorize(const ApiClassSpec& api_class, const PrimitiveSpec* primitive) const {
    if (primitive) return primitive->category;
    return api_class.default_category;
}

namespace {

Strength parse_strength(const std::string& s) {
    const std::string v = to_lower(s);
    if (v == "weak") return Strength::Weak;
    if (v == "accepted") return Strength::Accepted;
    throw ValidationError("unknown strength: " + s);
}

PatternCatalog catalog_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("catalog root must be an object");
    if (!doc.contains("schema_version"))
        throw ValidationError("catalog: missing schema_version");
    if (!doc.contains("classes") || !doc.contains("primitives"))
        throw ValidationError("catalog: missing classes or primitives");

    std::vector<PrimitiveSpec> prims;
    for (const auto& jp : doc.at("primitives")) {
        PrimitiveSpec p;
        p.name = jp.at("name").get<std::string>();
        auto cat = category_from_name(jp.at("category").get<std::string>());
        if (!cat || *cat == Category::Unresolved)
            throw ValidationError("primitive " + p.name + ": unknown category");
        p.category = *cat;
        if (jp.contains("aliases"))
            p.aliases = jp.at("aliases").get<std::vector<std::string>>();
        if (jp.contains("strength")) p.strength = parse_strength(jp.at("strength").get<std::string>());
        prims.push_back(std::move(p));
    }

    std::vector<ApiClassSpec> classes;
    for (const auto& jc : doc.at("classes")) {
        ApiClassSpec c;
        c.simple_name = jc.at("simple_name").get<std::string>();
        c.package = jc.at("package").get<std::string>();
        c.constructor_methods = jc.at("constructor_methods").get<std::vector<std::string>>();
        if (jc.contains("default_category")) {
            auto cat = category_from_name(jc.at("default_category").get<std::string>());
            if (!cat) throw ValidationError("class " + c.simple_name + ": unknown category");
            c.default_category = *cat;
        }
        // optional documentation list; every entry must exist among primitives
        if (jc.contains("primitives")) {
            for (const auto& jp : jc.at("primitives")) {
                const std::string name = to_lower(jp.get<std::string>());
                bool found = false;
                for (const auto& p : prims) {
                    if (to_lower(p.name) == name) { found = true; break; }
                    for (const auto& a : p.aliases)
                        if (to_lower(a) == name) { found = true; break; }
                    if (found) break;
                }
                if (!found)
                    throw ValidationError("class " + c.simple_name +
                                          " references unknown primitive: " + jp.get<std::string>());
            }
        }
        classes.push_back(std::move(c));
    }

    if (doc.contains("defaults")) {
        const auto& d = doc.at("defaults");
        if (to_lower(d.value("mode", "ECB")) != "ecb" ||
            to_lower(d.value("padding", "PKCS7")) != "pkcs7")
            throw ValidationError("catalog defaults must be ECB/PKCS7");
    }

    std::vector<std::string> native;
    if (doc.contains("native_crypto_libs"))
        native = doc.at("native_crypto_libs").get<std::vector<std::string>>();

    return PatternCatalog(std::move(classes), std::move(prims), std::move(native));
}

} // namespace

PatternCatalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open catalog file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("catalog " + path + ": " + e.what());
    }
    return catalog_from_json(doc);
}

std::string default_catalog_json() {
    static const char* kJson = R"JSON({
  "schema_version": 1,
  "defaults": {"mode": "ECB", "padding": "PKCS7"},
  "classes": [
    {"simple_name": "MessageDigest", "package": "java.security",
     "constructor_methods": ["getInstance"], "default_category": "Hash"},
    {"simple_name": "Cipher", "package": "javax.crypto",
     "constructor_methods": ["getInstance"], "default_category": "Unresolved"},
    {"simple_name": "Mac", "package": "javax.crypto",
     "constructor_methods": ["getInstance"], "default_category": "MAC"},
    {"simple_name": "Signature", "package": "java.security",
     "constructor_methods": ["getInstance"], "default_category": "DigitalSignature"},
    {"simple_name": "KeyAgreement", "package": "javax.crypto",
     "constructor_methods": ["getInstance"], "default_category": "KeyAgreement"},
    {"simple_name": "SecureRandom", "package": "java.security",
     "constructor_methods": ["getInstance", "new"], "default_category": "PRNG"},
    {"simple_name": "KeyGenerator", "package": "javax.crypto",
     "constructor_methods": ["getInstance"], "default_category": "Other"},
    {"simple_name": "SecretKeyFactory", "package": "javax.crypto",
     "constructor_methods": ["getInstance"], "default_category": "Other"},
    {"simple_name": "KeyPairGenerator", "package": "java.security",
     "constructor_methods": ["getInstance"], "default_category": "Other"},
    {"simple_name": "KeyFactory", "package": "java.security",
     "constructor_methods": ["getInstance"], "default_category": "Other"}
  ],
  "primitives": [
    {"name": "MD5", "category": "Hash", "aliases": [], "strength": "Weak"},
    {"name": "SHA-1", "category": "Hash", "aliases": ["SHA1", "SHA"], "strength": "Weak"},
    {"name": "SHA-256", "category": "Hash", "aliases": ["SHA256"], "strength": "Accepted"},
    {"name": "SHA-384", "category": "Hash", "aliases": ["SHA384"], "strength": "Accepted"},
    {"name": "SHA-512", "category": "Hash", "aliases": ["SHA512"], "strength": "Accepted"},
    {"name": "AES", "category": "SymmetricEnc", "aliases": [], "strength": "Accepted"},
    {"name": "DES", "category": "SymmetricEnc", "aliases": [], "strength": "Weak"},
    {"name": "DESede", "category": "SymmetricEnc", "aliases": ["3DES", "TripleDES"], "strength": "Accepted"},
    {"name": "RC4", "category": "SymmetricEnc", "aliases": ["ARCFOUR"], "strength": "Weak"},
    {"name": "Blowfish", "category": "SymmetricEnc", "aliases": [], "strength": "Accepted"},
    {"name": "PBEWithMD5AndDES", "category": "SymmetricEnc", "aliases": [], "strength": "Weak"},
    {"name": "RSA", "category": "PublicKeyEnc", "aliases": [], "strength": "Accepted"},
    {"name": "SHA1withRSA", "category": "DigitalSignature", "aliases": [], "strength": "Accepted"},
    {"name": "SHA256withRSA", "category": "DigitalSignature", "aliases": [], "strength": "Accepted"},
    {"name": "SHA1withECDSA", "category": "DigitalSignature", "aliases": [], "strength": "Accepted"},
    {"name": "SHA256withECDSA", "category": "DigitalSignature", "aliases": [], "strength": "Accepted"},
    {"name": "HmacSHA1", "category": "MAC", "aliases": ["HMACSHA1"], "strength": "Accepted"},
    {"name": "HmacSHA256", "category": "MAC", "aliases": ["HMACSHA256"], "strength": "Accepted"},
    {"name": "SHA1PRNG", "category": "PRNG", "aliases": [], "strength": "Accepted"},
    {"name": "NativePRNG", "category": "PRNG", "aliases": [], "strength": "Accepted"},
    {"name": "DH", "category": "KeyAgreement", "aliases": ["DiffieHellman"], "strength": "Accepted"},
    {"name": "ECDH", "category": "KeyAgreement", "aliases": [], "strength": "Accepted"}
  ],
  "native_crypto_libs": [
    "crypto-algorithms", "libgcrypt", "monocypher", "polarssl", "tiny-aes-c",
    "xxhash", "libsodium", "openssl", "libressl", "wolfssl"
  ]
})JSON";
    return kJson;
}

PatternCatalog default_catalog() {
    json doc = json::parse(default_catalog_json());
    return catalog_from_json(doc);
}

} // namespace cryptoscan
