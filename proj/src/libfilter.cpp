#include "cryptoscan/libfilter.hpp"
#include "cryptoscan/catalog.hpp"
#include "cryptoscan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

namespace cryptoscan {

using nlohmann::json;

std::string origin_name(ClassOrigin o) {
    switch (o) {
        case ClassOrigin::User: return "User";
        case ClassOrigin::System: return "System";
        case ClassOrigin::ThirdParty: return "ThirdParty";
    }
    return "User";
}

Fingerprint fingerprint_profile(std::vector<int> method_counts) {
    std::sort(method_counts.begin(), method_counts.end());
    // FNV-1a over the sorted counts
    std::uint64_t h = 1469598103934665603ULL;
    for (int c : method_counts) {
        for (int b = 0; b < 4; ++b) {
            h ^= static_cast<std::uint64_t>((c >> (8 * b)) & 0xff);
            h *= 1099511628211ULL;
        }
        h ^= 0x2f;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

bool prefix_matches(const std::string& prefix, const std::string& class_path) {
    if (class_path.size() < prefix.size()) return false;
    if (class_path.compare(0, prefix.size(), prefix) != 0) return false;
    // segment boundary: exact match or next char is a path separator
    return class_path.size() == prefix.size() || class_path[prefix.size()] == '/';
}

} // namespace

SignatureDb::SignatureDb(std::vector<PackageSignature> sigs) : sigs_(std::move(sigs)) {
    std::set<std::pair<std::string, int>> seen;
    for (const auto& s : sigs_) {
        if (s.prefix.empty()) throw ValidationError("signature with empty prefix");
        if (!seen.emplace(s.prefix, static_cast<int>(s.kind)).second)
            throw ValidationError("duplicate signature (prefix, kind): " + s.prefix);
    }
}

const PackageSignature* SignatureDb::match(const std::string& class_path,
                                           std::optional<Fingerprint> package_profile) const {
    const PackageSignature* best = nullptr;
    for (const auto& s : sigs_) {
        if (prefix_matches(s.prefix, class_path)) {
            if (!best || s.prefix.size() > best->prefix.size()) best = &s;
        }
    }
    if (!best && package_profile) {
        for (const auto& s : sigs_)
            if (s.fingerprint && *s.fingerprint == *package_profile) return &s;
    }
    return best;
}

bool is_system_class(const std::string& class_path) {
    static const char* kRoots[] = {"java", "javax", "android", "kotlin"};
    for (const char* r : kRoots)
        if (prefix_matches(r, class_path)) return true;
    return false;
}

ClassOrigin classify_class(const std::string& class_path, const SignatureDb& db,
                           std::optional<Fingerprint> package_profile) {
    if (is_system_class(class_path)) return ClassOrigin::System;
    if (db.match(class_path, package_profile)) return ClassOrigin::ThirdParty;
    return ClassOrigin::User;
}

namespace {

SignatureDb db_from_json(const json& doc) {
    if (!doc.is_array()) throw ParseError("signature DB root must be an array");
    std::vector<PackageSignature> sigs;
    for (const auto& js : doc) {
        PackageSignature s;
        s.prefix = js.at("prefix").get<std::string>();
        const std::string kind = to_lower(js.value("kind", "ThirdParty"));
        if (kind == "thirdparty") {
            s.kind = SignatureKind::ThirdParty;
        } else if (kind == "cryptolibjava") {
            s.kind = SignatureKind::CryptoLibJava;
        } else {
            throw ValidationError("signature " + s.prefix + ": unknown kind");
        }
        s.label = js.value("label", s.prefix);
        if (js.contains("fingerprint")) s.fingerprint = js.at("fingerprint").get<std::uint64_t>();
        sigs.push_back(std::move(s));
    }
    return SignatureDb(std::move(sigs));
}

} // namespace

SignatureDb load_signature_db(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open signature DB: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("signature DB " + path + ": " + e.what());
    }
    return db_from_json(doc);
}

std::string default_signature_db_json() {
    // The 13 Java crypto libraries plus common non-crypto third-party roots.
    static const char* kJson = R"JSON([
  {"prefix": "org/whispersystems/curve25519", "kind": "CryptoLibJava", "label": "whispersystems/curve25519"},
  {"prefix": "info/guardianproject/netcipher", "kind": "CryptoLibJava", "label": "guardianproject/netcipher"},
  {"prefix": "org/springframework/security/crypto", "kind": "CryptoLibJava", "label": "springframework/security/crypto"},
  {"prefix": "gnu/crypto", "kind": "CryptoLibJava", "label": "gnu/crypto"},
  {"prefix": "org/apache/shiro/crypto", "kind": "CryptoLibJava", "label": "apache/shiro/crypto"},
  {"prefix": "com/rsa/crypto", "kind": "CryptoLibJava", "label": "rsa/crypto"},
  {"prefix": "org/keyczar", "kind": "CryptoLibJava", "label": "keyczar"},
  {"prefix": "org/jasypt", "kind": "CryptoLibJava", "label": "jasypt"},
  {"prefix": "com/googlecode/gwt/crypto", "kind": "CryptoLibJava", "label": "googlecode/gwt/crypto"},
  {"prefix": "net/sqlcipher", "kind": "CryptoLibJava", "label": "sqlcipher"},
  {"prefix": "org/spongycastle", "kind": "CryptoLibJava", "label": "spongycastle"},
  {"prefix": "org/bouncycastle", "kind": "CryptoLibJava", "label": "bouncycastle"},
  {"prefix": "com/facebook/crypto", "kind": "CryptoLibJava", "label": "facebook/conceal"},
  {"prefix": "com/google/gson", "kind": "ThirdParty", "label": "gson"},
  {"prefix": "com/google/android/gms", "kind": "ThirdParty", "label": "play-services"},
  {"prefix": "com/squareup/okhttp", "kind": "ThirdParty", "label": "okhttp"},
  {"prefix": "okhttp3", "kind": "ThirdParty", "label": "okhttp3"},
  {"prefix": "retrofit2", "kind": "ThirdParty", "label": "retrofit2"},
  {"prefix": "com/facebook/ads", "kind": "ThirdParty", "label": "facebook-ads"},
  {"prefix": "com/flurry", "kind": "ThirdParty", "label": "flurry"},
  {"prefix": "com/unity3d", "kind": "ThirdParty", "label": "unity"},
  {"prefix": "org/apache/http", "kind": "ThirdParty", "label": "apache-http"},
  {"prefix": "com/admob", "kind": "ThirdParty", "label": "admob"}
])JSON";
    return kJson;
}

SignatureDb default_signature_db() {
    return db_from_json(json::parse(default_signature_db_json()));
}

void detect_native_libs(const std::string& user_text,
                        const std::vector<std::string>& native_lib_names,
                        std::set<std::string>& out) {
    static const char* kForms[] = {"ReLinker", "System", "Native"};
    std::size_t pos = 0;
    while ((pos = user_text.find("loadLibrary", pos)) != std::string::npos) {
        // must be "<Form>.loadLibrary"
        std::size_t q = pos;
        while (q > 0 && std::isspace(static_cast<unsigned char>(user_text[q - 1]))) --q;
        bool form_ok = false;
        if (q > 0 && user_text[q - 1] == '.') {
            std::size_t r = q - 1;
            while (r > 0 && std::isspace(static_cast<unsigned char>(user_text[r - 1]))) --r;
            for (const char* f : kForms) {
                const std::size_t len = std::string(f).size();
                if (r >= len && user_text.compare(r - len, len, f) == 0) {
                    // word boundary on the left
                    if (r == len || !(std::isalnum(static_cast<unsigned char>(user_text[r - len - 1])) ||
                                      user_text[r - len - 1] == '_')) {
                        form_ok = true;
                        break;
                    }
                }
            }
        }
        pos += 11; // past "loadLibrary"
        if (!form_ok) continue;
        std::size_t open = user_text.find_first_not_of(" \t\r\n", pos);
        if (open == std::string::npos || user_text[open] != '(') continue;
        std::size_t lit = user_text.find('"', open);
        if (lit == std::string::npos) continue;
        std::size_t end = user_text.find('"', lit + 1);
        if (end == std::string::npos) continue;
        const std::string arg = to_lower(user_text.substr(lit + 1, end - lit - 1));
        for (const auto& name : native_lib_names)
            if (arg.find(to_lower(name)) != std::string::npos) out.insert(name);
    }
}

} // namespace cryptoscan
