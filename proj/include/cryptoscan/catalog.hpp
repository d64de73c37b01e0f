#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace cryptoscan {

enum class Category {
    Hash,
    SymmetricEnc,
    PublicKeyEnc,
    DigitalSignature,
    Mac,
    Prng,
    KeyAgreement,
    Other,
    // Cipher constructors whose primitive cannot be resolved: the symmetric
    // and RSA variants are indistinguishable, so they get their own bucket.
    Unresolved,
};

constexpr int kNumPlainCategories = 8; // Unresolved excluded

std::string category_name(Category c);
std::optional<Category> category_from_name(const std::string& name);

enum class Strength { Weak, Accepted };

enum class CipherMode { Ecb, Cbc, Cfb, Cfb8, Ofb, Ctr, Gcm, Other };
enum class CipherPadding { NoPadding, Pkcs5, Pkcs7, Iso10126, Oaep, ZeroByte, Other };

std::string mode_name(CipherMode m);
std::string padding_name(CipherPadding p);

// PKCS5 and PKCS7 stay distinct in records; aggregate statistics may fold
// PKCS5 into PKCS7 for 128-bit block ciphers via this view.
CipherPadding normalize_padding(CipherPadding p);

struct PrimitiveSpec {
    std::string name;
    Category category = Category::Other;
    std::vector<std::string> aliases;
    Strength strength = Strength::Accepted;
};

struct ApiClassSpec {
    std::string simple_name;
    std::string package; // javax.crypto or java.security
    std::vector<std::string> constructor_methods; // "new" marks direct construction
    Category default_category = Category::Other;  // used when the primitive is unknown
};

struct Transformation {
    std::string primitive_token;             // first segment, as written
    const PrimitiveSpec* primitive = nullptr; // null => Unknown
    CipherMode mode = CipherMode::Ecb;
    CipherPadding padding = CipherPadding::Pkcs7;
    bool mode_explicit = false;
    bool padding_explicit = false;
};

class PatternCatalog {
public:
    PatternCatalog(std::vector<ApiClassSpec> classes, std::vector<PrimitiveSpec> primitives,
                   std::vector<std::string> native_crypto_libs);

    const std::vector<ApiClassSpec>& classes() const { return classes_; }
    const std::vector<PrimitiveSpec>& primitives() const { return primitives_; }
    const std::vector<std::string>& native_crypto_libs() const { return native_libs_; }

    const ApiClassSpec* find_class(const std::string& simple_name) const;
    const PrimitiveSpec* find_primitive(const std::string& name_or_alias) const;

    // Splits "ALG/MODE/PADDING" (case-insensitive); omitted mode/padding fall
    // back to ECB / PKCS7. Total: unknown primitives come back with a null spec.
    Transformation parse_transformation(const std::string& raw) const;

    // Category of a call site: primitive category when resolved, otherwise the
    // class default (Cipher maps to Unresolved).
    Category categorize(const ApiClassSpec& api_class, const PrimitiveSpec* primitive) const;

private:
    std::vector<ApiClassSpec> classes_;
    std::vector<PrimitiveSpec> primitives_;
    std::vector<std::string> native_libs_;
    std::unordered_map<std::string, std::size_t> primitive_index_; // lowercased name/alias
    std::unordered_map<std::string, std::size_t> class_index_;
};

// Loads and validates a catalog JSON file (keys: schema_version, classes,
// primitives, defaults, native_crypto_libs; unknown keys ignored).
PatternCatalog load_catalog(const std::string& path);

// The catalog shipped with the tool; covers every primitive the default
// feature set references.
PatternCatalog default_catalog();

// Serialized form of default_catalog(), for `cryptoscan scan --catalog default`
// users who want a starting file to extend.
std::string default_catalog_json();

std::string to_lower(const std::string& s);

} // namespace cryptoscan
