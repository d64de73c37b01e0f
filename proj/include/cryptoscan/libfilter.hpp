#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cryptoscan {

enum class ClassOrigin { User, System, ThirdParty };

std::string origin_name(ClassOrigin o);

enum class SignatureKind { ThirdParty, CryptoLibJava };

// Structural profile of a package: the sorted multiset of per-class method
// counts, hashed. Survives package renaming.
using Fingerprint = std::uint64_t;

Fingerprint fingerprint_profile(std::vector<int> method_counts);

struct PackageSignature {
    std::string prefix; // slash-separated package path prefix
    SignatureKind kind = SignatureKind::ThirdParty;
    std::string label;
    std::optional<Fingerprint> fingerprint;
};

class SignatureDb {
public:
    SignatureDb() = default;
    explicit SignatureDb(std::vector<PackageSignature> sigs);

    const std::vector<PackageSignature>& signatures() const { return sigs_; }

    // Longest signature whose prefix matches class_path on path-segment
    // boundaries, or whose fingerprint equals the supplied package profile.
    const PackageSignature* match(const std::string& class_path,
                                  std::optional<Fingerprint> package_profile = std::nullopt) const;

private:
    std::vector<PackageSignature> sigs_;
};

// JSON array of {prefix, kind, label, fingerprint?}.
SignatureDb load_signature_db(const std::string& path);
SignatureDb default_signature_db();
std::string default_signature_db_json();

bool is_system_class(const std::string& class_path);

ClassOrigin classify_class(const std::string& class_path, const SignatureDb& db,
                           std::optional<Fingerprint> package_profile = std::nullopt);

struct CryptoLibDetection {
    std::set<std::string> java_libs;
    std::set<std::string> native_libs;
};

// Scans user-code text for the three native loadLibrary call forms and
// matches native crypto library names case-insensitively inside the string
// argument. `user_text` must already be comment-stripped.
void detect_native_libs(const std::string& user_text,
                        const std::vector<std::string>& native_lib_names,
                        std::set<std::string>& out);

} // namespace cryptoscan
