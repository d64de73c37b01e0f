#include "cryptoscan/scanner.hpp"
#include "cryptoscan/errors.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace cryptoscan {

namespace {

struct AnnotatedText {
    std::string stripped;        // comments replaced by spaces
    std::vector<bool> in_literal; // true for positions inside a string/char literal
};

AnnotatedText annotate(const std::string& text) {
    AnnotatedText out;
    out.stripped = text;
    out.in_literal.assign(text.size(), false);
    enum State { Code, LineComment, BlockComment, Str, Chr } state = Code;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const char next = i + 1 < text.size() ? text[i + 1] : '\0';
        switch (state) {
            case Code:
                if (c == '/' && next == '/') {
                    state = LineComment;
                    out.stripped[i] = ' ';
                } else if (c == '/' && next == '*') {
                    state = BlockComment;
                    out.stripped[i] = ' ';
                } else if (c == '"') {
                    state = Str;
                } else if (c == '\'') {
                    state = Chr;
                }
                break;
            case LineComment:
                if (c == '\n') state = Code;
                else out.stripped[i] = ' ';
                break;
            case BlockComment:
                if (c == '*' && next == '/') {
                    out.stripped[i] = ' ';
                    out.stripped[i + 1] = ' ';
                    ++i;
                    state = Code;
                } else if (c != '\n') {
                    out.stripped[i] = ' ';
                }
                break;
            case Str:
                if (c == '\\') {
                    out.in_literal[i] = true;
                    if (i + 1 < text.size()) out.in_literal[i + 1] = true;
                    ++i;
                } else if (c == '"') {
                    state = Code;
                } else {
                    out.in_literal[i] = true;
                }
                break;
            case Chr:
                if (c == '\\') {
                    out.in_literal[i] = true;
                    if (i + 1 < text.size()) out.in_literal[i + 1] = true;
                    ++i;
                } else if (c == '\'') {
                    state = Code;
                } else {
                    out.in_literal[i] = true;
                }
                break;
        }
    }
    return out;
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::size_t skip_ws(const std::string& s, std::size_t pos, int max_newlines = 1 << 20,
                    int* newlines_seen = nullptr) {
    int nl = 0;
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
        if (s[pos] == '\n') {
            if (++nl > max_newlines) break;
        }
        ++pos;
    }
    if (newlines_seen) *newlines_seen = nl;
    return pos;
}

// Parses the first constructor argument starting right after '('. Decompilers
// wrap long lines, so the search may cross up to 2 continuation lines.
struct ArgParse {
    enum Kind { Literal, Obfuscated, None } kind = Obfuscated;
    std::string literal;
};

ArgParse parse_first_arg(const std::string& text, std::size_t after_paren) {
    ArgParse out;
    std::size_t pos = skip_ws(text, after_paren, 2);
    if (pos >= text.size()) {
        out.kind = ArgParse::Obfuscated;
        return out;
    }
    if (text[pos] == ')') {
        out.kind = ArgParse::None;
        return out;
    }
    if (text[pos] != '"') {
        out.kind = ArgParse::Obfuscated;
        return out;
    }
    std::string lit;
    ++pos;
    while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\' && pos + 1 < text.size()) {
            lit.push_back(text[pos + 1]);
            pos += 2;
        } else {
            lit.push_back(text[pos]);
            ++pos;
        }
    }
    if (pos >= text.size()) {
        out.kind = ArgParse::Obfuscated;
        return out;
    }
    pos = skip_ws(text, pos + 1, 2);
    // "A" + "ES" defeats literal resolution just like a variable does
    if (pos < text.size() && text[pos] == '+') {
        out.kind = ArgParse::Obfuscated;
        return out;
    }
    out.kind = ArgParse::Literal;
    out.literal = std::move(lit);
    return out;
}

std::vector<std::size_t> line_offsets(const std::string& text) {
    std::vector<std::size_t> offs{0};
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') offs.push_back(i + 1);
    return offs;
}

int line_of(const std::vector<std::size_t>& offs, std::size_t pos) {
    auto it = std::upper_bound(offs.begin(), offs.end(), pos);
    return static_cast<int>(it - offs.begin()); // 1-based
}

} // namespace

std::string strip_comments(const std::string& text) {
    return annotate(text).stripped;
}

std::pair<std::vector<CallSite>, std::vector<ImportRecord>>
scan_class(const SourceClass& cls, const PatternCatalog& catalog) {
    std::vector<CallSite> sites;
    std::vector<ImportRecord> imports;
    const AnnotatedText at = annotate(cls.text);
    const std::string& txt = at.stripped;
    const auto offs = line_offsets(txt);

    for (const auto& spec : catalog.classes()) {
        const std::string& name = spec.simple_name;
        std::size_t pos = 0;
        while ((pos = txt.find(name, pos)) != std::string::npos) {
            const std::size_t start = pos;
            pos += name.size();
            if (at.in_literal[start]) continue;
            if (start > 0 && ident_char(txt[start - 1])) continue;
            if (pos < txt.size() && ident_char(txt[pos])) continue;

            for (const auto& method : spec.constructor_methods) {
                std::size_t after = std::string::npos; // position just past '('
                if (method == "new") {
                    // require a preceding `new` keyword
                    std::size_t r = start;
                    while (r > 0 && std::isspace(static_cast<unsigned char>(txt[r - 1]))) --r;
                    if (r < 3 || txt.compare(r - 3, 3, "new") != 0) continue;
                    if (r > 3 && ident_char(txt[r - 4])) continue;
                    std::size_t p = skip_ws(txt, pos);
                    if (p < txt.size() && txt[p] == '(') after = p + 1;
                } else {
                    std::size_t p = skip_ws(txt, pos);
                    if (p >= txt.size() || txt[p] != '.') continue;
                    p = skip_ws(txt, p + 1);
                    if (txt.compare(p, method.size(), method) != 0) continue;
                    p += method.size();
                    if (p < txt.size() && ident_char(txt[p])) continue;
                    p = skip_ws(txt, p);
                    if (p < txt.size() && txt[p] == '(') after = p + 1;
                }
                if (after == std::string::npos) continue;

                CallSite cs;
                cs.file = cls.path;
                cs.line = line_of(offs, start);
                cs.column = static_cast<int>(start - offs[cs.line - 1]) + 1;
                cs.api_class = name;

                // stripped text keeps literal contents; comments between the
                // parenthesis and the argument are already blanked
                const ArgParse arg = parse_first_arg(txt, after);
                if (arg.kind == ArgParse::Literal) {
                    cs.raw_arg = arg.literal;
                    const Transformation t = catalog.parse_transformation(arg.literal);
                    if (t.primitive) cs.primitive = t.primitive->name;
                    cs.category = catalog.categorize(spec, t.primitive);
                    if (name == "Cipher") {
                        cs.mode = t.mode;
                        cs.padding = t.padding;
                    }
                } else if (arg.kind == ArgParse::None) {
                    // e.g. `new SecureRandom()`: no argument to resolve, but the
                    // construction itself is not obfuscated
                    cs.category = spec.default_category;
                } else {
                    cs.obfuscated = true;
                    cs.category = spec.default_category;
                }
                sites.push_back(std::move(cs));
                break;
            }
        }
    }

    // import lines
    std::istringstream lines(txt);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        if (line.compare(b, 7, "import ") != 0) continue;
        std::size_t e = line.find(';', b);
        if (e == std::string::npos) continue;
        std::string fq = line.substr(b + 7, e - b - 7);
        fq.erase(std::remove_if(fq.begin(), fq.end(),
                                [](unsigned char c) { return std::isspace(c); }),
                 fq.end());
        if (fq.rfind("javax.crypto.", 0) != 0 && fq.rfind("java.security.", 0) != 0) continue;
        ImportRecord rec;
        rec.file = cls.path;
        rec.wildcard = fq.size() >= 2 && fq.compare(fq.size() - 2, 2, ".*") == 0;
        rec.imported_class = rec.wildcard ? fq.substr(0, fq.size() - 2) : fq;
        imports.push_back(std::move(rec));
    }

    std::sort(sites.begin(), sites.end(), [](const CallSite& a, const CallSite& b) {
        return std::tie(a.file, a.line, a.column) < std::tie(b.file, b.line, b.column);
    });
    return {std::move(sites), std::move(imports)};
}

int count_methods(const std::string& stripped_text) {
    static const char* kControl[] = {"if", "for", "while", "switch", "catch", "synchronized", "return"};
    std::istringstream lines(stripped_text);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        if (line[e] != '{') continue;
        if (line.find('(') == std::string::npos) continue;
        bool control = false;
        for (const char* kw : kControl) {
            const std::size_t len = std::string(kw).size();
            if (line.compare(b, len, kw) == 0 &&
                (b + len >= line.size() || !ident_char(line[b + len]))) {
                control = true;
                break;
            }
        }
        if (!control) ++count;
    }
    return count;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path);
    std::vector<ManifestEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("manifest " + path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ManifestEntry e;
        e.id = j.at("id").get<std::string>();
        e.label = j.at("label").get<std::string>();
        if (e.label != "benign" && e.label != "malicious")
            throw ValidationError("manifest " + path + ":" + std::to_string(lineno) +
                                  ": label must be benign or malicious");
        e.year = j.value("year", 0);
        // relative sample paths are resolved against the manifest's directory
        const std::string raw_path = j.at("path").get<std::string>();
        const fs::path base = fs::path(path).parent_path();
        e.path = fs::path(raw_path).is_absolute() || base.empty()
                     ? raw_path
                     : (base / raw_path).generic_string();
        e.vt_flags = j.value("vt_flags", 0);
        e.market = j.value("market", "");
        entries.push_back(std::move(e));
    }
    return entries;
}

bool is_malicious(const ManifestEntry& e, bool strict_vt) {
    if (strict_vt) return e.vt_flags >= 5;
    return e.label == "malicious";
}

SampleScan scan_sample(const ManifestEntry& sample, const PatternCatalog& catalog,
                       const SignatureDb& signatures, const ScanOptions& opts) {
    SampleScan out;
    out.sample = sample;
    if (!fs::exists(sample.path) || !fs::is_directory(sample.path))
        throw MissingSample("sample root not found: " + sample.path);

    const fs::path root(sample.path);
    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file() && it->path().extension() == ".java") files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    const bool want_fingerprints =
        opts.use_fingerprints &&
        std::any_of(signatures.signatures().begin(), signatures.signatures().end(),
                    [](const PackageSignature& s) { return s.fingerprint.has_value(); });

    // package -> structural profile, computed lazily per directory
    std::map<std::string, std::optional<Fingerprint>> package_profiles;
    std::map<std::string, std::vector<std::pair<fs::path, std::string>>> by_package;
    for (const auto& f : files) {
        std::string pkg = fs::relative(f.parent_path(), root).generic_string();
        if (pkg == ".") pkg.clear();
        by_package[pkg].push_back({f, std::string()});
    }
    if (want_fingerprints) {
        for (auto& [pkg, entries] : by_package) {
            std::vector<int> counts;
            bool ok = true;
            for (auto& [f, text] : entries) {
                std::ifstream in(f);
                if (!in) { ok = false; continue; }
                std::stringstream ss;
                ss << in.rdbuf();
                text = ss.str();
                counts.push_back(count_methods(strip_comments(text)));
            }
            package_profiles[pkg] = ok && !counts.empty()
                                        ? std::optional<Fingerprint>(fingerprint_profile(counts))
                                        : std::nullopt;
        }
    }

    std::string user_text; // concatenated user-code text for native-lib detection

    for (const auto& f : files) {
        std::string pkg = fs::relative(f.parent_path(), root).generic_string();
        if (pkg == ".") pkg.clear();
        ++out.total_classes;

        std::optional<Fingerprint> profile;
        if (want_fingerprints) profile = package_profiles[pkg];
        const ClassOrigin origin = classify_class(pkg, signatures, profile);

        if (origin == ClassOrigin::System) {
            ++out.system_classes;
            continue;
        }
        if (origin == ClassOrigin::ThirdParty) {
            ++out.third_party_classes;
            const PackageSignature* sig = signatures.match(pkg, profile);
            if (sig && sig->kind == SignatureKind::CryptoLibJava)
                out.libs.java_libs.insert(sig->label);
            continue;
        }

        SourceClass cls;
        cls.path = fs::relative(f, root).generic_string();
        cls.package_path = pkg;
        cls.origin = ClassOrigin::User;
        {
            std::ifstream in(f);
            if (!in) {
                ++out.skipped_classes;
                continue;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            cls.text = ss.str();
        }
        ++out.user_classes;

        auto [sites, imports] = scan_class(cls, catalog);
        out.call_sites.insert(out.call_sites.end(), sites.begin(), sites.end());
        out.imports.insert(out.imports.end(), imports.begin(), imports.end());
        user_text += strip_comments(cls.text);
        user_text += '\n';
    }

    detect_native_libs(user_text, catalog.native_crypto_libs(), out.libs.native_libs);

    std::sort(out.call_sites.begin(), out.call_sites.end(),
              [](const CallSite& a, const CallSite& b) {
                  return std::tie(a.file, a.line, a.column) < std::tie(b.file, b.line, b.column);
              });
    std::sort(out.imports.begin(), out.imports.end(),
              [](const ImportRecord& a, const ImportRecord& b) {
                  return std::tie(a.file, a.imported_class) < std::tie(b.file, b.imported_class);
              });
    return out;
}

} // namespace cryptoscan
