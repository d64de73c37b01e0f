#include "cryptoscan/report.hpp"
#include "cryptoscan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cryptoscan {

using nlohmann::json;

namespace {

int cat_idx(Category c) { return static_cast<int>(c); }

Category cat_at(int i) { return static_cast<Category>(i); }

std::string canonical_scheme(const CallSite& cs) {
    const std::string prim = cs.primitive.empty() ? to_lower(cs.raw_arg.substr(0, cs.raw_arg.find('/')))
                                                  : cs.primitive;
    std::string s = prim;
    s += '/';
    s += mode_name(cs.mode.value_or(CipherMode::Ecb));
    s += '/';
    s += padding_name(cs.padding.value_or(CipherPadding::Pkcs7));
    return s;
}

} // namespace

std::int64_t CryptoReport::total_call_sites() const {
    std::int64_t t = 0;
    for (const auto& c : categories) t += c.call_sites;
    return t;
}

std::int64_t CryptoReport::total_imports() const {
    std::int64_t t = 0;
    for (const auto& [k, v] : imports) t += v;
    for (const auto& [k, v] : wildcard_imports) t += v;
    return t;
}

std::int64_t CryptoReport::unique_imports() const {
    return static_cast<std::int64_t>(imports.size() + wildcard_imports.size());
}

Category import_category(const std::string& simple_name, const PatternCatalog& catalog) {
    const ApiClassSpec* spec = catalog.find_class(simple_name);
    if (!spec) return Category::Other;
    if (spec->default_category == Category::Unresolved) return Category::SymmetricEnc;
    return spec->default_category;
}

CryptoReport evaluate(const SampleScan& scan, const PatternCatalog& catalog) {
    CryptoReport r;
    r.id = scan.sample.id;
    r.label = scan.sample.label;
    r.year = scan.sample.year;
    r.total_classes = scan.total_classes;
    r.user_classes = scan.user_classes;
    r.third_party_classes = scan.third_party_classes;
    r.system_classes = scan.system_classes;
    r.skipped_classes = scan.skipped_classes;
    r.java_libs = scan.libs.java_libs;
    r.native_libs = scan.libs.native_libs;

    for (const auto& cs : scan.call_sites) {
        auto& cat = r.categories[cat_idx(cs.category)];
        ++cat.call_sites;
        auto& cc = r.class_ctors[to_lower(cs.api_class)];
        ++cc.total;
        if (cs.obfuscated) {
            ++cat.obfuscated;
            ++cc.obfuscated;
        } else if (cs.primitive.empty()) {
            ++cat.unknown;
        } else {
            ++cat.primitives[cs.primitive];
        }
        if (cs.api_class == "Cipher" && !cs.obfuscated && !cs.raw_arg.empty())
            ++r.transformations[canonical_scheme(cs)];
    }

    std::array<std::set<std::string>, kNumCategories> importing_files;
    for (const auto& imp : scan.imports) {
        std::string simple = imp.imported_class;
        const std::size_t dot = simple.rfind('.');
        if (dot != std::string::npos) simple = simple.substr(dot + 1);
        if (imp.wildcard) {
            ++r.wildcard_imports[imp.imported_class];
        } else {
            ++r.imports[simple];
            importing_files[cat_idx(import_category(simple, catalog))].insert(imp.file);
        }
    }
    for (int i = 0; i < kNumCategories; ++i)
        r.importing_classes[i] = static_cast<std::int64_t>(importing_files[i].size());
    return r;
}

std::string report_to_json(const CryptoReport& r) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["id"] = r.id;
    j["label"] = r.label;
    j["year"] = r.year;
    json cats = json::object();
    for (int i = 0; i < kNumCategories; ++i) {
        const auto& c = r.categories[i];
        json jc;
        jc["call_sites"] = c.call_sites;
        jc["obfuscated"] = c.obfuscated;
        jc["unknown"] = c.unknown;
        jc["primitives"] = c.primitives;
        jc["importing_classes"] = r.importing_classes[i];
        cats[category_name(cat_at(i))] = std::move(jc);
    }
    j["categories"] = std::move(cats);
    json ctors = json::object();
    for (const auto& [name, cc] : r.class_ctors)
        ctors[name] = {{"total", cc.total}, {"obfuscated", cc.obfuscated}};
    j["class_ctors"] = std::move(ctors);
    j["transformations"] = r.transformations;
    j["imports"] = r.imports;
    j["wildcard_imports"] = r.wildcard_imports;
    j["java_libs"] = r.java_libs;
    j["native_libs"] = r.native_libs;
    j["classes"] = {{"total", r.total_classes},
                    {"user", r.user_classes},
                    {"third_party", r.third_party_classes},
                    {"system", r.system_classes},
                    {"skipped", r.skipped_classes}};
    return j.dump(2) + "\n";
}

CryptoReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    CryptoReport r;
    r.id = j.at("id").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.year = j.at("year").get<int>();
    for (int i = 0; i < kNumCategories; ++i) {
        const auto key = category_name(cat_at(i));
        if (!j.at("categories").contains(key)) continue;
        const auto& jc = j.at("categories").at(key);
        auto& c = r.categories[i];
        c.call_sites = jc.at("call_sites").get<std::int64_t>();
        c.obfuscated = jc.at("obfuscated").get<std::int64_t>();
        c.unknown = jc.value("unknown", 0);
        if (jc.contains("primitives"))
            c.primitives = jc.at("primitives").get<std::map<std::string, std::int64_t>>();
        r.importing_classes[i] = jc.value("importing_classes", 0);
    }
    if (j.contains("class_ctors"))
        for (const auto& [name, jc] : j.at("class_ctors").items())
            r.class_ctors[name] = {jc.at("total").get<std::int64_t>(),
                                   jc.at("obfuscated").get<std::int64_t>()};
    if (j.contains("transformations"))
        r.transformations = j.at("transformations").get<std::map<std::string, std::int64_t>>();
    if (j.contains("imports"))
        r.imports = j.at("imports").get<std::map<std::string, std::int64_t>>();
    if (j.contains("wildcard_imports"))
        r.wildcard_imports = j.at("wildcard_imports").get<std::map<std::string, std::int64_t>>();
    if (j.contains("java_libs"))
        r.java_libs = j.at("java_libs").get<std::set<std::string>>();
    if (j.contains("native_libs"))
        r.native_libs = j.at("native_libs").get<std::set<std::string>>();
    if (j.contains("classes")) {
        const auto& jc = j.at("classes");
        r.total_classes = jc.value("total", 0);
        r.user_classes = jc.value("user", 0);
        r.third_party_classes = jc.value("third_party", 0);
        r.system_classes = jc.value("system", 0);
        r.skipped_classes = jc.value("skipped", 0);
    }
    return r;
}

namespace {

void fold_report(GroupStats& g, const CryptoReport& r) {
    ++g.samples;
    if (r.has_crypto()) ++g.samples_with_crypto;
    if (r.has_third_party()) ++g.samples_with_third_party;
    g.total_call_sites += r.total_call_sites();
    std::set<std::string> prims_in_sample;
    for (int i = 0; i < kNumCategories; ++i) {
        const auto& c = r.categories[i];
        auto& gc = g.cats[i];
        gc.call_sites += c.call_sites;
        gc.obfuscated += c.obfuscated;
        gc.unknown += c.unknown;
        if (c.call_sites > 0) ++g.apk_counts[i];
        for (const auto& [p, n] : c.primitives) {
            gc.primitives[p] += n;
            g.primitive_calls[p] += n;
            prims_in_sample.insert(p);
        }
    }
    for (const auto& p : prims_in_sample) ++g.primitive_presence[p];
    for (const auto& [scheme, n] : r.transformations) g.symmetric_schemes[scheme] += n;
}

} // namespace

CorpusStats aggregate(const std::vector<CryptoReport>& reports) {
    if (reports.empty()) throw EmptyCorpus("aggregate: no reports");
    CorpusStats stats;
    std::map<std::pair<int, std::string>, GroupStats> groups;
    for (const auto& r : reports) {
        fold_report(stats.overall, r);
        auto& g = groups[{r.year, r.label}];
        g.year = r.year;
        g.label = r.label;
        fold_report(g, r);
    }
    for (auto& [key, g] : groups) stats.groups.push_back(std::move(g));
    return stats;
}

std::int64_t per_10k(std::int64_t call_sites, std::int64_t samples) {
    if (samples <= 0) throw EmptyCorpus("per_10k: zero samples");
    return call_sites * 10000 / samples; // integer division truncates toward zero
}

double round1(double x) {
    return std::floor(x * 10.0 + 0.5) / 10.0;
}

double category_share(const CorpusStats& stats, Category cat) {
    if (stats.overall.total_call_sites <= 0) throw EmptyCorpus("category_share: no call sites");
    const auto& c = stats.overall.cats[static_cast<int>(cat)];
    return round1(100.0 * static_cast<double>(c.call_sites) /
                  static_cast<double>(stats.overall.total_call_sites));
}

std::optional<double> obfuscation_rate(const CorpusStats& stats, Category cat) {
    const auto& c = stats.overall.cats[static_cast<int>(cat)];
    if (c.call_sites == 0) return std::nullopt;
    return round1(100.0 * static_cast<double>(c.obfuscated) / static_cast<double>(c.call_sites));
}

namespace {

std::string fmt1(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << v;
    return os.str();
}

} // namespace

std::string categories_csv(const CorpusStats& stats) {
    std::ostringstream os;
    os << "category,call_sites,pct_obfuscated,pct_apk\n";
    for (int i = 0; i < kNumCategories; ++i) {
        const auto& c = stats.overall.cats[i];
        os << category_name(cat_at(i)) << ',' << c.call_sites << ',';
        const auto rate = obfuscation_rate(stats, cat_at(i));
        os << (rate ? fmt1(*rate) : "n/a") << ',';
        os << fmt1(round1(100.0 * static_cast<double>(stats.overall.apk_counts[i]) /
                          static_cast<double>(stats.overall.samples)))
           << '\n';
    }
    os << "Total," << stats.overall.total_call_sites << ",,\n";
    return os.str();
}

std::string per10k_csv(const CorpusStats& stats) {
    std::ostringstream os;
    os << "year,label,samples,call_sites,call_sites_per_10k\n";
    for (const auto& g : stats.groups)
        os << g.year << ',' << g.label << ',' << g.samples << ',' << g.total_call_sites << ','
           << per_10k(g.total_call_sites, g.samples) << '\n';
    os << "all,all," << stats.overall.samples << ',' << stats.overall.total_call_sites << ','
       << per_10k(stats.overall.total_call_sites, stats.overall.samples) << '\n';
    return os.str();
}

std::string trends_csv(const CorpusStats& stats) {
    std::ostringstream os;
    os << "year,label,metric,value\n";
    for (const auto& g : stats.groups) {
        const double n = static_cast<double>(g.samples);
        os << g.year << ',' << g.label << ",pct_with_crypto,"
           << fmt1(round1(100.0 * g.samples_with_crypto / n)) << '\n';
        os << g.year << ',' << g.label << ",pct_with_third_party,"
           << fmt1(round1(100.0 * g.samples_with_third_party / n)) << '\n';
        for (const auto& [p, count] : g.primitive_presence)
            os << g.year << ',' << g.label << ",pct_apk_" << to_lower(p) << ','
               << fmt1(round1(100.0 * count / n)) << '\n';
    }
    return os.str();
}

std::string symmetric_schemes_csv(const CorpusStats& stats) {
    std::ostringstream os;
    os << "year,label,scheme,call_sites\n";
    for (const auto& g : stats.groups)
        for (const auto& [scheme, n] : g.symmetric_schemes)
            os << g.year << ',' << g.label << ',' << scheme << ',' << n << '\n';
    return os.str();
}

} // namespace cryptoscan
