#ifndef ADSCOPE_LIBID_FINGERPRINT_HPP
#define ADSCOPE_LIBID_FINGERPRINT_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "adscope/errors.hpp"
#include "adscope/ingest/scan.hpp"
#include "adscope/libid/registry.hpp"

namespace adscope::libid {

/// Name-independent structural fingerprint of a library package: the set of
/// per-class shapes plus the string constants appearing in its code.
struct LibraryFingerprint {
    std::set<ingest::ClassShape> class_signatures;
    std::set<std::string> anchor_strings;

    bool empty() const { return class_signatures.empty(); }
};

struct LibraryHit {
    enum class MatchedBy { Prefix, Fingerprint };
    std::string app_id;
    std::string canonical_name;
    MatchedBy matched_by = MatchedBy::Prefix;
    std::string matched_prefix;  // the package treated as this library's root
    double match_score = 1.0;
};

namespace detail {

template <typename Set>
inline double jaccard(const Set& a, const Set& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline bool package_under(const std::string& pkg, const std::string& root) {
    return pkg == root || (pkg.size() > root.size() && pkg.starts_with(root) &&
                           pkg[root.size()] == '.');
}

}  // namespace detail

/// Similarity in [0,1]: mean of class-signature Jaccard and anchor-string
/// Jaccard; class-signature Jaccard alone when either side carries no anchor
/// strings.
inline double similarity(const LibraryFingerprint& a, const LibraryFingerprint& b) {
    double classes = detail::jaccard(a.class_signatures, b.class_signatures);
    if (a.anchor_strings.empty() || b.anchor_strings.empty()) return classes;
    return (classes + detail::jaccard(a.anchor_strings, b.anchor_strings)) / 2.0;
}

inline LibraryFingerprint fingerprint_classes(const std::vector<ingest::ClassInfo>& classes,
                                              const std::string& package_root) {
    LibraryFingerprint fp;
    for (const ingest::ClassInfo& c : classes) {
        if (!detail::package_under(package_of(c.descriptor), package_root)) continue;
        fp.class_signatures.insert(c.shape);
        fp.anchor_strings.insert(c.string_constants.begin(), c.string_constants.end());
    }
    if (fp.empty()) throw EmptyPackage(package_root);
    return fp;
}

inline LibraryFingerprint fingerprint_classes(const dex::DexFile& dex,
                                              const std::string& package_root) {
    std::vector<ingest::ClassInfo> infos;
    infos.reserve(dex.classes.size());
    for (const dex::ClassDef& cls : dex.classes)
        infos.push_back(ingest::detail::summarize_class(dex, cls));
    return fingerprint_classes(infos, package_root);
}

/// Look for renamed copies of fingerprinted libraries among the app's
/// packages. Every package (and ancestor) not already claimed by a registry
/// prefix is a candidate root; the best-scoring root at or above `threshold`
/// yields a hit. Ties prefer the more specific root.
inline std::vector<LibraryHit> detect_obfuscated(
    const std::string& app_id, const std::vector<ingest::ClassInfo>& classes,
    const Registry& registry,
    const std::map<std::string, LibraryFingerprint>& fingerprints,  // canonical -> fp
    double threshold = 0.8) {
    std::vector<LibraryHit> hits;
    if (fingerprints.empty()) return hits;

    // Candidate roots: all package prefixes present in the app.
    std::set<std::string> roots;
    for (const ingest::ClassInfo& c : classes) {
        std::string pkg = package_of(c.descriptor);
        while (!pkg.empty()) {
            roots.insert(pkg);
            size_t dot = pkg.rfind('.');
            if (dot == std::string::npos) break;
            pkg.resize(dot);
        }
    }

    for (const auto& [canonical, reference] : fingerprints) {
        double best_score = 0.0;
        std::string best_root;
        for (const std::string& root : roots) {
            if (registry.match_package(root)) continue;  // already a known library
            LibraryFingerprint candidate;
            try {
                candidate = fingerprint_classes(classes, root);
            } catch (const EmptyPackage&) {
                continue;
            }
            double score = similarity(candidate, reference);
            if (score > best_score ||
                (score == best_score && root.size() > best_root.size())) {
                best_score = score;
                best_root = root;
            }
        }
        if (best_score >= threshold) {
            hits.push_back(LibraryHit{app_id, canonical, LibraryHit::MatchedBy::Fingerprint,
                                      best_root, best_score});
        }
    }
    return hits;
}

// --- fingerprint blob persistence (JSON) ---

inline nlohmann::json fingerprint_to_json(const LibraryFingerprint& fp) {
    nlohmann::json j;
    auto& sigs = j["class_signatures"] = nlohmann::json::array();
    for (const auto& shape : fp.class_signatures) {
        nlohmann::json js = nlohmann::json::array();
        for (const auto& [params, kind] : shape)
            js.push_back(nlohmann::json::array({params, static_cast<int>(kind)}));
        sigs.push_back(std::move(js));
    }
    j["anchor_strings"] = fp.anchor_strings;
    return j;
}

inline LibraryFingerprint fingerprint_from_json(const nlohmann::json& j) {
    LibraryFingerprint fp;
    for (const auto& js : j.at("class_signatures")) {
        ingest::ClassShape shape;
        for (const auto& s : js)
            shape.emplace_back(s.at(0).get<uint32_t>(),
                               static_cast<ingest::ReturnKind>(s.at(1).get<int>()));
        fp.class_signatures.insert(std::move(shape));
    }
    for (const auto& s : j.at("anchor_strings")) fp.anchor_strings.insert(s.get<std::string>());
    return fp;
}

inline LibraryFingerprint load_fingerprint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open fingerprint " + path);
    return fingerprint_from_json(nlohmann::json::parse(in));
}

}  // namespace adscope::libid

#endif
