#ifndef ADSCOPE_LIBID_REGISTRY_HPP
#define ADSCOPE_LIBID_REGISTRY_HPP

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adscope/errors.hpp"
#include "adscope/ingest/manifest.hpp"  // detail::split_tabs / trim

namespace adscope::libid {

/// Dotted package of a class descriptor: "Lcom/google/ads/AdView;" ->
/// "com.google.ads". Empty for descriptors without a package or non-class
/// descriptors.
inline std::string package_of(std::string_view descriptor) {
    if (descriptor.size() < 3 || descriptor.front() != 'L' || descriptor.back() != ';')
        return {};
    std::string_view body = descriptor.substr(1, descriptor.size() - 2);
    size_t last_slash = body.rfind('/');
    if (last_slash == std::string_view::npos) return {};
    std::string pkg(body.substr(0, last_slash));
    for (char& c : pkg)
        if (c == '/') c = '.';
    return pkg;
}

inline bool valid_dotted_prefix(std::string_view prefix) {
    if (prefix.empty() || prefix.front() == '.' || prefix.back() == '.') return false;
    bool prev_dot = true;
    for (char c : prefix) {
        if (c == '.') {
            if (prev_dot) return false;
            prev_dot = true;
        } else if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                   (c >= '0' && c <= '9') || c == '_' || c == '$') {
            prev_dot = false;
        } else {
            return false;
        }
    }
    return true;
}

struct LibrarySpec {
    std::string canonical_name;
    std::vector<std::string> package_prefixes;
    std::string fingerprint_path;  // optional reference, resolved by the caller
    std::string notes;
};

/// Immutable prefix registry with longest-prefix-wins matching.
class Registry {
  public:
    void add(const LibrarySpec& spec) {
        specs_.push_back(spec);
        for (const std::string& prefix : spec.package_prefixes)
            add_prefix(prefix, spec.canonical_name);
    }

    /// Extra prefix for an already-known library (e.g. an obfuscated package
    /// resolved by fingerprint).
    void add_prefix(const std::string& prefix, const std::string& canonical) {
        auto [it, inserted] = prefix_to_name_.emplace(prefix, canonical);
        if (!inserted && it->second != canonical)
            throw AmbiguousRegistry("prefix " + prefix + " claimed by " + it->second +
                                    " and " + canonical);
    }

    /// Canonical library name owning the class, by the longest matching
    /// package prefix; nullopt when no prefix matches.
    std::optional<std::string> match_class(std::string_view descriptor) const {
        return match_package(package_of(descriptor));
    }

    std::optional<std::string> match_package(std::string pkg) const {
        while (!pkg.empty()) {
            auto it = prefix_to_name_.find(pkg);
            if (it != prefix_to_name_.end()) return it->second;
            size_t dot = pkg.rfind('.');
            if (dot == std::string::npos) break;
            pkg.resize(dot);
        }
        return std::nullopt;
    }

    const std::vector<LibrarySpec>& specs() const { return specs_; }

    std::vector<std::string> canonical_names() const {
        std::vector<std::string> names;
        std::set<std::string> seen;
        for (const auto& s : specs_)
            if (seen.insert(s.canonical_name).second) names.push_back(s.canonical_name);
        return names;
    }

  private:
    std::vector<LibrarySpec> specs_;
    std::map<std::string, std::string, std::less<>> prefix_to_name_;
};

/// Registry file: one library per line, tab-separated:
///   canonical name, comma-separated package prefixes, [fingerprint path]
inline Registry parse_registry(std::istream& in) {
    Registry registry;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = ingest::detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = ingest::detail::split_tabs(sv);
        if (fields.size() < 2)
            throw AmbiguousRegistry("line " + std::to_string(line_no) +
                                    ": expected name and prefixes");
        LibrarySpec spec;
        spec.canonical_name = std::string(ingest::detail::trim(fields[0]));
        std::string_view prefixes = ingest::detail::trim(fields[1]);
        while (!prefixes.empty()) {
            size_t comma = prefixes.find(',');
            std::string_view p = ingest::detail::trim(prefixes.substr(0, comma));
            if (!p.empty()) {
                if (!valid_dotted_prefix(p))
                    throw AmbiguousRegistry("line " + std::to_string(line_no) +
                                            ": invalid prefix '" + std::string(p) + "'");
                spec.package_prefixes.emplace_back(p);
            }
            if (comma == std::string_view::npos) break;
            prefixes.remove_prefix(comma + 1);
        }
        if (fields.size() >= 3)
            spec.fingerprint_path = std::string(ingest::detail::trim(fields[2]));
        if (fields.size() >= 4) spec.notes = std::string(ingest::detail::trim(fields[3]));
        if (spec.package_prefixes.empty() && spec.fingerprint_path.empty())
            throw AmbiguousRegistry("line " + std::to_string(line_no) + ": " +
                                    spec.canonical_name +
                                    " has neither prefixes nor a fingerprint");
        registry.add(spec);
    }
    return registry;
}

inline Registry load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw AmbiguousRegistry("cannot open " + path);
    return parse_registry(in);
}

}  // namespace adscope::libid

#endif
