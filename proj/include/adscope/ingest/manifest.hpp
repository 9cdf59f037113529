#ifndef ADSCOPE_INGEST_MANIFEST_HPP
#define ADSCOPE_INGEST_MANIFEST_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adscope/errors.hpp"

namespace adscope::ingest {

// Google Play install-bucket lower bounds.
inline constexpr std::array<int64_t, 18> kInstallBuckets = {
    0,     1,      5,      10,      50,      100,      500,      1000,     5000,
    10000, 50000,  100000, 500000,  1000000, 5000000,  10000000, 50000000,
    100000000};

inline bool is_canonical_bucket(int64_t lower) {
    return std::find(kInstallBuckets.begin(), kInstallBuckets.end(), lower) !=
           kInstallBuckets.end();
}

struct AppRecord {
    std::string app_id;
    std::string source;
    std::optional<int64_t> install_bucket_lower;  // nullopt = unknown
    std::map<std::string, std::string> extra;
};

struct CorpusManifest {
    std::vector<AppRecord> apps;
    std::string registry_version;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Parse an install-bucket field: a lower-bound integer, a store-style range
/// "5,000 – 10,000" (lower bound is taken), or empty/"unknown".
inline std::optional<int64_t> parse_bucket(std::string_view field, size_t line_no) {
    field = trim(field);
    if (field.empty() || field == "unknown" || field == "?") return std::nullopt;
    std::string digits;
    for (char c : field) {
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
        } else if (c == ',') {
            continue;  // thousands separator
        } else {
            break;  // range separator: only the lower bound matters
        }
    }
    if (digits.empty())
        throw ManifestSyntax("unparseable install bucket '" + std::string(field) + "'",
                             line_no);
    int64_t lower = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), lower);
    if (!is_canonical_bucket(lower))
        throw ManifestSyntax("non-canonical install bucket lower bound " +
                                 std::to_string(lower),
                             line_no);
    return lower;
}

}  // namespace detail

inline CorpusManifest parse_manifest(std::istream& in) {
    CorpusManifest manifest;
    std::set<std::string> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = detail::split_tabs(sv);
        if (fields.size() < 2)
            throw ManifestSyntax("expected at least app_id and source", line_no);
        AppRecord rec;
        rec.app_id = std::string(detail::trim(fields[0]));
        rec.source = std::string(detail::trim(fields[1]));
        if (rec.app_id.empty()) throw ManifestSyntax("empty app_id", line_no);
        if (!seen.insert(rec.app_id).second) throw DuplicateAppId(rec.app_id);
        if (fields.size() >= 3)
            rec.install_bucket_lower = detail::parse_bucket(fields[2], line_no);
        for (size_t i = 3; i < fields.size(); ++i) {
            std::string_view kv = detail::trim(fields[i]);
            if (kv.empty()) continue;
            size_t eq = kv.find('=');
            if (eq == std::string_view::npos)
                throw ManifestSyntax("metadata field is not key=value: '" +
                                         std::string(kv) + "'",
                                     line_no);
            rec.extra[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
        }
        manifest.apps.push_back(std::move(rec));
    }
    return manifest;
}

inline CorpusManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestSyntax("cannot open " + path, 0);
    return parse_manifest(in);
}

inline void write_manifest(const CorpusManifest& manifest, std::ostream& out) {
    for (const AppRecord& rec : manifest.apps) {
        out << rec.app_id << '\t' << rec.source << '\t';
        if (rec.install_bucket_lower)
            out << *rec.install_bucket_lower;
        else
            out << "unknown";
        for (const auto& [k, v] : rec.extra) out << '\t' << k << '=' << v;
        out << '\n';
    }
}

}  // namespace adscope::ingest

#endif
