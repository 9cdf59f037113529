#ifndef ADSCOPE_PRIVCLASS_RULES_HPP
#define ADSCOPE_PRIVCLASS_RULES_HPP

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adscope/apirecon/working_api.hpp"
#include "adscope/errors.hpp"
#include "adscope/ingest/manifest.hpp"  // detail::split_tabs / trim
#include "adscope/privclass/category.hpp"

namespace adscope::privclass {

enum class RuleSource { Override, Shipped, Heuristic };  // descending precedence

inline std::string_view to_string(RuleSource s) {
    switch (s) {
        case RuleSource::Override: return "override";
        case RuleSource::Shipped: return "shipped";
        case RuleSource::Heuristic: return "heuristic";
    }
    return "?";
}

struct PrivacyRule {
    std::string library;        // canonical name or "*"
    std::string name_matcher;   // exact name, or pattern with leading/trailing "*"
    std::string descriptor_matcher;  // empty or "*" = any; otherwise exact
    PrivacyCategory category = PrivacyCategory::ArbitraryData;
    RuleSource source = RuleSource::Shipped;
    std::string note;

    bool name_is_exact() const {
        return name_matcher.find('*') == std::string::npos;
    }

    bool matches_name(std::string_view name) const {
        std::string_view pat = name_matcher;
        bool star_front = pat.starts_with('*');
        bool star_back = pat.size() > (star_front ? 1u : 0u) && pat.ends_with('*');
        if (star_front) pat.remove_prefix(1);
        if (star_back) pat.remove_suffix(1);
        if (star_front && star_back) return name.find(pat) != std::string_view::npos;
        if (star_front) return name.ends_with(pat);
        if (star_back) return name.starts_with(pat);
        return name == pat;
    }

    bool matches(const std::string& library_name, const dex::MethodRef& method) const {
        if (library != "*" && library != library_name) return false;
        if (!matches_name(method.method_name)) return false;
        if (!descriptor_matcher.empty() && descriptor_matcher != "*" &&
            descriptor_matcher != method.descriptor())
            return false;
        return true;
    }

    /// Lower ranks first within one source level.
    int specificity_rank() const {
        bool has_desc = !descriptor_matcher.empty() && descriptor_matcher != "*";
        if (name_is_exact()) return has_desc ? 0 : 1;
        return has_desc ? 2 : 3;
    }
};

struct Ruleset {
    std::vector<PrivacyRule> rules;  // declaration order preserved
};

/// Ruleset file: tab-separated per rule:
///   library|*, name matcher, descriptor matcher (or *), category, source, [note]
inline Ruleset parse_ruleset(std::istream& in, RuleSource default_source) {
    Ruleset rs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = ingest::detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = ingest::detail::split_tabs(sv);
        if (fields.size() < 4)
            throw RulesetSyntax("expected at least 4 columns", line_no);
        PrivacyRule rule;
        rule.library = std::string(ingest::detail::trim(fields[0]));
        rule.name_matcher = std::string(ingest::detail::trim(fields[1]));
        rule.descriptor_matcher = std::string(ingest::detail::trim(fields[2]));
        auto cat = category_from_string(ingest::detail::trim(fields[3]));
        if (!cat)
            throw RulesetSyntax("unknown category '" +
                                    std::string(ingest::detail::trim(fields[3])) + "'",
                                line_no);
        rule.category = *cat;
        rule.source = default_source;
        if (fields.size() >= 5) {
            std::string_view src = ingest::detail::trim(fields[4]);
            if (src == "override")
                rule.source = RuleSource::Override;
            else if (src == "shipped")
                rule.source = RuleSource::Shipped;
            else if (src == "heuristic")
                rule.source = RuleSource::Heuristic;
            else if (!src.empty())
                throw RulesetSyntax("unknown source '" + std::string(src) + "'", line_no);
        }
        if (fields.size() >= 6) rule.note = std::string(ingest::detail::trim(fields[5]));
        if (rule.library.empty() || rule.name_matcher.empty())
            throw RulesetSyntax("empty library or matcher", line_no);
        rs.rules.push_back(std::move(rule));
    }
    return rs;
}

inline Ruleset load_ruleset(const std::string& path,
                            RuleSource default_source = RuleSource::Shipped) {
    std::ifstream in(path);
    if (!in) throw RulesetSyntax("cannot open " + path, 0);
    return parse_ruleset(in, default_source);
}

/// Overrides are kept in a separate user file and merged ahead of the
/// shipped rules.
inline Ruleset merge_rulesets(const Ruleset& shipped, const Ruleset& overrides) {
    Ruleset merged;
    merged.rules = overrides.rules;
    merged.rules.insert(merged.rules.end(), shipped.rules.begin(), shipped.rules.end());
    return merged;
}

struct Classification {
    std::optional<PrivacyCategory> category;
    const PrivacyRule* rule = nullptr;  // winning rule, null when unmatched
};

struct ClassifiedApi {
    // library -> method -> classification; every working-API method appears once.
    std::map<std::string, std::map<dex::MethodRef, Classification>> per_library;

    struct Coverage {
        uint64_t classified = 0;
        uint64_t unmatched = 0;
    };
    std::map<std::string, Coverage> coverage;

    std::optional<PrivacyCategory> category_of(const std::string& library,
                                               const dex::MethodRef& method) const {
        auto lib = per_library.find(library);
        if (lib == per_library.end()) return std::nullopt;
        auto m = lib->second.find(method);
        if (m == lib->second.end()) return std::nullopt;
        return m->second.category;
    }
};

namespace detail {

inline int source_rank(RuleSource s) {
    switch (s) {
        case RuleSource::Override: return 0;
        case RuleSource::Shipped: return 1;
        case RuleSource::Heuristic: return 2;
    }
    return 3;
}

}  // namespace detail

/// Deterministic resolution: override > shipped > heuristic; within a level
/// the most specific matcher wins; remaining ties go to the first-declared
/// rule. Two equally specific overrides that disagree are an error.
inline Classification resolve_rule(const std::string& library, const dex::MethodRef& method,
                                   const Ruleset& ruleset) {
    const PrivacyRule* best = nullptr;
    for (const PrivacyRule& rule : ruleset.rules) {
        if (!rule.matches(library, method)) continue;
        if (!best) {
            best = &rule;
            continue;
        }
        auto key = [](const PrivacyRule& r) {
            return std::pair{detail::source_rank(r.source), r.specificity_rank()};
        };
        if (key(rule) < key(*best)) {
            best = &rule;
        } else if (key(rule) == key(*best) && rule.source == RuleSource::Override &&
                   rule.category != best->category) {
            throw ConflictingOverrides(method.method_name + " on " + library + ": " +
                                       std::string(to_string(best->category)) + " vs " +
                                       std::string(to_string(rule.category)));
        }
    }
    if (!best) return {};
    return Classification{best->category, best};
}

inline ClassifiedApi classify(const std::map<std::string, apirecon::WorkingApi>& apis,
                              const Ruleset& ruleset) {
    ClassifiedApi out;
    for (const auto& [library, api] : apis) {
        auto& methods = out.per_library[library];
        auto& cov = out.coverage[library];
        for (const auto& [method, entry] : api.entries) {
            Classification c = resolve_rule(library, method, ruleset);
            if (c.category)
                cov.classified += 1;
            else
                cov.unmatched += 1;
            methods.emplace(method, c);
        }
    }
    return out;
}

}  // namespace adscope::privclass

#endif
