#ifndef ADSCOPE_PRIVCLASS_HEURISTIC_HPP
#define ADSCOPE_PRIVCLASS_HEURISTIC_HPP

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adscope/dex/types.hpp"
#include "adscope/privclass/category.hpp"

namespace adscope::privclass {

struct Suggestion {
    std::optional<PrivacyCategory> category;
    double confidence = 0.0;
};

namespace detail {

/// Split a camelCase / snake_case method name into lowercase tokens.
inline std::vector<std::string> tokenize_name(const std::string& name) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == '_' || c == '$') {
            flush();
        } else if (std::isupper(static_cast<unsigned char>(c))) {
            // Uppercase run stays together ("URL"), a new word starts at the
            // last capital before a lowercase letter ("HTMLPage" -> html, page).
            bool prev_upper = i > 0 && std::isupper(static_cast<unsigned char>(name[i - 1]));
            bool next_lower =
                i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
            if (!prev_upper || next_lower) flush();
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return tokens;
}

inline bool has_param_containing(const dex::MethodRef& m, std::string_view needle) {
    return std::any_of(m.param_descriptors.begin(), m.param_descriptors.end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

inline bool has_map_param(const dex::MethodRef& m) {
    return has_param_containing(m, "Ljava/util/Map;") ||
           has_param_containing(m, "Ljava/util/HashMap;") ||
           has_param_containing(m, "Ljava/util/Hashtable;") ||
           has_param_containing(m, "Landroid/os/Bundle;");
}

}  // namespace detail

/// Keyword-dictionary classification aid. Suggestions never enter reports
/// directly; they are promoted into the ruleset by a human.
inline Suggestion heuristic_suggest(const dex::MethodRef& method) {
    auto tokens = detail::tokenize_name(method.method_name);
    std::set<std::string> tok(tokens.begin(), tokens.end());
    auto any = [&](std::initializer_list<const char*> words) {
        return std::any_of(words.begin(), words.end(),
                           [&](const char* w) { return tok.count(w) > 0; });
    };
    bool setter = !tokens.empty() && (tokens.front() == "set" || tokens.front() == "add" ||
                                      tokens.front() == "put" || tokens.front() == "with");

    // Combination rules first; their tokens overlap with single-token ones.
    if (tok.count("enable") && tok.count("location"))
        return {PrivacyCategory::EnableLocation, 0.85};
    if (any({"demographic", "demographics", "extras", "extra"}) &&
        detail::has_map_param(method))
        return {PrivacyCategory::MultipleFactors, 0.8};

    if (any({"gender", "sex"})) return {PrivacyCategory::Gender, 0.9};
    if (any({"age", "birth", "birthday", "birthdate", "dob"}))
        return {PrivacyCategory::Age, 0.9};
    if (any({"location", "lat", "latitude", "lng", "longitude", "geo"}))
        return {PrivacyCategory::Location, 0.9};
    if (any({"zip", "postal", "postcode"})) return {PrivacyCategory::PostalCode, 0.9};
    if (any({"income", "hhi"})) return {PrivacyCategory::Income, 0.9};
    if (any({"interest", "interests"})) return {PrivacyCategory::Interests, 0.9};
    if (any({"keyword", "keywords", "search"})) return {PrivacyCategory::Keywords, 0.9};
    if (any({"email", "mail"}) && setter) return {PrivacyCategory::EMail, 0.9};
    if (tok.count("email")) return {PrivacyCategory::EMail, 0.9};
    if (any({"country"})) return {PrivacyCategory::Country, 0.9};
    if (any({"ethnic", "ethnicity", "race"})) return {PrivacyCategory::Ethnicity, 0.9};
    if (any({"education"})) return {PrivacyCategory::Education, 0.9};
    if ((tok.count("area") && tok.count("code")) || tok.count("areacode"))
        return {PrivacyCategory::AreaCode, 0.9};
    if (tok.count("name") && setter) return {PrivacyCategory::Name, 0.85};
    if (any({"event", "log", "track"}) &&
        detail::has_param_containing(method, "Ljava/lang/String;"))
        return {PrivacyCategory::ArbitraryData, 0.8};

    return {std::nullopt, 0.0};
}

}  // namespace adscope::privclass

#endif
