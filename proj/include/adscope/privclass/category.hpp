#ifndef ADSCOPE_PRIVCLASS_CATEGORY_HPP
#define ADSCOPE_PRIVCLASS_CATEGORY_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "adscope/errors.hpp"

namespace adscope::privclass {

/// The 16 leak categories. Closed set; serialized names are stable.
enum class PrivacyCategory {
    ArbitraryData,
    Keywords,
    Gender,
    Location,
    Age,
    MultipleFactors,
    PostalCode,
    EnableLocation,
    Income,
    Interests,
    AreaCode,
    Country,
    Education,
    Ethnicity,
    Name,
    EMail,
};

inline constexpr std::array<PrivacyCategory, 16> kAllCategories = {
    PrivacyCategory::ArbitraryData,  PrivacyCategory::Keywords,
    PrivacyCategory::Gender,         PrivacyCategory::Location,
    PrivacyCategory::Age,            PrivacyCategory::MultipleFactors,
    PrivacyCategory::PostalCode,     PrivacyCategory::EnableLocation,
    PrivacyCategory::Income,         PrivacyCategory::Interests,
    PrivacyCategory::AreaCode,       PrivacyCategory::Country,
    PrivacyCategory::Education,      PrivacyCategory::Ethnicity,
    PrivacyCategory::Name,           PrivacyCategory::EMail,
};

inline std::string_view to_string(PrivacyCategory c) {
    switch (c) {
        case PrivacyCategory::ArbitraryData: return "ArbitraryData";
        case PrivacyCategory::Keywords: return "Keywords";
        case PrivacyCategory::Gender: return "Gender";
        case PrivacyCategory::Location: return "Location";
        case PrivacyCategory::Age: return "Age";
        case PrivacyCategory::MultipleFactors: return "MultipleFactors";
        case PrivacyCategory::PostalCode: return "PostalCode";
        case PrivacyCategory::EnableLocation: return "EnableLocation";
        case PrivacyCategory::Income: return "Income";
        case PrivacyCategory::Interests: return "Interests";
        case PrivacyCategory::AreaCode: return "AreaCode";
        case PrivacyCategory::Country: return "Country";
        case PrivacyCategory::Education: return "Education";
        case PrivacyCategory::Ethnicity: return "Ethnicity";
        case PrivacyCategory::Name: return "Name";
        case PrivacyCategory::EMail: return "EMail";
    }
    return "?";
}

inline std::optional<PrivacyCategory> category_from_string(std::string_view s) {
    for (PrivacyCategory c : kAllCategories)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

/// Human-facing label used in Table-style report output.
inline std::string_view display_label(PrivacyCategory c) {
    switch (c) {
        case PrivacyCategory::ArbitraryData: return "Arbitrary Data";
        case PrivacyCategory::MultipleFactors: return "Multiple Factors";
        case PrivacyCategory::PostalCode: return "Postal Code";
        case PrivacyCategory::EnableLocation: return "Enable Location";
        case PrivacyCategory::AreaCode: return "Area Code";
        case PrivacyCategory::EMail: return "E-Mail";
        default: return to_string(c);
    }
}

}  // namespace adscope::privclass

#endif
