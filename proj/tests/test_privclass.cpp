#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "adscope/privclass/heuristic.hpp"
#include "adscope/privclass/rules.hpp"
#include "dex_fixture.hpp"

using namespace adscope;
using dexfix::ref;

namespace {

privclass::Ruleset basic_rules() {
    std::istringstream in(
        "AdMob\tsetGender\t*\tGender\tshipped\n"
        "AdMob\tsetBirthday\t*\tAge\tshipped\n"
        "AdMob\tsetLocation\t*\tLocation\tshipped\n"
        "*\tset*\t*\tArbitraryData\theuristic\n");
    return privclass::parse_ruleset(in, privclass::RuleSource::Shipped);
}

apirecon::WorkingApi api_of(const std::string& lib,
                            std::vector<dex::MethodRef> methods) {
    apirecon::WorkingApi api;
    api.library = lib;
    for (auto& m : methods) api.entries.emplace(m, apirecon::WorkingApiEntry{lib, m, 1, 1});
    return api;
}

}  // namespace

TEST_CASE("exact shipped rule classifies setGender as Gender") {
    auto rs = basic_rules();
    auto c = privclass::resolve_rule("AdMob", ref("Lcom/google/ads/AdRequest;", "setGender"),
                                     rs);
    REQUIRE(c.category.has_value());
    CHECK(*c.category == privclass::PrivacyCategory::Gender);
    CHECK(c.rule->source == privclass::RuleSource::Shipped);
}

TEST_CASE("setBirthday maps to Age, not a literal Birthday category") {
    auto rs = basic_rules();
    auto c = privclass::resolve_rule("AdMob", ref("Lcom/google/ads/AdRequest;", "setBirthday"),
                                     rs);
    REQUIRE(c.category.has_value());
    CHECK(*c.category == privclass::PrivacyCategory::Age);
}

TEST_CASE("benign methods stay unclassified") {
    auto rs = basic_rules();
    auto c = privclass::resolve_rule("AdMob", ref("Lcom/google/ads/AdView;", "loadAd"), rs);
    CHECK_FALSE(c.category.has_value());
    CHECK(c.rule == nullptr);
}

TEST_CASE("library scoping: rules for one library do not leak to another") {
    auto rs = basic_rules();
    // Flurry has no setGender rule of its own; only the wildcard set* applies.
    auto c = privclass::resolve_rule("Flurry", ref("Lcom/flurry/F;", "setGender"), rs);
    REQUIRE(c.category.has_value());
    CHECK(*c.category == privclass::PrivacyCategory::ArbitraryData);
    CHECK(c.rule->source == privclass::RuleSource::Heuristic);
}

TEST_CASE("precedence: override beats shipped beats heuristic") {
    std::istringstream shipped_in(
        "AdMob\tsetGender\t*\tGender\tshipped\n"
        "*\tsetGender\t*\tArbitraryData\theuristic\n");
    auto shipped = privclass::parse_ruleset(shipped_in, privclass::RuleSource::Shipped);

    SECTION("shipped beats heuristic") {
        auto c = privclass::resolve_rule("AdMob", ref("La/A;", "setGender"), shipped);
        CHECK(*c.category == privclass::PrivacyCategory::Gender);
    }
    SECTION("override beats shipped") {
        std::istringstream ov_in("AdMob\tsetGender\t*\tEthnicity\toverride\n");
        auto merged = privclass::merge_rulesets(
            shipped, privclass::parse_ruleset(ov_in, privclass::RuleSource::Override));
        auto c = privclass::resolve_rule("AdMob", ref("La/A;", "setGender"), merged);
        CHECK(*c.category == privclass::PrivacyCategory::Ethnicity);
        CHECK(c.rule->source == privclass::RuleSource::Override);
    }
}

TEST_CASE("within one source level the more specific matcher wins") {
    std::istringstream in(
        "AdMob\tset*\t*\tArbitraryData\tshipped\n"
        "AdMob\tsetLocation\t*\tLocation\tshipped\n"
        "AdMob\tsetLocation\t(DD)V\tEnableLocation\tshipped\n");
    auto rs = privclass::parse_ruleset(in, privclass::RuleSource::Shipped);
    auto exact_desc = privclass::resolve_rule(
        "AdMob", ref("La/A;", "setLocation", {"D", "D"}, "V"), rs);
    CHECK(*exact_desc.category == privclass::PrivacyCategory::EnableLocation);
    auto exact_name = privclass::resolve_rule(
        "AdMob", ref("La/A;", "setLocation", {"Landroid/location/Location;"}, "V"), rs);
    CHECK(*exact_name.category == privclass::PrivacyCategory::Location);
    auto pattern_only = privclass::resolve_rule("AdMob", ref("La/A;", "setFoo"), rs);
    CHECK(*pattern_only.category == privclass::PrivacyCategory::ArbitraryData);
}

TEST_CASE("equal-rank ties go to the first-declared rule") {
    std::istringstream in(
        "AdMob\tset*\t*\tKeywords\tshipped\n"
        "AdMob\t*Gender\t*\tGender\tshipped\n");
    auto rs = privclass::parse_ruleset(in, privclass::RuleSource::Shipped);
    auto c = privclass::resolve_rule("AdMob", ref("La/A;", "setGender"), rs);
    CHECK(*c.category == privclass::PrivacyCategory::Keywords);
}

TEST_CASE("disagreeing equally specific overrides are rejected") {
    std::istringstream in(
        "AdMob\tsetGender\t*\tGender\toverride\n"
        "AdMob\tsetGender\t*\tEthnicity\toverride\n");
    auto rs = privclass::parse_ruleset(in, privclass::RuleSource::Override);
    CHECK_THROWS_AS(privclass::resolve_rule("AdMob", ref("La/A;", "setGender"), rs),
                    ConflictingOverrides);
}

TEST_CASE("ruleset syntax errors carry the line number") {
    SECTION("too few columns") {
        std::istringstream in("# c\nAdMob\tsetGender\n");
        try {
            privclass::parse_ruleset(in, privclass::RuleSource::Shipped);
            FAIL("expected RulesetSyntax");
        } catch (const RulesetSyntax& e) {
            CHECK(e.line == 2);
        }
    }
    SECTION("unknown category") {
        std::istringstream in("AdMob\tsetGender\t*\tShoeSize\n");
        CHECK_THROWS_AS(privclass::parse_ruleset(in, privclass::RuleSource::Shipped),
                        RulesetSyntax);
    }
    SECTION("unknown source") {
        std::istringstream in("AdMob\tsetGender\t*\tGender\tguessed\n");
        CHECK_THROWS_AS(privclass::parse_ruleset(in, privclass::RuleSource::Shipped),
                        RulesetSyntax);
    }
}

TEST_CASE("classify covers every working-API method exactly once") {
    auto rs = basic_rules();
    std::map<std::string, apirecon::WorkingApi> apis;
    apis["AdMob"] = api_of("AdMob", {ref("La/A;", "setGender"), ref("La/A;", "loadAd"),
                                     ref("La/A;", "setBirthday")});
    auto classified = privclass::classify(apis, rs);
    const auto& methods = classified.per_library.at("AdMob");
    REQUIRE(methods.size() == 3);
    CHECK(classified.coverage.at("AdMob").classified == 2);
    CHECK(classified.coverage.at("AdMob").unmatched == 1);
    CHECK(classified.category_of("AdMob", ref("La/A;", "setGender")) ==
          privclass::PrivacyCategory::Gender);
    CHECK_FALSE(classified.category_of("AdMob", ref("La/A;", "loadAd")).has_value());
}

TEST_CASE("category name round-trip is stable") {
    for (auto cat : privclass::kAllCategories) {
        auto back = privclass::category_from_string(privclass::to_string(cat));
        REQUIRE(back.has_value());
        CHECK(*back == cat);
    }
    CHECK(privclass::display_label(privclass::PrivacyCategory::EMail) == "E-Mail");
    CHECK(privclass::display_label(privclass::PrivacyCategory::ArbitraryData) ==
          "Arbitrary Data");
}

TEST_CASE("shipped ruleset file loads and classifies known setters") {
    auto rs = privclass::load_ruleset(std::string(ADSCOPE_SOURCE_DIR) + "/data/rules.txt");
    CHECK(rs.rules.size() > 30);
    auto c = privclass::resolve_rule("AdMob", ref("Lcom/google/ads/AdRequest;", "setGender"),
                                     rs);
    REQUIRE(c.category.has_value());
    CHECK(*c.category == privclass::PrivacyCategory::Gender);
    auto age = privclass::resolve_rule("AdMob", ref("Lcom/google/ads/AdRequest;",
                                                    "setBirthday"),
                                       rs);
    CHECK(*age.category == privclass::PrivacyCategory::Age);
    auto arb = privclass::resolve_rule(
        "Flurry", ref("Lcom/flurry/android/FlurryAgent;", "onEvent",
                      {"Ljava/lang/String;"}, "V"),
        rs);
    CHECK(*arb.category == privclass::PrivacyCategory::ArbitraryData);
}

TEST_CASE("heuristic suggestions on representative names") {
    auto sug = [](const char* name, std::vector<std::string> params = {}) {
        return privclass::heuristic_suggest(ref("La/A;", name, std::move(params), "V"));
    };
    SECTION("setUserGender is Gender with high confidence") {
        auto s = sug("setUserGender");
        REQUIRE(s.category.has_value());
        CHECK(*s.category == privclass::PrivacyCategory::Gender);
        CHECK(s.confidence >= 0.9);
    }
    SECTION("lifecycle methods get no suggestion") {
        CHECK_FALSE(sug("onPause").category.has_value());
        CHECK_FALSE(sug("loadAd").category.has_value());
        CHECK_FALSE(sug("toString").category.has_value());
    }
    SECTION("map-typed demographics bundle suggests MultipleFactors") {
        auto s = sug("setDemographics", {"Ljava/util/Map;"});
        REQUIRE(s.category.has_value());
        CHECK(*s.category == privclass::PrivacyCategory::MultipleFactors);
        CHECK(s.confidence >= 0.8);
    }
    SECTION("enableLocation outranks plain Location") {
        auto s = sug("enableLocationTracking");
        REQUIRE(s.category.has_value());
        CHECK(*s.category == privclass::PrivacyCategory::EnableLocation);
    }
    SECTION("snake_case names tokenize too") {
        auto s = sug("set_postal_code");
        REQUIRE(s.category.has_value());
        CHECK(*s.category == privclass::PrivacyCategory::PostalCode);
    }
    SECTION("logEvent with a String parameter is ArbitraryData") {
        auto s = sug("logEvent", {"Ljava/lang/String;"});
        REQUIRE(s.category.has_value());
        CHECK(*s.category == privclass::PrivacyCategory::ArbitraryData);
    }
}
