#ifndef ADSCOPE_REPORT_RENDER_HPP
#define ADSCOPE_REPORT_RENDER_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adscope/apirecon/working_api.hpp"
#include "adscope/errors.hpp"
#include "adscope/report/stats.hpp"

namespace adscope::report {

namespace detail {

inline std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace detail

// Table-1-style output uses two decimals; Table-3-style one decimal.
inline std::string pct2(double fraction) { return detail::fixed(fraction * 100.0, 2); }
inline std::string pct1(double fraction) { return detail::fixed(fraction * 100.0, 1); }

// --- market share ---

inline std::string market_share_csv(const MarketShareReport& rep) {
    std::ostringstream out;
    out << "library,app_count,pct_of_corpus\n";
    for (const MarketShare& row : rep.top)
        out << detail::csv_escape(row.library) << ',' << row.app_count << ','
            << pct2(row.pct_of_corpus) << '\n';
    out << "Other," << rep.other.app_count << ',' << pct2(rep.other.pct_of_corpus) << '\n';
    return out.str();
}

inline nlohmann::json market_share_json(const MarketShareReport& rep) {
    nlohmann::json j;
    j["total_apps"] = rep.total_apps;
    auto& rows = j["libraries"] = nlohmann::json::array();
    for (const MarketShare& row : rep.top)
        rows.push_back({{"library", row.library},
                        {"app_count", row.app_count},
                        {"pct_of_corpus", pct2(row.pct_of_corpus)}});
    j["other"] = {{"app_count", rep.other.app_count},
                  {"pct_of_corpus", pct2(rep.other.pct_of_corpus)}};
    return j;
}

// --- category usage ---

inline std::string category_usage_csv(const CategoryUsageReport& rep) {
    std::ostringstream out;
    out << "category,apps_making_call,pct_of_apps,installs_weight,pct_of_installs\n";
    for (const CategoryUsage& row : rep.rows)
        out << privclass::display_label(row.category) << ',' << row.apps_making_call
            << ',' << pct2(row.pct_of_apps) << ',' << row.installs_weight << ','
            << pct2(row.pct_of_installs) << '\n';
    return out.str();
}

inline nlohmann::json category_usage_json(const CategoryUsageReport& rep) {
    nlohmann::json j;
    j["metadata"] = {{"total_apps", rep.total_apps},
                     {"total_installs_weight", rep.total_installs_weight},
                     {"apps_with_unknown_installs", rep.apps_with_unknown_installs}};
    auto& rows = j["categories"] = nlohmann::json::array();
    for (const CategoryUsage& row : rep.rows)
        rows.push_back({{"category", privclass::to_string(row.category)},
                        {"apps_making_call", row.apps_making_call},
                        {"pct_of_apps", pct2(row.pct_of_apps)},
                        {"installs_weight", row.installs_weight},
                        {"pct_of_installs", pct2(row.pct_of_installs)}});
    return j;
}

// --- bucket profile ---

inline std::string bucket_profile_csv(const BucketProfileReport& rep) {
    std::ostringstream out;
    out << "bucket_lower,app_count,mean_leak_keys_per_app\n";
    for (const BucketProfile& b : rep.buckets)
        out << b.bucket_lower << ',' << b.app_count << ','
            << detail::fixed(b.mean_leak_keys_per_app, 4) << '\n';
    return out.str();
}

inline nlohmann::json bucket_profile_json(const BucketProfileReport& rep) {
    nlohmann::json j;
    auto& rows = j["buckets"] = nlohmann::json::array();
    for (const BucketProfile& b : rep.buckets)
        rows.push_back({{"bucket_lower", b.bucket_lower},
                        {"app_count", b.app_count},
                        {"mean_leak_keys_per_app",
                         detail::fixed(b.mean_leak_keys_per_app, 4)}});
    j["empty_buckets"] = rep.empty_buckets;
    j["apps_with_unknown_installs"] = rep.apps_with_unknown_installs;
    return j;
}

/// Plot data for a Fig.-3-style chart: bucket -> mean.
inline nlohmann::json bucket_plot_json(const BucketProfileReport& rep) {
    nlohmann::json j = nlohmann::json::object();
    for (const BucketProfile& b : rep.buckets)
        j[std::to_string(b.bucket_lower)] = b.mean_leak_keys_per_app;
    return j;
}

// --- per-library table ---

inline std::string per_library_csv(const PerLibraryTable& table) {
    std::ostringstream out;
    out << "category";
    for (const std::string& lib : table.libraries) out << ',' << detail::csv_escape(lib);
    out << '\n';
    for (privclass::PrivacyCategory cat : privclass::kAllCategories) {
        out << privclass::display_label(cat);
        for (const std::string& lib : table.libraries) {
            out << ',';
            auto it = table.cells.find({cat, lib});
            if (it != table.cells.end()) out << pct1(it->second);
        }
        out << '\n';
    }
    return out.str();
}

inline nlohmann::json per_library_json(const PerLibraryTable& table) {
    nlohmann::json j;
    j["libraries"] = table.libraries;
    j["library_app_counts"] = table.library_app_counts;
    j["omitted_libraries"] = table.omitted_libraries;
    auto& cells = j["cells"] = nlohmann::json::object();
    for (const auto& [key, value] : table.cells) {
        const auto& [cat, lib] = key;
        cells[std::string(privclass::to_string(cat))][lib] = pct1(value);
    }
    return j;
}

// --- corpus summary ---

inline std::string corpus_summary_csv(const CorpusSummary& s) {
    std::ostringstream out;
    out << "bucket_lower,app_count\n";
    for (const auto& [bucket, n] : s.apps_per_bucket) out << bucket << ',' << n << '\n';
    return out.str();
}

inline nlohmann::json corpus_summary_json(const CorpusSummary& s) {
    nlohmann::json j;
    auto& rows = j["buckets"] = nlohmann::json::object();
    for (const auto& [bucket, n] : s.apps_per_bucket) rows[std::to_string(bucket)] = n;
    j["apps_with_unknown_installs"] = s.apps_with_unknown_installs;
    j["total_apps"] = s.total_apps;
    return j;
}

// --- api size histogram ---

inline std::string api_size_csv(const apirecon::ApiSizeHistogram& h) {
    std::ostringstream out;
    out << "bucket,library_count\n";
    out << "1-10," << h.size_1_10 << '\n';
    out << "11-50," << h.size_11_50 << '\n';
    out << "51-200," << h.size_51_200 << '\n';
    out << ">200," << h.size_over_200 << '\n';
    return out.str();
}

inline nlohmann::json api_size_json(const apirecon::ApiSizeHistogram& h) {
    nlohmann::json j;
    j["buckets"] = {{"1-10", h.size_1_10},
                    {"11-50", h.size_11_50},
                    {"51-200", h.size_51_200},
                    {">200", h.size_over_200}};
    j["per_library"] = h.per_library;
    return j;
}

// --- working API export ---

inline std::string working_api_csv(const std::map<std::string, apirecon::WorkingApi>& apis) {
    std::ostringstream out;
    out << "library,class,method,descriptor,app_count,call_site_count\n";
    for (const auto& [library, api] : apis)
        for (const auto& [method, entry] : api.entries)
            out << detail::csv_escape(library) << ','
                << detail::csv_escape(method.class_descriptor) << ','
                << detail::csv_escape(method.method_name) << ','
                << detail::csv_escape(method.descriptor()) << ',' << entry.app_count
                << ',' << entry.call_site_count << '\n';
    return out.str();
}

inline nlohmann::json working_api_json(const std::map<std::string, apirecon::WorkingApi>& apis) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [library, api] : apis) {
        auto& rows = j[library] = nlohmann::json::array();
        for (const auto& [method, entry] : api.entries)
            rows.push_back({{"class", method.class_descriptor},
                            {"method", method.method_name},
                            {"descriptor", method.descriptor()},
                            {"app_count", entry.app_count},
                            {"call_site_count", entry.call_site_count}});
    }
    return j;
}

// --- Table-2-style permission fixture and correlation ---

struct PermissionFixtureRow {
    std::string library;
    double permissions = 0;
    double api_calls = 0;
};

/// Tab-separated: library, permission count, privacy API call count.
inline std::vector<PermissionFixtureRow> load_permission_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFixture(path);
    std::vector<PermissionFixtureRow> rows;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = ingest::detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = ingest::detail::split_tabs(sv);
        if (fields.size() < 3)
            throw Error("permission fixture line " + std::to_string(line_no) +
                        ": expected 3 columns");
        PermissionFixtureRow row;
        row.library = std::string(ingest::detail::trim(fields[0]));
        row.permissions = std::stod(std::string(fields[1]));
        row.api_calls = std::stod(std::string(fields[2]));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json correlation_json(const std::vector<PermissionFixtureRow>& rows) {
    std::vector<double> x, y;
    for (const auto& row : rows) {
        x.push_back(row.permissions);
        y.push_back(row.api_calls);
    }
    double r = pearson(x, y);
    nlohmann::json j;
    j["libraries"] = rows.size();
    j["pearson_r"] = detail::fixed(r, 2);
    j["pearson_r_full"] = r;
    return j;
}

}  // namespace adscope::report

#endif
