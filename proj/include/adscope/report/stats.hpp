#ifndef ADSCOPE_REPORT_STATS_HPP
#define ADSCOPE_REPORT_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adscope/errors.hpp"
#include "adscope/ingest/manifest.hpp"
#include "adscope/privclass/category.hpp"

namespace adscope::report {

/// Deduplication unit for leak counting: repeated same-kind calls from one
/// app to one library collapse; different library or category counts
/// separately.
struct LeakCallKey {
    std::string app_id;
    std::string library;
    privclass::PrivacyCategory category;

    friend auto operator<=>(const LeakCallKey&, const LeakCallKey&) = default;
    friend bool operator==(const LeakCallKey&, const LeakCallKey&) = default;
};

/// Per-app reduction of everything the corpus statistics consume.
struct AppReportInput {
    std::string app_id;
    std::optional<int64_t> install_bucket_lower;
    std::set<std::string> libraries;  // canonical names contained in the app
    std::set<std::pair<std::string, privclass::PrivacyCategory>> leak_keys;
};

struct MarketShare {
    std::string library;
    uint64_t app_count = 0;
    double pct_of_corpus = 0.0;  // fraction in [0,1]
};

struct MarketShareReport {
    std::vector<MarketShare> top;  // descending by app_count
    MarketShare other;             // apps containing a library outside the top N
    uint64_t total_apps = 0;
};

inline MarketShareReport market_share(std::span<const AppReportInput> apps,
                                      size_t top_n = 20) {
    std::map<std::string, uint64_t> counts;
    for (const AppReportInput& app : apps)
        for (const std::string& lib : app.libraries) counts[lib] += 1;

    std::vector<MarketShare> rows;
    rows.reserve(counts.size());
    for (const auto& [lib, n] : counts) rows.push_back({lib, n, 0.0});
    // Descending by count, ties alphabetical.
    std::sort(rows.begin(), rows.end(), [](const MarketShare& a, const MarketShare& b) {
        return std::tie(b.app_count, a.library) < std::tie(a.app_count, b.library);
    });

    MarketShareReport rep;
    rep.total_apps = apps.size();
    std::set<std::string> top_names;
    for (size_t i = 0; i < rows.size() && i < top_n; ++i) {
        rows[i].pct_of_corpus =
            rep.total_apps ? static_cast<double>(rows[i].app_count) / rep.total_apps : 0.0;
        top_names.insert(rows[i].library);
        rep.top.push_back(rows[i]);
    }
    rep.other.library = "Other";
    for (const AppReportInput& app : apps) {
        bool has_other = std::any_of(app.libraries.begin(), app.libraries.end(),
                                     [&](const std::string& l) { return !top_names.count(l); });
        if (has_other) rep.other.app_count += 1;
    }
    rep.other.pct_of_corpus =
        rep.total_apps ? static_cast<double>(rep.other.app_count) / rep.total_apps : 0.0;
    return rep;
}

struct CategoryUsage {
    privclass::PrivacyCategory category;
    uint64_t apps_making_call = 0;
    double pct_of_apps = 0.0;       // fraction in [0,1]
    int64_t installs_weight = 0;    // sum of bucket lower bounds
    double pct_of_installs = 0.0;   // fraction in [0,1]
};

struct CategoryUsageReport {
    std::vector<CategoryUsage> rows;  // all 16 categories, fixed order
    uint64_t total_apps = 0;
    int64_t total_installs_weight = 0;  // over apps with known buckets
    uint64_t apps_with_unknown_installs = 0;
};

inline CategoryUsageReport category_usage(std::span<const AppReportInput> apps) {
    CategoryUsageReport rep;
    rep.total_apps = apps.size();
    for (const AppReportInput& app : apps) {
        if (app.install_bucket_lower)
            rep.total_installs_weight += *app.install_bucket_lower;
        else
            rep.apps_with_unknown_installs += 1;
    }
    for (privclass::PrivacyCategory cat : privclass::kAllCategories) {
        CategoryUsage row;
        row.category = cat;
        for (const AppReportInput& app : apps) {
            bool makes_call = std::any_of(
                app.leak_keys.begin(), app.leak_keys.end(),
                [&](const auto& key) { return key.second == cat; });
            if (!makes_call) continue;
            row.apps_making_call += 1;
            if (app.install_bucket_lower) row.installs_weight += *app.install_bucket_lower;
        }
        row.pct_of_apps =
            rep.total_apps ? static_cast<double>(row.apps_making_call) / rep.total_apps : 0.0;
        row.pct_of_installs = rep.total_installs_weight
                                  ? static_cast<double>(row.installs_weight) /
                                        static_cast<double>(rep.total_installs_weight)
                                  : 0.0;
        rep.rows.push_back(row);
    }
    return rep;
}

struct BucketProfile {
    int64_t bucket_lower = 0;
    uint64_t app_count = 0;
    double mean_leak_keys_per_app = 0.0;
};

struct BucketProfileReport {
    std::vector<BucketProfile> buckets;  // ascending, only populated buckets
    std::vector<int64_t> empty_buckets;  // canonical buckets with zero apps
    uint64_t apps_with_unknown_installs = 0;
};

inline BucketProfileReport bucket_profile(std::span<const AppReportInput> apps) {
    std::map<int64_t, std::pair<uint64_t, uint64_t>> agg;  // bucket -> (apps, keys)
    BucketProfileReport rep;
    for (const AppReportInput& app : apps) {
        if (!app.install_bucket_lower) {
            rep.apps_with_unknown_installs += 1;
            continue;
        }
        auto& [n, keys] = agg[*app.install_bucket_lower];
        n += 1;
        keys += app.leak_keys.size();
    }
    for (int64_t bucket : ingest::kInstallBuckets) {
        auto it = agg.find(bucket);
        if (it == agg.end()) {
            rep.empty_buckets.push_back(bucket);
            continue;
        }
        const auto& [n, keys] = it->second;
        rep.buckets.push_back(
            {bucket, n, static_cast<double>(keys) / static_cast<double>(n)});
    }
    return rep;
}

struct PerLibraryTable {
    std::vector<std::string> libraries;  // column order
    // (category, library) -> fraction of library-containing apps; absent key =
    // empty cell (no such method in the library's classified API).
    std::map<std::pair<privclass::PrivacyCategory, std::string>, double> cells;
    std::map<std::string, uint64_t> library_app_counts;  // denominators
    std::vector<std::string> omitted_libraries;          // contained by zero apps
};

/// `possible` lists the (library, category) pairs present in the classified
/// working API; cells outside it stay empty even when their count is zero.
inline PerLibraryTable per_library_table(
    std::span<const AppReportInput> apps, const std::vector<std::string>& libraries,
    const std::set<std::pair<std::string, privclass::PrivacyCategory>>& possible) {
    PerLibraryTable table;
    for (const std::string& lib : libraries) {
        uint64_t containing = 0;
        for (const AppReportInput& app : apps)
            if (app.libraries.count(lib)) containing += 1;
        if (containing == 0) {
            table.omitted_libraries.push_back(lib);
            continue;
        }
        table.libraries.push_back(lib);
        table.library_app_counts[lib] = containing;
        for (privclass::PrivacyCategory cat : privclass::kAllCategories) {
            if (!possible.count({lib, cat})) continue;
            uint64_t making = 0;
            for (const AppReportInput& app : apps)
                if (app.leak_keys.count({lib, cat})) making += 1;
            table.cells[{cat, lib}] =
                static_cast<double>(making) / static_cast<double>(containing);
        }
    }
    return table;
}

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DegenerateInput("vectors differ in length");
    size_t n = x.size();
    if (n < 2) throw DegenerateInput("need at least 2 points");
    double mean_x = 0.0, mean_y = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mean_x;
        double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateInput("constant vector has no defined correlation");
    return sxy / std::sqrt(sxx * syy);
}

struct CorpusSummary {
    std::map<int64_t, uint64_t> apps_per_bucket;  // only populated buckets
    uint64_t apps_with_unknown_installs = 0;
    uint64_t total_apps = 0;
};

inline CorpusSummary corpus_summary(const ingest::CorpusManifest& manifest) {
    CorpusSummary s;
    s.total_apps = manifest.apps.size();
    for (const ingest::AppRecord& app : manifest.apps) {
        if (app.install_bucket_lower)
            s.apps_per_bucket[*app.install_bucket_lower] += 1;
        else
            s.apps_with_unknown_installs += 1;
    }
    return s;
}

}  // namespace adscope::report

#endif
