#ifndef ADSCOPE_PIPELINE_HPP
#define ADSCOPE_PIPELINE_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "adscope/apirecon/working_api.hpp"
#include "adscope/errors.hpp"
#include "adscope/ingest/cache.hpp"
#include "adscope/ingest/manifest.hpp"
#include "adscope/ingest/scan.hpp"
#include "adscope/libid/fingerprint.hpp"
#include "adscope/libid/registry.hpp"
#include "adscope/libid/split.hpp"
#include "adscope/privclass/heuristic.hpp"
#include "adscope/privclass/rules.hpp"
#include "adscope/report/render.hpp"
#include "adscope/report/stats.hpp"

namespace adscope {

struct RunConfig {
    std::string manifest_path;
    std::string registry_path;
    std::string rules_path;
    std::string overrides_path;       // optional
    std::string cache_dir;            // optional; empty = no cache
    std::string out_dir;
    std::string permission_fixture;   // optional; Table-2-style input
    double fingerprint_threshold = 0.8;
    size_t top_n = 20;
    size_t workers = 1;
    bool emit_csv = true;
    bool emit_json = true;

    void validate() const {
        if (fingerprint_threshold <= 0.0 || fingerprint_threshold > 1.0)
            throw ConfigError("threshold must be in (0,1]");
        if (top_n < 1) throw ConfigError("top-N must be at least 1");
        if (workers < 1) throw ConfigError("workers must be at least 1");
    }
};

/// Registry plus loaded fingerprint blobs for every spec that references one.
struct ResolvedRegistry {
    libid::Registry registry;
    std::map<std::string, libid::LibraryFingerprint> fingerprints;
    // canonical name -> first declared prefix, used to normalize obfuscated
    // class descriptors back under the library's canonical package.
    std::map<std::string, std::string> primary_prefix;
};

inline ResolvedRegistry load_resolved_registry(const std::string& path) {
    ResolvedRegistry rr;
    rr.registry = libid::load_registry(path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (const libid::LibrarySpec& spec : rr.registry.specs()) {
        if (!spec.package_prefixes.empty() &&
            !rr.primary_prefix.count(spec.canonical_name))
            rr.primary_prefix[spec.canonical_name] = spec.package_prefixes.front();
        if (!spec.fingerprint_path.empty()) {
            std::filesystem::path fp = spec.fingerprint_path;
            if (fp.is_relative()) fp = base / fp;
            rr.fingerprints[spec.canonical_name] = libid::load_fingerprint(fp.string());
        }
    }
    return rr;
}

/// Everything derived from a single app before corpus-level aggregation.
struct AppAnalysis {
    report::AppReportInput input;           // leak_keys filled in later
    std::vector<dex::CallEdge> app_to_lib;  // callee descriptors normalized
    std::vector<libid::LibraryHit> hits;
    std::vector<std::string> diagnostics;
    bool skipped = false;
    std::string skip_reason;
    bool hard_failure = false;
    std::string failure_reason;
};

namespace detail {

/// Rewrite "Lobf/root/Foo;" to "Lcanonical/prefix/Foo;" so that renamed
/// copies pool with the canonical package in the working API.
inline std::string normalize_descriptor(const std::string& descriptor,
                                        const std::string& obf_root_pkg,
                                        const std::string& canonical_prefix) {
    std::string obf = "L";
    for (char c : obf_root_pkg) obf.push_back(c == '.' ? '/' : c);
    std::string canon = "L";
    for (char c : canonical_prefix) canon.push_back(c == '.' ? '/' : c);
    if (descriptor.starts_with(obf + "/"))
        return canon + descriptor.substr(obf.size());
    return descriptor;
}

}  // namespace detail

/// Identify libraries, split edges and normalize obfuscated callees for one
/// scanned app.
inline AppAnalysis analyze_app(const ingest::ScanResult& scan,
                               const ResolvedRegistry& rr,
                               const ingest::AppRecord& record,
                               double threshold) {
    AppAnalysis a;
    a.input.app_id = record.app_id;
    a.input.install_bucket_lower = record.install_bucket_lower;
    a.diagnostics = scan.diagnostics;
    if (scan.skipped) {
        a.skipped = true;
        a.skip_reason = scan.skip_reason;
        return a;
    }

    a.hits = libid::detect_obfuscated(record.app_id, scan.classes, rr.registry,
                                      rr.fingerprints, threshold);

    // Per-app resolver: global prefixes plus this app's obfuscated roots.
    libid::Registry resolver = rr.registry;
    for (const libid::LibraryHit& hit : a.hits)
        resolver.add_prefix(hit.matched_prefix, hit.canonical_name);

    // Library containment: any class of the app resolving to a library.
    for (const ingest::ClassInfo& c : scan.classes) {
        if (auto lib = resolver.match_class(c.descriptor))
            a.input.libraries.insert(*lib);
    }
    for (const libid::LibraryHit& hit : a.hits)
        a.input.libraries.insert(hit.canonical_name);

    libid::EdgeSplit split = libid::split_edges(scan.edges, resolver);
    a.app_to_lib = std::move(split.app_to_lib);

    // Normalize callee descriptors for fingerprint-matched packages.
    for (dex::CallEdge& e : a.app_to_lib) {
        for (const libid::LibraryHit& hit : a.hits) {
            auto canon = rr.primary_prefix.find(hit.canonical_name);
            if (canon == rr.primary_prefix.end()) continue;
            e.callee.class_descriptor = detail::normalize_descriptor(
                e.callee.class_descriptor, hit.matched_prefix, canon->second);
        }
    }
    return a;
}

struct CorpusAnalysis {
    std::vector<AppAnalysis> apps;  // manifest order
    std::map<std::string, apirecon::WorkingApi> working_api;
    privclass::ClassifiedApi classified;
    std::vector<report::AppReportInput> report_inputs;
    uint64_t skipped_apps = 0;
    uint64_t failed_apps = 0;
};

/// Scan (optionally through the cache) and analyze every app with a bounded
/// worker pool. Results land in manifest-order slots, so worker count never
/// affects output.
inline std::vector<AppAnalysis> scan_and_analyze(const ingest::CorpusManifest& manifest,
                                                 const ResolvedRegistry& rr,
                                                 const RunConfig& config,
                                                 ingest::ScanCache* cache) {
    std::vector<AppAnalysis> results(manifest.apps.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= manifest.apps.size()) return;
            const ingest::AppRecord& record = manifest.apps[i];
            try {
                ingest::ScanResult scan;
                bool from_cache = false;
                std::string digest;
                if (cache && std::filesystem::exists(record.source)) {
                    digest = ingest::digest_file(record.source);
                    if (auto hit = cache->lookup(digest, record.app_id)) {
                        scan = std::move(*hit);
                        from_cache = true;
                    }
                }
                if (!from_cache) {
                    scan = ingest::scan_source(record.source, record.app_id);
                    if (cache && !digest.empty() && !scan.skipped)
                        cache->store(digest, scan);
                }
                results[i] =
                    analyze_app(scan, rr, record, config.fingerprint_threshold);
            } catch (const std::exception& e) {
                AppAnalysis a;
                a.input.app_id = record.app_id;
                a.input.install_bucket_lower = record.install_bucket_lower;
                a.hard_failure = true;
                a.failure_reason = e.what();
                results[i] = std::move(a);
            }
        }
    };
    size_t n_workers = std::min(config.workers, std::max<size_t>(1, manifest.apps.size()));
    std::vector<std::thread> pool;
    for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

inline CorpusAnalysis analyze_corpus(const ingest::CorpusManifest& manifest,
                                     const ResolvedRegistry& rr,
                                     const privclass::Ruleset& ruleset,
                                     const RunConfig& config,
                                     ingest::ScanCache* cache) {
    CorpusAnalysis corpus;
    corpus.apps = scan_and_analyze(manifest, rr, config, cache);

    apirecon::ApiAccumulator acc;
    for (const AppAnalysis& a : corpus.apps) {
        if (a.skipped) corpus.skipped_apps += 1;
        if (a.hard_failure) corpus.failed_apps += 1;
        for (const dex::CallEdge& e : a.app_to_lib)
            if (auto lib = rr.registry.match_class(e.callee.class_descriptor))
                acc.add(*lib, e);
    }
    corpus.working_api = acc.finalize();
    corpus.classified = privclass::classify(corpus.working_api, ruleset);

    for (AppAnalysis& a : corpus.apps) {
        for (const dex::CallEdge& e : a.app_to_lib) {
            auto lib = rr.registry.match_class(e.callee.class_descriptor);
            if (!lib) continue;
            if (auto cat = corpus.classified.category_of(*lib, e.callee))
                a.input.leak_keys.insert({*lib, *cat});
        }
        corpus.report_inputs.push_back(a.input);
    }
    return corpus;
}

/// Pairs (library, category) present in the classified working API; the
/// per-library table leaves all other cells empty.
inline std::set<std::pair<std::string, privclass::PrivacyCategory>> classified_pairs(
    const privclass::ClassifiedApi& classified) {
    std::set<std::pair<std::string, privclass::PrivacyCategory>> pairs;
    for (const auto& [library, methods] : classified.per_library)
        for (const auto& [method, c] : methods)
            if (c.category) pairs.insert({library, *c.category});
    return pairs;
}

/// Emit every report into `out_dir`. Byte-identical across reruns on the
/// same inputs.
inline void write_reports(const ingest::CorpusManifest& manifest,
                          const CorpusAnalysis& corpus, const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(config.out_dir) / name, std::ios::binary);
        out << content;
    };
    auto write_json = [&](const std::string& name, const nlohmann::json& j) {
        write(name, j.dump(2) + "\n");
    };

    std::span<const report::AppReportInput> inputs(corpus.report_inputs);
    auto ms = report::market_share(inputs, config.top_n);
    auto cu = report::category_usage(inputs);
    auto bp = report::bucket_profile(inputs);
    std::vector<std::string> top_libs;
    for (const auto& row : ms.top) top_libs.push_back(row.library);
    auto plt = report::per_library_table(inputs, top_libs, classified_pairs(corpus.classified));
    auto cs = report::corpus_summary(manifest);
    auto hist = apirecon::api_size_distribution(corpus.working_api);

    if (config.emit_csv) {
        write("market_share.csv", report::market_share_csv(ms));
        write("category_usage.csv", report::category_usage_csv(cu));
        write("bucket_profile.csv", report::bucket_profile_csv(bp));
        write("per_library.csv", report::per_library_csv(plt));
        write("corpus_summary.csv", report::corpus_summary_csv(cs));
        write("api_size.csv", report::api_size_csv(hist));
        write("working_api.csv", report::working_api_csv(corpus.working_api));
    }
    if (config.emit_json) {
        write_json("market_share.json", report::market_share_json(ms));
        write_json("category_usage.json", report::category_usage_json(cu));
        write_json("bucket_profile.json", report::bucket_profile_json(bp));
        write_json("bucket_plot.json", report::bucket_plot_json(bp));
        write_json("per_library.json", report::per_library_json(plt));
        write_json("corpus_summary.json", report::corpus_summary_json(cs));
        write_json("api_size.json", report::api_size_json(hist));
        write_json("working_api.json", report::working_api_json(corpus.working_api));

        nlohmann::json meta;
        meta["total_apps"] = manifest.apps.size();
        meta["skipped_apps"] = corpus.skipped_apps;
        meta["failed_apps"] = corpus.failed_apps;
        meta["apps_with_unknown_installs"] = cu.apps_with_unknown_installs;
        meta["fingerprint_threshold"] = config.fingerprint_threshold;
        meta["top_n"] = config.top_n;
        write_json("run_metadata.json", meta);
    }

    if (!config.permission_fixture.empty()) {
        auto rows = report::load_permission_fixture(config.permission_fixture);
        nlohmann::json corr = report::correlation_json(rows);
        if (config.emit_json) write_json("correlation.json", corr);
        if (config.emit_csv) {
            std::ostringstream out;
            out << "libraries,pearson_r\n"
                << rows.size() << ',' << corr["pearson_r"].get<std::string>() << '\n';
            write("correlation.csv", out.str());
        }
    }
}

/// Heuristic rule suggestions for a library's unclassified methods, rendered
/// as a ruleset fragment for human review.
inline std::string suggest_rules(const CorpusAnalysis& corpus, const std::string& library) {
    auto api = corpus.working_api.find(library);
    if (api == corpus.working_api.end()) throw UnknownLibrary(library);
    std::ostringstream out;
    for (const auto& [method, entry] : api->second.entries) {
        if (corpus.classified.category_of(library, method)) continue;
        privclass::Suggestion s = privclass::heuristic_suggest(method);
        if (!s.category) continue;
        out << library << '\t' << method.method_name << '\t' << method.descriptor()
            << '\t' << privclass::to_string(*s.category) << '\t' << "heuristic" << '\t'
            << "confidence=" << report::detail::fixed(s.confidence, 2) << '\n';
    }
    return out.str();
}

}  // namespace adscope

#endif
