// adscope: reconstruct the working API between apps and their embedded
// ad/analytics libraries, classify privacy-leaking calls, and emit corpus
// reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "adscope/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHardFailure = 1;
constexpr int kExitConfigError = 2;

std::string cache_dir_or_env(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("ADSCOPE_CACHE_DIR")) return env;
    return {};
}

void add_common_flags(CLI::App* cmd, adscope::RunConfig& config, std::string& format) {
    cmd->add_option("--manifest", config.manifest_path, "Corpus manifest file")->required();
    cmd->add_option("--registry", config.registry_path, "Library registry file")->required();
    cmd->add_option("--rules", config.rules_path, "Shipped ruleset file");
    cmd->add_option("--overrides", config.overrides_path, "User override rules");
    cmd->add_option("--cache-dir", config.cache_dir,
                    "Scan cache directory (or ADSCOPE_CACHE_DIR)");
    cmd->add_option("--out-dir", config.out_dir, "Report output directory");
    cmd->add_option("--threshold", config.fingerprint_threshold,
                    "Fingerprint detection threshold in (0,1]");
    cmd->add_option("--top", config.top_n, "Top-N library cutoff");
    cmd->add_option("--workers", config.workers, "Worker thread count");
    cmd->add_option("--format", format, "Output format: csv, json, or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--permission-fixture", config.permission_fixture,
                    "Per-library permission/API-call table for the correlation report");
}

struct LoadedInputs {
    adscope::ingest::CorpusManifest manifest;
    adscope::ResolvedRegistry registry;
    adscope::privclass::Ruleset ruleset;
};

LoadedInputs load_inputs(const adscope::RunConfig& config) {
    LoadedInputs in;
    in.manifest = adscope::ingest::load_manifest(config.manifest_path);
    in.registry = adscope::load_resolved_registry(config.registry_path);
    if (!config.rules_path.empty())
        in.ruleset = adscope::privclass::load_ruleset(config.rules_path);
    if (!config.overrides_path.empty()) {
        auto overrides = adscope::privclass::load_ruleset(
            config.overrides_path, adscope::privclass::RuleSource::Override);
        in.ruleset = adscope::privclass::merge_rulesets(in.ruleset, overrides);
    }
    return in;
}

int report_app_failures(const adscope::CorpusAnalysis& corpus) {
    int rc = kExitOk;
    for (const adscope::AppAnalysis& a : corpus.apps) {
        if (a.skipped)
            std::cerr << "warning: skipped " << a.input.app_id << ": " << a.skip_reason
                      << "\n";
        if (a.hard_failure) {
            std::cerr << "error: " << a.input.app_id << ": " << a.failure_reason << "\n";
            rc = kExitHardFailure;
        }
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ad-library working-API reconstruction and privacy-leak reporting"};
    app.require_subcommand(1);

    adscope::RunConfig config;
    std::string format = "both";

    CLI::App* scan = app.add_subcommand("scan", "Scan the corpus and populate the cache");
    add_common_flags(scan, config, format);

    CLI::App* report = app.add_subcommand("report", "Compute all corpus reports");
    add_common_flags(report, config, format);

    CLI::App* suggest = app.add_subcommand("suggest-rules",
                                           "Heuristic rule suggestions for one library");
    std::string suggest_library;
    add_common_flags(suggest, config, format);
    suggest->add_option("--library", suggest_library, "Canonical library name")->required();

    CLI::App* fingerprint =
        app.add_subcommand("fingerprint", "Build a library fingerprint from a reference DEX");
    std::string fp_source, fp_package, fp_out;
    fingerprint->add_option("--source", fp_source, "Reference DEX or APK")->required();
    fingerprint->add_option("--package", fp_package, "Library package root")->required();
    fingerprint->add_option("--out", fp_out, "Output fingerprint blob")->required();

    CLI::App* validate = app.add_subcommand("validate", "Lint manifest/registry/ruleset");
    add_common_flags(validate, config, format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfigError;
    }

    try {
        config.cache_dir = cache_dir_or_env(config.cache_dir);
        config.emit_csv = format != "json";
        config.emit_json = format != "csv";

        if (fingerprint->parsed()) {
            auto images = adscope::ingest::unpack_container(fp_source);
            auto scan_result = adscope::ingest::scan_dex_images(images, "reference");
            auto fp = adscope::libid::fingerprint_classes(scan_result.classes, fp_package);
            std::ofstream out(fp_out);
            out << adscope::libid::fingerprint_to_json(fp).dump(2) << "\n";
            std::cout << "fingerprint: " << fp.class_signatures.size() << " class signatures, "
                      << fp.anchor_strings.size() << " anchor strings -> " << fp_out << "\n";
            return kExitOk;
        }

        config.validate();

        if (validate->parsed()) {
            LoadedInputs in = load_inputs(config);
            std::cout << "manifest: " << in.manifest.apps.size() << " apps\n";
            std::cout << "registry: " << in.registry.registry.specs().size() << " libraries, "
                      << in.registry.fingerprints.size() << " fingerprints\n";
            std::cout << "ruleset: " << in.ruleset.rules.size() << " rules\n";
            return kExitOk;
        }

        LoadedInputs in = load_inputs(config);
        std::unique_ptr<adscope::ingest::ScanCache> cache;
        if (!config.cache_dir.empty())
            cache = std::make_unique<adscope::ingest::ScanCache>(config.cache_dir);

        adscope::CorpusAnalysis corpus = adscope::analyze_corpus(
            in.manifest, in.registry, in.ruleset, config, cache.get());
        int rc = report_app_failures(corpus);

        if (scan->parsed()) {
            std::cout << "scanned " << corpus.apps.size() << " apps ("
                      << corpus.skipped_apps << " skipped, " << corpus.failed_apps
                      << " failed)\n";
            return rc;
        }
        if (report->parsed()) {
            if (config.out_dir.empty()) throw adscope::ConfigError("--out-dir is required");
            adscope::write_reports(in.manifest, corpus, config);
            std::cout << "reports written to " << config.out_dir << "\n";
            return rc;
        }
        if (suggest->parsed()) {
            std::cout << adscope::suggest_rules(corpus, suggest_library);
            return rc;
        }
        return rc;
    } catch (const adscope::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitHardFailure;
    }
}
