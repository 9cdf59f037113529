#ifndef ADSCOPE_INGEST_CACHE_HPP
#define ADSCOPE_INGEST_CACHE_HPP

#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adscope/errors.hpp"
#include "adscope/ingest/scan.hpp"

namespace adscope::ingest {

inline std::string sha256_hex(const std::vector<uint8_t>& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

inline std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path + " for digest");
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

namespace detail {

inline nlohmann::json edge_to_json(const dex::CallEdge& e) {
    return nlohmann::json::array({e.caller_class, e.callee.class_descriptor,
                                  e.callee.method_name, e.callee.descriptor(),
                                  dex::to_string(e.invoke_kind)});
}

inline dex::CallEdge edge_from_json(const nlohmann::json& j, const std::string& app_id) {
    dex::CallEdge e;
    e.app_id = app_id;
    e.caller_class = j.at(0).get<std::string>();
    e.callee.class_descriptor = j.at(1).get<std::string>();
    e.callee.method_name = j.at(2).get<std::string>();
    std::istringstream dummy;
    parse_method_descriptor(j.at(3).get<std::string>(), 0, e.callee.param_descriptors,
                            e.callee.return_descriptor);
    std::string kind = j.at(4).get<std::string>();
    e.invoke_kind = parse_invoke_kind(kind, 0);
    return e;
}

}  // namespace detail

inline nlohmann::json scan_result_to_json(const ScanResult& r) {
    nlohmann::json j;
    j["app_id"] = r.app_id;
    j["skipped"] = r.skipped;
    j["skip_reason"] = r.skip_reason;
    j["diagnostics"] = r.diagnostics;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& e : r.edges) edges.push_back(detail::edge_to_json(e));
    auto& classes = j["classes"] = nlohmann::json::array();
    for (const auto& c : r.classes) {
        nlohmann::json jc;
        jc["descriptor"] = c.descriptor;
        auto& shape = jc["shape"] = nlohmann::json::array();
        for (const auto& [params, kind] : c.shape)
            shape.push_back(nlohmann::json::array({params, static_cast<int>(kind)}));
        jc["strings"] = c.string_constants;
        classes.push_back(std::move(jc));
    }
    return j;
}

inline ScanResult scan_result_from_json(const nlohmann::json& j) {
    ScanResult r;
    r.app_id = j.at("app_id").get<std::string>();
    r.skipped = j.at("skipped").get<bool>();
    r.skip_reason = j.at("skip_reason").get<std::string>();
    r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    for (const auto& je : j.at("edges"))
        r.edges.push_back(detail::edge_from_json(je, r.app_id));
    for (const auto& jc : j.at("classes")) {
        ClassInfo c;
        c.descriptor = jc.at("descriptor").get<std::string>();
        for (const auto& s : jc.at("shape"))
            c.shape.emplace_back(s.at(0).get<uint32_t>(),
                                 static_cast<ReturnKind>(s.at(1).get<int>()));
        c.string_constants = jc.at("strings").get<std::vector<std::string>>();
        r.classes.push_back(std::move(c));
    }
    return r;
}

/// Content-addressed scan cache: one JSON file per source digest. Safe for
/// concurrent readers; writes go through a temp file and an atomic rename so
/// a reader never sees a partial entry.
class ScanCache {
  public:
    explicit ScanCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::optional<ScanResult> lookup(const std::string& digest,
                                     const std::string& app_id) const {
        std::filesystem::path p = dir_ / (digest + ".json");
        std::ifstream in(p);
        if (!in) return std::nullopt;
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        ScanResult r = scan_result_from_json(j);
        // One source file may back several app_ids; re-attribute.
        r.app_id = app_id;
        for (auto& e : r.edges) e.app_id = app_id;
        return r;
    }

    void store(const std::string& digest, const ScanResult& result) {
        std::filesystem::path final_path = dir_ / (digest + ".json");
        std::filesystem::path tmp = dir_ / (digest + ".tmp");
        {
            std::ofstream out(tmp);
            out << scan_result_to_json(result).dump();
        }
        std::filesystem::rename(tmp, final_path);
    }

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

}  // namespace adscope::ingest

#endif
