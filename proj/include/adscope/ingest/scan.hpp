#ifndef ADSCOPE_INGEST_SCAN_HPP
#define ADSCOPE_INGEST_SCAN_HPP

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adscope/dex/extract.hpp"
#include "adscope/dex/parser.hpp"
#include "adscope/dex/types.hpp"
#include "adscope/ingest/call_log.hpp"
#include "adscope/ingest/container.hpp"

namespace adscope::ingest {

enum class ReturnKind { Void, Primitive, Object, Array };

inline ReturnKind coarse_return_kind(const std::string& descriptor) {
    if (descriptor == "V") return ReturnKind::Void;
    if (descriptor.starts_with("[")) return ReturnKind::Array;
    if (descriptor.starts_with("L")) return ReturnKind::Object;
    return ReturnKind::Primitive;
}

/// Name-independent structural summary of one class: the sorted multiset of
/// (parameter count, coarse return kind) over its declared methods.
using ClassShape = std::vector<std::pair<uint32_t, ReturnKind>>;

struct ClassInfo {
    std::string descriptor;
    ClassShape shape;
    std::vector<std::string> string_constants;  // const-string operands, sorted
};

/// Everything the downstream pipeline needs about one app. Depends only on
/// the source bytes, which is what makes scan results cacheable.
struct ScanResult {
    std::string app_id;
    std::vector<dex::CallEdge> edges;
    std::vector<ClassInfo> classes;
    std::vector<std::string> diagnostics;
    bool skipped = false;
    std::string skip_reason;
};

namespace detail {

inline ClassInfo summarize_class(const dex::DexFile& dex, const dex::ClassDef& cls) {
    ClassInfo info;
    info.descriptor = cls.descriptor;
    std::set<std::string> strings;
    for (const dex::ClassMethod& m : cls.methods) {
        const dex::RawMethodRef& raw = dex.method_refs[m.method_idx];
        const dex::Proto& proto = dex.protos[raw.proto_idx];
        info.shape.emplace_back(static_cast<uint32_t>(proto.param_descriptors.size()),
                                coarse_return_kind(proto.return_descriptor));
        // const-string / const-string/jumbo operands
        const auto& units = m.code_units;
        const auto& widths = dex::detail::opcode_widths();
        size_t pc = 0;
        while (pc < units.size()) {
            uint16_t unit = units[pc];
            uint8_t opcode = static_cast<uint8_t>(unit & 0xff);
            if (opcode == 0x00 && (unit >> 8) != 0) {
                uint64_t len = dex::detail::payload_length(units, pc);
                if (len == 0 || pc + len > units.size()) break;
                pc += len;
                continue;
            }
            uint8_t width = widths[opcode];
            if (width == 0 || pc + width > units.size()) break;
            if (opcode == 0x1a && units[pc + 1] < dex.strings.size()) {
                strings.insert(dex.strings[units[pc + 1]]);
            } else if (opcode == 0x1b) {
                uint32_t idx = units[pc + 1] |
                               (static_cast<uint32_t>(units[pc + 2]) << 16);
                if (idx < dex.strings.size()) strings.insert(dex.strings[idx]);
            }
            pc += width;
        }
    }
    std::sort(info.shape.begin(), info.shape.end());
    info.string_constants.assign(strings.begin(), strings.end());
    return info;
}

inline bool looks_like_binary_source(const std::vector<uint8_t>& head) {
    if (head.size() >= 4 && std::memcmp(head.data(), "dex\n", 4) == 0) return true;
    if (head.size() >= 2 && head[0] == 0x50 && head[1] == 0x4b) return true;
    return false;
}

}  // namespace detail

inline ScanResult scan_dex_images(const std::vector<std::vector<uint8_t>>& images,
                                  const std::string& app_id) {
    ScanResult result;
    result.app_id = app_id;
    for (const auto& image : images) {
        dex::DexFile dex = dex::parse_dex(image);
        for (const std::string& d : dex.diagnostics)
            result.diagnostics.push_back(app_id + ": " + d);
        auto edges = dex::extract_call_edges(dex, app_id, &result.diagnostics);
        result.edges.insert(result.edges.end(), edges.begin(), edges.end());
        for (const dex::ClassDef& cls : dex.classes)
            result.classes.push_back(detail::summarize_class(dex, cls));
    }
    return result;
}

/// Scan one app source: a raw DEX, an APK/zip (all contained DEX images are
/// merged), or a textual call log. Binary vs text is decided by magic bytes.
inline ScanResult scan_source(const std::string& path, const std::string& app_id) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        ScanResult r;
        r.app_id = app_id;
        r.skipped = true;
        r.skip_reason = "cannot open " + path;
        return r;
    }
    std::vector<uint8_t> head(4);
    probe.read(reinterpret_cast<char*>(head.data()), 4);
    head.resize(static_cast<size_t>(probe.gcount()));
    probe.close();

    if (detail::looks_like_binary_source(head))
        return scan_dex_images(unpack_container(path), app_id);

    // Call-log frontend: class list is derived from caller and callee
    // descriptors since there is no class table to read.
    std::ifstream in(path);
    ScanResult result;
    result.app_id = app_id;
    result.edges = parse_call_log(in, app_id);
    std::set<std::string> descriptors;
    for (const dex::CallEdge& e : result.edges) {
        descriptors.insert(e.caller_class);
        descriptors.insert(e.callee.class_descriptor);
    }
    for (const std::string& d : descriptors)
        result.classes.push_back(ClassInfo{d, {}, {}});
    return result;
}

}  // namespace adscope::ingest

#endif
