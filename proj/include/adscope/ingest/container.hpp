#ifndef ADSCOPE_INGEST_CONTAINER_HPP
#define ADSCOPE_INGEST_CONTAINER_HPP

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "adscope/errors.hpp"

namespace adscope::ingest {

namespace detail {

inline uint16_t zle16(const uint8_t* p) { return p[0] | (p[1] << 8); }
inline uint32_t zle32(const uint8_t* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

struct ZipEntry {
    std::string name;
    uint16_t method;
    uint32_t compressed_size;
    uint32_t uncompressed_size;
    uint32_t local_header_offset;
};

/// Minimal central-directory zip reader (stored and deflate only).
inline std::vector<ZipEntry> read_central_directory(const std::vector<uint8_t>& data) {
    // End-of-central-directory record: scan backwards for PK\x05\x06.
    if (data.size() < 22) throw ArchiveCorrupt("too small for zip");
    size_t eocd = std::string::npos;
    size_t scan_limit = data.size() >= 22 + 65535 ? data.size() - 22 - 65535 : 0;
    for (size_t i = data.size() - 22; ; --i) {
        if (data[i] == 0x50 && data[i + 1] == 0x4b && data[i + 2] == 0x05 &&
            data[i + 3] == 0x06) {
            eocd = i;
            break;
        }
        if (i == scan_limit) break;
    }
    if (eocd == std::string::npos)
        throw ArchiveCorrupt("no end-of-central-directory record");

    uint16_t entry_count = zle16(&data[eocd + 10]);
    uint32_t cd_offset = zle32(&data[eocd + 16]);

    std::vector<ZipEntry> entries;
    size_t p = cd_offset;
    for (uint16_t i = 0; i < entry_count; ++i) {
        if (p + 46 > data.size() ||
            !(data[p] == 0x50 && data[p + 1] == 0x4b && data[p + 2] == 0x01 &&
              data[p + 3] == 0x02))
            throw ArchiveCorrupt("bad central directory entry");
        ZipEntry e;
        e.method = zle16(&data[p + 10]);
        e.compressed_size = zle32(&data[p + 20]);
        e.uncompressed_size = zle32(&data[p + 24]);
        uint16_t name_len = zle16(&data[p + 28]);
        uint16_t extra_len = zle16(&data[p + 30]);
        uint16_t comment_len = zle16(&data[p + 32]);
        e.local_header_offset = zle32(&data[p + 42]);
        if (p + 46 + name_len > data.size())
            throw ArchiveCorrupt("truncated entry name");
        e.name.assign(reinterpret_cast<const char*>(&data[p + 46]), name_len);
        entries.push_back(std::move(e));
        p += 46 + name_len + extra_len + comment_len;
    }
    return entries;
}

inline std::vector<uint8_t> extract_zip_entry(const std::vector<uint8_t>& data,
                                              const ZipEntry& e) {
    size_t p = e.local_header_offset;
    if (p + 30 > data.size() ||
        !(data[p] == 0x50 && data[p + 1] == 0x4b && data[p + 2] == 0x03 &&
          data[p + 3] == 0x04))
        throw ArchiveCorrupt("bad local header for " + e.name);
    uint16_t name_len = zle16(&data[p + 26]);
    uint16_t extra_len = zle16(&data[p + 28]);
    size_t payload = p + 30 + name_len + extra_len;
    if (payload + e.compressed_size > data.size())
        throw ArchiveCorrupt("truncated payload for " + e.name);

    if (e.method == 0) {  // stored
        return {data.begin() + payload, data.begin() + payload + e.compressed_size};
    }
    if (e.method == 8) {  // deflate
        std::vector<uint8_t> out(e.uncompressed_size);
        z_stream zs{};
        if (inflateInit2(&zs, -MAX_WBITS) != Z_OK)
            throw ArchiveCorrupt("inflateInit failed");
        zs.next_in = const_cast<uint8_t*>(&data[payload]);
        zs.avail_in = e.compressed_size;
        zs.next_out = out.data();
        zs.avail_out = static_cast<uInt>(out.size());
        int rc = inflate(&zs, Z_FINISH);
        inflateEnd(&zs);
        if (rc != Z_STREAM_END)
            throw ArchiveCorrupt("inflate failed for " + e.name);
        return out;
    }
    throw ArchiveCorrupt("unsupported compression method " +
                         std::to_string(e.method) + " for " + e.name);
}

/// Ordinal for deterministic multidex ordering: classes.dex = 1,
/// classesN.dex = N. Non-matching names get no ordinal.
inline int dex_ordinal(std::string_view name) {
    if (!name.starts_with("classes") || !name.ends_with(".dex")) return -1;
    std::string_view num = name.substr(7, name.size() - 7 - 4);
    if (num.empty()) return 1;
    int n = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
    if (ec != std::errc{} || ptr != num.data() + num.size() || n < 2) return -1;
    return n;
}

}  // namespace detail

/// Load every DEX image from a raw .dex file or an APK/zip containing
/// classes.dex, classes2.dex, ... in that order.
inline std::vector<std::vector<uint8_t>> unpack_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArchiveCorrupt("cannot open " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());

    if (data.size() >= 4 && std::memcmp(data.data(), "dex\n", 4) == 0)
        return {std::move(data)};

    if (data.size() < 4 || !(data[0] == 0x50 && data[1] == 0x4b))
        throw ArchiveCorrupt(path + " is neither a DEX file nor a zip archive");

    auto entries = detail::read_central_directory(data);
    std::vector<std::pair<int, const detail::ZipEntry*>> dex_entries;
    for (const auto& e : entries) {
        int ord = detail::dex_ordinal(e.name);
        if (ord > 0) dex_entries.emplace_back(ord, &e);
    }
    if (dex_entries.empty()) throw NoDexFound(path);
    std::sort(dex_entries.begin(), dex_entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<std::vector<uint8_t>> images;
    images.reserve(dex_entries.size());
    for (const auto& [ord, e] : dex_entries)
        images.push_back(detail::extract_zip_entry(data, *e));
    return images;
}

}  // namespace adscope::ingest

#endif
