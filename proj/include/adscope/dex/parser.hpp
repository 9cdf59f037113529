#ifndef ADSCOPE_DEX_PARSER_HPP
#define ADSCOPE_DEX_PARSER_HPP

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "adscope/dex/types.hpp"
#include "adscope/errors.hpp"

namespace adscope::dex {

namespace detail {

/// Bounds-checked little-endian reader over the file image.
class Reader {
  public:
    explicit Reader(std::span<const uint8_t> data) : data_(data) {}

    size_t size() const { return data_.size(); }

    uint8_t u8(uint64_t off) const {
        check(off, 1);
        return data_[off];
    }
    uint16_t u16(uint64_t off) const {
        check(off, 2);
        return static_cast<uint16_t>(data_[off] | (data_[off + 1] << 8));
    }
    uint32_t u32(uint64_t off) const {
        check(off, 4);
        return static_cast<uint32_t>(data_[off]) |
               (static_cast<uint32_t>(data_[off + 1]) << 8) |
               (static_cast<uint32_t>(data_[off + 2]) << 16) |
               (static_cast<uint32_t>(data_[off + 3]) << 24);
    }

    /// uleb128, at most 5 bytes. Advances off past the encoding.
    uint32_t uleb128(uint64_t& off) const {
        uint32_t result = 0;
        for (int shift = 0; shift < 35; shift += 7) {
            uint8_t b = u8(off++);
            result |= static_cast<uint32_t>(b & 0x7f) << shift;
            if ((b & 0x80) == 0) return result;
        }
        throw TruncatedSection("uleb128 longer than 5 bytes", off);
    }

    std::span<const uint8_t> slice(uint64_t off, uint64_t len) const {
        check(off, len);
        return data_.subspan(off, len);
    }

  private:
    void check(uint64_t off, uint64_t len) const {
        if (off > data_.size() || len > data_.size() - off)
            throw TruncatedSection("read past end of input", off);
    }

    std::span<const uint8_t> data_;
};

/// MUTF-8 decode with lossy replacement of invalid sequences.
/// Surrogate pairs and the two-byte NUL are passed through as raw UTF-8-ish
/// bytes; bad sequences become U+FFFD and set the flag.
inline std::string decode_mutf8(std::span<const uint8_t> bytes, bool& lossy) {
    std::string out;
    out.reserve(bytes.size());
    size_t i = 0;
    while (i < bytes.size()) {
        uint8_t a = bytes[i];
        if (a < 0x80) {
            out.push_back(static_cast<char>(a));
            i += 1;
        } else if ((a & 0xe0) == 0xc0) {
            if (i + 1 < bytes.size() && (bytes[i + 1] & 0xc0) == 0x80) {
                out.push_back(static_cast<char>(a));
                out.push_back(static_cast<char>(bytes[i + 1]));
                i += 2;
            } else {
                out += "\xef\xbf\xbd";
                lossy = true;
                i += 1;
            }
        } else if ((a & 0xf0) == 0xe0) {
            if (i + 2 < bytes.size() && (bytes[i + 1] & 0xc0) == 0x80 &&
                (bytes[i + 2] & 0xc0) == 0x80) {
                out.push_back(static_cast<char>(a));
                out.push_back(static_cast<char>(bytes[i + 1]));
                out.push_back(static_cast<char>(bytes[i + 2]));
                i += 3;
            } else {
                out += "\xef\xbf\xbd";
                lossy = true;
                i += 1;
            }
        } else {
            out += "\xef\xbf\xbd";
            lossy = true;
            i += 1;
        }
    }
    return out;
}

constexpr size_t kHeaderSize = 112;

}  // namespace detail

/// Parse a complete DEX file image into an indexed model. Decodes the
/// string/type/proto/method tables and locates each class's code items.
inline DexFile parse_dex(std::span<const uint8_t> bytes) {
    using detail::Reader;
    Reader r(bytes);

    if (bytes.size() < detail::kHeaderSize)
        throw MalformedHeader("input shorter than DEX header", bytes.size());

    static const uint8_t kMagicPrefix[4] = {0x64, 0x65, 0x78, 0x0a};  // "dex\n"
    if (std::memcmp(bytes.data(), kMagicPrefix, 4) != 0)
        throw MalformedHeader("bad magic", 0);
    if (bytes[4] != '0' || bytes[5] != '3' || bytes[7] != 0x00)
        throw MalformedHeader("bad version in magic", 4);
    int version = 30 + (bytes[6] - '0');
    if (version < 35 || version > 39)
        throw MalformedHeader("unsupported DEX version " + std::to_string(version), 6);

    uint32_t endian_tag = r.u32(40);
    if (endian_tag != 0x12345678)
        throw MalformedHeader("unsupported endian tag", 40);

    DexFile dex;
    dex.version = version;

    uint32_t string_ids_size = r.u32(56), string_ids_off = r.u32(60);
    uint32_t type_ids_size = r.u32(64), type_ids_off = r.u32(68);
    uint32_t proto_ids_size = r.u32(72), proto_ids_off = r.u32(76);
    uint32_t method_ids_size = r.u32(88), method_ids_off = r.u32(92);
    uint32_t class_defs_size = r.u32(96), class_defs_off = r.u32(100);

    // Reject declared table sizes that cannot fit in the file before any
    // allocation sized from them.
    auto check_table = [&](uint32_t count, uint32_t off, uint32_t entry_size,
                           const char* what) {
        if (count == 0) return;
        if (off > r.size() || count > (r.size() - off) / entry_size)
            throw TruncatedSection(std::string(what) + " table exceeds file", off);
    };
    check_table(string_ids_size, string_ids_off, 4, "string_ids");
    check_table(type_ids_size, type_ids_off, 4, "type_ids");
    check_table(proto_ids_size, proto_ids_off, 12, "proto_ids");
    check_table(method_ids_size, method_ids_off, 8, "method_ids");
    check_table(class_defs_size, class_defs_off, 32, "class_defs");

    // Strings
    dex.strings.reserve(string_ids_size);
    bool any_lossy = false;
    for (uint32_t i = 0; i < string_ids_size; ++i) {
        uint64_t id_off = static_cast<uint64_t>(string_ids_off) + 4ull * i;
        uint64_t data_off = r.u32(id_off);
        uint32_t utf16_len = r.uleb128(data_off);
        // MUTF-8 data is NUL-terminated; utf16_len bounds the byte length at
        // 3 bytes per code unit.
        uint64_t end = data_off;
        uint64_t max_end = data_off + 3ull * utf16_len;
        while (end < r.size() && end <= max_end && r.u8(end) != 0) ++end;
        if (end >= r.size())
            throw TruncatedSection("unterminated string data", data_off);
        bool lossy = false;
        dex.strings.push_back(
            detail::decode_mutf8(r.slice(data_off, end - data_off), lossy));
        any_lossy |= lossy;
    }
    if (any_lossy)
        dex.diagnostics.push_back("invalid MUTF-8 sequences replaced");

    // Types
    dex.type_descriptors.reserve(type_ids_size);
    for (uint32_t i = 0; i < type_ids_size; ++i) {
        uint32_t desc_idx = r.u32(static_cast<uint64_t>(type_ids_off) + 4ull * i);
        if (desc_idx >= dex.strings.size())
            throw IndexOutOfRange("type descriptor string index " +
                                      std::to_string(desc_idx),
                                  type_ids_off + 4ull * i);
        dex.type_descriptors.push_back(dex.strings[desc_idx]);
    }

    auto type_at = [&](uint32_t idx, uint64_t where) -> const std::string& {
        if (idx >= dex.type_descriptors.size())
            throw IndexOutOfRange("type index " + std::to_string(idx), where);
        return dex.type_descriptors[idx];
    };

    // Protos
    dex.protos.reserve(proto_ids_size);
    for (uint32_t i = 0; i < proto_ids_size; ++i) {
        uint64_t off = static_cast<uint64_t>(proto_ids_off) + 12ull * i;
        uint32_t return_idx = r.u32(off + 4);
        uint32_t params_off = r.u32(off + 8);
        Proto p;
        p.return_descriptor = type_at(return_idx, off + 4);
        if (params_off != 0) {
            uint32_t count = r.u32(params_off);
            if (count > (r.size() - params_off) / 2)
                throw TruncatedSection("type list exceeds file", params_off);
            p.param_descriptors.reserve(count);
            for (uint32_t j = 0; j < count; ++j) {
                uint16_t t = r.u16(static_cast<uint64_t>(params_off) + 4 + 2ull * j);
                p.param_descriptors.push_back(type_at(t, params_off + 4 + 2ull * j));
            }
        }
        dex.protos.push_back(std::move(p));
    }

    // Method refs
    dex.method_refs.reserve(method_ids_size);
    for (uint32_t i = 0; i < method_ids_size; ++i) {
        uint64_t off = static_cast<uint64_t>(method_ids_off) + 8ull * i;
        RawMethodRef m{r.u16(off), r.u16(off + 2), r.u32(off + 4)};
        if (m.class_type_idx >= dex.type_descriptors.size())
            throw IndexOutOfRange("method class type index", off);
        if (m.proto_idx >= dex.protos.size())
            throw IndexOutOfRange("method proto index", off + 2);
        if (m.name_string_idx >= dex.strings.size())
            throw IndexOutOfRange("method name string index", off + 4);
        dex.method_refs.push_back(m);
    }

    // Class defs and code items
    dex.classes.reserve(class_defs_size);
    for (uint32_t i = 0; i < class_defs_size; ++i) {
        uint64_t off = static_cast<uint64_t>(class_defs_off) + 32ull * i;
        uint32_t class_idx = r.u32(off);
        uint32_t class_data_off = r.u32(off + 24);
        ClassDef cd;
        cd.descriptor = type_at(class_idx, off);
        if (class_data_off != 0) {
            uint64_t p = class_data_off;
            uint32_t static_fields = r.uleb128(p);
            uint32_t instance_fields = r.uleb128(p);
            uint32_t direct_methods = r.uleb128(p);
            uint32_t virtual_methods = r.uleb128(p);
            for (uint32_t f = 0; f < static_fields + instance_fields; ++f) {
                r.uleb128(p);  // field_idx_diff
                r.uleb128(p);  // access_flags
            }
            auto read_methods = [&](uint32_t count) {
                uint32_t method_idx = 0;
                for (uint32_t m = 0; m < count; ++m) {
                    method_idx += r.uleb128(p);
                    r.uleb128(p);  // access_flags
                    uint32_t code_off = r.uleb128(p);
                    if (method_idx >= dex.method_refs.size())
                        throw IndexOutOfRange("class method index", p);
                    ClassMethod cm;
                    cm.method_idx = method_idx;
                    if (code_off != 0) {
                        uint32_t insns_size = r.u32(static_cast<uint64_t>(code_off) + 12);
                        if (insns_size > (r.size() - code_off) / 2)
                            throw TruncatedSection("code item exceeds file", code_off);
                        cm.has_code = true;
                        cm.code_units.reserve(insns_size);
                        for (uint32_t u = 0; u < insns_size; ++u)
                            cm.code_units.push_back(
                                r.u16(static_cast<uint64_t>(code_off) + 16 + 2ull * u));
                    }
                    cd.methods.push_back(std::move(cm));
                }
            };
            read_methods(direct_methods);
            read_methods(virtual_methods);
        }
        dex.classes.push_back(std::move(cd));
    }

    return dex;
}

inline DexFile parse_dex(const std::vector<uint8_t>& bytes) {
    return parse_dex(std::span<const uint8_t>(bytes));
}

}  // namespace adscope::dex

#endif
