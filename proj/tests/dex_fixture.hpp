// Test-only DEX writer used as ground truth for the parser and the edge
// extractor. Deliberately independent of the library's parsing code: it
// serializes a small instruction plan straight to bytes and reports the edge
// list it planted.
#ifndef ADSCOPE_TESTS_DEX_FIXTURE_HPP
#define ADSCOPE_TESTS_DEX_FIXTURE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adscope/dex/types.hpp"

namespace dexfix {

using adscope::dex::CallEdge;
using adscope::dex::InvokeKind;
using adscope::dex::MethodRef;

struct Insn {
    enum class Kind {
        Nop,
        Const4,
        ReturnVoid,
        ConstString,          // plants a string constant
        Invoke,               // simple 35c form
        InvokeRange,          // 3rc form
        PackedSwitchPayload,  // switch insn + inline payload
        SparseSwitchPayload,
        FillArrayPayload,
    };
    Kind kind = Kind::Nop;
    InvokeKind invoke_kind = InvokeKind::Virtual;
    MethodRef callee;
    std::string string_value;  // for ConstString
    uint16_t payload_size = 2;
};

inline Insn invoke(InvokeKind kind, MethodRef callee) {
    Insn i;
    i.kind = Insn::Kind::Invoke;
    i.invoke_kind = kind;
    i.callee = std::move(callee);
    return i;
}

inline Insn invoke_range(InvokeKind kind, MethodRef callee) {
    Insn i = invoke(kind, std::move(callee));
    i.kind = Insn::Kind::InvokeRange;
    return i;
}

inline Insn const_string(std::string value) {
    Insn i;
    i.kind = Insn::Kind::ConstString;
    i.string_value = std::move(value);
    return i;
}

struct Method {
    std::string name;
    std::vector<std::string> params;
    std::string ret = "V";
    bool has_code = true;
    std::vector<Insn> insns;
};

struct Class {
    std::string descriptor;
    std::vector<Method> methods;
};

struct Plan {
    int version = 35;  // 35..39
    std::vector<Class> classes;
};

struct BuiltFixture {
    std::vector<uint8_t> bytes;
    std::vector<CallEdge> expected_edges;  // parser order
};

namespace detail {

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back(v >> 8);
}
inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}
inline void put_uleb(std::vector<uint8_t>& out, uint32_t v) {
    do {
        uint8_t b = v & 0x7f;
        v >>= 7;
        if (v) b |= 0x80;
        out.push_back(b);
    } while (v);
}
inline void align4(std::vector<uint8_t>& out) {
    while (out.size() % 4) out.push_back(0);
}

inline char shorty_char(const std::string& descriptor) {
    char c = descriptor[0];
    if (c == 'L' || c == '[') return 'L';
    return c;
}

struct ProtoKey {
    std::string ret;
    std::vector<std::string> params;
    auto operator<=>(const ProtoKey&) const = default;
};

struct MethodKey {
    std::string class_desc;
    std::string name;
    ProtoKey proto;
    auto operator<=>(const MethodKey&) const = default;
};

}  // namespace detail

inline BuiltFixture build(const Plan& plan, const std::string& app_id) {
    using namespace detail;

    // ---- pools ----
    std::map<std::string, uint32_t> strings;          // value -> id (after sort)
    std::map<std::string, uint32_t> types;            // descriptor -> type id
    std::map<ProtoKey, uint32_t> protos;
    std::map<MethodKey, uint32_t> methods;

    auto note_string = [&](const std::string& s) { strings.emplace(s, 0); };
    auto note_type = [&](const std::string& d) {
        note_string(d);
        types.emplace(d, 0);
    };
    auto note_proto = [&](const ProtoKey& p) {
        std::string shorty(1, shorty_char(p.ret));
        for (const auto& prm : p.params) shorty.push_back(shorty_char(prm));
        note_string(shorty);
        note_type(p.ret);
        for (const auto& prm : p.params) note_type(prm);
        protos.emplace(p, 0);
    };
    auto note_method = [&](const MethodKey& m) {
        note_type(m.class_desc);
        note_string(m.name);
        note_proto(m.proto);
        methods.emplace(m, 0);
    };

    for (const Class& cls : plan.classes) {
        note_type(cls.descriptor);
        for (const Method& m : cls.methods) {
            note_method({cls.descriptor, m.name, {m.ret, m.params}});
            for (const Insn& insn : m.insns) {
                if (insn.kind == Insn::Kind::Invoke || insn.kind == Insn::Kind::InvokeRange)
                    note_method({insn.callee.class_descriptor, insn.callee.method_name,
                                 {insn.callee.return_descriptor,
                                  insn.callee.param_descriptors}});
                if (insn.kind == Insn::Kind::ConstString)
                    note_string(insn.string_value);
            }
        }
    }

    // Assign ids. Strings sorted by value; types by string id; protos and
    // methods by key order (map iteration is already sorted).
    {
        uint32_t id = 0;
        for (auto& [value, sid] : strings) sid = id++;
    }
    {
        uint32_t id = 0;
        for (auto& [desc, tid] : types) tid = id++;
    }
    {
        uint32_t id = 0;
        for (auto& [key, pid] : protos) pid = id++;
    }
    {
        uint32_t id = 0;
        for (auto& [key, mid] : methods) mid = id++;
    }

    auto method_id = [&](const std::string& cls, const std::string& name,
                         const std::string& ret, const std::vector<std::string>& params) {
        return methods.at(MethodKey{cls, name, {ret, params}});
    };

    // ---- encode code items ----
    struct EncodedMethod {
        uint32_t method_idx;
        bool has_code;
        std::vector<uint16_t> units;
        std::vector<std::pair<size_t, CallEdge>> edges;  // offset -> edge
    };
    struct EncodedClass {
        uint32_t type_idx;
        std::vector<EncodedMethod> methods;  // sorted by method_idx
    };

    std::vector<EncodedClass> encoded;
    std::vector<CallEdge> expected;

    for (const Class& cls : plan.classes) {
        EncodedClass ec;
        ec.type_idx = types.at(cls.descriptor);
        for (const Method& m : cls.methods) {
            EncodedMethod em;
            em.method_idx = method_id(cls.descriptor, m.name, m.ret, m.params);
            em.has_code = m.has_code;
            if (!m.has_code) {
                ec.methods.push_back(std::move(em));
                continue;
            }
            auto& u = em.units;
            for (const Insn& insn : m.insns) {
                switch (insn.kind) {
                    case Insn::Kind::Nop:
                        u.push_back(0x0000);
                        break;
                    case Insn::Kind::Const4:
                        u.push_back(0x0012);
                        break;
                    case Insn::Kind::ReturnVoid:
                        u.push_back(0x000e);
                        break;
                    case Insn::Kind::ConstString:
                        u.push_back(0x001a);
                        u.push_back(static_cast<uint16_t>(strings.at(insn.string_value)));
                        break;
                    case Insn::Kind::Invoke:
                    case Insn::Kind::InvokeRange: {
                        uint8_t op;
                        switch (insn.invoke_kind) {
                            case InvokeKind::Virtual: op = 0x6e; break;
                            case InvokeKind::Super: op = 0x6f; break;
                            case InvokeKind::Direct: op = 0x70; break;
                            case InvokeKind::Static: op = 0x71; break;
                            case InvokeKind::Interface: op = 0x72; break;
                            default: op = 0x6e;
                        }
                        if (insn.kind == Insn::Kind::InvokeRange) op += 6;  // 0x74..0x78
                        em.edges.emplace_back(
                            u.size(), CallEdge{app_id, cls.descriptor, insn.callee,
                                               insn.invoke_kind});
                        u.push_back(op);  // arg count / range length 0
                        u.push_back(static_cast<uint16_t>(method_id(
                            insn.callee.class_descriptor, insn.callee.method_name,
                            insn.callee.return_descriptor, insn.callee.param_descriptors)));
                        u.push_back(0x0000);
                        break;
                    }
                    case Insn::Kind::PackedSwitchPayload: {
                        u.push_back(0x002b);       // packed-switch vAA=0
                        u.push_back(0x0003);       // payload right after this insn
                        u.push_back(0x0000);
                        if (u.size() % 2) u.push_back(0x0000);  // 4-byte align payload
                        u.push_back(0x0100);       // ident
                        u.push_back(insn.payload_size);
                        u.push_back(0x0000);       // first_key lo
                        u.push_back(0x0000);       // first_key hi
                        for (uint16_t t = 0; t < insn.payload_size * 2; ++t)
                            u.push_back(0x0000);   // targets
                        break;
                    }
                    case Insn::Kind::SparseSwitchPayload: {
                        u.push_back(0x002c);
                        u.push_back(0x0003);
                        u.push_back(0x0000);
                        if (u.size() % 2) u.push_back(0x0000);
                        u.push_back(0x0200);
                        u.push_back(insn.payload_size);
                        for (uint16_t t = 0; t < insn.payload_size * 4; ++t)
                            u.push_back(0x0000);
                        break;
                    }
                    case Insn::Kind::FillArrayPayload: {
                        u.push_back(0x0026);  // fill-array-data vAA=0
                        u.push_back(0x0003);
                        u.push_back(0x0000);
                        if (u.size() % 2) u.push_back(0x0000);
                        u.push_back(0x0300);
                        u.push_back(2);  // element width
                        uint32_t count = insn.payload_size;
                        u.push_back(static_cast<uint16_t>(count & 0xffff));
                        u.push_back(static_cast<uint16_t>(count >> 16));
                        for (uint32_t t = 0; t < (2 * count + 1) / 2; ++t)
                            u.push_back(0x0000);
                        break;
                    }
                }
            }
            ec.methods.push_back(std::move(em));
        }
        // class_data lists methods in ascending method_idx order.
        std::stable_sort(ec.methods.begin(), ec.methods.end(),
                         [](const EncodedMethod& a, const EncodedMethod& b) {
                             return a.method_idx < b.method_idx;
                         });
        for (const EncodedMethod& em : ec.methods)
            for (const auto& [off, edge] : em.edges) expected.push_back(edge);
        encoded.push_back(std::move(ec));
    }

    // ---- layout ----
    const uint32_t header_size = 112;
    uint32_t string_ids_off = header_size;
    uint32_t string_ids_size = static_cast<uint32_t>(strings.size());
    uint32_t type_ids_off = string_ids_off + 4 * string_ids_size;
    uint32_t type_ids_size = static_cast<uint32_t>(types.size());
    uint32_t proto_ids_off = type_ids_off + 4 * type_ids_size;
    uint32_t proto_ids_size = static_cast<uint32_t>(protos.size());
    uint32_t field_ids_off = proto_ids_off + 12 * proto_ids_size;
    uint32_t method_ids_off = field_ids_off;  // zero field ids
    uint32_t method_ids_size = static_cast<uint32_t>(methods.size());
    uint32_t class_defs_off = method_ids_off + 8 * method_ids_size;
    uint32_t class_defs_size = static_cast<uint32_t>(encoded.size());
    uint32_t data_off = class_defs_off + 32 * class_defs_size;

    std::vector<uint8_t> data;  // grows; offsets are data_off + local
    auto here = [&] { return data_off + static_cast<uint32_t>(data.size()); };

    // string data
    std::vector<uint32_t> string_data_offs(string_ids_size);
    for (const auto& [value, sid] : strings) {
        string_data_offs[sid] = here();
        put_uleb(data, static_cast<uint32_t>(value.size()));  // ASCII only
        data.insert(data.end(), value.begin(), value.end());
        data.push_back(0);
    }

    // type lists for protos with parameters
    std::map<ProtoKey, uint32_t> type_list_offs;
    for (const auto& [key, pid] : protos) {
        if (key.params.empty()) continue;
        align4(data);
        type_list_offs[key] = here();
        put_u32(data, static_cast<uint32_t>(key.params.size()));
        for (const auto& p : key.params)
            put_u16(data, static_cast<uint16_t>(types.at(p)));
    }

    // code items
    std::vector<std::vector<uint32_t>> code_offs(encoded.size());
    for (size_t c = 0; c < encoded.size(); ++c) {
        for (const auto& em : encoded[c].methods) {
            if (!em.has_code) {
                code_offs[c].push_back(0);
                continue;
            }
            align4(data);
            code_offs[c].push_back(here());
            put_u16(data, 4);  // registers_size
            put_u16(data, 0);  // ins_size
            put_u16(data, 1);  // outs_size
            put_u16(data, 0);  // tries_size
            put_u32(data, 0);  // debug_info_off
            put_u32(data, static_cast<uint32_t>(em.units.size()));
            for (uint16_t unit : em.units) put_u16(data, unit);
        }
    }

    // class data
    std::vector<uint32_t> class_data_offs(encoded.size());
    for (size_t c = 0; c < encoded.size(); ++c) {
        const auto& ec = encoded[c];
        if (ec.methods.empty()) {
            class_data_offs[c] = 0;
            continue;
        }
        class_data_offs[c] = here();
        put_uleb(data, 0);  // static fields
        put_uleb(data, 0);  // instance fields
        put_uleb(data, static_cast<uint32_t>(ec.methods.size()));  // direct
        put_uleb(data, 0);  // virtual
        uint32_t prev = 0;
        for (size_t m = 0; m < ec.methods.size(); ++m) {
            put_uleb(data, ec.methods[m].method_idx - prev);
            prev = ec.methods[m].method_idx;
            put_uleb(data, 0x0008);  // ACC_STATIC
            put_uleb(data, code_offs[c][m]);
        }
    }

    uint32_t file_size = data_off + static_cast<uint32_t>(data.size());

    // ---- assemble ----
    std::vector<uint8_t> out;
    out.reserve(file_size);
    out.push_back('d'); out.push_back('e'); out.push_back('x'); out.push_back('\n');
    out.push_back('0'); out.push_back('3');
    out.push_back(static_cast<uint8_t>('0' + plan.version - 30));
    out.push_back(0);
    put_u32(out, 0);                       // checksum (unchecked)
    for (int i = 0; i < 20; ++i) out.push_back(0);  // signature
    put_u32(out, file_size);
    put_u32(out, header_size);
    put_u32(out, 0x12345678);              // endian tag
    put_u32(out, 0);                       // link_size
    put_u32(out, 0);                       // link_off
    put_u32(out, 0);                       // map_off
    put_u32(out, string_ids_size);
    put_u32(out, string_ids_size ? string_ids_off : 0);
    put_u32(out, type_ids_size);
    put_u32(out, type_ids_size ? type_ids_off : 0);
    put_u32(out, proto_ids_size);
    put_u32(out, proto_ids_size ? proto_ids_off : 0);
    put_u32(out, 0);                       // field_ids_size
    put_u32(out, 0);                       // field_ids_off
    put_u32(out, method_ids_size);
    put_u32(out, method_ids_size ? method_ids_off : 0);
    put_u32(out, class_defs_size);
    put_u32(out, class_defs_size ? class_defs_off : 0);
    put_u32(out, static_cast<uint32_t>(data.size()));
    put_u32(out, data_off);

    // string_ids
    for (uint32_t off : string_data_offs) put_u32(out, off);
    // type_ids
    {
        std::vector<uint32_t> by_id(type_ids_size);
        for (const auto& [desc, tid] : types) by_id[tid] = strings.at(desc);
        for (uint32_t sid : by_id) put_u32(out, sid);
    }
    // proto_ids
    for (const auto& [key, pid] : protos) {
        std::string shorty(1, shorty_char(key.ret));
        for (const auto& p : key.params) shorty.push_back(shorty_char(p));
        put_u32(out, strings.at(shorty));
        put_u32(out, types.at(key.ret));
        put_u32(out, key.params.empty() ? 0 : type_list_offs.at(key));
    }
    // method_ids
    for (const auto& [key, mid] : methods) {
        put_u16(out, static_cast<uint16_t>(types.at(key.class_desc)));
        put_u16(out, static_cast<uint16_t>(protos.at(key.proto)));
        put_u32(out, strings.at(key.name));
    }
    // class_defs
    for (size_t c = 0; c < encoded.size(); ++c) {
        put_u32(out, encoded[c].type_idx);
        put_u32(out, 0x0001);       // ACC_PUBLIC
        put_u32(out, 0xffffffff);   // no superclass
        put_u32(out, 0);            // interfaces_off
        put_u32(out, 0xffffffff);   // source_file_idx
        put_u32(out, 0);            // annotations_off
        put_u32(out, class_data_offs[c]);
        put_u32(out, 0);            // static_values_off
    }
    out.insert(out.end(), data.begin(), data.end());

    return BuiltFixture{std::move(out), std::move(expected)};
}

inline MethodRef ref(std::string cls, std::string name,
                     std::vector<std::string> params = {}, std::string ret = "V") {
    return MethodRef{std::move(cls), std::move(name), std::move(params), std::move(ret)};
}

}  // namespace dexfix

#endif
