#ifndef ADSCOPE_DEX_TYPES_HPP
#define ADSCOPE_DEX_TYPES_HPP

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace adscope::dex {

/// Fully qualified callee identity. Equality covers all four fields so
/// overloads stay distinct.
struct MethodRef {
    std::string class_descriptor;
    std::string method_name;
    std::vector<std::string> param_descriptors;
    std::string return_descriptor;

    friend bool operator==(const MethodRef&, const MethodRef&) = default;
    friend auto operator<=>(const MethodRef&, const MethodRef&) = default;

    std::string descriptor() const {
        std::string d = "(";
        for (const auto& p : param_descriptors) d += p;
        d += ")";
        d += return_descriptor;
        return d;
    }
};

enum class InvokeKind { Virtual, Super, Direct, Static, Interface };

inline const char* to_string(InvokeKind k) {
    switch (k) {
        case InvokeKind::Virtual: return "virtual";
        case InvokeKind::Super: return "super";
        case InvokeKind::Direct: return "direct";
        case InvokeKind::Static: return "static";
        case InvokeKind::Interface: return "interface";
    }
    return "?";
}

/// One observed invocation, attributed to the class it occurs in.
struct CallEdge {
    std::string app_id;
    std::string caller_class;
    MethodRef callee;
    InvokeKind invoke_kind = InvokeKind::Virtual;

    friend bool operator==(const CallEdge&, const CallEdge&) = default;
    friend auto operator<=>(const CallEdge&, const CallEdge&) = default;
};

struct Proto {
    std::string return_descriptor;
    std::vector<std::string> param_descriptors;
};

struct RawMethodRef {
    uint32_t class_type_idx;
    uint32_t proto_idx;
    uint32_t name_string_idx;
};

struct ClassMethod {
    uint32_t method_idx;
    bool has_code = false;
    std::vector<uint16_t> code_units;  // length equals declared insns_size
};

struct ClassDef {
    std::string descriptor;
    std::vector<ClassMethod> methods;
};

struct DexFile {
    int version = 0;  // 35..39
    std::vector<std::string> strings;
    std::vector<std::string> type_descriptors;
    std::vector<Proto> protos;
    std::vector<RawMethodRef> method_refs;
    std::vector<ClassDef> classes;
    std::vector<std::string> diagnostics;

    MethodRef resolve(uint32_t method_idx) const {
        const RawMethodRef& raw = method_refs.at(method_idx);
        const Proto& proto = protos.at(raw.proto_idx);
        return MethodRef{type_descriptors.at(raw.class_type_idx),
                         strings.at(raw.name_string_idx),
                         proto.param_descriptors, proto.return_descriptor};
    }
};

}  // namespace adscope::dex

#endif
