#ifndef ADSCOPE_DEX_EXTRACT_HPP
#define ADSCOPE_DEX_EXTRACT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adscope/dex/types.hpp"

namespace adscope::dex {

namespace detail {

// Instruction width in 16-bit code units, indexed by opcode. 0 marks an
// opcode with no defined format (decoding of the method stops there).
inline const std::array<uint8_t, 256>& opcode_widths() {
    static const std::array<uint8_t, 256> table = [] {
        std::array<uint8_t, 256> w{};
        auto fill = [&](int lo, int hi, uint8_t units) {
            for (int op = lo; op <= hi; ++op) w[op] = units;
        };
        w[0x00] = 1;           // nop (payload handled separately)
        fill(0x01, 0x01, 1);   // move
        w[0x02] = 2; w[0x03] = 3;
        w[0x04] = 1; w[0x05] = 2; w[0x06] = 3;
        w[0x07] = 1; w[0x08] = 2; w[0x09] = 3;
        fill(0x0a, 0x0d, 1);   // move-result*, move-exception
        fill(0x0e, 0x11, 1);   // return*
        w[0x12] = 1;           // const/4
        w[0x13] = 2; w[0x14] = 3; w[0x15] = 2;
        w[0x16] = 2; w[0x17] = 3; w[0x18] = 5; w[0x19] = 2;
        w[0x1a] = 2;           // const-string
        w[0x1b] = 3;           // const-string/jumbo
        w[0x1c] = 2;           // const-class
        w[0x1d] = 1; w[0x1e] = 1;
        w[0x1f] = 2; w[0x20] = 2; w[0x21] = 1;
        w[0x22] = 2; w[0x23] = 2;
        w[0x24] = 3; w[0x25] = 3;  // filled-new-array[/range]
        w[0x26] = 3;           // fill-array-data
        w[0x27] = 1;           // throw
        w[0x28] = 1; w[0x29] = 2; w[0x2a] = 3;  // goto*
        w[0x2b] = 3; w[0x2c] = 3;  // packed-switch, sparse-switch
        fill(0x2d, 0x31, 2);   // cmp*
        fill(0x32, 0x3d, 2);   // if-test, if-testz
        fill(0x44, 0x51, 2);   // aget*/aput*
        fill(0x52, 0x5f, 2);   // iget*/iput*
        fill(0x60, 0x6d, 2);   // sget*/sput*
        fill(0x6e, 0x72, 3);   // invoke-kind
        fill(0x74, 0x78, 3);   // invoke-kind/range
        fill(0x7b, 0x8f, 1);   // unop
        fill(0x90, 0xaf, 2);   // binop
        fill(0xb0, 0xcf, 1);   // binop/2addr
        fill(0xd0, 0xd7, 2);   // binop/lit16
        fill(0xd8, 0xe2, 2);   // binop/lit8
        w[0xfa] = 4; w[0xfb] = 4;  // invoke-polymorphic[/range] (DEX 038+)
        w[0xfc] = 3; w[0xfd] = 3;  // invoke-custom[/range] (DEX 038+)
        w[0xfe] = 2; w[0xff] = 2;  // const-method-handle/type (DEX 039)
        return w;
    }();
    return table;
}

inline std::optional<InvokeKind> invoke_kind_for(uint8_t opcode) {
    switch (opcode) {
        case 0x6e: case 0x74: return InvokeKind::Virtual;
        case 0x6f: case 0x75: return InvokeKind::Super;
        case 0x70: case 0x76: return InvokeKind::Direct;
        case 0x71: case 0x77: return InvokeKind::Static;
        case 0x72: case 0x78: return InvokeKind::Interface;
        default: return std::nullopt;
    }
}

// Length in code units of a nop payload pseudo-instruction, or 0 if the
// unit is a plain nop.
inline uint64_t payload_length(const std::vector<uint16_t>& units, size_t pc) {
    uint16_t ident = units[pc];
    if (ident == 0x0100) {  // packed-switch-payload
        if (pc + 1 >= units.size()) return 0;
        return 4ull + 2ull * units[pc + 1];
    }
    if (ident == 0x0200) {  // sparse-switch-payload
        if (pc + 1 >= units.size()) return 0;
        return 2ull + 4ull * units[pc + 1];
    }
    if (ident == 0x0300) {  // fill-array-data-payload
        if (pc + 3 >= units.size()) return 0;
        uint64_t element_width = units[pc + 1];
        uint64_t count = units[pc + 2] | (static_cast<uint64_t>(units[pc + 3]) << 16);
        return 4ull + (element_width * count + 1) / 2;
    }
    return 0;
}

}  // namespace detail

/// Walk every code item and emit one CallEdge per invoke instruction, in
/// class order, method order, then instruction offset. A method hitting an
/// undefined opcode is flagged in `diagnostics` and skipped from there on;
/// other methods are unaffected.
inline std::vector<CallEdge> extract_call_edges(
    const DexFile& dex, const std::string& app_id,
    std::vector<std::string>* diagnostics = nullptr) {
    std::vector<CallEdge> edges;
    const auto& widths = detail::opcode_widths();

    for (const ClassDef& cls : dex.classes) {
        for (const ClassMethod& method : cls.methods) {
            if (!method.has_code) continue;
            const auto& units = method.code_units;
            size_t pc = 0;
            while (pc < units.size()) {
                uint16_t unit = units[pc];
                uint8_t opcode = static_cast<uint8_t>(unit & 0xff);

                if (opcode == 0x00 && (unit >> 8) != 0) {
                    uint64_t len = detail::payload_length(units, pc);
                    if (len == 0 || pc + len > units.size()) break;  // truncated payload
                    pc += len;
                    continue;
                }

                uint8_t width = widths[opcode];
                if (width == 0) {
                    if (diagnostics)
                        diagnostics->push_back(
                            app_id + ": unknown opcode 0x" + std::to_string(opcode) +
                            " in " + cls.descriptor + ", method skipped");
                    break;
                }
                if (pc + width > units.size()) break;  // truncated instruction

                if (auto kind = detail::invoke_kind_for(opcode)) {
                    uint16_t method_idx = units[pc + 1];
                    if (method_idx < dex.method_refs.size()) {
                        edges.push_back(CallEdge{app_id, cls.descriptor,
                                                 dex.resolve(method_idx), *kind});
                    }
                }
                // invoke-polymorphic/invoke-custom are stepped over but emit
                // no edges.
                if (opcode >= 0xfa && opcode <= 0xfd && diagnostics)
                    diagnostics->push_back(app_id + ": invoke-polymorphic/custom in " +
                                           cls.descriptor + " not tracked");
                pc += width;
            }
        }
    }
    return edges;
}

}  // namespace adscope::dex

#endif
