#ifndef ADSCOPE_INGEST_CALL_LOG_HPP
#define ADSCOPE_INGEST_CALL_LOG_HPP

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "adscope/dex/types.hpp"
#include "adscope/errors.hpp"
#include "adscope/ingest/manifest.hpp"

namespace adscope::ingest {

namespace detail {

/// Split a method descriptor "(Ljava/lang/String;I)V" into parameter
/// descriptors and the return descriptor.
inline void parse_method_descriptor(std::string_view desc, size_t line_no,
                                    std::vector<std::string>& params,
                                    std::string& ret) {
    if (desc.size() < 3 || desc.front() != '(')
        throw RecordSyntax("bad method descriptor '" + std::string(desc) + "'", line_no);
    size_t close = desc.find(')');
    if (close == std::string_view::npos)
        throw RecordSyntax("bad method descriptor '" + std::string(desc) + "'", line_no);
    std::string_view inner = desc.substr(1, close - 1);
    size_t i = 0;
    while (i < inner.size()) {
        size_t start = i;
        while (i < inner.size() && inner[i] == '[') ++i;
        if (i >= inner.size())
            throw RecordSyntax("dangling array marker in descriptor", line_no);
        if (inner[i] == 'L') {
            size_t semi = inner.find(';', i);
            if (semi == std::string_view::npos)
                throw RecordSyntax("unterminated class descriptor", line_no);
            i = semi + 1;
        } else {
            static constexpr std::string_view kPrimitives = "ZBSCIJFD";
            if (kPrimitives.find(inner[i]) == std::string_view::npos)
                throw RecordSyntax("bad type char '" + std::string(1, inner[i]) + "'",
                                   line_no);
            ++i;
        }
        params.emplace_back(inner.substr(start, i - start));
    }
    ret = std::string(desc.substr(close + 1));
    if (ret.empty()) throw RecordSyntax("missing return descriptor", line_no);
}

inline dex::InvokeKind parse_invoke_kind(std::string_view s, size_t line_no) {
    if (s == "virtual") return dex::InvokeKind::Virtual;
    if (s == "super") return dex::InvokeKind::Super;
    if (s == "direct") return dex::InvokeKind::Direct;
    if (s == "static") return dex::InvokeKind::Static;
    if (s == "interface") return dex::InvokeKind::Interface;
    throw RecordSyntax("unknown invoke kind '" + std::string(s) + "'", line_no);
}

}  // namespace detail

/// Textual call-log frontend. One record per line, tab-separated:
///   caller class, callee class, method name, "(params)ret", [invoke kind]
inline std::vector<dex::CallEdge> parse_call_log(std::istream& in,
                                                 const std::string& app_id) {
    std::vector<dex::CallEdge> edges;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = detail::split_tabs(sv);
        if (fields.size() < 4 || fields.size() > 5)
            throw RecordSyntax("expected 4 or 5 tab-separated columns, got " +
                                   std::to_string(fields.size()),
                               line_no);
        dex::CallEdge edge;
        edge.app_id = app_id;
        edge.caller_class = std::string(detail::trim(fields[0]));
        edge.callee.class_descriptor = std::string(detail::trim(fields[1]));
        edge.callee.method_name = std::string(detail::trim(fields[2]));
        detail::parse_method_descriptor(detail::trim(fields[3]), line_no,
                                        edge.callee.param_descriptors,
                                        edge.callee.return_descriptor);
        edge.invoke_kind = fields.size() == 5
                               ? detail::parse_invoke_kind(detail::trim(fields[4]), line_no)
                               : dex::InvokeKind::Virtual;
        edges.push_back(std::move(edge));
    }
    return edges;
}

}  // namespace adscope::ingest

#endif
