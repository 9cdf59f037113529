#ifndef ADSCOPE_LIBID_SPLIT_HPP
#define ADSCOPE_LIBID_SPLIT_HPP

#include <optional>
#include <string>
#include <vector>

#include "adscope/dex/types.hpp"
#include "adscope/libid/registry.hpp"

namespace adscope::libid {

/// Total, disjoint partition of an app's edges by who calls whom.
struct EdgeSplit {
    std::vector<dex::CallEdge> app_to_lib;
    std::vector<dex::CallEdge> lib_to_lib;   // excluded from all leak statistics
    std::vector<dex::CallEdge> app_internal;
};

/// `resolver` must already cover this app's obfuscated packages (a registry
/// extended with fingerprint-matched prefixes).
inline EdgeSplit split_edges(const std::vector<dex::CallEdge>& edges,
                             const Registry& resolver) {
    EdgeSplit split;
    for (const dex::CallEdge& e : edges) {
        bool caller_is_lib = resolver.match_class(e.caller_class).has_value();
        bool callee_is_lib = resolver.match_class(e.callee.class_descriptor).has_value();
        if (callee_is_lib && !caller_is_lib)
            split.app_to_lib.push_back(e);
        else if (callee_is_lib && caller_is_lib)
            split.lib_to_lib.push_back(e);
        else
            split.app_internal.push_back(e);
    }
    return split;
}

}  // namespace adscope::libid

#endif
