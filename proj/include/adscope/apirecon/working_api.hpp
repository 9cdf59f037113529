#ifndef ADSCOPE_APIRECON_WORKING_API_HPP
#define ADSCOPE_APIRECON_WORKING_API_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adscope/dex/types.hpp"

namespace adscope::apirecon {

struct WorkingApiEntry {
    std::string library;
    dex::MethodRef method;
    uint64_t app_count = 0;
    uint64_t call_site_count = 0;
};

struct WorkingApi {
    std::string library;
    std::map<dex::MethodRef, WorkingApiEntry> entries;

    size_t distinct_method_count() const { return entries.size(); }
};

/// Mergeable partial aggregation. App-id sets are kept only while
/// accumulating; finalize() collapses them to counts. The merge is
/// associative and commutative, which is what makes per-app fan-out safe.
class ApiAccumulator {
  public:
    void add(const std::string& library, const dex::CallEdge& edge) {
        Cell& cell = cells_[library][edge.callee];
        cell.apps.insert(edge.app_id);
        cell.call_sites += 1;
    }

    void merge(const ApiAccumulator& other) {
        for (const auto& [library, methods] : other.cells_) {
            auto& mine = cells_[library];
            for (const auto& [method, cell] : methods) {
                Cell& c = mine[method];
                c.apps.insert(cell.apps.begin(), cell.apps.end());
                c.call_sites += cell.call_sites;
            }
        }
    }

    std::map<std::string, WorkingApi> finalize() const {
        std::map<std::string, WorkingApi> result;
        for (const auto& [library, methods] : cells_) {
            WorkingApi api;
            api.library = library;
            for (const auto& [method, cell] : methods) {
                api.entries.emplace(
                    method, WorkingApiEntry{library, method, cell.apps.size(),
                                            cell.call_sites});
            }
            result.emplace(library, std::move(api));
        }
        return result;
    }

  private:
    struct Cell {
        std::set<std::string> apps;
        uint64_t call_sites = 0;
    };
    std::map<std::string, std::map<dex::MethodRef, Cell>> cells_;
};

/// Pool app->library edges into each library's working API. `library_of`
/// maps a callee class descriptor to its canonical library; edges it cannot
/// resolve are ignored (the caller is expected to pass pre-split edges).
template <typename LibraryOf>
std::map<std::string, WorkingApi> reconstruct(const std::vector<dex::CallEdge>& edges,
                                              LibraryOf&& library_of) {
    ApiAccumulator acc;
    for (const dex::CallEdge& e : edges)
        if (auto lib = library_of(e.callee.class_descriptor)) acc.add(*lib, e);
    return acc.finalize();
}

struct ApiSizeHistogram {
    uint64_t size_1_10 = 0;
    uint64_t size_11_50 = 0;
    uint64_t size_51_200 = 0;
    uint64_t size_over_200 = 0;
    std::map<std::string, uint64_t> per_library;
};

inline ApiSizeHistogram api_size_distribution(
    const std::map<std::string, WorkingApi>& apis) {
    ApiSizeHistogram h;
    for (const auto& [library, api] : apis) {
        uint64_t n = api.distinct_method_count();
        h.per_library[library] = n;
        if (n <= 10)
            h.size_1_10 += 1;
        else if (n <= 50)
            h.size_11_50 += 1;
        else if (n <= 200)
            h.size_51_200 += 1;
        else
            h.size_over_200 += 1;
    }
    return h;
}

}  // namespace adscope::apirecon

#endif
