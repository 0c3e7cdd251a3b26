#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "gcore/graph.hpp"
#include "gcore/regex.hpp"

namespace gcore {

// One materialized segment of a path view: the cheapest walk from src to dst
// conforming to the view's walk pattern.
struct ViewSegment {
    double cost = 0;
    std::vector<ObjId> body;  // [src, e1, ..., dst]
};

// Binary relation (src, dst) -> cheapest segment, produced by a PATH clause.
class PathViewRelation {
public:
    // Keeps the minimum-cost entry; ties go to the lexicographically least body.
    void offer(ObjId src, ObjId dst, double cost, std::vector<ObjId> body);
    const ViewSegment* find(ObjId src, ObjId dst) const;
    const std::vector<ObjId>& destinations(ObjId src) const;
    size_t size() const { return best_.size(); }

private:
    std::map<std::pair<ObjId, ObjId>, ViewSegment> best_;
    std::map<ObjId, std::vector<ObjId>> by_src_;
    static const std::vector<ObjId> kNone;
};

// Supplies evaluated path views to the search; lookup of an undeclared name
// is an evaluation error.
class ViewResolver {
public:
    virtual ~ViewResolver() = default;
    virtual const PathViewRelation& view(const std::string& name) const = 0;
};

struct WalkResult {
    std::vector<ObjId> body;  // [a1, e1, a2, ..., an+1]; single element for 0 hops
    double cost = 0;
};

struct SearchOptions {
    // Cost of traversing one graph edge; must be positive. Defaults to hop
    // counting. View jumps always use the segment's recorded cost.
    std::function<double(ObjId)> edge_cost;
    const ViewResolver* views = nullptr;
    // Walks longer than this many hops are discarded; 0 means the pumping
    // bound |N| * |automaton states|.
    size_t max_hops = 0;
};

// True iff the stored body conforms to the automaton per the two-bullet
// interleaved-string definition (node labels, forward/backward edge labels,
// wildcards; view references match recorded view segments).
bool conforms(const Graph& g, const std::vector<ObjId>& body, const PathAutomaton& aut,
              const ViewResolver* views = nullptr);
bool conforms(const Graph& g, const std::vector<ObjId>& body, const LabelRegex& r);

// Minimum-cost conforming walk; ties broken by the lexicographically least
// body sequence, so results are deterministic. Arbitrary (non-simple) walks
// are permitted; termination is guaranteed by k-bounded product expansion.
std::optional<WalkResult> shortest_path(const Graph& g, ObjId src, ObjId dst,
                                        const PathAutomaton& aut, const SearchOptions& opt = {});

// Up to k distinct conforming walks in non-decreasing (cost, body) order;
// distinctness is by body sequence. The first element equals shortest_path.
std::vector<WalkResult> k_shortest_paths(const Graph& g, ObjId src, ObjId dst,
                                         const PathAutomaton& aut, size_t k,
                                         const SearchOptions& opt = {});

// Single-source variants; dst_filter (when non-null) restricts the reported
// destinations without affecting the search.
std::map<ObjId, WalkResult> shortest_paths_from(const Graph& g, ObjId src,
                                                const PathAutomaton& aut,
                                                const SearchOptions& opt = {},
                                                const std::set<ObjId>* dst_filter = nullptr);
std::map<ObjId, std::vector<WalkResult>> k_shortest_paths_from(
    const Graph& g, ObjId src, const PathAutomaton& aut, size_t k,
    const SearchOptions& opt = {}, const std::set<ObjId>* dst_filter = nullptr);

// The subgraph of exactly those nodes and edges lying on at least one
// conforming walk from src to dst, computed by intersecting forward and
// backward product reachability (no walk materialization). No path objects.
Graph all_paths_projection(const Graph& g, ObjId src, ObjId dst, const PathAutomaton& aut,
                           const ViewResolver* views = nullptr);

}  // namespace gcore
