#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "gcore/ids.hpp"
#include "gcore/value.hpp"

namespace gcore {

using LabelSet = std::set<std::string>;
using ValueSet = std::vector<Value>;  // sorted, unique (canonical order)

struct EdgeEndpoints {
    ObjId src;
    ObjId dst;
    friend bool operator==(const EdgeEndpoints&, const EdgeEndpoints&) = default;
};

// One adjacency record: travelling over `edge` from the indexed node lands
// on `other`; `forward` tells whether the edge is traversed src->dst.
struct Adjacency {
    ObjId edge;
    ObjId other;
    bool forward;
};

struct Violation {
    std::string message;
};

class GraphBuilder;

// Immutable Path Property Graph: (N, E, P, rho, delta, lambda, sigma).
// Absent properties read as the empty set, never as an error.
class Graph {
public:
    Graph() : ids_(std::make_shared<IdSpace>()) {}

    const std::shared_ptr<IdSpace>& ids() const { return ids_; }

    const std::set<ObjId>& nodes() const { return nodes_; }
    const std::set<ObjId>& edges() const { return edges_; }
    const std::set<ObjId>& paths() const { return paths_; }

    bool has(ObjId id) const;
    EdgeEndpoints endpoints(ObjId edge) const;
    const std::vector<ObjId>& path_body(ObjId path) const;

    // nodes(p) and edges(p) in traversal order.
    std::vector<ObjId> path_nodes(ObjId path) const;
    std::vector<ObjId> path_edges(ObjId path) const;

    const LabelSet& labels(ObjId id) const;
    const ValueSet& properties(ObjId id, const std::string& key) const;
    // Every (key -> values) pair stored for one object.
    std::vector<std::pair<std::string, ValueSet>> all_properties(ObjId id) const;

    const std::vector<Adjacency>& adjacent(ObjId node) const;

    std::vector<Violation> validate() const;
    bool empty() const { return nodes_.empty() && edges_.empty() && paths_.empty(); }

private:
    friend class GraphBuilder;
    friend bool consistent(const Graph&, const Graph&);
    friend Graph graph_union(const Graph&, const Graph&);
    friend Graph graph_intersect(const Graph&, const Graph&);
    friend Graph graph_difference(const Graph&, const Graph&);

    std::shared_ptr<IdSpace> ids_;
    std::set<ObjId> nodes_, edges_, paths_;
    std::map<ObjId, EdgeEndpoints> endpoints_;
    std::map<ObjId, std::vector<ObjId>> bodies_;
    std::map<ObjId, LabelSet> labels_;
    std::map<std::pair<ObjId, std::string>, ValueSet> props_;
    std::map<ObjId, std::vector<Adjacency>> adjacency_;

    void build_adjacency();
};

// Accumulates graph content, then freezes it into an immutable Graph.
class GraphBuilder {
public:
    explicit GraphBuilder(std::shared_ptr<IdSpace> ids) : ids_(std::move(ids)) {}

    ObjId add_node(const std::string& name);
    ObjId add_edge(const std::string& name, ObjId src, ObjId dst);
    ObjId add_path(const std::string& name, std::vector<ObjId> body);

    void add_node(ObjId id);
    void add_edge(ObjId id, ObjId src, ObjId dst);
    void add_path(ObjId id, std::vector<ObjId> body);

    void add_label(ObjId id, const std::string& label);
    void add_property_value(ObjId id, const std::string& key, const Value& v);
    void set_property(ObjId id, const std::string& key, ValueSet values);

    // Copies an object (with labels and properties) from another graph,
    // including edge endpoints / path bodies.
    void copy_object(const Graph& from, ObjId id);
    // Merges a whole graph into the one being built (componentwise union).
    void merge(const Graph& g);

    bool has(ObjId id) const;
    const std::shared_ptr<IdSpace>& ids() const { return ids_; }

    Graph finish();

private:
    std::shared_ptr<IdSpace> ids_;
    Graph g_{};
    bool wired_ = false;
    void ensure_open() const;
};

// Shared edges must agree on endpoints and shared paths on bodies.
bool consistent(const Graph& g1, const Graph& g2);

// Componentwise union; the empty PPG when the inputs are inconsistent.
Graph graph_union(const Graph& g1, const Graph& g2);
// Componentwise intersection; empty PPG when inconsistent.
Graph graph_intersect(const Graph& g1, const Graph& g2);
// N1\N2 with edges and paths restricted to surviving members. Defined for
// inconsistent inputs as well.
Graph graph_difference(const Graph& g1, const Graph& g2);

}  // namespace gcore
