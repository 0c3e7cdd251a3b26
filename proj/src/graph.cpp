#include "gcore/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace gcore {

namespace {
const LabelSet kNoLabels{};
const ValueSet kNoValues{};
const std::vector<Adjacency> kNoAdjacency{};

ValueSet merge_value_sets(const ValueSet& a, const ValueSet& b) {
    ValueSet out = a;
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Value& x, const Value& y) { return x.compare(y) == 0; }),
              out.end());
    return out;
}

ValueSet intersect_value_sets(const ValueSet& a, const ValueSet& b) {
    ValueSet out;
    for (const auto& v : a)
        if (std::any_of(b.begin(), b.end(), [&](const Value& w) { return v.compare(w) == 0; }))
            out.push_back(v);
    return out;
}
}  // namespace

bool Graph::has(ObjId id) const {
    switch (id.kind) {
        case ObjKind::node: return nodes_.count(id) > 0;
        case ObjKind::edge: return edges_.count(id) > 0;
        case ObjKind::path: return paths_.count(id) > 0;
    }
    return false;
}

EdgeEndpoints Graph::endpoints(ObjId edge) const {
    auto it = endpoints_.find(edge);
    if (it == endpoints_.end()) throw EvalError("unknown edge " + ids_->name(edge));
    return it->second;
}

const std::vector<ObjId>& Graph::path_body(ObjId path) const {
    auto it = bodies_.find(path);
    if (it == bodies_.end()) throw EvalError("unknown path " + ids_->name(path));
    return it->second;
}

std::vector<ObjId> Graph::path_nodes(ObjId path) const {
    const auto& body = path_body(path);
    std::vector<ObjId> out;
    for (size_t i = 0; i < body.size(); i += 2) out.push_back(body[i]);
    return out;
}

std::vector<ObjId> Graph::path_edges(ObjId path) const {
    const auto& body = path_body(path);
    std::vector<ObjId> out;
    for (size_t i = 1; i < body.size(); i += 2) out.push_back(body[i]);
    return out;
}

const LabelSet& Graph::labels(ObjId id) const {
    auto it = labels_.find(id);
    return it == labels_.end() ? kNoLabels : it->second;
}

const ValueSet& Graph::properties(ObjId id, const std::string& key) const {
    auto it = props_.find({id, key});
    return it == props_.end() ? kNoValues : it->second;
}

std::vector<std::pair<std::string, ValueSet>> Graph::all_properties(ObjId id) const {
    std::vector<std::pair<std::string, ValueSet>> out;
    for (auto it = props_.lower_bound({id, ""}); it != props_.end() && it->first.first == id; ++it)
        out.emplace_back(it->first.second, it->second);
    return out;
}

const std::vector<Adjacency>& Graph::adjacent(ObjId node) const {
    auto it = adjacency_.find(node);
    return it == adjacency_.end() ? kNoAdjacency : it->second;
}

void Graph::build_adjacency() {
    adjacency_.clear();
    for (const auto& [e, ep] : endpoints_) {
        adjacency_[ep.src].push_back({e, ep.dst, true});
        adjacency_[ep.dst].push_back({e, ep.src, false});
    }
    // Deterministic traversal order: by edge id, forward first.
    for (auto& [n, list] : adjacency_) {
        std::sort(list.begin(), list.end(), [](const Adjacency& a, const Adjacency& b) {
            if (a.edge != b.edge) return a.edge < b.edge;
            return a.forward && !b.forward;
        });
    }
}

std::vector<Violation> Graph::validate() const {
    std::vector<Violation> out;
    auto name = [&](ObjId id) { return ids_->name(id); };
    for (ObjId e : edges_) {
        auto it = endpoints_.find(e);
        if (it == endpoints_.end()) {
            out.push_back({"edge " + name(e) + " has no endpoints"});
            continue;
        }
        if (!nodes_.count(it->second.src) || !nodes_.count(it->second.dst))
            out.push_back({"dangling endpoint " + name(e)});
    }
    for (ObjId p : paths_) {
        auto it = bodies_.find(p);
        if (it == bodies_.end()) {
            out.push_back({"path " + name(p) + " has no body"});
            continue;
        }
        const auto& body = it->second;
        if (body.empty() || body.size() % 2 == 0) {
            out.push_back({"malformed path body " + name(p)});
            continue;
        }
        bool ok = true;
        for (size_t i = 0; i < body.size(); ++i) {
            bool node_pos = i % 2 == 0;
            if (node_pos && (body[i].kind != ObjKind::node || !nodes_.count(body[i]))) ok = false;
            if (!node_pos && (body[i].kind != ObjKind::edge || !edges_.count(body[i]))) ok = false;
        }
        if (!ok) {
            out.push_back({"path " + name(p) + " references unknown elements"});
            continue;
        }
        for (size_t i = 1; i + 1 < body.size(); i += 2) {
            EdgeEndpoints ep = endpoints_.at(body[i]);
            bool fwd = ep.src == body[i - 1] && ep.dst == body[i + 1];
            bool bwd = ep.dst == body[i - 1] && ep.src == body[i + 1];
            if (!fwd && !bwd)
                out.push_back({"path " + name(p) + " step " + std::to_string((i - 1) / 2) +
                               " does not connect its nodes"});
        }
    }
    return out;
}

void GraphBuilder::ensure_open() const {
    if (wired_) throw std::logic_error("GraphBuilder already finished");
}

ObjId GraphBuilder::add_node(const std::string& name) {
    ObjId id = ids_->intern(ObjKind::node, name);
    add_node(id);
    return id;
}

ObjId GraphBuilder::add_edge(const std::string& name, ObjId src, ObjId dst) {
    ObjId id = ids_->intern(ObjKind::edge, name);
    add_edge(id, src, dst);
    return id;
}

ObjId GraphBuilder::add_path(const std::string& name, std::vector<ObjId> body) {
    ObjId id = ids_->intern(ObjKind::path, name);
    add_path(id, std::move(body));
    return id;
}

void GraphBuilder::add_node(ObjId id) {
    ensure_open();
    g_.nodes_.insert(id);
}

void GraphBuilder::add_edge(ObjId id, ObjId src, ObjId dst) {
    ensure_open();
    g_.edges_.insert(id);
    g_.endpoints_[id] = {src, dst};
}

void GraphBuilder::add_path(ObjId id, std::vector<ObjId> body) {
    ensure_open();
    g_.paths_.insert(id);
    g_.bodies_[id] = std::move(body);
}

void GraphBuilder::add_label(ObjId id, const std::string& label) {
    ensure_open();
    g_.labels_[id].insert(label);
}

void GraphBuilder::add_property_value(ObjId id, const std::string& key, const Value& v) {
    ensure_open();
    auto& vs = g_.props_[{id, key}];
    vs = merge_value_sets(vs, {v});
}

void GraphBuilder::set_property(ObjId id, const std::string& key, ValueSet values) {
    ensure_open();
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end(),
                             [](const Value& x, const Value& y) { return x.compare(y) == 0; }),
                 values.end());
    if (values.empty())
        g_.props_.erase({id, key});
    else
        g_.props_[{id, key}] = std::move(values);
}

void GraphBuilder::copy_object(const Graph& from, ObjId id) {
    ensure_open();
    switch (id.kind) {
        case ObjKind::node: add_node(id); break;
        case ObjKind::edge: {
            auto ep = from.endpoints(id);
            add_edge(id, ep.src, ep.dst);
            break;
        }
        case ObjKind::path: add_path(id, from.path_body(id)); break;
    }
    for (const auto& l : from.labels(id)) add_label(id, l);
    for (const auto& [k, vs] : from.all_properties(id)) {
        auto& mine = g_.props_[{id, k}];
        mine = merge_value_sets(mine, vs);
    }
}

void GraphBuilder::merge(const Graph& g) {
    ensure_open();
    for (ObjId n : g.nodes()) copy_object(g, n);
    for (ObjId e : g.edges()) copy_object(g, e);
    for (ObjId p : g.paths()) copy_object(g, p);
}

bool GraphBuilder::has(ObjId id) const { return g_.has(id); }

Graph GraphBuilder::finish() {
    ensure_open();
    wired_ = true;
    g_.ids_ = ids_;
    g_.build_adjacency();
    return std::move(g_);
}

bool consistent(const Graph& g1, const Graph& g2) {
    for (ObjId e : g1.edges_) {
        if (!g2.edges_.count(e)) continue;
        if (!(g1.endpoints_.at(e) == g2.endpoints_.at(e))) return false;
    }
    for (ObjId p : g1.paths_) {
        if (!g2.paths_.count(p)) continue;
        if (g1.bodies_.at(p) != g2.bodies_.at(p)) return false;
    }
    return true;
}

Graph graph_union(const Graph& g1, const Graph& g2) {
    if (!consistent(g1, g2)) return Graph{};
    GraphBuilder b(g1.ids_);
    b.merge(g1);
    b.merge(g2);
    return b.finish();
}

Graph graph_intersect(const Graph& g1, const Graph& g2) {
    if (!consistent(g1, g2)) return Graph{};
    GraphBuilder b(g1.ids_);
    auto shared_meta = [&](ObjId id) {
        LabelSet ls;
        for (const auto& l : g1.labels(id))
            if (g2.labels(id).count(l)) b.add_label(id, l);
        for (const auto& [k, vs] : g1.all_properties(id)) {
            ValueSet common = intersect_value_sets(vs, g2.properties(id, k));
            if (!common.empty()) b.set_property(id, k, std::move(common));
        }
    };
    for (ObjId n : g1.nodes_)
        if (g2.nodes_.count(n)) {
            b.add_node(n);
            shared_meta(n);
        }
    for (ObjId e : g1.edges_)
        if (g2.edges_.count(e)) {
            auto ep = g1.endpoints_.at(e);
            b.add_edge(e, ep.src, ep.dst);
            shared_meta(e);
        }
    for (ObjId p : g1.paths_)
        if (g2.paths_.count(p)) {
            b.add_path(p, g1.bodies_.at(p));
            shared_meta(p);
        }
    return b.finish();
}

Graph graph_difference(const Graph& g1, const Graph& g2) {
    GraphBuilder b(g1.ids_);
    std::set<ObjId> nodes, edges;
    for (ObjId n : g1.nodes_)
        if (!g2.nodes_.count(n)) nodes.insert(n);
    for (ObjId e : g1.edges_) {
        if (g2.edges_.count(e)) continue;
        auto ep = g1.endpoints_.at(e);
        if (nodes.count(ep.src) && nodes.count(ep.dst)) edges.insert(e);
    }
    auto copy_meta = [&](ObjId id) {
        for (const auto& l : g1.labels(id)) b.add_label(id, l);
        for (const auto& [k, vs] : g1.all_properties(id)) b.set_property(id, k, vs);
    };
    for (ObjId n : nodes) {
        b.add_node(n);
        copy_meta(n);
    }
    for (ObjId e : edges) {
        auto ep = g1.endpoints_.at(e);
        b.add_edge(e, ep.src, ep.dst);
        copy_meta(e);
    }
    for (ObjId p : g1.paths_) {
        if (g2.paths_.count(p)) continue;
        const auto& body = g1.bodies_.at(p);
        bool keep = true;
        for (size_t i = 0; i < body.size(); ++i) {
            bool node_pos = i % 2 == 0;
            if (node_pos && !nodes.count(body[i])) keep = false;
            if (!node_pos && !edges.count(body[i])) keep = false;
        }
        if (keep) {
            b.add_path(p, body);
            copy_meta(p);
        }
    }
    return b.finish();
}

}  // namespace gcore
