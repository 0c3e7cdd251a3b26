#include "gcore/path_search.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace gcore {

const std::vector<ObjId> PathViewRelation::kNone{};

namespace {

int compare_bodies(const std::vector<ObjId>& a, const std::vector<ObjId>& b) {
    for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

double checked_edge_cost(const SearchOptions& opt, ObjId edge) {
    if (!opt.edge_cost) return 1.0;
    double c = opt.edge_cost(edge);
    if (!std::isfinite(c) || c <= 0) throw EvalError("path segment cost must be a number > 0");
    return c;
}

}  // namespace

void PathViewRelation::offer(ObjId src, ObjId dst, double cost, std::vector<ObjId> body) {
    auto key = std::make_pair(src, dst);
    auto it = best_.find(key);
    if (it == best_.end()) {
        best_.emplace(key, ViewSegment{cost, std::move(body)});
        by_src_[src].push_back(dst);
        return;
    }
    if (cost < it->second.cost ||
        (cost == it->second.cost && compare_bodies(body, it->second.body) < 0)) {
        it->second = ViewSegment{cost, std::move(body)};
    }
}

const ViewSegment* PathViewRelation::find(ObjId src, ObjId dst) const {
    auto it = best_.find({src, dst});
    return it == best_.end() ? nullptr : &it->second;
}

const std::vector<ObjId>& PathViewRelation::destinations(ObjId src) const {
    auto it = by_src_.find(src);
    return it == by_src_.end() ? kNone : it->second;
}

bool conforms(const Graph& g, const std::vector<ObjId>& body, const PathAutomaton& aut,
              const ViewResolver* views) {
    if (body.empty() || body.size() % 2 == 0) return false;
    size_t n_nodes = (body.size() + 1) / 2;
    // reached[i]: automaton states past node position i.
    std::vector<std::vector<int>> reached(n_nodes);
    reached[0] = aut.initial_states(g.labels(body[0]));

    auto advance_views = [&](size_t i) {
        if (!aut.has_views || !views) return;
        for (int s : reached[i]) {
            for (const auto& t : aut.transitions[s]) {
                if (t.sym != NfaTransition::Sym::view) continue;
                const PathViewRelation& rel = views->view(t.label);
                for (size_t j = i + 1; j < n_nodes; ++j) {
                    const ViewSegment* seg = rel.find(body[2 * i], body[2 * j]);
                    if (!seg) continue;
                    if (seg->body.size() != 2 * (j - i) + 1) continue;
                    if (!std::equal(seg->body.begin(), seg->body.end(), body.begin() + 2 * i))
                        continue;
                    auto landed = aut.node_close({t.target}, g.labels(body[2 * j]));
                    auto& dst = reached[j];
                    dst.insert(dst.end(), landed.begin(), landed.end());
                    std::sort(dst.begin(), dst.end());
                    dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
                }
            }
        }
    };

    for (size_t i = 0; i + 1 < n_nodes; ++i) {
        advance_views(i);
        if (reached[i].empty()) continue;
        ObjId edge = body[2 * i + 1];
        EdgeEndpoints ep = g.endpoints(edge);
        bool fwd = ep.src == body[2 * i] && ep.dst == body[2 * i + 2];
        bool bwd = ep.dst == body[2 * i] && ep.src == body[2 * i + 2];
        const LabelSet& elabels = g.labels(edge);
        std::vector<int> next;
        for (int s : reached[i]) {
            for (const auto& t : aut.transitions[s]) {
                bool ok = false;
                switch (t.sym) {
                    case NfaTransition::Sym::wild: ok = true; break;
                    case NfaTransition::Sym::edge_fwd: ok = fwd && elabels.count(t.label); break;
                    case NfaTransition::Sym::edge_bwd: ok = bwd && elabels.count(t.label); break;
                    default: break;
                }
                if (ok) next.push_back(t.target);
            }
        }
        auto landed = aut.node_close(next, g.labels(body[2 * i + 2]));
        auto& dst = reached[i + 1];
        dst.insert(dst.end(), landed.begin(), landed.end());
        std::sort(dst.begin(), dst.end());
        dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
    }
    advance_views(n_nodes - 1);
    return aut.any_accepting(reached[n_nodes - 1]);
}

bool conforms(const Graph& g, const std::vector<ObjId>& body, const LabelRegex& r) {
    return conforms(g, body, compile_regex(r), nullptr);
}

namespace {

// Product-walk enumeration: entries pop in non-decreasing (cost, body) order
// because every extension strictly increases the cost. Each (node, state-set)
// product vertex is expanded at most k times, which bounds the enumeration
// and still yields the k cheapest walks per destination.
struct Entry {
    double cost;
    std::vector<ObjId> body;
    ObjId at;
    std::vector<int> states;
};

struct EntryOrder {
    bool operator()(const Entry& a, const Entry& b) const {
        if (a.cost != b.cost) return a.cost > b.cost;
        return compare_bodies(a.body, b.body) > 0;
    }
};

class WalkEnumerator {
public:
    WalkEnumerator(const Graph& g, ObjId src, const PathAutomaton& aut, size_t k,
                   const SearchOptions& opt)
        : g_(g), aut_(aut), k_(k), opt_(opt) {
        max_hops_ = opt.max_hops ? opt.max_hops
                                 : std::max<size_t>(1, g.nodes().size()) * aut.state_count();
        if (g_.has(src)) {
            Entry e{0.0, {src}, src, aut_.initial_states(g_.labels(src))};
            if (!e.states.empty()) queue_.push(std::move(e));
        }
    }

    // Runs the enumeration, invoking sink(entry) for every conforming walk in
    // (cost, body) order; sink returns false to stop early.
    void run(const std::function<bool(const Entry&)>& sink) {
        while (!queue_.empty()) {
            Entry cur = queue_.top();
            queue_.pop();
            auto key = std::make_pair(cur.at, cur.states);
            size_t& pops = pop_count_[key];
            if (pops >= k_) continue;
            ++pops;
            if (aut_.any_accepting(cur.states)) {
                if (!sink(cur)) return;
            }
            expand(cur);
        }
    }

private:
    void expand(const Entry& cur) {
        size_t hops = cur.body.size() / 2;
        if (hops >= max_hops_) return;
        for (const Adjacency& adj : g_.adjacent(cur.at)) {
            const LabelSet& elabels = g_.labels(adj.edge);
            std::vector<int> next;
            for (int s : cur.states) {
                for (const auto& t : aut_.transitions[s]) {
                    bool ok = false;
                    switch (t.sym) {
                        case NfaTransition::Sym::wild: ok = true; break;
                        case NfaTransition::Sym::edge_fwd:
                            ok = adj.forward && elabels.count(t.label);
                            break;
                        case NfaTransition::Sym::edge_bwd:
                            ok = !adj.forward && elabels.count(t.label);
                            break;
                        default: break;
                    }
                    if (ok) next.push_back(t.target);
                }
            }
            if (next.empty()) continue;
            auto landed = aut_.node_close(next, g_.labels(adj.other));
            if (landed.empty()) continue;
            Entry child;
            child.cost = cur.cost + checked_edge_cost(opt_, adj.edge);
            child.body = cur.body;
            child.body.push_back(adj.edge);
            child.body.push_back(adj.other);
            child.at = adj.other;
            child.states = std::move(landed);
            queue_.push(std::move(child));
        }
        if (aut_.has_views && opt_.views) expand_views(cur);
    }

    void expand_views(const Entry& cur) {
        for (int s : cur.states) {
            for (const auto& t : aut_.transitions[s]) {
                if (t.sym != NfaTransition::Sym::view) continue;
                const PathViewRelation& rel = opt_.views->view(t.label);
                for (ObjId dst : rel.destinations(cur.at)) {
                    const ViewSegment* seg = rel.find(cur.at, dst);
                    if (!seg) continue;
                    if (cur.body.size() / 2 + seg->body.size() / 2 > max_hops_) continue;
                    if (!std::isfinite(seg->cost) || seg->cost <= 0)
                        throw EvalError("path segment cost must be a number > 0");
                    auto landed = aut_.node_close({t.target}, g_.labels(dst));
                    if (landed.empty()) continue;
                    Entry child;
                    child.cost = cur.cost + seg->cost;
                    child.body = cur.body;
                    child.body.insert(child.body.end(), seg->body.begin() + 1, seg->body.end());
                    child.at = dst;
                    child.states = std::move(landed);
                    queue_.push(std::move(child));
                }
            }
        }
    }

    const Graph& g_;
    const PathAutomaton& aut_;
    size_t k_;
    const SearchOptions& opt_;
    size_t max_hops_;
    std::priority_queue<Entry, std::vector<Entry>, EntryOrder> queue_;
    std::map<std::pair<ObjId, std::vector<int>>, size_t> pop_count_;
};

}  // namespace

std::optional<WalkResult> shortest_path(const Graph& g, ObjId src, ObjId dst,
                                        const PathAutomaton& aut, const SearchOptions& opt) {
    std::optional<WalkResult> out;
    WalkEnumerator en(g, src, aut, 1, opt);
    en.run([&](const Entry& e) {
        if (e.at != dst) return true;
        out = WalkResult{e.body, e.cost};
        return false;
    });
    return out;
}

std::vector<WalkResult> k_shortest_paths(const Graph& g, ObjId src, ObjId dst,
                                         const PathAutomaton& aut, size_t k,
                                         const SearchOptions& opt) {
    std::vector<WalkResult> out;
    if (k == 0) return out;
    // Distinctness is by body: the same walk can pop once per automaton run
    // (e.g. a self loop traversed in either orientation).
    std::set<std::vector<ObjId>> seen;
    WalkEnumerator en(g, src, aut, k, opt);
    en.run([&](const Entry& e) {
        if (e.at != dst) return true;
        if (seen.insert(e.body).second) out.push_back(WalkResult{e.body, e.cost});
        return out.size() < k;
    });
    return out;
}

std::map<ObjId, WalkResult> shortest_paths_from(const Graph& g, ObjId src,
                                                const PathAutomaton& aut,
                                                const SearchOptions& opt,
                                                const std::set<ObjId>* dst_filter) {
    std::map<ObjId, WalkResult> out;
    WalkEnumerator en(g, src, aut, 1, opt);
    en.run([&](const Entry& e) {
        if (dst_filter && !dst_filter->count(e.at)) return true;
        out.emplace(e.at, WalkResult{e.body, e.cost});  // first arrival wins
        return !(dst_filter && out.size() == dst_filter->size());
    });
    return out;
}

std::map<ObjId, std::vector<WalkResult>> k_shortest_paths_from(const Graph& g, ObjId src,
                                                               const PathAutomaton& aut, size_t k,
                                                               const SearchOptions& opt,
                                                               const std::set<ObjId>* dst_filter) {
    std::map<ObjId, std::vector<WalkResult>> out;
    if (k == 0) return out;
    std::map<ObjId, std::set<std::vector<ObjId>>> seen;
    WalkEnumerator en(g, src, aut, k, opt);
    en.run([&](const Entry& e) {
        if (dst_filter && !dst_filter->count(e.at)) return true;
        auto& walks = out[e.at];
        if (walks.size() < k && seen[e.at].insert(e.body).second)
            walks.push_back(WalkResult{e.body, e.cost});
        return true;
    });
    return out;
}

Graph all_paths_projection(const Graph& g, ObjId src, ObjId dst, const PathAutomaton& aut,
                           const ViewResolver* views) {
    GraphBuilder out(g.ids());
    if (!g.has(src) || !g.has(dst)) return out.finish();

    using PState = std::pair<ObjId, int>;
    struct Transition {
        PState from;
        PState to;
        std::vector<ObjId> elements;  // edge, or spliced view body interior
    };

    // Forward product reachability over (node, nfa state) pairs; node-closure
    // keeps all pre/post-consumption states so one state granularity suffices.
    std::set<PState> forward;
    std::vector<Transition> transitions;
    std::vector<PState> stack;
    auto push = [&](PState st) {
        if (forward.insert(st).second) stack.push_back(st);
    };
    for (int s : aut.initial_states(g.labels(src))) push({src, s});
    while (!stack.empty()) {
        auto [at, state] = stack.back();
        stack.pop_back();
        for (const Adjacency& adj : g.adjacent(at)) {
            const LabelSet& elabels = g.labels(adj.edge);
            for (const auto& t : aut.transitions[state]) {
                bool ok = false;
                switch (t.sym) {
                    case NfaTransition::Sym::eps: ok = false; break;
                    case NfaTransition::Sym::wild: ok = true; break;
                    case NfaTransition::Sym::edge_fwd:
                        ok = adj.forward && elabels.count(t.label);
                        break;
                    case NfaTransition::Sym::edge_bwd:
                        ok = !adj.forward && elabels.count(t.label);
                        break;
                    default: break;
                }
                if (!ok) continue;
                for (int landed : aut.node_close({t.target}, g.labels(adj.other))) {
                    transitions.push_back({{at, state}, {adj.other, landed}, {adj.edge}});
                    push({adj.other, landed});
                }
            }
        }
        // Epsilon moves within the same node.
        for (const auto& t : aut.transitions[state])
            if (t.sym == NfaTransition::Sym::eps) {
                transitions.push_back({{at, state}, {at, t.target}, {}});
                push({at, t.target});
            }
        if (aut.has_views && views) {
            for (const auto& t : aut.transitions[state]) {
                if (t.sym != NfaTransition::Sym::view) continue;
                const PathViewRelation& rel = views->view(t.label);
                for (ObjId vdst : rel.destinations(at)) {
                    const ViewSegment* seg = rel.find(at, vdst);
                    if (!seg) continue;
                    for (int landed : aut.node_close({t.target}, g.labels(vdst))) {
                        std::vector<ObjId> interior(seg->body.begin() + 1, seg->body.end() - 1);
                        transitions.push_back({{at, state}, {vdst, landed}, std::move(interior)});
                        push({vdst, landed});
                    }
                }
            }
        }
    }

    // Backward reachability from accepting states at dst.
    std::map<PState, std::vector<size_t>> incoming;
    for (size_t i = 0; i < transitions.size(); ++i) incoming[transitions[i].to].push_back(i);
    std::set<PState> backward;
    std::vector<PState> bstack;
    for (const PState& st : forward) {
        if (st.first == dst && aut.accepting[st.second]) {
            backward.insert(st);
            bstack.push_back(st);
        }
    }
    while (!bstack.empty()) {
        PState st = bstack.back();
        bstack.pop_back();
        auto it = incoming.find(st);
        if (it == incoming.end()) continue;
        for (size_t i : it->second) {
            if (backward.insert(transitions[i].from).second) bstack.push_back(transitions[i].from);
        }
    }

    std::set<ObjId> keep_nodes;
    std::set<ObjId> keep_edges;
    for (const PState& st : forward)
        if (backward.count(st)) keep_nodes.insert(st.first);
    for (const Transition& tr : transitions) {
        if (!forward.count(tr.from) || !backward.count(tr.to)) continue;
        for (ObjId el : tr.elements) {
            if (el.kind == ObjKind::edge) keep_edges.insert(el);
            if (el.kind == ObjKind::node) keep_nodes.insert(el);
        }
    }
    for (ObjId e : keep_edges) {
        auto ep = g.endpoints(e);
        keep_nodes.insert(ep.src);
        keep_nodes.insert(ep.dst);
    }
    for (ObjId n : keep_nodes) out.copy_object(g, n);
    for (ObjId e : keep_edges) out.copy_object(g, e);
    return out.finish();
}

}  // namespace gcore
