#include <algorithm>
#include <map>
#include <set>

#include "eval_internal.hpp"

namespace gcore {

namespace {

uint64_t fnv1a_mix(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// One object construct of a basic construct, with the SET/REMOVE sub-clause
// items already folded in.
struct ConstructElement {
    enum class Kind { node, edge, path };
    Kind kind = Kind::node;
    std::string name;
    std::vector<std::string> labels;
    std::vector<std::pair<std::string, ExprPtr>> assignments;
    std::vector<std::string> remove_labels;
    std::vector<std::string> remove_props;
    std::string copy_of;
    bool has_group = false;
    std::vector<std::string> group;
    bool stored_path = false;
    std::string from, to;
    EdgeDirection dir = EdgeDirection::out;
};

std::vector<ConstructElement> collect_elements(const BasicConstruct& item) {
    std::vector<ConstructElement> out;
    auto find = [&](const std::string& name) -> ConstructElement* {
        for (auto& e : out)
            if (e.name == name) return &e;
        return nullptr;
    };
    auto add_node = [&](const NodePattern& n) {
        if (find(n.name()) != nullptr) {
            if (!n.labels.empty() || !n.assignments.empty() || n.has_group || !n.copy_of.empty())
                throw EvalError("construct variable '" + n.name() +
                                "' may carry decorations only once");
            return;
        }
        ConstructElement e;
        e.kind = ConstructElement::Kind::node;
        e.name = n.name();
        e.labels = n.labels;
        e.assignments = n.assignments;
        e.copy_of = n.copy_of;
        e.has_group = n.has_group;
        e.group = n.group;
        out.push_back(std::move(e));
    };
    for (const auto& chain : item.chains) {
        add_node(chain.head);
        const NodePattern* prev = &chain.head;
        for (const auto& el : chain.tail) {
            add_node(el.to);
            if (el.kind == ChainElement::Kind::edge) {
                if (find(el.edge.name()))
                    throw EvalError("duplicate construct variable '" + el.edge.name() + "'");
                ConstructElement e;
                e.kind = ConstructElement::Kind::edge;
                e.name = el.edge.name();
                e.labels = el.edge.labels;
                e.assignments = el.edge.assignments;
                e.copy_of = el.edge.copy_of;
                e.has_group = el.edge.has_group;
                e.group = el.edge.group;
                e.dir = el.edge.dir;
                e.from = prev->name();
                e.to = el.to.name();
                out.push_back(std::move(e));
            } else {
                if (find(el.path.name()))
                    throw EvalError("duplicate construct variable '" + el.path.name() + "'");
                ConstructElement e;
                e.kind = ConstructElement::Kind::path;
                e.name = el.path.name();
                e.labels = el.path.labels;
                e.assignments = el.path.assignments;
                e.stored_path = el.path.stored;
                e.from = prev->name();
                e.to = el.to.name();
                out.push_back(std::move(e));
            }
            prev = &el.to;
        }
    }
    // Fold the SET/REMOVE sub-clauses into their elements.
    for (const auto& s : item.sets) {
        ConstructElement* e = find(s.var);
        if (!e) throw EvalError("SET refers to unknown construct variable '" + s.var + "'");
        if (s.is_label)
            e->labels.push_back(s.label);
        else
            e->assignments.emplace_back(s.key, s.value);
    }
    for (const auto& r : item.removes) {
        ConstructElement* e = find(r.var);
        if (!e) throw EvalError("REMOVE refers to unknown construct variable '" + r.var + "'");
        if (r.is_label)
            e->remove_labels.push_back(r.label);
        else
            e->remove_props.push_back(r.key);
    }
    return out;
}

struct ItemContext {
    EvalState& st;
    const BasicGraphQuery& bq;
    const AmbientGraph& ambient;
    size_t item_index;
};

std::string group_key(const AmbientGraph& ambient, const Binding& row,
                      const std::vector<std::string>& gamma) {
    std::string key;
    for (const auto& v : gamma) {
        key += v;
        key += '=';
        key += row.get(v).to_canonical(ambient.ids());
        key += ';';
    }
    return key;
}

ObjId make_skolem(ItemContext& ctx, ObjKind kind, const std::string& element,
                  const std::string& key) {
    std::string full = std::to_string(ctx.st.opts.seed) + "|" +
                       std::to_string(ctx.st.query_hash) + "|" +
                       std::to_string(ctx.item_index) + "|" + element + "|" + key;
    auto memo = ctx.st.skolem_memo.find(full);
    if (memo != ctx.st.skolem_memo.end()) return memo->second;
    ObjId id = ctx.ambient.primary()->ids()->make_fresh(kind, "sk" + hex64(fnv1a_mix(full)));
    ctx.st.skolem_memo.emplace(full, id);
    return id;
}

// The effective grouping set of a node construct.
std::vector<std::string> node_gamma(const ItemContext& ctx, const ConstructElement& e) {
    if (!e.name.empty() && ctx.bq.match_vars.count(e.name)) return {e.name};
    if (e.has_group) {
        std::vector<std::string> g = e.group;
        std::sort(g.begin(), g.end());
        return g;
    }
    // Unbound and ungrouped: one object per binding.
    std::vector<std::string> g(ctx.bq.match_vars.begin(), ctx.bq.match_vars.end());
    return g;
}

// Applies the assignment list of an element to object `o`, producing the
// label set and property map of the constructed object. Set assignments
// override stored values and are applied before removals.
void apply_assignments(ItemContext& ctx, const ConstructElement& e, ObjId o,
                       const BindingSet& group, GraphBuilder& builder) {
    const AmbientGraph& amb = ctx.ambient;
    Binding rep = group.size() > 0 ? group.row(0) : Binding{};

    LabelSet labels = amb.labels(o);
    std::map<std::string, ValueSet> props;
    for (auto& [k, vs] : amb.all_properties(o)) props[k] = vs;

    if (!e.copy_of.empty()) {
        Value src = rep.get(e.copy_of);
        if (!src.is_unbound()) {
            ObjId src_id = src.as_object();
            for (const auto& l : amb.labels(src_id)) labels.insert(l);
            for (auto& [k, vs] : amb.all_properties(src_id)) {
                auto& slot = props[k];
                slot.insert(slot.end(), vs.begin(), vs.end());
                std::sort(slot.begin(), slot.end());
                slot.erase(std::unique(slot.begin(), slot.end(),
                                       [](const Value& a, const Value& b) {
                                           return a.compare(b) == 0;
                                       }),
                           slot.end());
            }
        }
    }
    for (const auto& l : e.labels) labels.insert(l);
    for (const auto& [key, expr] : e.assignments) {
        Value v = eval_in_context(ctx.st, *expr, rep, amb, &group);
        if (v.is_unbound()) {
            props.erase(key);
            continue;
        }
        ValueSet vs;
        if (v.is_set() || v.is_list())
            vs = v.elements();
        else
            vs = {v};
        for (const auto& elem : vs)
            if (elem.kind() == Value::Kind::id || elem.is_set() || elem.is_list())
                throw EvalError("property '" + key + "' must be assigned literal values");
        props[key] = std::move(vs);  // overrides stored values
    }
    for (const auto& l : e.remove_labels) labels.erase(l);
    for (const auto& k : e.remove_props) props.erase(k);

    for (const auto& l : labels) builder.add_label(o, l);
    for (auto& [k, vs] : props) builder.set_property(o, k, vs);
}

struct Fragment {
    Graph graph;
};

// Per-element construction results: group key -> (object, fragment index).
struct ElementResult {
    std::vector<std::string> gamma;
    std::map<std::string, ObjId> object;     // key -> constructed object
    std::map<std::string, size_t> fragment;  // key -> index into fragments
};

Graph eval_construct_item(ItemContext& ctx, const BasicConstruct& item, const BindingSet& omega) {
    const AmbientGraph& amb = ctx.ambient;
    auto ids = amb.primary()->ids();
    std::vector<ConstructElement> elements = collect_elements(item);

    std::vector<Fragment> fragments;
    std::map<std::string, ElementResult> results;

    // ---- node constructs ----
    for (const auto& e : elements) {
        if (e.kind != ConstructElement::Kind::node) continue;
        ElementResult res;
        res.gamma = node_gamma(ctx, e);
        bool bound = !e.name.empty() && ctx.bq.match_vars.count(e.name) > 0;
        for (const BindingSet& group : group_by(omega, res.gamma)) {
            std::string key = group_key(amb, group.row(0), res.gamma);
            ObjId v;
            if (bound) {
                Value val = group.at(0, e.name);
                if (val.is_unbound()) continue;  // nothing to construct
                v = val.as_object();
            } else {
                v = make_skolem(ctx, ObjKind::node, e.name, key);
            }
            GraphBuilder b(ids);
            b.add_node(v);
            apply_assignments(ctx, e, v, group, b);
            res.object[key] = v;
            res.fragment[key] = fragments.size();
            fragments.push_back({b.finish()});
        }
        results[e.name] = std::move(res);
    }

    // Extend the bindings with the constructed node objects.
    BindingSet omega_n;
    for (size_t i = 0; i < omega.size(); ++i) {
        Binding row = omega.row(i);
        for (const auto& e : elements) {
            if (e.kind != ConstructElement::Kind::node) continue;
            const ElementResult& res = results[e.name];
            auto it = res.object.find(group_key(amb, row, res.gamma));
            if (it != res.object.end()) row.bind(e.name, Value::object(it->second));
        }
        omega_n.add(row);
    }

    // ---- edge constructs ----
    for (const auto& e : elements) {
        if (e.kind != ConstructElement::Kind::edge) continue;
        ElementResult res;
        std::set<std::string> gamma;
        bool bound = ctx.bq.match_vars.count(e.name) > 0;
        if (bound) gamma.insert(e.name);
        if (e.has_group) gamma.insert(e.group.begin(), e.group.end());
        for (const auto& end : {e.from, e.to}) {
            const ElementResult& er = results.at(end);
            gamma.insert(er.gamma.begin(), er.gamma.end());
        }
        res.gamma.assign(gamma.begin(), gamma.end());

        for (const BindingSet& group : group_by(omega_n, res.gamma)) {
            std::string key = group_key(amb, group.row(0), res.gamma);
            Value from_v = group.at(0, e.from);
            Value to_v = group.at(0, e.to);
            if (from_v.is_unbound() || to_v.is_unbound()) continue;  // prevents dangling edges
            ObjId src = from_v.as_object();
            ObjId dst = to_v.as_object();
            if (e.dir == EdgeDirection::in) std::swap(src, dst);
            ObjId v;
            if (bound) {
                Value val = group.at(0, e.name);
                if (val.is_unbound()) continue;
                v = val.as_object();
                auto ep = amb.find_endpoints(v);
                if (!ep || !(ep->src == src && ep->dst == dst))
                    throw EvalError("constructing bound edge '" + e.name +
                                    "' with different endpoints violates its identity");
            } else {
                v = make_skolem(ctx, ObjKind::edge, e.name, key);
            }
            GraphBuilder b(ids);
            b.add_node(src);
            b.add_node(dst);
            b.add_edge(v, src, dst);
            apply_assignments(ctx, e, v, group, b);
            res.object[key] = v;
            res.fragment[key] = fragments.size();
            fragments.push_back({b.finish()});
        }
        results[e.name] = std::move(res);
    }

    // Extend with constructed edges.
    BindingSet omega_e;
    for (size_t i = 0; i < omega_n.size(); ++i) {
        Binding row = omega_n.row(i);
        for (const auto& e : elements) {
            if (e.kind != ConstructElement::Kind::edge) continue;
            const ElementResult& res = results[e.name];
            auto it = res.object.find(group_key(amb, row, res.gamma));
            if (it != res.object.end()) row.bind(e.name, Value::object(it->second));
        }
        omega_e.add(row);
    }

    // ---- path constructs ----
    for (const auto& e : elements) {
        if (e.kind != ConstructElement::Kind::path) continue;
        ElementResult res;
        res.gamma = {e.from, e.name, e.to};
        std::sort(res.gamma.begin(), res.gamma.end());
        for (const BindingSet& group : group_by(omega_e, res.gamma)) {
            std::string key = group_key(amb, group.row(0), res.gamma);
            Value pv = group.at(0, e.name);
            if (pv.is_unbound()) continue;
            ObjId pid = pv.as_object();

            GraphBuilder b(ids);
            const OverlayPath* ov = amb.find_overlay(pid);
            if (ov && ov->all_paths) {
                // Graph projection of all conforming walks; no path object.
                PathAutomaton aut = compile_regex(*ov->regex, ctx.st.view_names());
                StateViewResolver resolver(ctx.st, ov->graph);
                Graph proj = all_paths_projection(*ov->graph, ov->src, ov->dst, aut, &resolver);
                b.merge(proj);
            } else {
                const std::vector<ObjId>* body = amb.find_path_body(pid);
                if (!body) throw EvalError("unknown path in construct");
                for (size_t i = 0; i < body->size(); ++i) {
                    ObjId el = (*body)[i];
                    if (i % 2 == 0) {
                        b.add_node(el);
                    } else {
                        auto ep = amb.find_endpoints(el);
                        if (!ep) throw EvalError("path body references an unknown edge");
                        b.add_edge(el, ep->src, ep->dst);
                    }
                    for (const auto& l : amb.labels(el)) b.add_label(el, l);
                    for (auto& [k, vs] : amb.all_properties(el)) b.set_property(el, k, vs);
                }
                if (e.stored_path) {
                    b.add_path(pid, *body);
                    apply_assignments(ctx, e, pid, group, b);
                }
            }
            res.object[key] = pid;
            res.fragment[key] = fragments.size();
            fragments.push_back({b.finish()});
        }
        results[e.name] = std::move(res);
    }

    // ---- assemble, honoring WHEN per group ----
    std::set<size_t> keep;
    if (!item.when) {
        for (size_t i = 0; i < fragments.size(); ++i) keep.insert(i);
    } else {
        // Candidate graph so the condition can inspect constructed objects.
        GraphBuilder cand(ids);
        for (const auto& f : fragments) cand.merge(f.graph);
        AmbientGraph when_ambient = amb;
        auto cand_graph = std::make_shared<const Graph>(cand.finish());
        when_ambient.add(cand_graph);
        for (size_t i = 0; i < omega_e.size(); ++i) {
            Binding row = omega_e.row(i);
            Value v = eval_in_context(ctx.st, *item.when, row, when_ambient, &omega_e);
            if (!v.is_true()) continue;
            for (const auto& e : elements) {
                const ElementResult& res = results[e.name];
                auto it = res.fragment.find(group_key(amb, row, res.gamma));
                if (it != res.fragment.end()) keep.insert(it->second);
            }
        }
    }

    GraphBuilder out(ids);
    for (size_t i : keep) out.merge(fragments[i].graph);
    return out.finish();
}

}  // namespace

Graph eval_construct_clause(EvalState& st, const BasicGraphQuery& bq, const BindingSet& omega,
                            const AmbientGraph& ambient) {
    Graph acc;
    bool first = true;
    size_t index = 0;
    for (const auto& item : bq.construct.items) {
        Graph g;
        if (item.is_gid) {
            g = *resolve_graph(st, item.gid);
        } else {
            ItemContext ctx{st, bq, ambient, index};
            g = eval_construct_item(ctx, item, omega);
        }
        if (first) {
            acc = std::move(g);
            first = false;
        } else {
            acc = graph_union(acc, g);
        }
        ++index;
    }
    return acc;
}

}  // namespace gcore
