#include "gcore/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "eval_internal.hpp"
#include "gcore/parser.hpp"

namespace gcore {

namespace {

uint64_t fnv1a(const std::string& s, uint64_t seed = 1469598103934665603ull) {
    uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Value cost_value(double c) {
    if (c == std::floor(c) && std::abs(c) < 1e15) return Value::integer(static_cast<int64_t>(c));
    return Value::real(c);
}

std::shared_ptr<const Graph> current_default(EvalState& st) {
    if (st.default_graph) return st.default_graph;
    if (!st.default_name.empty()) {
        st.default_graph = resolve_graph(st, st.default_name);
        return st.default_graph;
    }
    throw EvalError("no default graph is set; name one with ON");
}

struct ScopeSaver {
    EvalState& st;
    std::map<std::string, std::shared_ptr<const Graph>> local_graphs;
    std::map<std::string, PathClauseAst> path_views;
    std::shared_ptr<const Graph> default_graph;
    std::string default_name;
    uint64_t query_hash;

    explicit ScopeSaver(EvalState& s)
        : st(s),
          local_graphs(s.local_graphs),
          path_views(s.path_views),
          default_graph(s.default_graph),
          default_name(s.default_name),
          query_hash(s.query_hash) {}
    ~ScopeSaver() {
        st.local_graphs = std::move(local_graphs);
        st.path_views = std::move(path_views);
        st.default_graph = std::move(default_graph);
        st.default_name = std::move(default_name);
        st.query_hash = query_hash;
    }
};

// ---------------------------------------------------------------------------
// Atom evaluation
// ---------------------------------------------------------------------------

bool labels_match(const LabelSet& have, const std::vector<std::string>& wanted) {
    if (wanted.empty()) return true;
    for (const auto& l : wanted)
        if (have.count(l)) return true;  // label disjunction
    return false;
}

bool prop_tests_match(const Graph& g, ObjId id, const std::vector<PropTest>& tests) {
    for (const auto& t : tests) {
        Value have = Value::set(g.properties(id, t.key));
        if (!compare_multi_valued(SetCompareOp::equal, have, t.literal)) return false;
    }
    return true;
}

// Expands the {key=var} binders: one row per combination of property values;
// objects lacking a bound property produce no rows.
void expand_binds(const Graph& g, ObjId id, const std::vector<PropBind>& binds, size_t at,
                  Binding row, std::vector<Binding>& out) {
    if (at == binds.size()) {
        out.push_back(std::move(row));
        return;
    }
    const ValueSet& values = g.properties(id, binds[at].key);
    for (const Value& v : values) {
        Binding next = row;
        next.bind(binds[at].var, v);
        expand_binds(g, id, binds, at + 1, std::move(next), out);
    }
}

BindingSet eval_node_atom(const Graph& g, const NodePattern& n) {
    BindingSet out;
    for (ObjId node : g.nodes()) {
        if (!labels_match(g.labels(node), n.labels)) continue;
        if (!prop_tests_match(g, node, n.prop_tests)) continue;
        Binding base;
        base.bind(n.name(), Value::object(node));
        std::vector<Binding> rows;
        expand_binds(g, node, n.prop_binds, 0, std::move(base), rows);
        for (auto& r : rows) out.add(r);
    }
    return out;
}

BindingSet eval_edge_atom(const Graph& g, const EdgePattern& e, const std::string& from_var,
                          const std::string& to_var) {
    BindingSet out;
    for (ObjId edge : g.edges()) {
        if (!labels_match(g.labels(edge), e.labels)) continue;
        if (!prop_tests_match(g, edge, e.prop_tests)) continue;
        EdgeEndpoints ep = g.endpoints(edge);
        auto emit = [&](ObjId from, ObjId to) {
            Binding base;
            base.bind(from_var, Value::object(from));
            base.bind(to_var, Value::object(to));
            base.bind(e.name(), Value::object(edge));
            std::vector<Binding> rows;
            expand_binds(g, edge, e.prop_binds, 0, std::move(base), rows);
            for (auto& r : rows) out.add(r);
        };
        switch (e.dir) {
            case EdgeDirection::out: emit(ep.src, ep.dst); break;
            case EdgeDirection::in: emit(ep.dst, ep.src); break;
            case EdgeDirection::undirected:
                emit(ep.src, ep.dst);
                emit(ep.dst, ep.src);
                break;
        }
    }
    return out;
}

// Candidate endpoints for a path search: values already pinned by the
// accumulated table, else nodes passing the endpoint pattern's label test.
std::optional<std::set<ObjId>> endpoint_candidates(const BindingSet& t, const std::string& var,
                                                   const NodePattern& pat, const Graph& g) {
    if (std::binary_search(t.vars().begin(), t.vars().end(), var)) {
        std::set<ObjId> out;
        bool all_bound = true;
        for (size_t i = 0; i < t.size(); ++i) {
            Value v = t.at(i, var);
            if (v.is_unbound()) {
                all_bound = false;
                break;
            }
            out.insert(v.as_object());
        }
        if (all_bound) return out;
    }
    if (!pat.labels.empty() || !pat.prop_tests.empty()) {
        std::set<ObjId> out;
        for (ObjId n : g.nodes())
            if (labels_match(g.labels(n), pat.labels) && prop_tests_match(g, n, pat.prop_tests))
                out.insert(n);
        return out;
    }
    return std::nullopt;  // unconstrained
}

ObjId fresh_virtual_path(EvalState& st, const std::shared_ptr<IdSpace>& ids) {
    return ids->make_fresh(ObjKind::path, "_vp" + std::to_string(++st.vpath_counter));
}

BindingSet eval_path_atom(EvalState& st, const BindingSet& t, std::shared_ptr<const Graph> gp,
                          const PathPattern& p, const NodePattern& from_pat,
                          const NodePattern& to_pat) {
    const Graph& g = *gp;
    BindingSet rows;
    const std::string& from_var = from_pat.name();
    const std::string& to_var = to_pat.name();

    if (p.stored) {
        PathAutomaton aut;
        StateViewResolver resolver(st, gp);
        if (p.regex) aut = compile_regex(*p.regex, st.view_names());
        for (ObjId path : g.paths()) {
            if (!labels_match(g.labels(path), p.labels)) continue;
            if (p.regex && !conforms(g, g.path_body(path), aut, &resolver)) continue;
            const auto& body = g.path_body(path);
            Binding row;
            row.bind(from_var, Value::object(body.front()));
            row.bind(to_var, Value::object(body.back()));
            row.bind(p.name(), Value::object(path));
            if (!p.cost_var.empty())
                row.bind(p.cost_var, Value::integer(static_cast<int64_t>(body.size() / 2)));
            rows.add(row);
        }
        return join(t, rows);
    }

    if (!p.regex) throw EvalError("path pattern requires a label regex");
    PathAutomaton aut = compile_regex(*p.regex, st.view_names());
    StateViewResolver resolver(st, gp);
    SearchOptions opt;
    opt.views = &resolver;

    auto src_cands = endpoint_candidates(t, from_var, from_pat, g);
    auto dst_cands = endpoint_candidates(t, to_var, to_pat, g);

    std::vector<ObjId> srcs;
    if (src_cands)
        srcs.assign(src_cands->begin(), src_cands->end());
    else
        srcs.assign(g.nodes().begin(), g.nodes().end());

    for (ObjId src : srcs) {
        if (!g.has(src)) continue;
        if (p.is_reachability_test() || p.mode == PathSearchMode::all) {
            auto found = shortest_paths_from(g, src, aut, opt,
                                             dst_cands ? &*dst_cands : nullptr);
            for (const auto& [dst, walk] : found) {
                Binding row;
                row.bind(from_var, Value::object(src));
                row.bind(to_var, Value::object(dst));
                if (p.mode == PathSearchMode::all && !p.var.empty()) {
                    ObjId id = fresh_virtual_path(st, g.ids());
                    OverlayPath ov;
                    ov.all_paths = true;
                    ov.src = src;
                    ov.dst = dst;
                    ov.regex = p.regex;
                    ov.graph = gp;
                    st.overlay.emplace(id, std::move(ov));
                    row.bind(p.var, Value::object(id));
                }
                rows.add(row);
            }
        } else if (p.k <= 1) {
            auto found = shortest_paths_from(g, src, aut, opt, dst_cands ? &*dst_cands : nullptr);
            for (const auto& [dst, walk] : found) {
                ObjId id = fresh_virtual_path(st, g.ids());
                st.overlay.emplace(id,
                                   OverlayPath{walk.body, walk.cost, false, src, dst, p.regex, gp});
                Binding row;
                row.bind(from_var, Value::object(src));
                row.bind(to_var, Value::object(dst));
                row.bind(p.name(), Value::object(id));
                if (!p.cost_var.empty()) row.bind(p.cost_var, cost_value(walk.cost));
                rows.add(row);
            }
        } else {
            auto found = k_shortest_paths_from(g, src, aut, static_cast<size_t>(p.k), opt,
                                               dst_cands ? &*dst_cands : nullptr);
            for (const auto& [dst, walks] : found) {
                for (const auto& walk : walks) {
                    ObjId id = fresh_virtual_path(st, g.ids());
                    st.overlay.emplace(
                        id, OverlayPath{walk.body, walk.cost, false, src, dst, p.regex, gp});
                    Binding row;
                    row.bind(from_var, Value::object(src));
                    row.bind(to_var, Value::object(dst));
                    row.bind(p.name(), Value::object(id));
                    if (!p.cost_var.empty()) row.bind(p.cost_var, cost_value(walk.cost));
                    rows.add(row);
                }
            }
        }
    }
    return join(t, rows);
}

BindingSet eval_chain(EvalState& st, BindingSet t, const PatternChain& chain,
                      const std::shared_ptr<const Graph>& g) {
    t = join(t, eval_node_atom(*g, chain.head));
    const NodePattern* prev = &chain.head;
    for (const auto& el : chain.tail) {
        if (el.kind == ChainElement::Kind::edge) {
            t = join(t, eval_edge_atom(*g, el.edge, prev->name(), el.to.name()));
        } else {
            t = eval_path_atom(st, t, g, el.path, *prev, el.to);
        }
        t = join(t, eval_node_atom(*g, el.to));
        prev = &el.to;
    }
    return t;
}

void collect_chain_vars(const PatternChain& chain, std::set<std::string>& out) {
    out.insert(chain.head.name());
    for (const auto& pb : chain.head.prop_binds) out.insert(pb.var);
    for (const auto& el : chain.tail) {
        if (el.kind == ChainElement::Kind::edge) {
            out.insert(el.edge.name());
            for (const auto& pb : el.edge.prop_binds) out.insert(pb.var);
        } else {
            if (!el.path.is_reachability_test()) out.insert(el.path.name());
            if (!el.path.cost_var.empty()) out.insert(el.path.cost_var);
        }
        out.insert(el.to.name());
        for (const auto& pb : el.to.prop_binds) out.insert(pb.var);
    }
}

BindingSet drop_anonymous(const BindingSet& t) {
    std::set<std::string> keep;
    for (const auto& v : t.vars())
        if (v.rfind("_anon", 0) != 0) keep.insert(v);
    if (keep.size() == t.vars().size()) return t;
    return project(t, keep);
}

}  // namespace

Value eval_in_context(EvalState& st, const Expr& e, const Binding& b, const AmbientGraph& ambient,
                      const BindingSet* group) {
    EvalHooks hooks;
    hooks.exists = [&st, &ambient](const QueryAst& q, const Binding& bb) {
        Binding stripped;
        for (const auto& [var, v] : bb.entries())
            if (var.rfind("_anon", 0) != 0 && !v.is_unbound()) stripped.bind(var, v);
        BindingSet outer;
        outer.add(stripped);
        auto saved_graph = st.default_graph;
        auto saved_name = st.default_name;
        st.default_graph = ambient.primary();
        std::shared_ptr<const Graph> result;
        try {
            result = eval_query_internal(st, q, outer);
        } catch (...) {
            st.default_graph = saved_graph;
            st.default_name = saved_name;
            throw;
        }
        st.default_graph = saved_graph;
        st.default_name = saved_name;
        return !result->nodes().empty();
    };
    hooks.pattern_exists = [&st, &ambient](const std::vector<LocatedChain>& patterns,
                                           const Binding& bb) {
        BindingSet outer;
        outer.add(bb);
        AmbientGraph amb2 = ambient;
        // Unlocated atoms of the condition run on the enclosing match's graph.
        auto saved_graph = st.default_graph;
        auto saved_name = st.default_name;
        st.default_graph = ambient.primary();
        BindingSet tt;
        try {
            tt = eval_pattern_block(st, patterns, nullptr, outer, amb2);
        } catch (...) {
            st.default_graph = saved_graph;
            st.default_name = saved_name;
            throw;
        }
        st.default_graph = saved_graph;
        st.default_name = saved_name;
        return !tt.empty();
    };
    ExprContext ctx;
    ctx.graph = &ambient;
    ctx.hooks = &hooks;
    ctx.group = group;
    return eval_expression(e, b, ctx);
}

BindingSet eval_pattern_block(EvalState& st, const std::vector<LocatedChain>& chains,
                              const Expr* where, const BindingSet& outer, AmbientGraph& ambient) {
    std::set<std::string> block_vars;
    for (const auto& lc : chains) collect_chain_vars(lc.chain, block_vars);

    BindingSet t = project(outer, block_vars);  // seeds the join with outer constraints
    for (const auto& lc : chains) {
        std::shared_ptr<const Graph> g;
        if (lc.on) {
            if (lc.on->is_query()) {
                g = eval_full_internal(st, *lc.on->subquery, BindingSet::unit());
            } else {
                g = resolve_graph(st, lc.on->gid);
            }
        } else {
            g = current_default(st);
        }
        ambient.add(g);
        ambient.set_overlay(&st.overlay);
        t = eval_chain(st, t, lc.chain, g);
    }
    t = semijoin(t, outer);
    if (where) {
        BindingSet filtered;
        for (size_t i = 0; i < t.size(); ++i) {
            Binding row = t.row(i);
            Value v = eval_in_context(st, *where, row, ambient, nullptr);
            if (v.is_true()) filtered.add(row);
        }
        t = std::move(filtered);
    }
    return t;
}

namespace {

BindingSet eval_match_clause(EvalState& st, const MatchAst& match, const BindingSet& outer,
                             AmbientGraph& ambient) {
    BindingSet t = eval_pattern_block(st, match.chains, match.where.get(), outer, ambient);
    for (const auto& ob : match.optionals) {
        BindingSet ti = eval_pattern_block(st, ob.chains, ob.where.get(), outer, ambient);
        t = left_outer_join(t, drop_anonymous(ti));
    }
    return drop_anonymous(t);
}

std::shared_ptr<const Graph> eval_basic_query(EvalState& st, const BasicGraphQuery& bq,
                                              const BindingSet& outer) {
    // The ambient view picks up every graph the match touches; atoms without
    // ON pull in the default graph on demand.
    AmbientGraph ambient;
    ambient.set_overlay(&st.overlay);
    BindingSet omega = eval_match_clause(st, bq.match, outer, ambient);
    st.trace.push_back({"MATCH " + std::to_string(st.trace.size() + 1), omega});
    Graph g = eval_construct_clause(st, bq, omega, ambient);
    return std::make_shared<const Graph>(std::move(g));
}

}  // namespace

const PathViewRelation& get_view_relation(EvalState& st, const std::string& name,
                                          const std::shared_ptr<const Graph>& g) {
    auto key = std::make_pair(name, g);
    auto it = st.view_rels.find(key);
    if (it != st.view_rels.end()) return *it->second;

    auto defn = st.path_views.find(name);
    if (defn == st.path_views.end()) throw EvalError("unresolved path view name '~" + name + "'");
    const PathClauseAst& clause = defn->second;

    std::vector<LocatedChain> chains;
    for (const auto& c : clause.patterns) {
        LocatedChain lc;
        lc.chain = c;
        chains.push_back(std::move(lc));
    }

    // Evaluate the walk pattern (plus auxiliary patterns and WHERE) on g.
    auto saved_graph = st.default_graph;
    auto saved_name = st.default_name;
    st.default_graph = g;
    BindingSet t;
    try {
        AmbientGraph ambient(g);
        ambient.set_overlay(&st.overlay);
        t = eval_pattern_block(st, chains, clause.where.get(), BindingSet::unit(), ambient);

        auto rel = std::make_shared<PathViewRelation>();
        const PatternChain& walk = clause.patterns[0];
        const std::string& src_var = walk.head.name();
        const std::string& dst_var = walk.tail.back().to.name();

        for (size_t i = 0; i < t.size(); ++i) {
            Binding row = t.row(i);
            double cost = 1.0;
            if (clause.cost) {
                Value v =
                    eval_in_context(st, *clause.cost, row, ambient, nullptr).scalarized();
                if (!v.is_numeric())
                    throw EvalError("PATH cost must evaluate to a number > 0");
                cost = v.as_real();
            }
            if (!std::isfinite(cost) || cost <= 0)
                throw EvalError("PATH cost must evaluate to a number > 0");

            std::vector<ObjId> body;
            body.push_back(row.get(src_var).as_object());
            for (const auto& el : walk.tail) {
                if (el.kind == ChainElement::Kind::edge) {
                    body.push_back(row.get(el.edge.name()).as_object());
                    body.push_back(row.get(el.to.name()).as_object());
                } else {
                    ObjId pid = row.get(el.path.name()).as_object();
                    auto ov = st.overlay.find(pid);
                    const std::vector<ObjId>* pbody =
                        ov != st.overlay.end() ? &ov->second.body : &g->path_body(pid);
                    body.insert(body.end(), pbody->begin() + 1, pbody->end());
                }
            }
            rel->offer(row.get(src_var).as_object(), row.get(dst_var).as_object(), cost,
                       std::move(body));
        }
        st.default_graph = saved_graph;
        st.default_name = saved_name;
        auto [pos, ok] = st.view_rels.emplace(key, std::move(rel));
        return *pos->second;
    } catch (...) {
        st.default_graph = saved_graph;
        st.default_name = saved_name;
        throw;
    }
}

std::shared_ptr<const Graph> resolve_graph(EvalState& st, const std::string& name) {
    auto local = st.local_graphs.find(name);
    if (local != st.local_graphs.end()) return local->second;
    if (auto g = st.catalog.graph(name)) return g;
    if (QueryPtr def = st.catalog.view(name)) {
        if (st.opts.materialize_views) {
            auto memo = st.materialized.find(name);
            if (memo != st.materialized.end()) return memo->second;
        }
        if (!st.resolving.insert(name).second)
            throw EvalError("cyclic view reference involving '" + name + "'");
        ScopeSaver saver(st);
        st.local_graphs.clear();
        st.path_views.clear();
        st.default_graph = nullptr;
        st.default_name = st.catalog.default_graph_name();
        std::shared_ptr<const Graph> result;
        try {
            result = eval_query_internal(st, *def, BindingSet::unit());
        } catch (...) {
            st.resolving.erase(name);
            throw;
        }
        st.resolving.erase(name);
        if (st.opts.materialize_views) st.materialized[name] = result;
        return result;
    }
    throw EvalError("unknown graph '" + name + "'");
}

std::shared_ptr<const Graph> eval_full_internal(EvalState& st, const FullGraphQuery& f,
                                                const BindingSet& outer) {
    switch (f.op) {
        case FullGraphQuery::Op::basic: return eval_basic_query(st, *f.basic, outer);
        case FullGraphQuery::Op::graph_ref: return resolve_graph(st, f.gid);
        case FullGraphQuery::Op::union_:
        case FullGraphQuery::Op::intersect:
        case FullGraphQuery::Op::minus: {
            auto left = eval_full_internal(st, *f.left, outer);
            auto right = eval_full_internal(st, *f.right, outer);
            Graph out;
            if (f.op == FullGraphQuery::Op::union_)
                out = graph_union(*left, *right);
            else if (f.op == FullGraphQuery::Op::intersect)
                out = graph_intersect(*left, *right);
            else
                out = graph_difference(*left, *right);
            return std::make_shared<const Graph>(std::move(out));
        }
    }
    throw EvalError("bad query node");
}

std::shared_ptr<const Graph> eval_query_internal(EvalState& st, const QueryAst& q,
                                                 const BindingSet& outer) {
    ScopeSaver saver(st);
    st.query_hash = fnv1a(render_query(q));
    std::shared_ptr<const Graph> last_head_graph;
    for (const auto& h : q.head) {
        if (h.kind == HeadClause::Kind::path) {
            st.path_views[h.path.name] = h.path;
            last_head_graph = nullptr;
        } else if (h.graph.is_view) {
            st.catalog.register_view(h.graph.name, h.graph.body);
            last_head_graph = resolve_graph(st, h.graph.name);
        } else {
            auto g = eval_query_internal(st, *h.graph.body, BindingSet::unit());
            st.local_graphs[h.graph.name] = g;
            last_head_graph = g;
        }
    }
    if (q.body) return eval_full_internal(st, *q.body, outer);
    if (last_head_graph) return last_head_graph;
    return std::make_shared<const Graph>(Graph{});
}

// ---------------------------------------------------------------------------
// Public interface
// ---------------------------------------------------------------------------

struct Evaluator::Impl {
    EvalState st;
    Impl(Catalog& c, EvalOptions o) : st(c, o) {}
};

Evaluator::Evaluator(Catalog& catalog, EvalOptions opts)
    : impl_(std::make_unique<Impl>(catalog, opts)) {}

Evaluator::~Evaluator() = default;

std::shared_ptr<const Graph> Evaluator::eval(const QueryAst& q) {
    EvalState& st = impl_->st;
    st.trace.clear();
    st.local_graphs.clear();
    st.path_views.clear();
    st.overlay.clear();
    st.view_rels.clear();
    st.default_graph = nullptr;
    st.default_name = st.catalog.default_graph_name();
    return eval_query_internal(st, q, BindingSet::unit());
}

std::shared_ptr<const Graph> Evaluator::eval_text(const std::string& query_text) {
    return eval(*parse_query(query_text));
}

std::shared_ptr<const Graph> Evaluator::resolve(const std::string& name) {
    EvalState& st = impl_->st;
    st.default_graph = nullptr;
    st.default_name = st.catalog.default_graph_name();
    return resolve_graph(st, name);
}

const std::vector<Evaluator::TraceEntry>& Evaluator::binding_trace() const {
    return impl_->st.trace;
}

}  // namespace gcore
