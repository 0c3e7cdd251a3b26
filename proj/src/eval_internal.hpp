#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gcore/evaluator.hpp"
#include "gcore/expr_eval.hpp"
#include "gcore/path_search.hpp"

namespace gcore {

struct EvalState {
    Catalog& catalog;
    EvalOptions opts;

    // Query-local scopes (saved/restored around nested query evaluation).
    std::map<std::string, std::shared_ptr<const Graph>> local_graphs;
    std::map<std::string, PathClauseAst> path_views;
    std::shared_ptr<const Graph> default_graph;  // resolved lazily from default_name
    std::string default_name;
    uint64_t query_hash = 0;

    // Deterministic generator state.
    OverlayMap overlay;
    int64_t vpath_counter = 0;
    std::map<std::string, ObjId> skolem_memo;

    // Lazily computed path-view relations, one per (view, graph) pair. The
    // shared_ptr key keeps the graph alive so addresses are never reused.
    std::map<std::pair<std::string, std::shared_ptr<const Graph>>,
             std::shared_ptr<PathViewRelation>>
        view_rels;
    std::map<std::string, std::shared_ptr<const Graph>> materialized;
    std::set<std::string> resolving;  // guards against runtime view cycles

    std::vector<Evaluator::TraceEntry> trace;

    explicit EvalState(Catalog& c, EvalOptions o) : catalog(c), opts(o) {}

    std::vector<std::string> view_names() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : path_views) out.push_back(k);
        return out;
    }
};

// evaluator.cpp
const PathViewRelation& get_view_relation(EvalState& st, const std::string& name,
                                          const std::shared_ptr<const Graph>& g);

// Resolves ~view references against a fixed evaluation graph, computing each
// view's segment relation on first use.
class StateViewResolver : public ViewResolver {
public:
    StateViewResolver(EvalState& st, std::shared_ptr<const Graph> g) : st_(st), g_(std::move(g)) {}
    const PathViewRelation& view(const std::string& name) const override {
        return get_view_relation(st_, name, g_);
    }

private:
    EvalState& st_;
    std::shared_ptr<const Graph> g_;
};

std::shared_ptr<const Graph> eval_query_internal(EvalState& st, const QueryAst& q,
                                                 const BindingSet& outer);
std::shared_ptr<const Graph> eval_full_internal(EvalState& st, const FullGraphQuery& f,
                                                const BindingSet& outer);
std::shared_ptr<const Graph> resolve_graph(EvalState& st, const std::string& name);
BindingSet eval_pattern_block(EvalState& st, const std::vector<LocatedChain>& chains,
                              const Expr* where, const BindingSet& outer, AmbientGraph& ambient);
Value eval_in_context(EvalState& st, const Expr& e, const Binding& b, const AmbientGraph& ambient,
                      const BindingSet* group);

// construct.cpp
Graph eval_construct_clause(EvalState& st, const BasicGraphQuery& bq, const BindingSet& omega,
                            const AmbientGraph& ambient);

}  // namespace gcore
