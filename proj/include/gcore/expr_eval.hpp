#pragma once

#include <functional>
#include <map>
#include <memory>

#include "gcore/ast.hpp"
#include "gcore/binding.hpp"
#include "gcore/graph.hpp"

namespace gcore {

// A path synthesized during matching (virtual path patterns) that is not a
// member of any stored graph yet. `all_paths` marks the placeholder bound by
// ALL patterns, which may only be projected.
struct OverlayPath {
    std::vector<ObjId> body;
    double cost = 0;
    bool all_paths = false;
    ObjId src{}, dst{};
    RegexPtr regex;
    std::shared_ptr<const Graph> graph;  // the graph an ALL placeholder was searched on
};
using OverlayMap = std::map<ObjId, OverlayPath>;

// Read view over the graphs a match touches (default graph plus every ON
// graph) merged with the virtual-path overlay. Lookups behave like the
// componentwise union of the member graphs.
class AmbientGraph {
public:
    AmbientGraph() = default;
    explicit AmbientGraph(std::shared_ptr<const Graph> g) { add(std::move(g)); }

    void add(std::shared_ptr<const Graph> g);
    void set_overlay(const OverlayMap* overlay) { overlay_ = overlay; }

    const std::shared_ptr<const Graph>& primary() const { return graphs_.at(0); }
    const IdSpace* ids() const;

    LabelSet labels(ObjId id) const;
    ValueSet properties(ObjId id, const std::string& key) const;
    std::vector<std::pair<std::string, ValueSet>> all_properties(ObjId id) const;
    std::optional<EdgeEndpoints> find_endpoints(ObjId edge) const;
    const std::vector<ObjId>* find_path_body(ObjId path) const;
    const OverlayPath* find_overlay(ObjId path) const;

private:
    std::vector<std::shared_ptr<const Graph>> graphs_;
    const OverlayMap* overlay_ = nullptr;
};

// Callbacks into the evaluator for subquery conditions.
struct EvalHooks {
    std::function<bool(const QueryAst&, const Binding&)> exists;
    std::function<bool(const std::vector<LocatedChain>&, const Binding&)> pattern_exists;
};

struct ExprContext {
    const AmbientGraph* graph = nullptr;
    const EvalHooks* hooks = nullptr;
    const BindingSet* group = nullptr;  // aggregation group, when inside CONSTRUCT assignments
};

// Expression evaluation. Unbound operands flow through operators as the
// unbound marker, so conditions over them never hold (WHERE keeps a binding
// only when the condition is exactly true).
Value eval_expression(const Expr& e, const Binding& b, const ExprContext& ctx);

Value eval_aggregate(AggFn fn, const Expr* arg, const BindingSet& group, const ExprContext& ctx);

}  // namespace gcore
