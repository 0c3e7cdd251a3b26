#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gcore/ast.hpp"
#include "gcore/binding.hpp"
#include "gcore/catalog.hpp"

namespace gcore {

struct EvalOptions {
    uint64_t seed = 0;
    // Views are lazily re-evaluated per reference by default; this memoizes
    // them for the lifetime of the evaluator instead.
    bool materialize_views = false;
};

// Executes queries against a catalog snapshot. One evaluator instance keeps
// deterministic generator state, so identical call sequences produce
// identical identifiers.
class Evaluator {
public:
    explicit Evaluator(Catalog& catalog, EvalOptions opts = {});
    ~Evaluator();
    Evaluator(const Evaluator&) = delete;
    Evaluator& operator=(const Evaluator&) = delete;

    std::shared_ptr<const Graph> eval(const QueryAst& q);
    std::shared_ptr<const Graph> eval_text(const std::string& query_text);

    // Resolves a graph name: query-local graphs, stored graphs, then views
    // (re-evaluated against the current catalog).
    std::shared_ptr<const Graph> resolve(const std::string& name);

    struct TraceEntry {
        std::string label;
        BindingSet bindings;
    };
    // The binding tables produced by MATCH clauses during the last eval().
    const std::vector<TraceEntry>& binding_trace() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gcore
