#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gcore/ast.hpp"
#include "gcore/parser.hpp"

namespace gcore {

void analyze_query(QueryAst& q, const std::vector<std::string>& outer_views,
                   const std::map<std::string, VarSort>& outer_sorts);

namespace {

[[noreturn]] void sem_error(const std::string& rule, const std::string& msg, int line = 0,
                            int col = 0) {
    throw ParseError("[" + rule + "] " + msg, line, col);
}

const char* sort_name(VarSort s) {
    switch (s) {
        case VarSort::node: return "node";
        case VarSort::edge: return "edge";
        case VarSort::path: return "path";
        case VarSort::value: return "value";
    }
    return "?";
}

struct Analyzer {
    std::vector<std::string> views;
    int anon_counter = 0;

    std::string fresh_anon() { return "_anon" + std::to_string(++anon_counter); }

    void declare(std::map<std::string, VarSort>& sorts, const std::string& var, VarSort s,
                 int line, int col) {
        auto [it, inserted] = sorts.emplace(var, s);
        if (!inserted && it->second != s)
            sem_error("variable-sort",
                      "variable '" + var + "' used both as " + sort_name(it->second) + " and as " +
                          sort_name(s),
                      line, col);
    }

    void reject_reserved(const std::string& var, int line, int col) {
        if (var.rfind("_anon", 0) == 0)
            sem_error("reserved-variable", "variable names starting with '_anon' are reserved",
                      line, col);
    }

    // Assigns anonymous names and declares every variable of the chain.
    void declare_chain(PatternChain& chain, std::map<std::string, VarSort>& sorts,
                       std::set<std::string>* declared) {
        auto note = [&](const std::string& v, VarSort s) {
            declare(sorts, v, s, chain.line, chain.col);
            if (declared) declared->insert(v);
        };
        reject_reserved(chain.head.var, chain.line, chain.col);
        for (const auto& el : chain.tail) {
            if (el.kind == ChainElement::Kind::edge)
                reject_reserved(el.edge.var, chain.line, chain.col);
            else
                reject_reserved(el.path.var, chain.line, chain.col);
            reject_reserved(el.to.var, chain.line, chain.col);
        }
        auto handle_node = [&](NodePattern& n) {
            if (n.var.empty() && n.anon.empty()) n.anon = fresh_anon();
            note(n.name(), VarSort::node);
            for (const auto& pb : n.prop_binds) note(pb.var, VarSort::value);
        };
        handle_node(chain.head);
        for (auto& el : chain.tail) {
            if (el.kind == ChainElement::Kind::edge) {
                if (el.edge.var.empty() && el.edge.anon.empty()) el.edge.anon = fresh_anon();
                note(el.edge.name(), VarSort::edge);
                for (const auto& pb : el.edge.prop_binds) note(pb.var, VarSort::value);
            } else {
                if (el.path.var.empty() && el.path.anon.empty()) el.path.anon = fresh_anon();
                if (!el.path.is_reachability_test()) note(el.path.name(), VarSort::path);
                if (!el.path.cost_var.empty()) note(el.path.cost_var, VarSort::value);
            }
            handle_node(el.to);
        }
    }

    void check_view_refs(const PathPattern& p, int line, int col) {
        if (!p.regex) return;
        std::vector<std::string> refs;
        collect_view_refs(*p.regex, refs);
        for (const auto& r : refs) {
            if (std::find(views.begin(), views.end(), r) == views.end())
                sem_error("path-view", "reference to undeclared path view '~" + r + "'", line,
                          col);
        }
    }

    void analyze_expr(Expr& e, std::map<std::string, VarSort>& sorts, bool allow_aggregates) {
        switch (e.kind) {
            case Expr::Kind::literal: return;
            case Expr::Kind::variable:
                if (!sorts.count(e.name))
                    sem_error("unknown-variable", "variable '" + e.name + "' is not in scope",
                              e.line, e.col);
                return;
            case Expr::Kind::property:
            case Expr::Kind::unary:
                analyze_expr(*e.base, sorts, allow_aggregates);
                return;
            case Expr::Kind::label_check:
                if (!sorts.count(e.name))
                    sem_error("unknown-variable", "variable '" + e.name + "' is not in scope",
                              e.line, e.col);
                return;
            case Expr::Kind::binary:
                analyze_expr(*e.lhs, sorts, allow_aggregates);
                analyze_expr(*e.rhs, sorts, allow_aggregates);
                return;
            case Expr::Kind::call:
                for (auto& a : e.args) analyze_expr(*a, sorts, allow_aggregates);
                return;
            case Expr::Kind::aggregate:
                if (!allow_aggregates)
                    sem_error("aggregate-context",
                              "aggregation is only allowed in CONSTRUCT assignments and WHEN",
                              e.line, e.col);
                for (auto& a : e.args) analyze_expr(*a, sorts, /*allow_aggregates=*/false);
                return;
            case Expr::Kind::exists:
                analyze_query(*e.subquery, views, sorts);
                return;
            case Expr::Kind::pattern_exists: {
                // The pattern's own variables are existential locals.
                std::map<std::string, VarSort> local = sorts;
                for (auto& lc : e.patterns) declare_chain(lc.chain, local, nullptr);
                for (auto& lc : e.patterns) check_match_chain(lc.chain);
                return;
            }
            case Expr::Kind::case_:
                for (auto& arm : e.arms) {
                    analyze_expr(*arm.when, sorts, allow_aggregates);
                    analyze_expr(*arm.then, sorts, allow_aggregates);
                }
                if (e.else_arm) analyze_expr(*e.else_arm, sorts, allow_aggregates);
                return;
            case Expr::Kind::index:
                analyze_expr(*e.lhs, sorts, allow_aggregates);
                analyze_expr(*e.rhs, sorts, allow_aggregates);
                return;
        }
    }

    void collect_expr_vars(const Expr& e, std::set<std::string>& out) {
        if (e.kind == Expr::Kind::variable || e.kind == Expr::Kind::label_check)
            out.insert(e.name);
        if (e.base) collect_expr_vars(*e.base, out);
        if (e.lhs) collect_expr_vars(*e.lhs, out);
        if (e.rhs) collect_expr_vars(*e.rhs, out);
        for (const auto& a : e.args) collect_expr_vars(*a, out);
        for (const auto& arm : e.arms) {
            collect_expr_vars(*arm.when, out);
            collect_expr_vars(*arm.then, out);
        }
        if (e.else_arm) collect_expr_vars(*e.else_arm, out);
        // exists/pattern_exists subqueries intentionally skipped: their use of
        // a path variable is a correlation, not a projection-breaking use.
    }

    // MATCH-side restrictions on one chain.
    void check_match_chain(const PatternChain& chain) {
        for (const auto& el : chain.tail) {
            if (el.kind != ChainElement::Kind::path) continue;
            const PathPattern& p = el.path;
            check_view_refs(p, chain.line, chain.col);
            if (p.stored && p.mode == PathSearchMode::all)
                sem_error("stored-path", "ALL does not apply to stored path patterns", chain.line,
                          chain.col);
            if (p.stored && p.k != 1)
                sem_error("stored-path", "k SHORTEST does not apply to stored path patterns",
                          chain.line, chain.col);
            if (p.stored && p.var.empty())
                sem_error("stored-path", "stored path patterns require a variable", chain.line,
                          chain.col);
            if (p.mode == PathSearchMode::all && !p.cost_var.empty())
                sem_error("all-paths", "COST does not apply to ALL path patterns", chain.line,
                          chain.col);
            if (!p.stored && p.labels.size() > 0 && !p.regex && p.var.empty())
                sem_error("path-pattern", "label filter requires a stored path or a variable",
                          chain.line, chain.col);
            if (!p.assignments.empty())
                sem_error("path-pattern", "':=' assignments are not allowed in MATCH", chain.line,
                          chain.col);
        }
    }

    // The listings attach one trailing ON to a whole comma-separated pattern
    // list; formally ON binds per pattern. Unlocated patterns inherit the
    // location of the nearest located pattern that follows them.
    static void distribute_on(std::vector<LocatedChain>& chains) {
        std::optional<Location> pending;
        for (auto it = chains.rbegin(); it != chains.rend(); ++it) {
            if (it->on)
                pending = it->on;
            else if (pending)
                it->on = pending;
        }
    }

    void analyze_basic_query(BasicGraphQuery& bq) {
        auto& sorts = bq.sorts;

        distribute_on(bq.match.chains);
        for (auto& ob : bq.match.optionals) distribute_on(ob.chains);

        // B: variables declared by the match clause, optionals included.
        for (auto& lc : bq.match.chains) declare_chain(lc.chain, sorts, &bq.match_vars);
        for (auto& ob : bq.match.optionals)
            for (auto& lc : ob.chains) declare_chain(lc.chain, sorts, &bq.match_vars);

        for (auto& lc : bq.match.chains) {
            check_match_chain(lc.chain);
            if (lc.on && lc.on->is_query()) analyze_full(*lc.on->subquery);
        }
        for (auto& ob : bq.match.optionals)
            for (auto& lc : ob.chains) {
                check_match_chain(lc.chain);
                if (lc.on && lc.on->is_query()) analyze_full(*lc.on->subquery);
            }

        // Optional blocks may share fresh variables only through the
        // enclosing pattern, keeping their evaluation order irrelevant.
        std::set<std::string> main_vars;
        for (auto& lc : bq.match.chains) {
            std::map<std::string, VarSort> tmp = bq.sorts;
            declare_chain(lc.chain, tmp, &main_vars);
        }
        std::vector<std::set<std::string>> opt_vars(bq.match.optionals.size());
        for (size_t i = 0; i < bq.match.optionals.size(); ++i) {
            std::map<std::string, VarSort> tmp = bq.sorts;
            for (auto& lc : bq.match.optionals[i].chains)
                declare_chain(lc.chain, tmp, &opt_vars[i]);
        }
        for (size_t i = 0; i < opt_vars.size(); ++i)
            for (size_t j = i + 1; j < opt_vars.size(); ++j)
                for (const auto& v : opt_vars[i])
                    if (opt_vars[j].count(v) && !main_vars.count(v))
                        sem_error("optional-shared-variable",
                                  "variable '" + v +
                                      "' is shared by OPTIONAL blocks but absent from the "
                                      "enclosing pattern");

        if (bq.match.where) analyze_expr(*bq.match.where, sorts, /*allow_aggregates=*/false);
        for (auto& ob : bq.match.optionals)
            if (ob.where) analyze_expr(*ob.where, sorts, /*allow_aggregates=*/false);

        // Paths bound by ALL may only be projected, never inspected.
        std::set<std::string> all_path_vars;
        auto scan_all = [&](const PatternChain& chain) {
            for (const auto& el : chain.tail)
                if (el.kind == ChainElement::Kind::path &&
                    el.path.mode == PathSearchMode::all && !el.path.var.empty())
                    all_path_vars.insert(el.path.var);
        };
        for (auto& lc : bq.match.chains) scan_all(lc.chain);
        for (auto& ob : bq.match.optionals)
            for (auto& lc : ob.chains) scan_all(lc.chain);

        std::set<std::string> expr_vars;
        if (bq.match.where) collect_expr_vars(*bq.match.where, expr_vars);
        for (auto& ob : bq.match.optionals)
            if (ob.where) collect_expr_vars(*ob.where, expr_vars);

        // CONSTRUCT side.
        for (auto& item : bq.construct.items) {
            if (item.is_gid) continue;
            for (auto& chain : item.chains) analyze_construct_chain(bq, chain);
            if (item.when) {
                analyze_expr(*item.when, bq.sorts, /*allow_aggregates=*/true);
                collect_expr_vars(*item.when, expr_vars);
            }
            for (auto& s : item.sets) {
                if (!construct_has_var(item, s.var))
                    sem_error("set-remove", "SET refers to '" + s.var +
                                                "', which is not a construct variable here");
                if (s.value) {
                    analyze_expr(*s.value, bq.sorts, /*allow_aggregates=*/true);
                    collect_expr_vars(*s.value, expr_vars);
                }
            }
            for (auto& r : item.removes) {
                if (!construct_has_var(item, r.var))
                    sem_error("set-remove", "REMOVE refers to '" + r.var +
                                                "', which is not a construct variable here");
            }
        }

        for (const auto& v : all_path_vars) {
            if (expr_vars.count(v))
                sem_error("all-paths",
                          "path variable '" + v +
                              "' bound by ALL may only be used for graph projection");
        }
    }

    bool construct_has_var(const BasicConstruct& item, const std::string& var) {
        if (item.is_gid) return false;
        for (const auto& chain : item.chains) {
            if (chain.head.name() == var) return true;
            for (const auto& el : chain.tail) {
                if (el.kind == ChainElement::Kind::edge && el.edge.name() == var) return true;
                if (el.kind == ChainElement::Kind::path && el.path.name() == var) return true;
                if (el.to.name() == var) return true;
            }
        }
        return false;
    }

    void analyze_construct_chain(BasicGraphQuery& bq, PatternChain& chain) {
        auto& sorts = bq.sorts;
        const auto& B = bq.match_vars;

        auto handle_node = [&](NodePattern& n) {
            if (n.var.empty() && n.anon.empty()) n.anon = fresh_anon();
            declare(sorts, n.name(), VarSort::node, chain.line, chain.col);
            if (!n.prop_tests.empty() || !n.prop_binds.empty())
                sem_error("construct-pattern", "CONSTRUCT patterns take ':=' assignments only",
                          chain.line, chain.col);
            if (!n.copy_of.empty() && !B.count(n.copy_of))
                sem_error("copy-pattern", "'=" + n.copy_of + "' must copy a matched variable",
                          chain.line, chain.col);
            if (n.has_group)
                for (const auto& g : n.group)
                    if (!B.count(g))
                        sem_error("group-set", "GROUP variable '" + g + "' is not bound by MATCH",
                                  chain.line, chain.col);
            for (auto& [k, ex] : n.assignments) {
                analyze_expr(*ex, sorts, /*allow_aggregates=*/true);
            }
            if (!n.var.empty() && B.count(n.var) && n.has_group &&
                !(n.group.size() == 1 && n.group[0] == n.var))
                sem_error("group-set",
                          "bound node '" + n.var + "' groups by its own identity only",
                          chain.line, chain.col);
        };

        handle_node(chain.head);
        const NodePattern* prev = &chain.head;
        for (auto& el : chain.tail) {
            handle_node(el.to);
            if (el.kind == ChainElement::Kind::edge) {
                EdgePattern& e = el.edge;
                if (e.var.empty() && e.anon.empty()) e.anon = fresh_anon();
                declare(sorts, e.name(), VarSort::edge, chain.line, chain.col);
                if (!e.prop_tests.empty() || !e.prop_binds.empty())
                    sem_error("construct-pattern",
                              "CONSTRUCT patterns take ':=' assignments only", chain.line,
                              chain.col);
                if (e.dir == EdgeDirection::undirected)
                    sem_error("construct-pattern", "constructed edges must be directed",
                              chain.line, chain.col);
                if (!e.copy_of.empty() && !B.count(e.copy_of))
                    sem_error("copy-pattern", "'=" + e.copy_of + "' must copy a matched variable",
                              chain.line, chain.col);
                if (!e.var.empty() && B.count(e.var)) {
                    // Reusing a matched edge pins its endpoints.
                    if (!(B.count(prev->name()) && B.count(el.to.name())))
                        sem_error("bound-edge",
                                  "endpoints of bound edge '" + e.var +
                                      "' must be bound node variables",
                                  chain.line, chain.col);
                }
                if (e.has_group) {
                    for (const auto& g : e.group)
                        if (!B.count(g))
                            sem_error("group-set",
                                      "GROUP variable '" + g + "' is not bound by MATCH",
                                      chain.line, chain.col);
                    std::set<std::string> gz(e.group.begin(), e.group.end());
                    auto require = [&](const std::string& v) {
                        if (!gz.count(v))
                            sem_error("group-set",
                                      "edge grouping set must contain endpoint groupings ('" + v +
                                          "' missing)",
                                      chain.line, chain.col);
                    };
                    if (!prev->var.empty() && B.count(prev->var)) require(prev->var);
                    if (!el.to.var.empty() && B.count(el.to.var)) require(el.to.var);
                }
                for (auto& [k, ex] : e.assignments)
                    analyze_expr(*ex, sorts, /*allow_aggregates=*/true);
            } else {
                PathPattern& p = el.path;
                if (p.var.empty())
                    sem_error("path-construct", "path constructs require a matched path variable",
                              chain.line, chain.col);
                declare(sorts, p.var, VarSort::path, chain.line, chain.col);
                if (!B.count(p.var))
                    sem_error("path-construct",
                              "path construct '" + p.var +
                                  "' must use a path variable bound by MATCH",
                              chain.line, chain.col);
                if (!B.count(prev->name()) || !B.count(el.to.name()))
                    sem_error("path-construct",
                              "path construct endpoints must be bound by MATCH", chain.line,
                              chain.col);
                if (p.regex)
                    sem_error("path-construct", "label regexes are not allowed in CONSTRUCT",
                              chain.line, chain.col);
                if (!p.cost_var.empty())
                    sem_error("path-construct", "COST is not allowed in CONSTRUCT", chain.line,
                              chain.col);
                if (!p.stored && (!p.labels.empty() || !p.assignments.empty()))
                    sem_error("path-construct",
                              "labels and properties require a stored ('@') path construct",
                              chain.line, chain.col);
                for (auto& [k, ex] : p.assignments)
                    analyze_expr(*ex, sorts, /*allow_aggregates=*/true);
            }
            prev = &el.to;
        }
    }

    void analyze_full(FullGraphQuery& f) {
        switch (f.op) {
            case FullGraphQuery::Op::basic: analyze_basic_query(*f.basic); return;
            case FullGraphQuery::Op::graph_ref: return;
            default:
                analyze_full(*f.left);
                analyze_full(*f.right);
                return;
        }
    }

    void analyze_path_clause(PathClauseAst& pc) {
        if (pc.patterns.empty() || pc.patterns[0].tail.empty())
            sem_error("walk-pattern",
                      "PATH clause '" + pc.name + "' needs a walk pattern with a segment");
        std::map<std::string, VarSort> sorts;
        for (auto& chain : pc.patterns) {
            declare_chain(chain, sorts, nullptr);
            check_match_chain(chain);
            for (const auto& el : chain.tail)
                if (el.kind == ChainElement::Kind::path &&
                    (el.path.stored || el.path.mode == PathSearchMode::all))
                    sem_error("walk-pattern",
                              "walk patterns use plain shortest path elements only");
        }
        if (pc.where) analyze_expr(*pc.where, sorts, /*allow_aggregates=*/false);
        if (pc.cost) analyze_expr(*pc.cost, sorts, /*allow_aggregates=*/false);
    }
};

}  // namespace

void analyze_query(QueryAst& q, const std::vector<std::string>& outer_views,
                   const std::map<std::string, VarSort>& outer_sorts) {
    Analyzer a;
    a.views = outer_views;
    std::set<std::string> graph_names;
    for (auto& h : q.head) {
        if (h.kind == HeadClause::Kind::path) {
            if (std::find(a.views.begin(), a.views.end(), h.path.name) != a.views.end())
                sem_error("duplicate-view", "duplicate path view name '" + h.path.name + "'");
            a.analyze_path_clause(h.path);
            a.views.push_back(h.path.name);
        } else {
            if (!graph_names.insert(h.graph.name).second)
                sem_error("duplicate-view", "duplicate graph name '" + h.graph.name + "'");
            analyze_query(*h.graph.body, a.views, outer_sorts);
        }
    }
    if (q.body) {
        // Correlated subqueries see the outer variables.
        struct BodyAnalyzer {
            Analyzer& a;
            const std::map<std::string, VarSort>& outer;
            void run(FullGraphQuery& f) {
                if (f.op == FullGraphQuery::Op::basic) {
                    f.basic->sorts = outer;
                    a.analyze_basic_query(*f.basic);
                } else if (f.op != FullGraphQuery::Op::graph_ref) {
                    run(*f.left);
                    run(*f.right);
                }
            }
        };
        BodyAnalyzer{a, outer_sorts}.run(*q.body);
    }
}

}  // namespace gcore
