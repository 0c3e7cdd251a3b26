#include <sstream>

#include "gcore/ast.hpp"
#include "gcore/parser.hpp"
#include "json.hpp"

namespace gcore {

namespace {

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    out.push_back('\'');
    return out;
}

std::string render_value(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::string:
        case Value::Kind::date: return quote(v.as_string());
        default: return v.to_display(nullptr);
    }
}

struct Renderer {
    std::ostringstream os;

    static bool visible_var(const std::string& var) { return !var.empty(); }

    const char* agg_name(AggFn f) {
        switch (f) {
            case AggFn::count_star:
            case AggFn::count: return "COUNT";
            case AggFn::min: return "MIN";
            case AggFn::max: return "MAX";
            case AggFn::sum: return "SUM";
            case AggFn::avg: return "AVG";
            case AggFn::collect: return "COLLECT";
        }
        return "?";
    }

    const char* bin_name(BinOp op) {
        switch (op) {
            case BinOp::eq: return "=";
            case BinOp::ne: return "!=";
            case BinOp::lt: return "<";
            case BinOp::le: return "<=";
            case BinOp::gt: return ">";
            case BinOp::ge: return ">=";
            case BinOp::add: return "+";
            case BinOp::sub: return "-";
            case BinOp::mul: return "*";
            case BinOp::div_: return "/";
            case BinOp::and_: return "AND";
            case BinOp::or_: return "OR";
            case BinOp::in: return "IN";
            case BinOp::subset_of: return "SUBSET OF";
        }
        return "?";
    }

    void expr(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::literal: os << render_value(e.literal); return;
            case Expr::Kind::variable: os << e.name; return;
            case Expr::Kind::property:
                expr(*e.base);
                os << "." << e.name;
                return;
            case Expr::Kind::label_check:
                os << e.name << ":";
                for (size_t i = 0; i < e.labels.size(); ++i) {
                    if (i) os << "|";
                    os << e.labels[i];
                }
                return;
            case Expr::Kind::unary:
                if (e.un == UnOp::not_) {
                    os << "NOT ";
                    expr(*e.base);
                } else {
                    os << "-";
                    expr(*e.base);
                }
                return;
            case Expr::Kind::binary:
                os << "(";
                expr(*e.lhs);
                os << " " << bin_name(e.bin) << " ";
                expr(*e.rhs);
                os << ")";
                return;
            case Expr::Kind::call: {
                os << e.name << "(";
                for (size_t i = 0; i < e.args.size(); ++i) {
                    if (i) os << ", ";
                    expr(*e.args[i]);
                }
                os << ")";
                return;
            }
            case Expr::Kind::aggregate:
                os << agg_name(e.agg) << "(";
                if (e.agg == AggFn::count_star)
                    os << "*";
                else
                    expr(*e.args[0]);
                os << ")";
                return;
            case Expr::Kind::exists:
                os << "EXISTS (";
                query(*e.subquery);
                os << ")";
                return;
            case Expr::Kind::pattern_exists:
                for (size_t i = 0; i < e.patterns.size(); ++i) {
                    if (i) os << ", ";
                    located_chain(e.patterns[i], /*construct=*/false);
                }
                return;
            case Expr::Kind::case_:
                os << "CASE";
                for (const auto& arm : e.arms) {
                    os << " WHEN ";
                    expr(*arm.when);
                    os << " THEN ";
                    expr(*arm.then);
                }
                if (e.else_arm) {
                    os << " ELSE ";
                    expr(*e.else_arm);
                }
                os << " END";
                return;
            case Expr::Kind::index:
                expr(*e.lhs);
                os << "[";
                expr(*e.rhs);
                os << "]";
                return;
        }
    }

    void labels(const std::vector<std::string>& ls) {
        if (ls.empty()) return;
        os << ":";
        for (size_t i = 0; i < ls.size(); ++i) {
            if (i) os << "|";
            os << ls[i];
        }
    }

    template <typename P>
    void props(const P& p) {
        bool any = !p.prop_tests.empty() || !p.prop_binds.empty() || !p.assignments.empty();
        if (!any) return;
        os << " {";
        bool first = true;
        auto sep = [&] {
            if (!first) os << ", ";
            first = false;
        };
        for (const auto& t : p.prop_tests) {
            sep();
            os << t.key << "=" << render_value(t.literal);
        }
        for (const auto& b : p.prop_binds) {
            sep();
            os << b.key << "=" << b.var;
        }
        for (const auto& [k, ex] : p.assignments) {
            sep();
            os << k << ":=";
            expr(*ex);
        }
        os << "}";
    }

    void node(const NodePattern& n) {
        os << "(";
        if (!n.copy_of.empty()) os << "=" << n.copy_of;
        if (visible_var(n.var)) os << n.var;
        if (n.has_group) {
            os << " GROUP ";
            for (size_t i = 0; i < n.group.size(); ++i) {
                if (i) os << ",";
                os << n.group[i];
            }
        }
        if (!n.labels.empty()) {
            if (visible_var(n.var) || n.has_group || !n.copy_of.empty()) os << " ";
            labels(n.labels);
        }
        props(n);
        os << ")";
    }

    void chain_element(const ChainElement& el) {
        if (el.kind == ChainElement::Kind::edge) {
            const EdgePattern& e = el.edge;
            os << (e.dir == EdgeDirection::in ? "<-[" : "-[");
            if (!e.copy_of.empty()) os << "=" << e.copy_of;
            if (visible_var(e.var)) os << e.var;
            if (e.has_group) {
                os << " GROUP ";
                for (size_t i = 0; i < e.group.size(); ++i) {
                    if (i) os << ",";
                    os << e.group[i];
                }
            }
            labels(e.labels);
            props(e);
            os << (e.dir == EdgeDirection::out ? "]->" : (e.dir == EdgeDirection::in ? "]-" : "]-"));
        } else {
            const PathPattern& p = el.path;
            os << "-/";
            if (p.mode == PathSearchMode::all)
                os << "ALL ";
            else if (p.k > 1)
                os << p.k << " SHORTEST ";
            if (p.stored) os << "@";
            if (visible_var(p.var)) os << p.var;
            labels(p.labels);
            if (!p.assignments.empty()) {
                os << "{";
                for (size_t i = 0; i < p.assignments.size(); ++i) {
                    if (i) os << ", ";
                    os << p.assignments[i].first << ":=";
                    expr(*p.assignments[i].second);
                }
                os << "}";
            }
            if (p.regex) os << "<" << regex_to_string(*p.regex) << ">";
            if (!p.cost_var.empty()) os << " COST " << p.cost_var;
            os << "/->";
        }
        node(el.to);
    }

    void chain(const PatternChain& c) {
        node(c.head);
        for (const auto& el : c.tail) chain_element(el);
    }

    void located_chain(const LocatedChain& lc, bool construct) {
        (void)construct;
        chain(lc.chain);
        if (lc.on) {
            os << " ON ";
            if (lc.on->is_query()) {
                os << "(";
                full(*lc.on->subquery);
                os << ")";
            } else {
                os << lc.on->gid;
            }
        }
    }

    void match(const MatchAst& m) {
        os << "MATCH ";
        for (size_t i = 0; i < m.chains.size(); ++i) {
            if (i) os << ", ";
            located_chain(m.chains[i], false);
        }
        if (m.where) {
            os << " WHERE ";
            expr(*m.where);
        }
        for (const auto& ob : m.optionals) {
            os << " OPTIONAL ";
            for (size_t i = 0; i < ob.chains.size(); ++i) {
                if (i) os << ", ";
                located_chain(ob.chains[i], false);
            }
            if (ob.where) {
                os << " WHERE ";
                expr(*ob.where);
            }
        }
    }

    void construct(const ConstructAst& c) {
        os << "CONSTRUCT ";
        for (size_t i = 0; i < c.items.size(); ++i) {
            if (i) os << ", ";
            const BasicConstruct& b = c.items[i];
            if (b.is_gid) {
                os << b.gid;
                continue;
            }
            for (size_t k = 0; k < b.chains.size(); ++k) {
                if (k) os << ", ";
                chain(b.chains[k]);
            }
            for (const auto& s : b.sets) {
                os << " SET " << s.var;
                if (s.is_label) {
                    os << ":" << s.label;
                } else {
                    os << "." << s.key << " := ";
                    expr(*s.value);
                }
            }
            for (const auto& r : b.removes) {
                os << " REMOVE " << r.var;
                if (r.is_label)
                    os << ":" << r.label;
                else
                    os << "." << r.key;
            }
            if (b.when) {
                os << " WHEN ";
                expr(*b.when);
            }
        }
    }

    void full(const FullGraphQuery& f) {
        switch (f.op) {
            case FullGraphQuery::Op::basic:
                construct(f.basic->construct);
                os << " ";
                match(f.basic->match);
                return;
            case FullGraphQuery::Op::graph_ref: os << f.gid; return;
            case FullGraphQuery::Op::union_:
            case FullGraphQuery::Op::intersect:
            case FullGraphQuery::Op::minus: {
                full(*f.left);
                os << (f.op == FullGraphQuery::Op::union_
                           ? " UNION "
                           : (f.op == FullGraphQuery::Op::intersect ? " INTERSECT " : " MINUS "));
                bool paren = f.right->op != FullGraphQuery::Op::basic &&
                             f.right->op != FullGraphQuery::Op::graph_ref;
                if (paren) os << "(";
                full(*f.right);
                if (paren) os << ")";
                return;
            }
        }
    }

    void query(const QueryAst& q) {
        for (const auto& h : q.head) {
            if (h.kind == HeadClause::Kind::path) {
                os << "PATH " << h.path.name << " = ";
                for (size_t i = 0; i < h.path.patterns.size(); ++i) {
                    if (i) os << ", ";
                    chain(h.path.patterns[i]);
                }
                if (h.path.where) {
                    os << " WHERE ";
                    expr(*h.path.where);
                }
                if (h.path.cost) {
                    os << " COST ";
                    expr(*h.path.cost);
                }
                os << " ";
            } else {
                os << "GRAPH " << (h.graph.is_view ? "VIEW " : "") << h.graph.name << " AS (";
                query(*h.graph.body);
                os << ") ";
            }
        }
        if (q.body) full(*q.body);
    }
};

using nlohmann::json;

json expr_json(const Expr& e);

json chain_json(const PatternChain& c);

json expr_json(const Expr& e) {
    json j;
    switch (e.kind) {
        case Expr::Kind::literal:
            j["kind"] = "literal";
            j["value"] = e.literal.to_display(nullptr);
            break;
        case Expr::Kind::variable:
            j["kind"] = "variable";
            j["name"] = e.name;
            break;
        case Expr::Kind::property:
            j["kind"] = "property";
            j["base"] = expr_json(*e.base);
            j["key"] = e.name;
            break;
        case Expr::Kind::label_check:
            j["kind"] = "label_check";
            j["var"] = e.name;
            j["labels"] = e.labels;
            break;
        case Expr::Kind::unary:
            j["kind"] = e.un == UnOp::not_ ? "not" : "neg";
            j["operand"] = expr_json(*e.base);
            break;
        case Expr::Kind::binary:
            j["kind"] = "binary";
            j["op"] = Renderer{}.bin_name(e.bin);
            j["lhs"] = expr_json(*e.lhs);
            j["rhs"] = expr_json(*e.rhs);
            break;
        case Expr::Kind::call: {
            j["kind"] = "call";
            j["name"] = e.name;
            json args = json::array();
            for (const auto& a : e.args) args.push_back(expr_json(*a));
            j["args"] = std::move(args);
            break;
        }
        case Expr::Kind::aggregate:
            j["kind"] = "aggregate";
            j["fn"] = Renderer{}.agg_name(e.agg);
            if (e.agg != AggFn::count_star) j["arg"] = expr_json(*e.args[0]);
            break;
        case Expr::Kind::exists:
            j["kind"] = "exists";
            j["query"] = json::parse(ast_to_json(*e.subquery));
            break;
        case Expr::Kind::pattern_exists: {
            j["kind"] = "pattern_exists";
            json ps = json::array();
            for (const auto& lc : e.patterns) ps.push_back(chain_json(lc.chain));
            j["patterns"] = std::move(ps);
            break;
        }
        case Expr::Kind::case_: {
            j["kind"] = "case";
            json arms = json::array();
            for (const auto& arm : e.arms) {
                arms.push_back({{"when", expr_json(*arm.when)}, {"then", expr_json(*arm.then)}});
            }
            j["arms"] = std::move(arms);
            if (e.else_arm) j["else"] = expr_json(*e.else_arm);
            break;
        }
        case Expr::Kind::index:
            j["kind"] = "index";
            j["base"] = expr_json(*e.lhs);
            j["subscript"] = expr_json(*e.rhs);
            break;
    }
    return j;
}

json chain_json(const PatternChain& c) {
    json j;
    auto node_json = [](const NodePattern& n) {
        json nj;
        nj["var"] = n.name();
        if (!n.labels.empty()) nj["labels"] = n.labels;
        if (n.has_group) nj["group"] = n.group;
        if (!n.copy_of.empty()) nj["copy_of"] = n.copy_of;
        return nj;
    };
    j["head"] = node_json(c.head);
    json tail = json::array();
    for (const auto& el : c.tail) {
        json ej;
        if (el.kind == ChainElement::Kind::edge) {
            ej["kind"] = "edge";
            ej["var"] = el.edge.name();
            ej["direction"] = el.edge.dir == EdgeDirection::out
                                  ? "out"
                                  : (el.edge.dir == EdgeDirection::in ? "in" : "undirected");
            if (!el.edge.labels.empty()) ej["labels"] = el.edge.labels;
        } else {
            ej["kind"] = "path";
            ej["var"] = el.path.name();
            ej["stored"] = el.path.stored;
            ej["mode"] = el.path.mode == PathSearchMode::all ? "all" : "shortest";
            ej["k"] = el.path.k;
            if (el.path.regex) ej["regex"] = regex_to_string(*el.path.regex);
            if (!el.path.labels.empty()) ej["labels"] = el.path.labels;
            if (!el.path.cost_var.empty()) ej["cost_var"] = el.path.cost_var;
        }
        ej["to"] = node_json(el.to);
        tail.push_back(std::move(ej));
    }
    j["tail"] = std::move(tail);
    return j;
}

json full_json(const FullGraphQuery& f) {
    json j;
    switch (f.op) {
        case FullGraphQuery::Op::basic: {
            j["kind"] = "basic";
            json items = json::array();
            for (const auto& item : f.basic->construct.items) {
                json ij;
                if (item.is_gid) {
                    ij["graph"] = item.gid;
                } else {
                    json ps = json::array();
                    for (const auto& c : item.chains) ps.push_back(chain_json(c));
                    ij["patterns"] = std::move(ps);
                    if (item.when) ij["when"] = expr_json(*item.when);
                }
                items.push_back(std::move(ij));
            }
            j["construct"] = std::move(items);
            json chains = json::array();
            for (const auto& lc : f.basic->match.chains) {
                json cj = chain_json(lc.chain);
                if (lc.on && !lc.on->is_query()) cj["on"] = lc.on->gid;
                chains.push_back(std::move(cj));
            }
            j["match"] = std::move(chains);
            if (f.basic->match.where) j["where"] = expr_json(*f.basic->match.where);
            j["optionals"] = f.basic->match.optionals.size();
            break;
        }
        case FullGraphQuery::Op::graph_ref:
            j["kind"] = "graph_ref";
            j["graph"] = f.gid;
            break;
        default:
            j["kind"] = f.op == FullGraphQuery::Op::union_
                            ? "union"
                            : (f.op == FullGraphQuery::Op::intersect ? "intersect" : "minus");
            j["left"] = full_json(*f.left);
            j["right"] = full_json(*f.right);
            break;
    }
    return j;
}

}  // namespace

std::string render_query(const QueryAst& q) {
    Renderer r;
    r.query(q);
    std::string out = r.os.str();
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string ast_to_json(const QueryAst& q) {
    json j;
    json head = json::array();
    for (const auto& h : q.head) {
        json hj;
        if (h.kind == HeadClause::Kind::path) {
            hj["clause"] = "path";
            hj["name"] = h.path.name;
            json ps = json::array();
            for (const auto& c : h.path.patterns) ps.push_back(chain_json(c));
            hj["patterns"] = std::move(ps);
            if (h.path.where) hj["where"] = expr_json(*h.path.where);
            if (h.path.cost) hj["cost"] = expr_json(*h.path.cost);
        } else {
            hj["clause"] = h.graph.is_view ? "graph_view" : "graph";
            hj["name"] = h.graph.name;
            hj["body"] = json::parse(ast_to_json(*h.graph.body));
        }
        head.push_back(std::move(hj));
    }
    j["head"] = std::move(head);
    if (q.body) j["body"] = full_json(*q.body);
    return j.dump(2);
}

}  // namespace gcore
