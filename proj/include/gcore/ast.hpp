#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gcore/regex.hpp"
#include "gcore/value.hpp"

namespace gcore {

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;
struct QueryAst;
using QueryPtr = std::shared_ptr<QueryAst>;
struct FullGraphQuery;

enum class BinOp { eq, ne, lt, le, gt, ge, add, sub, mul, div_, and_, or_, in, subset_of };
enum class UnOp { not_, neg };
enum class AggFn { count_star, count, min, max, sum, avg, collect };

enum class VarSort { node, edge, path, value };

// ---------------------------------------------------------------------------
// Graph patterns (shared by MATCH, CONSTRUCT and PATH clauses; the construct
// variants carry := assignments and GROUP sets).
// ---------------------------------------------------------------------------

struct PropTest {
    std::string key;
    Value literal;
};
struct PropBind {
    std::string key;
    std::string var;
};

struct NodePattern {
    std::string var;   // empty when anonymous
    std::string anon;  // analysis-assigned name for anonymous elements
    std::vector<std::string> labels;  // MATCH: disjunctive test; CONSTRUCT: labels to attach
    std::vector<PropTest> prop_tests;
    std::vector<PropBind> prop_binds;
    std::vector<std::pair<std::string, ExprPtr>> assignments;  // k := expr (construct)
    bool has_group = false;
    std::vector<std::string> group;
    std::string copy_of;  // (=y)

    const std::string& name() const { return var.empty() ? anon : var; }
};

enum class EdgeDirection { out, in, undirected };

struct EdgePattern {
    std::string var;
    std::string anon;
    EdgeDirection dir = EdgeDirection::out;
    std::vector<std::string> labels;
    std::vector<PropTest> prop_tests;
    std::vector<PropBind> prop_binds;
    std::vector<std::pair<std::string, ExprPtr>> assignments;
    bool has_group = false;
    std::vector<std::string> group;
    std::string copy_of;

    const std::string& name() const { return var.empty() ? anon : var; }
};

enum class PathSearchMode { shortest, all };

struct PathPattern {
    std::string var;
    std::string anon;
    bool stored = false;              // @p
    std::vector<std::string> labels;  // label filter (match) / labels to attach (construct)
    RegexPtr regex;                   // may be null for @p:label patterns
    PathSearchMode mode = PathSearchMode::shortest;
    int64_t k = 1;                    // k SHORTEST
    std::string cost_var;             // COST c
    std::vector<std::pair<std::string, ExprPtr>> assignments;

    const std::string& name() const { return var.empty() ? anon : var; }
    bool is_reachability_test() const { return var.empty() && !stored; }
};

struct ChainElement {
    enum class Kind { edge, path };
    Kind kind = Kind::edge;
    EdgePattern edge;
    PathPattern path;
    NodePattern to;
};

struct PatternChain {
    NodePattern head;
    std::vector<ChainElement> tail;
    int line = 0, col = 0;
};

struct Location {
    std::string gid;                           // named graph, or
    std::shared_ptr<FullGraphQuery> subquery;  // ON ( <full graph query> )
    bool is_query() const { return subquery != nullptr; }
};

struct LocatedChain {
    PatternChain chain;
    std::optional<Location> on;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct CaseArm;

struct Expr {
    enum class Kind {
        literal,
        variable,
        property,        // base.key
        label_check,     // var:L1|L2
        unary,
        binary,
        call,            // builtin(name)(args)
        aggregate,
        exists,          // EXISTS ( query )
        pattern_exists,  // a graph pattern used as a WHERE condition
        case_,
        index,           // lhs[rhs]
    };

    Kind kind = Kind::literal;
    Value literal;
    std::string name;  // variable / property key / builtin name
    std::vector<std::string> labels;
    ExprPtr base;      // property access base, unary operand
    ExprPtr lhs, rhs;  // binary operands; index base + subscript
    UnOp un = UnOp::not_;
    BinOp bin = BinOp::eq;
    AggFn agg = AggFn::count_star;
    std::vector<ExprPtr> args;
    QueryPtr subquery;
    std::vector<LocatedChain> patterns;  // pattern_exists
    std::vector<CaseArm> arms;
    ExprPtr else_arm;
    int line = 0, col = 0;
};

struct CaseArm {
    ExprPtr when;
    ExprPtr then;
};

// ---------------------------------------------------------------------------
// Clauses
// ---------------------------------------------------------------------------

struct OptionalBlock {
    std::vector<LocatedChain> chains;
    ExprPtr where;  // may be null
};

struct MatchAst {
    std::vector<LocatedChain> chains;
    ExprPtr where;  // may be null
    std::vector<OptionalBlock> optionals;
};

struct SetItem {
    std::string var;
    bool is_label = false;
    std::string label;
    std::string key;
    ExprPtr value;
};
struct RemoveItem {
    std::string var;
    bool is_label = false;
    std::string label;
    std::string key;
};

// A graph identifier, or one scope of object constructs. Comma-separated
// construct patterns share their construct variables (so a variable used in
// several patterns names the same new object); a WHEN closes the scope.
struct BasicConstruct {
    bool is_gid = false;
    std::string gid;
    std::vector<PatternChain> chains;  // meaningful when !is_gid
    ExprPtr when;                      // may be null
    std::vector<SetItem> sets;
    std::vector<RemoveItem> removes;
};

struct ConstructAst {
    std::vector<BasicConstruct> items;
};

struct BasicGraphQuery {
    ConstructAst construct;
    MatchAst match;
    // Analysis results: every variable declared by the match clause (the set
    // B) with its sort, plus sorts for construct-only variables.
    std::set<std::string> match_vars;
    std::map<std::string, VarSort> sorts;
};

struct FullGraphQuery {
    enum class Op { basic, graph_ref, union_, intersect, minus };
    Op op = Op::basic;
    std::shared_ptr<BasicGraphQuery> basic;
    std::string gid;  // graph_ref: a named graph used as an operand
    std::shared_ptr<FullGraphQuery> left, right;
};

struct PathClauseAst {
    std::string name;
    std::vector<PatternChain> patterns;  // first chain is the walk pattern
    ExprPtr where;  // may be null
    ExprPtr cost;   // may be null -> 1 per segment
};

struct GraphClauseAst {
    std::string name;
    bool is_view = false;  // GRAPH VIEW vs query-local GRAPH
    QueryPtr body;
};

struct HeadClause {
    enum class Kind { path, graph };
    Kind kind = Kind::path;
    PathClauseAst path;
    GraphClauseAst graph;
};

struct QueryAst {
    std::vector<HeadClause> head;
    std::shared_ptr<FullGraphQuery> body;  // null for bare GRAPH VIEW statements
};

// Parse failure, with position information when available.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ")"),
          line_(line),
          col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_, col_;
};

}  // namespace gcore
