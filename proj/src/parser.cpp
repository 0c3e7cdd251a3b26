#include "gcore/parser.hpp"

#include <algorithm>

#include "lexer.hpp"

namespace gcore {

void analyze_query(QueryAst& q, const std::vector<std::string>& outer_views,
                   const std::map<std::string, VarSort>& outer_sorts);

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

    QueryPtr parse() {
        auto q = parse_query_body();
        expect_end();
        return q;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(size_t off = 1) const {
        return toks_[std::min(pos_ + off, toks_.size() - 1)];
    }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur().line, cur().col);
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_kw(const char* kw) const { return is_keyword(cur(), kw); }
    bool eat(Tok k) {
        if (!at(k)) return false;
        advance();
        return true;
    }
    bool eat_kw(const char* kw) {
        if (!at_kw(kw)) return false;
        advance();
        return true;
    }
    void expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        advance();
    }
    void expect_kw(const char* kw) {
        if (!at_kw(kw)) fail(std::string("expected ") + kw);
        advance();
    }
    std::string expect_ident(const char* what) {
        if (!at(Tok::identifier)) fail(std::string("expected ") + what);
        std::string s = cur().text;
        advance();
        return s;
    }
    void expect_end() {
        eat(Tok::semicolon);
        if (!at(Tok::end)) fail("unexpected trailing input");
    }

    // ---------------- query structure ----------------

    QueryPtr parse_query_body() {
        auto q = std::make_shared<QueryAst>();
        for (;;) {
            if (at_kw("PATH")) {
                HeadClause h;
                h.kind = HeadClause::Kind::path;
                h.path = parse_path_clause();
                q->head.push_back(std::move(h));
            } else if (at_kw("GRAPH") &&
                       (is_keyword(peek(), "VIEW") ||
                        (peek().kind == Tok::identifier && is_keyword(peek(2), "AS")))) {
                HeadClause h;
                h.kind = HeadClause::Kind::graph;
                h.graph = parse_graph_clause();
                q->head.push_back(std::move(h));
            } else {
                break;
            }
        }
        if (at(Tok::end) || at(Tok::semicolon) || at(Tok::rparen)) {
            if (q->head.empty()) fail("expected CONSTRUCT, PATH or GRAPH");
            return q;  // bare head-clause statement (e.g. GRAPH VIEW definition)
        }
        q->body = parse_full_graph_query();
        return q;
    }

    PathClauseAst parse_path_clause() {
        expect_kw("PATH");
        PathClauseAst p;
        p.name = expect_ident("path view name");
        expect(Tok::eq, "'='");
        p.patterns.push_back(parse_pattern_chain());
        while (eat(Tok::comma)) p.patterns.push_back(parse_pattern_chain());
        // WHERE and COST accepted in either order.
        for (int i = 0; i < 2; ++i) {
            if (!p.where && eat_kw("WHERE")) p.where = parse_expr();
            if (!p.cost && eat_kw("COST")) p.cost = parse_expr();
        }
        return p;
    }

    GraphClauseAst parse_graph_clause() {
        expect_kw("GRAPH");
        GraphClauseAst g;
        g.is_view = eat_kw("VIEW");
        g.name = expect_ident("graph name");
        expect_kw("AS");
        expect(Tok::lparen, "'('");
        g.body = parse_query_body();
        expect(Tok::rparen, "')'");
        return g;
    }

    std::shared_ptr<FullGraphQuery> parse_full_graph_query() {
        auto left = parse_query_term();
        for (;;) {
            FullGraphQuery::Op op;
            if (eat_kw("UNION"))
                op = FullGraphQuery::Op::union_;
            else if (eat_kw("INTERSECT"))
                op = FullGraphQuery::Op::intersect;
            else if (eat_kw("MINUS"))
                op = FullGraphQuery::Op::minus;
            else
                break;
            auto right = parse_query_term();
            auto combined = std::make_shared<FullGraphQuery>();
            combined->op = op;
            combined->left = std::move(left);
            combined->right = std::move(right);
            left = std::move(combined);
        }
        return left;
    }

    std::shared_ptr<FullGraphQuery> parse_query_term() {
        auto out = std::make_shared<FullGraphQuery>();
        if (at(Tok::lparen)) {
            advance();
            out = parse_full_graph_query();
            expect(Tok::rparen, "')'");
            return out;
        }
        if (at(Tok::identifier)) {
            out->op = FullGraphQuery::Op::graph_ref;
            out->gid = cur().text;
            advance();
            return out;
        }
        if (!at_kw("CONSTRUCT")) fail("expected CONSTRUCT, PATH or GRAPH");
        out->op = FullGraphQuery::Op::basic;
        out->basic = std::make_shared<BasicGraphQuery>();
        out->basic->construct = parse_construct_clause();
        out->basic->match = parse_match_clause();
        return out;
    }

    // ---------------- CONSTRUCT ----------------

    ConstructAst parse_construct_clause() {
        expect_kw("CONSTRUCT");
        ConstructAst c;
        std::vector<BasicConstruct> raw;
        raw.push_back(parse_basic_construct());
        while (eat(Tok::comma)) raw.push_back(parse_basic_construct());
        // Consecutive pattern items form one construct scope, so a variable
        // occurring in several of them names the same new object. A WHEN
        // closes the scope; graph identifiers stand alone.
        for (auto& item : raw) {
            bool mergeable = !c.items.empty() && !c.items.back().is_gid &&
                             !c.items.back().when && !item.is_gid;
            if (!mergeable) {
                c.items.push_back(std::move(item));
                continue;
            }
            BasicConstruct& acc = c.items.back();
            for (auto& ch : item.chains) acc.chains.push_back(std::move(ch));
            for (auto& s : item.sets) acc.sets.push_back(std::move(s));
            for (auto& r : item.removes) acc.removes.push_back(std::move(r));
            acc.when = item.when;
        }
        return c;
    }

    BasicConstruct parse_basic_construct() {
        BasicConstruct b;
        if (at(Tok::identifier)) {
            b.is_gid = true;
            b.gid = cur().text;
            advance();
            return b;
        }
        b.chains.push_back(parse_pattern_chain(/*construct=*/true));
        for (;;) {
            if (at_kw("SET")) {
                advance();
                SetItem item;
                item.var = expect_ident("variable");
                if (eat(Tok::colon)) {
                    item.is_label = true;
                    item.label = expect_ident("label");
                } else {
                    expect(Tok::dot, "'.'");
                    item.key = expect_ident("property key");
                    expect(Tok::assign, "':='");
                    item.value = parse_expr();
                }
                b.sets.push_back(std::move(item));
            } else if (at_kw("REMOVE")) {
                advance();
                RemoveItem item;
                item.var = expect_ident("variable");
                if (eat(Tok::colon)) {
                    item.is_label = true;
                    item.label = expect_ident("label");
                } else {
                    expect(Tok::dot, "'.'");
                    item.key = expect_ident("property key");
                }
                b.removes.push_back(std::move(item));
            } else {
                break;
            }
        }
        if (eat_kw("WHEN")) b.when = parse_expr();
        return b;
    }

    // ---------------- MATCH ----------------

    MatchAst parse_match_clause() {
        expect_kw("MATCH");
        MatchAst m;
        m.chains = parse_located_chains();
        if (eat_kw("WHERE")) m.where = parse_expr();
        while (at_kw("OPTIONAL")) {
            advance();
            OptionalBlock block;
            block.chains = parse_located_chains();
            if (eat_kw("WHERE")) block.where = parse_expr();
            m.optionals.push_back(std::move(block));
        }
        return m;
    }

    std::vector<LocatedChain> parse_located_chains() {
        std::vector<LocatedChain> out;
        out.push_back(parse_located_chain());
        while (eat(Tok::comma)) out.push_back(parse_located_chain());
        return out;
    }

    LocatedChain parse_located_chain() {
        LocatedChain lc;
        lc.chain = parse_pattern_chain();
        if (eat_kw("ON")) {
            Location loc;
            if (at(Tok::lparen)) {
                advance();
                loc.subquery = parse_full_graph_query();
                expect(Tok::rparen, "')'");
            } else {
                loc.gid = expect_ident("graph name");
            }
            lc.on = std::move(loc);
        }
        return lc;
    }

    // ---------------- patterns ----------------

    PatternChain parse_pattern_chain(bool construct = false) {
        PatternChain chain;
        chain.line = cur().line;
        chain.col = cur().col;
        chain.head = parse_node_pattern(construct);
        for (;;) {
            if (at(Tok::minus) && (peek().kind == Tok::lbracket || peek().kind == Tok::slash)) {
                advance();
                ChainElement el;
                if (eat(Tok::lbracket)) {
                    el.kind = ChainElement::Kind::edge;
                    el.edge = parse_edge_inner(construct);
                    expect(Tok::rbracket, "']'");
                    if (eat(Tok::arrow_right)) {
                        el.edge.dir = EdgeDirection::out;
                    } else if (eat(Tok::minus)) {
                        el.edge.dir = EdgeDirection::undirected;
                    } else {
                        fail("expected '->' or '-' after edge pattern");
                    }
                } else {
                    expect(Tok::slash, "'/'");
                    el.kind = ChainElement::Kind::path;
                    el.path = parse_path_inner(construct);
                    expect(Tok::slash, "'/'");
                    expect(Tok::arrow_right, "'->'");
                }
                el.to = parse_node_pattern(construct);
                chain.tail.push_back(std::move(el));
            } else if (at(Tok::arrow_left)) {
                advance();
                ChainElement el;
                if (eat(Tok::lbracket)) {
                    el.kind = ChainElement::Kind::edge;
                    el.edge = parse_edge_inner(construct);
                    el.edge.dir = EdgeDirection::in;
                    expect(Tok::rbracket, "']'");
                    expect(Tok::minus, "'-'");
                } else {
                    fail("expected '[' after '<-'");
                }
                el.to = parse_node_pattern(construct);
                chain.tail.push_back(std::move(el));
            } else {
                break;
            }
        }
        return chain;
    }

    NodePattern parse_node_pattern(bool construct) {
        expect(Tok::lparen, "'('");
        NodePattern n;
        if (eat(Tok::eq)) {
            if (!construct) fail("copy pattern '=' is only allowed in CONSTRUCT");
            n.copy_of = expect_ident("variable");
        }
        if (at(Tok::identifier) && !at_kw("GROUP")) {
            n.var = cur().text;
            advance();
        }
        if (at_kw("GROUP")) {
            if (!construct) fail("GROUP is only allowed in CONSTRUCT");
            advance();
            n.has_group = true;
            n.group.push_back(expect_ident("grouping variable"));
            while (at(Tok::comma) && peek().kind == Tok::identifier) {
                advance();
                n.group.push_back(expect_ident("grouping variable"));
            }
        }
        if (eat(Tok::colon)) {
            n.labels.push_back(expect_ident("label"));
            while (eat(Tok::pipe)) n.labels.push_back(expect_ident("label"));
        }
        if (at(Tok::lbrace)) parse_prop_block(construct, n.prop_tests, n.prop_binds, n.assignments);
        expect(Tok::rparen, "')'");
        return n;
    }

    EdgePattern parse_edge_inner(bool construct) {
        EdgePattern e;
        if (eat(Tok::eq)) {
            if (!construct) fail("copy pattern '=' is only allowed in CONSTRUCT");
            e.copy_of = expect_ident("variable");
        }
        if (at(Tok::identifier) && !at_kw("GROUP")) {
            e.var = cur().text;
            advance();
        }
        if (at_kw("GROUP")) {
            if (!construct) fail("GROUP is only allowed in CONSTRUCT");
            advance();
            e.has_group = true;
            e.group.push_back(expect_ident("grouping variable"));
            while (at(Tok::comma) && peek().kind == Tok::identifier) {
                advance();
                e.group.push_back(expect_ident("grouping variable"));
            }
        }
        if (eat(Tok::colon)) {
            e.labels.push_back(expect_ident("label"));
            while (eat(Tok::pipe)) e.labels.push_back(expect_ident("label"));
        }
        if (at(Tok::lbrace)) parse_prop_block(construct, e.prop_tests, e.prop_binds, e.assignments);
        return e;
    }

    PathPattern parse_path_inner(bool construct) {
        PathPattern p;
        if (at(Tok::int_lit)) {
            p.k = cur().int_val;
            advance();
            expect_kw("SHORTEST");
            p.mode = PathSearchMode::shortest;
        } else if (eat_kw("SHORTEST")) {
            p.mode = PathSearchMode::shortest;
        } else if (eat_kw("ALL")) {
            p.mode = PathSearchMode::all;
            p.k = 0;
        }
        if (eat(Tok::at)) p.stored = true;
        if (at(Tok::identifier)) {
            p.var = cur().text;
            advance();
        }
        if (eat(Tok::colon)) {
            p.labels.push_back(expect_ident("label"));
            while (eat(Tok::pipe)) p.labels.push_back(expect_ident("label"));
        }
        if (at(Tok::lbrace)) {
            std::vector<PropTest> tests;
            std::vector<PropBind> binds;
            parse_prop_block(construct, tests, binds, p.assignments);
            if (!tests.empty() || !binds.empty())
                fail("path patterns take ':=' assignments only");
        }
        if (eat(Tok::lt)) {
            p.regex = parse_regex_until_close();
        }
        if (eat_kw("COST")) p.cost_var = expect_ident("cost variable");
        return p;
    }

    void parse_prop_block(bool construct, std::vector<PropTest>& tests,
                          std::vector<PropBind>& binds,
                          std::vector<std::pair<std::string, ExprPtr>>& assignments) {
        expect(Tok::lbrace, "'{'");
        for (;;) {
            std::string key = expect_ident("property key");
            if (at(Tok::assign)) {
                if (!construct) fail("':=' assignments are only allowed in CONSTRUCT");
                advance();
                assignments.emplace_back(key, parse_expr());
            } else if (at(Tok::eq) || at(Tok::colon)) {
                // ':' tolerated as a synonym of '=' in MATCH property forms.
                if (construct) fail("use ':=' for property assignments in CONSTRUCT");
                advance();
                if (at(Tok::identifier)) {
                    binds.push_back({key, cur().text});
                    advance();
                } else {
                    tests.push_back({key, parse_literal()});
                }
            } else {
                fail("expected '=', ':' or ':=' in property block");
            }
            if (!eat(Tok::comma)) break;
        }
        expect(Tok::rbrace, "'}'");
    }

    Value parse_literal() {
        if (at(Tok::string_lit)) {
            Value v = Value::string(cur().text);
            advance();
            return v;
        }
        if (at(Tok::int_lit)) {
            Value v = Value::integer(cur().int_val);
            advance();
            return v;
        }
        if (at(Tok::real_lit)) {
            Value v = Value::real(cur().real_val);
            advance();
            return v;
        }
        if (at_kw("TRUE")) {
            advance();
            return Value::boolean(true);
        }
        if (at_kw("FALSE")) {
            advance();
            return Value::boolean(false);
        }
        bool neg = false;
        if (at(Tok::minus)) {
            advance();
            neg = true;
            if (at(Tok::int_lit)) {
                Value v = Value::integer(-cur().int_val);
                advance();
                return v;
            }
            if (at(Tok::real_lit)) {
                Value v = Value::real(-cur().real_val);
                advance();
                return v;
            }
        }
        (void)neg;
        fail("expected a literal value");
    }

    // ---------------- label regexes ----------------
    //
    // Inside -/< ... >/- : ':l' and bare 'l' are edge labels (the ASCII-art
    // listings write <:knows*>), a trailing '-' inverts, '(:l)' is a node
    // label test, '_' the wildcard and '~name' a path view reference.

    RegexPtr parse_regex_until_close() {
        RegexPtr r = parse_regex_alt();
        if (eat(Tok::gt)) return r;
        fail("expected '>' closing the label regex");
    }

    RegexPtr parse_regex_alt() {
        RegexPtr left = parse_regex_seq();
        while (eat(Tok::plus)) {
            RegexPtr right = parse_regex_seq();
            left = LabelRegex::alternation(std::move(left), std::move(right));
        }
        return left;
    }

    bool regex_atom_ahead() const {
        return at(Tok::underscore) || at(Tok::identifier) || at(Tok::colon) || at(Tok::tilde) ||
               at(Tok::lparen);
    }

    RegexPtr parse_regex_seq() {
        RegexPtr left = parse_regex_postfix();
        while (regex_atom_ahead()) {
            RegexPtr right = parse_regex_postfix();
            left = LabelRegex::concatenation(std::move(left), std::move(right));
        }
        return left;
    }

    RegexPtr parse_regex_postfix() {
        RegexPtr r = parse_regex_atom();
        for (;;) {
            if (at(Tok::minus)) {
                advance();
                if (r->kind != LabelRegex::Kind::edge_label)
                    fail("'-' inversion applies to edge labels only");
                r = LabelRegex::edge_label_inverse(r->label);
            } else if (at(Tok::arrow_right)) {
                // 'label->' is 'label-' immediately followed by the closing
                // '>' of the regex; split the token.
                if (r->kind != LabelRegex::Kind::edge_label)
                    fail("'-' inversion applies to edge labels only");
                r = LabelRegex::edge_label_inverse(r->label);
                toks_[pos_].kind = Tok::gt;
                toks_[pos_].text = ">";
            } else if (at(Tok::star)) {
                advance();
                r = LabelRegex::star(std::move(r));
            } else {
                break;
            }
        }
        return r;
    }

    RegexPtr parse_regex_atom() {
        if (eat(Tok::underscore)) return LabelRegex::wildcard();
        if (eat(Tok::tilde)) return LabelRegex::view_ref(expect_ident("path view name"));
        if (eat(Tok::colon)) return LabelRegex::edge_label(expect_ident("edge label"));
        if (at(Tok::identifier)) {
            std::string l = cur().text;
            advance();
            return LabelRegex::edge_label(l);
        }
        if (eat(Tok::lparen)) {
            if (at(Tok::colon) && peek().kind == Tok::identifier && peek(2).kind == Tok::rparen) {
                advance();
                std::string l = expect_ident("node label");
                expect(Tok::rparen, "')'");
                return LabelRegex::node_label(l);
            }
            RegexPtr r = parse_regex_alt();
            expect(Tok::rparen, "')'");
            return r;
        }
        fail("expected a label regex");
    }

    // ---------------- expressions ----------------

    ExprPtr make_expr(Expr::Kind k) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->line = cur().line;
        e->col = cur().col;
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr left = parse_and();
        while (at_kw("OR")) {
            advance();
            auto e = make_expr(Expr::Kind::binary);
            e->bin = BinOp::or_;
            e->lhs = std::move(left);
            e->rhs = parse_and();
            left = std::move(e);
        }
        return left;
    }

    ExprPtr parse_and() {
        ExprPtr left = parse_not();
        while (at_kw("AND")) {
            advance();
            auto e = make_expr(Expr::Kind::binary);
            e->bin = BinOp::and_;
            e->lhs = std::move(left);
            e->rhs = parse_not();
            left = std::move(e);
        }
        return left;
    }

    ExprPtr parse_not() {
        if (at_kw("NOT")) {
            advance();
            auto e = make_expr(Expr::Kind::unary);
            e->un = UnOp::not_;
            e->base = parse_not();
            return e;
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr left = parse_additive();
        BinOp op;
        if (at(Tok::eq))
            op = BinOp::eq;
        else if (at(Tok::ne))
            op = BinOp::ne;
        else if (at(Tok::lt))
            op = BinOp::lt;
        else if (at(Tok::le))
            op = BinOp::le;
        else if (at(Tok::gt))
            op = BinOp::gt;
        else if (at(Tok::ge))
            op = BinOp::ge;
        else if (at_kw("IN"))
            op = BinOp::in;
        else if (at_kw("SUBSET"))
            op = BinOp::subset_of;
        else
            return left;
        advance();
        if (op == BinOp::subset_of) expect_kw("OF");
        auto e = make_expr(Expr::Kind::binary);
        e->bin = op;
        e->lhs = std::move(left);
        e->rhs = parse_additive();
        return e;
    }

    ExprPtr parse_additive() {
        ExprPtr left = parse_multiplicative();
        for (;;) {
            BinOp op;
            if (at(Tok::plus))
                op = BinOp::add;
            else if (at(Tok::minus))
                op = BinOp::sub;
            else
                break;
            advance();
            auto e = make_expr(Expr::Kind::binary);
            e->bin = op;
            e->lhs = std::move(left);
            e->rhs = parse_multiplicative();
            left = std::move(e);
        }
        return left;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr left = parse_unary();
        for (;;) {
            BinOp op;
            if (at(Tok::star))
                op = BinOp::mul;
            else if (at(Tok::slash))
                op = BinOp::div_;
            else
                break;
            advance();
            auto e = make_expr(Expr::Kind::binary);
            e->bin = op;
            e->lhs = std::move(left);
            e->rhs = parse_unary();
            left = std::move(e);
        }
        return left;
    }

    ExprPtr parse_unary() {
        if (at(Tok::minus)) {
            advance();
            auto e = make_expr(Expr::Kind::unary);
            e->un = UnOp::neg;
            e->base = parse_unary();
            return e;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr base = parse_primary();
        for (;;) {
            if (at(Tok::dot)) {
                advance();
                auto e = make_expr(Expr::Kind::property);
                e->base = std::move(base);
                e->name = expect_ident("property key");
                base = std::move(e);
            } else if (at(Tok::lbracket)) {
                advance();
                auto e = make_expr(Expr::Kind::index);
                e->lhs = std::move(base);
                e->rhs = parse_expr();
                expect(Tok::rbracket, "']'");
                base = std::move(e);
            } else if (at(Tok::colon) && base->kind == Expr::Kind::variable) {
                advance();
                auto e = make_expr(Expr::Kind::label_check);
                e->name = base->name;
                e->labels.push_back(expect_ident("label"));
                while (eat(Tok::pipe)) e->labels.push_back(expect_ident("label"));
                base = std::move(e);
            } else {
                break;
            }
        }
        return base;
    }

    std::optional<AggFn> agg_fn(const std::string& name) const {
        std::string up;
        for (char c : name) up.push_back(static_cast<char>(std::toupper(c)));
        if (up == "COUNT") return AggFn::count;
        if (up == "MIN") return AggFn::min;
        if (up == "MAX") return AggFn::max;
        if (up == "SUM") return AggFn::sum;
        if (up == "AVG") return AggFn::avg;
        if (up == "COLLECT") return AggFn::collect;
        return std::nullopt;
    }

    ExprPtr parse_primary() {
        if (at(Tok::string_lit) || at(Tok::int_lit) || at(Tok::real_lit) || at_kw("TRUE") ||
            at_kw("FALSE")) {
            auto e = make_expr(Expr::Kind::literal);
            e->literal = parse_literal();
            return e;
        }
        if (at_kw("CASE")) return parse_case();
        if (at_kw("EXISTS")) {
            advance();
            expect(Tok::lparen, "'('");
            auto e = make_expr(Expr::Kind::exists);
            e->subquery = parse_query_body();
            expect(Tok::rparen, "')'");
            return e;
        }
        if (at(Tok::identifier)) {
            std::string name = cur().text;
            if (peek().kind == Tok::lparen) {
                advance();
                advance();
                if (auto fn = agg_fn(name)) {
                    auto e = make_expr(Expr::Kind::aggregate);
                    if (*fn == AggFn::count && at(Tok::star)) {
                        advance();
                        e->agg = AggFn::count_star;
                    } else {
                        e->agg = *fn;
                        e->args.push_back(parse_expr());
                    }
                    expect(Tok::rparen, "')'");
                    return e;
                }
                auto e = make_expr(Expr::Kind::call);
                e->name = name;
                if (!at(Tok::rparen)) {
                    e->args.push_back(parse_expr());
                    while (eat(Tok::comma)) e->args.push_back(parse_expr());
                }
                expect(Tok::rparen, "')'");
                return e;
            }
            auto e = make_expr(Expr::Kind::variable);
            e->name = name;
            advance();
            return e;
        }
        if (at(Tok::lparen)) {
            // A parenthesis can open a graph pattern used as an existential
            // condition, or an ordinary parenthesized expression.
            size_t save = pos_;
            if (auto pattern = try_parse_pattern_condition()) return pattern;
            pos_ = save;
            advance();
            ExprPtr e = parse_expr();
            expect(Tok::rparen, "')'");
            return e;
        }
        fail("expected an expression");
    }

    ExprPtr try_parse_pattern_condition() {
        try {
            PatternChain chain = parse_pattern_chain(/*construct=*/false);
            if (chain.tail.empty()) return nullptr;  // plain parenthesized expr
            auto e = make_expr(Expr::Kind::pattern_exists);
            LocatedChain lc;
            lc.chain = std::move(chain);
            e->patterns.push_back(std::move(lc));
            return e;
        } catch (const ParseError&) {
            return nullptr;
        }
    }

    ExprPtr parse_case() {
        expect_kw("CASE");
        auto e = make_expr(Expr::Kind::case_);
        while (at_kw("WHEN")) {
            advance();
            CaseArm arm;
            arm.when = parse_expr();
            expect_kw("THEN");
            arm.then = parse_expr();
            e->arms.push_back(std::move(arm));
        }
        if (e->arms.empty()) fail("CASE requires at least one WHEN arm");
        if (eat_kw("ELSE")) e->else_arm = parse_expr();
        expect_kw("END");
        return e;
    }
};

}  // namespace

QueryPtr parse_query(const std::string& text) {
    Parser p(text);
    QueryPtr q = p.parse();
    analyze_query(*q, {}, {});
    return q;
}

}  // namespace gcore
