#include "gcore/expr_eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace gcore {

namespace {
const Value kUnbound{};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}
}  // namespace

void AmbientGraph::add(std::shared_ptr<const Graph> g) {
    for (const auto& have : graphs_)
        if (have == g) return;
    graphs_.push_back(std::move(g));
}

const IdSpace* AmbientGraph::ids() const {
    return graphs_.empty() ? nullptr : graphs_[0]->ids().get();
}

LabelSet AmbientGraph::labels(ObjId id) const {
    LabelSet out;
    for (const auto& g : graphs_) {
        const LabelSet& ls = g->labels(id);
        out.insert(ls.begin(), ls.end());
    }
    return out;
}

ValueSet AmbientGraph::properties(ObjId id, const std::string& key) const {
    ValueSet out;
    for (const auto& g : graphs_) {
        const ValueSet& vs = g->properties(id, key);
        out.insert(out.end(), vs.begin(), vs.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Value& a, const Value& b) { return a.compare(b) == 0; }),
              out.end());
    return out;
}

std::vector<std::pair<std::string, ValueSet>> AmbientGraph::all_properties(ObjId id) const {
    std::map<std::string, ValueSet> merged;
    for (const auto& g : graphs_) {
        for (const auto& [key, vs] : g->all_properties(id)) {
            auto& slot = merged[key];
            slot.insert(slot.end(), vs.begin(), vs.end());
        }
    }
    std::vector<std::pair<std::string, ValueSet>> out;
    for (auto& [key, vs] : merged) {
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end(),
                             [](const Value& a, const Value& b) { return a.compare(b) == 0; }),
                 vs.end());
        out.emplace_back(key, std::move(vs));
    }
    return out;
}

std::optional<EdgeEndpoints> AmbientGraph::find_endpoints(ObjId edge) const {
    for (const auto& g : graphs_)
        if (g->edges().count(edge)) return g->endpoints(edge);
    return std::nullopt;
}

const std::vector<ObjId>* AmbientGraph::find_path_body(ObjId path) const {
    for (const auto& g : graphs_)
        if (g->paths().count(path)) return &g->path_body(path);
    if (overlay_) {
        auto it = overlay_->find(path);
        if (it != overlay_->end() && !it->second.all_paths) return &it->second.body;
    }
    return nullptr;
}

const OverlayPath* AmbientGraph::find_overlay(ObjId path) const {
    if (!overlay_) return nullptr;
    auto it = overlay_->find(path);
    return it == overlay_->end() ? nullptr : &it->second;
}

namespace {

Value eval_binary(const Expr& e, const Binding& b, const ExprContext& ctx);

Value make_bool(bool v) { return Value::boolean(v); }

Value numeric_binary(BinOp op, const Value& l0, const Value& r0) {
    Value l = l0.scalarized(), r = r0.scalarized();
    // Absent properties (empty sets) propagate like unbound values.
    if (l.is_set() && l.elements().empty()) return kUnbound;
    if (r.is_set() && r.elements().empty()) return kUnbound;
    if (op == BinOp::add && l.kind() == Value::Kind::string && r.kind() == Value::Kind::string)
        return Value::string(l.as_string() + r.as_string());
    if (!l.is_numeric() || !r.is_numeric())
        throw EvalError("arithmetic requires numeric operands");
    bool both_int = l.kind() == Value::Kind::integer && r.kind() == Value::Kind::integer;
    switch (op) {
        case BinOp::add:
            return both_int ? Value::integer(l.as_integer() + r.as_integer())
                            : Value::real(l.as_real() + r.as_real());
        case BinOp::sub:
            return both_int ? Value::integer(l.as_integer() - r.as_integer())
                            : Value::real(l.as_real() - r.as_real());
        case BinOp::mul:
            return both_int ? Value::integer(l.as_integer() * r.as_integer())
                            : Value::real(l.as_real() * r.as_real());
        case BinOp::div_: {
            // Integer division yields a real; cost expressions depend on it.
            double d = r.as_real();
            if (d == 0.0) throw EvalError("division by zero");
            return Value::real(l.as_real() / d);
        }
        default: throw EvalError("bad arithmetic operator");
    }
}

Value eval_call(const Expr& e, const Binding& b, const ExprContext& ctx) {
    std::string fn = lower(e.name);
    auto arg = [&](size_t i) { return eval_expression(*e.args.at(i), b, ctx); };
    if (fn == "labels") {
        Value v = arg(0);
        if (v.is_unbound()) return kUnbound;
        std::vector<Value> out;
        for (const auto& l : ctx.graph->labels(v.as_object())) out.push_back(Value::string(l));
        return Value::set(std::move(out));
    }
    if (fn == "nodes" || fn == "edges") {
        Value v = arg(0);
        if (v.is_unbound()) return kUnbound;
        ObjId id = v.as_object();
        if (id.kind != ObjKind::path) throw EvalError(fn + "() expects a path");
        const std::vector<ObjId>* body = ctx.graph->find_path_body(id);
        if (!body) throw EvalError("unknown path");
        std::vector<Value> out;
        size_t start = fn == "nodes" ? 0 : 1;
        for (size_t i = start; i < body->size(); i += 2) out.push_back(Value::object((*body)[i]));
        return Value::list(std::move(out));
    }
    if (fn == "size" || fn == "length") {
        Value v = arg(0);
        if (v.is_unbound()) return kUnbound;
        if (v.is_set() || v.is_list()) return Value::integer(static_cast<int64_t>(v.elements().size()));
        if (v.kind() == Value::Kind::string)
            return Value::integer(static_cast<int64_t>(v.as_string().size()));
        throw EvalError("size() expects a collection or string");
    }
    if (fn == "tointeger") {
        Value v = arg(0).scalarized();
        if (v.is_unbound()) return kUnbound;
        if (v.kind() == Value::Kind::integer) return v;
        if (v.kind() == Value::Kind::real) return Value::integer(static_cast<int64_t>(v.as_real()));
        if (v.kind() == Value::Kind::string) {
            try {
                return Value::integer(std::stoll(v.as_string()));
            } catch (...) {
                throw EvalError("toInteger(): cannot parse '" + v.as_string() + "'");
            }
        }
        throw EvalError("toInteger() expects a scalar");
    }
    if (fn == "toreal") {
        Value v = arg(0).scalarized();
        if (v.is_unbound()) return kUnbound;
        if (v.is_numeric()) return Value::real(v.as_real());
        if (v.kind() == Value::Kind::string) {
            try {
                return Value::real(std::stod(v.as_string()));
            } catch (...) {
                throw EvalError("toReal(): cannot parse '" + v.as_string() + "'");
            }
        }
        throw EvalError("toReal() expects a scalar");
    }
    if (fn == "tostring") {
        Value v = arg(0).scalarized();
        if (v.is_unbound()) return kUnbound;
        return Value::string(v.to_display(ctx.graph ? ctx.graph->ids() : nullptr));
    }
    if (fn == "date") {
        Value v = arg(0).scalarized();
        if (v.is_unbound()) return kUnbound;
        return Value::date(v.as_string());
    }
    throw EvalError("unknown function '" + e.name + "'");
}

Value eval_binary(const Expr& e, const Binding& b, const ExprContext& ctx) {
    if (e.bin == BinOp::and_ || e.bin == BinOp::or_) {
        Value l = eval_expression(*e.lhs, b, ctx);
        // Short-circuit on the determining value.
        if (e.bin == BinOp::and_ && l.kind() == Value::Kind::boolean && !l.as_bool())
            return make_bool(false);
        if (e.bin == BinOp::or_ && l.kind() == Value::Kind::boolean && l.as_bool())
            return make_bool(true);
        Value r = eval_expression(*e.rhs, b, ctx);
        if (e.bin == BinOp::and_) {
            if (r.kind() == Value::Kind::boolean && !r.as_bool()) return make_bool(false);
            if (l.is_unbound() || r.is_unbound()) return kUnbound;
            return make_bool(l.as_bool() && r.as_bool());
        }
        if (r.kind() == Value::Kind::boolean && r.as_bool()) return make_bool(true);
        if (l.is_unbound() || r.is_unbound()) return kUnbound;
        return make_bool(l.as_bool() || r.as_bool());
    }

    Value l = eval_expression(*e.lhs, b, ctx);
    Value r = eval_expression(*e.rhs, b, ctx);
    switch (e.bin) {
        case BinOp::eq:
        case BinOp::ne: {
            if (l.is_unbound() || r.is_unbound()) return kUnbound;
            bool eq = compare_multi_valued(SetCompareOp::equal, l, r);
            return make_bool(e.bin == BinOp::eq ? eq : !eq);
        }
        case BinOp::lt:
        case BinOp::le:
        case BinOp::gt:
        case BinOp::ge: {
            if (l.is_unbound() || r.is_unbound()) return kUnbound;
            auto c = query_compare(l, r);
            if (!c) return make_bool(false);
            switch (e.bin) {
                case BinOp::lt: return make_bool(*c < 0);
                case BinOp::le: return make_bool(*c <= 0);
                case BinOp::gt: return make_bool(*c > 0);
                default: return make_bool(*c >= 0);
            }
        }
        case BinOp::in:
            if (l.is_unbound() || r.is_unbound()) return kUnbound;
            return make_bool(compare_multi_valued(SetCompareOp::in, l, r));
        case BinOp::subset_of:
            if (l.is_unbound() || r.is_unbound()) return kUnbound;
            return make_bool(compare_multi_valued(SetCompareOp::subset_of, l, r));
        default:
            if (l.is_unbound() || r.is_unbound()) return kUnbound;
            return numeric_binary(e.bin, l, r);
    }
}

}  // namespace

Value eval_expression(const Expr& e, const Binding& b, const ExprContext& ctx) {
    switch (e.kind) {
        case Expr::Kind::literal: return e.literal;
        case Expr::Kind::variable: return b.get(e.name);
        case Expr::Kind::property: {
            Value base = eval_expression(*e.base, b, ctx);
            // Absent property and unbound subject both read as the empty set.
            if (base.is_unbound()) return Value::empty_set();
            return Value::set(ctx.graph->properties(base.as_object(), e.name));
        }
        case Expr::Kind::label_check: {
            const Value& v = b.get(e.name);
            if (v.is_unbound()) return kUnbound;
            LabelSet have = ctx.graph->labels(v.as_object());
            for (const auto& l : e.labels)
                if (have.count(l)) return Value::boolean(true);
            return Value::boolean(false);
        }
        case Expr::Kind::unary: {
            Value v = eval_expression(*e.base, b, ctx);
            if (v.is_unbound()) return kUnbound;
            if (e.un == UnOp::not_) {
                if (v.kind() != Value::Kind::boolean) throw EvalError("NOT expects a boolean");
                return Value::boolean(!v.as_bool());
            }
            Value s = v.scalarized();
            if (s.kind() == Value::Kind::integer) return Value::integer(-s.as_integer());
            if (s.kind() == Value::Kind::real) return Value::real(-s.as_real());
            throw EvalError("negation expects a number");
        }
        case Expr::Kind::binary: return eval_binary(e, b, ctx);
        case Expr::Kind::call: return eval_call(e, b, ctx);
        case Expr::Kind::aggregate:
            if (!ctx.group)
                throw EvalError("aggregation outside of a CONSTRUCT group");
            return eval_aggregate(e.agg, e.args.empty() ? nullptr : e.args[0].get(), *ctx.group,
                                  ctx);
        case Expr::Kind::exists:
            if (!ctx.hooks || !ctx.hooks->exists) throw EvalError("EXISTS not available here");
            return Value::boolean(ctx.hooks->exists(*e.subquery, b));
        case Expr::Kind::pattern_exists:
            if (!ctx.hooks || !ctx.hooks->pattern_exists)
                throw EvalError("pattern conditions not available here");
            return Value::boolean(ctx.hooks->pattern_exists(e.patterns, b));
        case Expr::Kind::case_: {
            for (const auto& arm : e.arms) {
                Value c = eval_expression(*arm.when, b, ctx);
                if (c.is_true()) return eval_expression(*arm.then, b, ctx);
            }
            if (e.else_arm) return eval_expression(*e.else_arm, b, ctx);
            return kUnbound;
        }
        case Expr::Kind::index: {
            Value base = eval_expression(*e.lhs, b, ctx);
            Value idx = eval_expression(*e.rhs, b, ctx).scalarized();
            if (base.is_unbound() || idx.is_unbound()) return kUnbound;
            if (!base.is_list() && !base.is_set()) throw EvalError("indexing expects a list");
            if (idx.kind() != Value::Kind::integer) throw EvalError("index must be an integer");
            int64_t i = idx.as_integer();
            const auto& elems = base.elements();
            if (i < 0 || static_cast<size_t>(i) >= elems.size()) return kUnbound;
            return elems[static_cast<size_t>(i)];
        }
    }
    return kUnbound;
}

Value eval_aggregate(AggFn fn, const Expr* arg, const BindingSet& group, const ExprContext& ctx) {
    if (fn == AggFn::count_star) return Value::integer(static_cast<int64_t>(group.size()));
    if (!arg) throw EvalError("aggregate requires an argument");

    ExprContext row_ctx = ctx;
    row_ctx.group = nullptr;
    std::vector<Value> values;
    for (size_t i = 0; i < group.size(); ++i) {
        Value v = eval_expression(*arg, group.row(i), row_ctx);
        if (!v.is_unbound()) values.push_back(v);
    }

    switch (fn) {
        case AggFn::count: return Value::integer(static_cast<int64_t>(values.size()));
        case AggFn::collect: return Value::list(std::move(values));
        case AggFn::min:
        case AggFn::max: {
            if (values.empty()) return Value{};
            Value best = values[0].scalarized();
            for (size_t i = 1; i < values.size(); ++i) {
                Value v = values[i].scalarized();
                auto c = query_compare(v, best);
                if (!c) throw EvalError("MIN/MAX over values of mixed types");
                if ((fn == AggFn::min && *c < 0) || (fn == AggFn::max && *c > 0)) best = v;
            }
            return best;
        }
        case AggFn::sum:
        case AggFn::avg: {
            if (values.empty()) return Value{};
            bool all_int = true;
            double total = 0;
            int64_t itotal = 0;
            for (const auto& v0 : values) {
                Value v = v0.scalarized();
                if (!v.is_numeric()) throw EvalError("SUM/AVG over non-numeric values");
                if (v.kind() != Value::Kind::integer) all_int = false;
                total += v.as_real();
                if (v.kind() == Value::Kind::integer) itotal += v.as_integer();
            }
            if (fn == AggFn::sum)
                return all_int ? Value::integer(itotal) : Value::real(total);
            return Value::real(total / static_cast<double>(values.size()));
        }
        default: throw EvalError("bad aggregate");
    }
}

}  // namespace gcore
