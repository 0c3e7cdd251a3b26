#include "gcore/regex.hpp"

#include <algorithm>

namespace gcore {

namespace {
RegexPtr make(LabelRegex::Kind k, std::string label, RegexPtr l, RegexPtr r) {
    auto re = std::make_shared<LabelRegex>();
    re->kind = k;
    re->label = std::move(label);
    re->left = std::move(l);
    re->right = std::move(r);
    return re;
}
}  // namespace

RegexPtr LabelRegex::wildcard() { return make(Kind::wildcard, "", nullptr, nullptr); }
RegexPtr LabelRegex::edge_label(std::string l) { return make(Kind::edge_label, std::move(l), nullptr, nullptr); }
RegexPtr LabelRegex::edge_label_inverse(std::string l) { return make(Kind::edge_label_inverse, std::move(l), nullptr, nullptr); }
RegexPtr LabelRegex::node_label(std::string l) { return make(Kind::node_label, std::move(l), nullptr, nullptr); }
RegexPtr LabelRegex::view_ref(std::string name) { return make(Kind::view_ref, std::move(name), nullptr, nullptr); }
RegexPtr LabelRegex::alternation(RegexPtr a, RegexPtr b) { return make(Kind::alternation, "", std::move(a), std::move(b)); }
RegexPtr LabelRegex::concatenation(RegexPtr a, RegexPtr b) { return make(Kind::concatenation, "", std::move(a), std::move(b)); }
RegexPtr LabelRegex::star(RegexPtr a) { return make(Kind::star, "", std::move(a), nullptr); }

std::string regex_to_string(const LabelRegex& r) {
    switch (r.kind) {
        case LabelRegex::Kind::wildcard: return "_";
        case LabelRegex::Kind::edge_label: return ":" + r.label;
        case LabelRegex::Kind::edge_label_inverse: return ":" + r.label + "-";
        case LabelRegex::Kind::node_label: return "(:" + r.label + ")";
        case LabelRegex::Kind::view_ref: return "~" + r.label;
        case LabelRegex::Kind::alternation:
            return "(" + regex_to_string(*r.left) + " + " + regex_to_string(*r.right) + ")";
        case LabelRegex::Kind::concatenation:
            return regex_to_string(*r.left) + " " + regex_to_string(*r.right);
        case LabelRegex::Kind::star: {
            bool atom = r.left->kind == LabelRegex::Kind::wildcard ||
                        r.left->kind == LabelRegex::Kind::edge_label ||
                        r.left->kind == LabelRegex::Kind::node_label ||
                        r.left->kind == LabelRegex::Kind::view_ref ||
                        r.left->kind == LabelRegex::Kind::alternation;
            std::string inner = regex_to_string(*r.left);
            return atom ? inner + "*" : "(" + inner + ")*";
        }
    }
    return "?";
}

void collect_view_refs(const LabelRegex& r, std::vector<std::string>& out) {
    if (r.kind == LabelRegex::Kind::view_ref) out.push_back(r.label);
    if (r.left) collect_view_refs(*r.left, out);
    if (r.right) collect_view_refs(*r.right, out);
}

namespace {

struct Builder {
    PathAutomaton a;

    int fresh() {
        a.transitions.emplace_back();
        a.accepting.push_back(false);
        return static_cast<int>(a.transitions.size()) - 1;
    }
    void add(int from, NfaTransition::Sym sym, const std::string& label, int to) {
        a.transitions[from].push_back({sym, label, to});
    }

    // Returns the (entry, exit) fragment for r.
    std::pair<int, int> build(const LabelRegex& r) {
        using K = LabelRegex::Kind;
        switch (r.kind) {
            case K::wildcard: {
                int s = fresh(), t = fresh();
                add(s, NfaTransition::Sym::wild, "", t);
                return {s, t};
            }
            case K::edge_label: {
                int s = fresh(), t = fresh();
                add(s, NfaTransition::Sym::edge_fwd, r.label, t);
                return {s, t};
            }
            case K::edge_label_inverse: {
                int s = fresh(), t = fresh();
                add(s, NfaTransition::Sym::edge_bwd, r.label, t);
                return {s, t};
            }
            case K::node_label: {
                int s = fresh(), t = fresh();
                add(s, NfaTransition::Sym::node_label, r.label, t);
                return {s, t};
            }
            case K::view_ref: {
                int s = fresh(), t = fresh();
                add(s, NfaTransition::Sym::view, r.label, t);
                a.has_views = true;
                return {s, t};
            }
            case K::alternation: {
                auto [ls, lt] = build(*r.left);
                auto [rs, rt] = build(*r.right);
                int s = fresh(), t = fresh();
                add(s, NfaTransition::Sym::eps, "", ls);
                add(s, NfaTransition::Sym::eps, "", rs);
                add(lt, NfaTransition::Sym::eps, "", t);
                add(rt, NfaTransition::Sym::eps, "", t);
                return {s, t};
            }
            case K::concatenation: {
                auto [ls, lt] = build(*r.left);
                auto [rs, rt] = build(*r.right);
                add(lt, NfaTransition::Sym::eps, "", rs);
                return {ls, rt};
            }
            case K::star: {
                auto [is, it] = build(*r.left);
                int s = fresh(), t = fresh();
                add(s, NfaTransition::Sym::eps, "", is);
                add(s, NfaTransition::Sym::eps, "", t);
                add(it, NfaTransition::Sym::eps, "", is);
                add(it, NfaTransition::Sym::eps, "", t);
                return {s, t};
            }
        }
        return {fresh(), fresh()};
    }
};

}  // namespace

PathAutomaton compile_regex(const LabelRegex& r, const std::vector<std::string>& known_views) {
    std::vector<std::string> refs;
    collect_view_refs(r, refs);
    for (const auto& v : refs) {
        if (std::find(known_views.begin(), known_views.end(), v) == known_views.end())
            throw EvalError("unresolved path view name '~" + v + "'");
    }
    Builder b;
    auto [s, t] = b.build(r);
    b.a.start = s;
    b.a.accepting[t] = true;
    return std::move(b.a);
}

std::vector<int> PathAutomaton::eps_closure(std::vector<int> states) const {
    std::vector<bool> seen(transitions.size(), false);
    std::vector<int> stack = states;
    for (int s : states) seen[s] = true;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (const auto& t : transitions[s]) {
            if (t.sym == NfaTransition::Sym::eps && !seen[t.target]) {
                seen[t.target] = true;
                stack.push_back(t.target);
            }
        }
    }
    std::vector<int> out;
    for (size_t i = 0; i < seen.size(); ++i)
        if (seen[i]) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> PathAutomaton::node_close(const std::vector<int>& states,
                                           const LabelSet& labels) const {
    std::vector<int> base = eps_closure(states);
    std::vector<int> out = base;
    for (int s : base) {
        for (const auto& t : transitions[s]) {
            bool consumes = t.sym == NfaTransition::Sym::wild ||
                            (t.sym == NfaTransition::Sym::node_label && labels.count(t.label) > 0);
            if (consumes) out.push_back(t.target);
        }
    }
    out = eps_closure(out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<int> PathAutomaton::initial_states(const LabelSet& src_labels) const {
    return node_close({start}, src_labels);
}

bool PathAutomaton::any_accepting(const std::vector<int>& states) const {
    for (int s : states)
        if (accepting[s]) return true;
    return false;
}

}  // namespace gcore
