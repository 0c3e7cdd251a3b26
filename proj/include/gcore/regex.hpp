#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gcore/graph.hpp"

namespace gcore {

struct LabelRegex;
using RegexPtr = std::shared_ptr<const LabelRegex>;

// Regular expression over node labels, edge labels (possibly inverted),
// the wildcard `_` (usable at node and edge positions alike) and references
// to previously declared path views.
struct LabelRegex {
    enum class Kind {
        wildcard,
        edge_label,
        edge_label_inverse,
        node_label,
        view_ref,
        alternation,
        concatenation,
        star,
    };

    Kind kind;
    std::string label;      // edge/node label or view name
    RegexPtr left, right;   // children for alternation/concatenation/star

    static RegexPtr wildcard();
    static RegexPtr edge_label(std::string l);
    static RegexPtr edge_label_inverse(std::string l);
    static RegexPtr node_label(std::string l);
    static RegexPtr view_ref(std::string name);
    static RegexPtr alternation(RegexPtr a, RegexPtr b);
    static RegexPtr concatenation(RegexPtr a, RegexPtr b);
    static RegexPtr star(RegexPtr a);
};

std::string regex_to_string(const LabelRegex& r);
void collect_view_refs(const LabelRegex& r, std::vector<std::string>& out);

struct NfaTransition {
    enum class Sym : uint8_t { eps, wild, node_label, edge_fwd, edge_bwd, view };
    Sym sym;
    std::string label;
    int target;
};

// Thompson-style NFA. No determinization; the product search copes with the
// nondeterminism. Node symbols consume a node position, edge symbols an edge
// position; a node position with no explicit symbol is implicitly wildcarded.
struct PathAutomaton {
    int start = 0;
    std::vector<std::vector<NfaTransition>> transitions;
    std::vector<bool> accepting;
    bool has_views = false;

    size_t state_count() const { return transitions.size(); }

    std::vector<int> eps_closure(std::vector<int> states) const;
    // Consume zero or one node symbol valid at a node carrying `labels`
    // (plus epsilon moves); returns the "past node position" state set.
    std::vector<int> node_close(const std::vector<int>& states, const LabelSet& labels) const;
    std::vector<int> initial_states(const LabelSet& src_labels) const;
    bool any_accepting(const std::vector<int>& states) const;
};

// Compiles the regex; `known_views` guards against unresolved view names.
PathAutomaton compile_regex(const LabelRegex& r,
                            const std::vector<std::string>& known_views = {});

}  // namespace gcore
