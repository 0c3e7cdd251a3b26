#pragma once

#include <set>
#include <string>
#include <vector>

#include "gcore/value.hpp"

namespace gcore {

// Partial map from variable names to values; unbound variables are simply
// absent. Kept sorted by name.
class Binding {
public:
    Binding() = default;

    void bind(const std::string& var, Value v);
    const Value& get(const std::string& var) const;  // unbound marker if absent
    bool bound(const std::string& var) const;
    const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    int compare(const Binding& other) const;
    bool operator==(const Binding& other) const { return compare(other) == 0; }
    bool operator<(const Binding& other) const { return compare(other) < 0; }

private:
    std::vector<std::pair<std::string, Value>> entries_;
};

bool compatible(const Binding& a, const Binding& b);
Binding merge_bindings(const Binding& a, const Binding& b);

// A set of bindings over a common variable universe, stored column-wise with
// the unbound marker standing in for absent variables. Rows are deduplicated
// and kept in canonical order, so iteration is deterministic.
class BindingSet {
public:
    BindingSet() = default;
    explicit BindingSet(std::vector<std::string> vars);

    static BindingSet unit();  // the singleton {mu_empty}

    const std::vector<std::string>& vars() const { return vars_; }
    size_t size() const { normalize(); return row_count_; }
    bool empty() const { return size() == 0; }

    void add(const Binding& b);
    Binding row(size_t i) const;
    Value at(size_t row, const std::string& var) const;

    // Aligned text table of the kind used for debugging binding sets.
    std::string to_table(const IdSpace* ids = nullptr) const;

private:
    void add_var(const std::string& var);
    void normalize() const;  // dedupe + canonical row order, lazily

    std::vector<std::string> vars_;                        // sorted
    mutable std::vector<std::vector<Value>> columns_;      // columns_[var][row]
    mutable size_t row_count_ = 0;
    mutable bool dirty_ = false;

    friend BindingSet join(const BindingSet&, const BindingSet&);
    friend BindingSet union_all(const BindingSet&, const BindingSet&);
    friend BindingSet semijoin(const BindingSet&, const BindingSet&);
    friend BindingSet antijoin(const BindingSet&, const BindingSet&);
    friend BindingSet left_outer_join(const BindingSet&, const BindingSet&);
};

// The five binding-table operators of the algebra.
BindingSet join(const BindingSet& a, const BindingSet& b);
BindingSet union_all(const BindingSet& a, const BindingSet& b);
BindingSet semijoin(const BindingSet& a, const BindingSet& b);
BindingSet antijoin(const BindingSet& a, const BindingSet& b);
BindingSet left_outer_join(const BindingSet& a, const BindingSet& b);

// Partition into equivalence classes over the grouping variables; rows that
// leave a grouping variable unbound group under the unbound marker itself.
std::vector<BindingSet> group_by(const BindingSet& omega, const std::vector<std::string>& gamma);

// Restriction of every binding to the given variables (set semantics).
BindingSet project(const BindingSet& omega, const std::set<std::string>& vars);

}  // namespace gcore
