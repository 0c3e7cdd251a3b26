#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcore/ids.hpp"

namespace gcore {

// Runtime error during query evaluation (type mismatch, division by zero,
// non-positive path cost, unknown graph, ...).
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A literal, graph object reference, collection, or the unbound marker.
// Structural equality; sets are kept sorted and deduplicated under the
// canonical total order so that equal sets compare equal memberwise.
class Value {
public:
    enum class Kind : uint8_t {
        unbound = 0,
        boolean,
        integer,
        real,
        string,
        date,
        id,
        set,
        list,
    };

    Value() : kind_(Kind::unbound) {}

    static Value boolean(bool b);
    static Value integer(int64_t v);
    static Value real(double v);
    static Value string(std::string s);
    static Value date(std::string iso);
    static Value object(ObjId id);
    static Value set(std::vector<Value> elems);   // sorts + dedupes
    static Value list(std::vector<Value> elems);  // keeps order
    static Value empty_set() { return set({}); }

    Kind kind() const { return kind_; }
    bool is_unbound() const { return kind_ == Kind::unbound; }
    bool is_numeric() const { return kind_ == Kind::integer || kind_ == Kind::real; }
    bool is_true() const { return kind_ == Kind::boolean && bool_; }
    bool is_set() const { return kind_ == Kind::set; }
    bool is_list() const { return kind_ == Kind::list; }

    bool as_bool() const;
    int64_t as_integer() const;
    double as_real() const;  // integer widens
    const std::string& as_string() const;
    ObjId as_object() const;
    const std::vector<Value>& elements() const;  // set or list

    // Canonical total order over all values (kind rank, then content).
    // Used for set storage, binding iteration order and tie-breaking.
    int compare(const Value& other) const;
    bool operator==(const Value& other) const { return compare(other) == 0; }
    bool operator<(const Value& other) const { return compare(other) < 0; }

    // Scalar used where a set is expected becomes a singleton set; a set
    // stays itself. Unbound has no set form.
    Value to_value_set() const;
    // Singleton sets collapse to their element for arithmetic and ordering.
    Value scalarized() const;

    // Printing: singleton sets render without braces, ids render through the
    // symbol table when given one.
    std::string to_display(const IdSpace* ids = nullptr) const;
    // Unambiguous form for hashing and group keys.
    std::string to_canonical(const IdSpace* ids = nullptr) const;

private:
    Kind kind_;
    bool bool_ = false;
    int64_t int_ = 0;
    double real_ = 0.0;
    ObjId id_{};
    std::string str_;
    std::shared_ptr<const std::vector<Value>> elems_;
};

// Query-level comparison with numeric int/real coercion. Returns nullopt for
// incomparable kinds (which boolean contexts treat as false).
std::optional<int> query_compare(const Value& a, const Value& b);
bool query_equals_scalar(const Value& a, const Value& b);

// The three multi-valued comparisons: `=` is set equality after singleton
// coercion, IN tests membership, SUBSET OF tests containment.
enum class SetCompareOp { equal, in, subset_of };
bool compare_multi_valued(SetCompareOp op, const Value& lhs, const Value& rhs);

}  // namespace gcore
