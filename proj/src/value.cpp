#include "gcore/value.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gcore {

Value Value::boolean(bool b) {
    Value v;
    v.kind_ = Kind::boolean;
    v.bool_ = b;
    return v;
}

Value Value::integer(int64_t x) {
    Value v;
    v.kind_ = Kind::integer;
    v.int_ = x;
    return v;
}

Value Value::real(double x) {
    Value v;
    v.kind_ = Kind::real;
    v.real_ = x;
    return v;
}

Value Value::string(std::string s) {
    Value v;
    v.kind_ = Kind::string;
    v.str_ = std::move(s);
    return v;
}

Value Value::date(std::string iso) {
    Value v;
    v.kind_ = Kind::date;
    v.str_ = std::move(iso);
    return v;
}

Value Value::object(ObjId id) {
    Value v;
    v.kind_ = Kind::id;
    v.id_ = id;
    return v;
}

Value Value::set(std::vector<Value> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end(),
                            [](const Value& a, const Value& b) { return a.compare(b) == 0; }),
                elems.end());
    Value v;
    v.kind_ = Kind::set;
    v.elems_ = std::make_shared<const std::vector<Value>>(std::move(elems));
    return v;
}

Value Value::list(std::vector<Value> elems) {
    Value v;
    v.kind_ = Kind::list;
    v.elems_ = std::make_shared<const std::vector<Value>>(std::move(elems));
    return v;
}

bool Value::as_bool() const {
    if (kind_ != Kind::boolean) throw EvalError("expected a boolean value");
    return bool_;
}

int64_t Value::as_integer() const {
    if (kind_ != Kind::integer) throw EvalError("expected an integer value");
    return int_;
}

double Value::as_real() const {
    if (kind_ == Kind::integer) return static_cast<double>(int_);
    if (kind_ != Kind::real) throw EvalError("expected a numeric value");
    return real_;
}

const std::string& Value::as_string() const {
    if (kind_ != Kind::string && kind_ != Kind::date) throw EvalError("expected a string value");
    return str_;
}

ObjId Value::as_object() const {
    if (kind_ != Kind::id) throw EvalError("expected a graph object reference");
    return id_;
}

const std::vector<Value>& Value::elements() const {
    if (kind_ != Kind::set && kind_ != Kind::list) throw EvalError("expected a collection value");
    return *elems_;
}

int Value::compare(const Value& other) const {
    auto rank = [](Kind k) { return static_cast<int>(k); };
    if (kind_ != other.kind_) {
        // Integers and reals interleave numerically so that sets of mixed
        // numeric values stay canonically ordered.
        if (is_numeric() && other.is_numeric()) {
            double a = as_real(), b = other.as_real();
            if (a < b) return -1;
            if (a > b) return 1;
            return kind_ == Kind::integer ? -1 : 1;
        }
        return rank(kind_) < rank(other.kind_) ? -1 : 1;
    }
    switch (kind_) {
        case Kind::unbound: return 0;
        case Kind::boolean: return (bool_ ? 1 : 0) - (other.bool_ ? 1 : 0);
        case Kind::integer:
            if (int_ != other.int_) return int_ < other.int_ ? -1 : 1;
            return 0;
        case Kind::real:
            if (real_ != other.real_) return real_ < other.real_ ? -1 : 1;
            return 0;
        case Kind::string:
        case Kind::date: return str_.compare(other.str_) < 0 ? -1 : (str_ == other.str_ ? 0 : 1);
        case Kind::id:
            if (id_ != other.id_) return id_ < other.id_ ? -1 : 1;
            return 0;
        case Kind::set:
        case Kind::list: {
            const auto& a = *elems_;
            const auto& b = *other.elems_;
            for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                int c = a[i].compare(b[i]);
                if (c != 0) return c;
            }
            if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
            return 0;
        }
    }
    return 0;
}

Value Value::to_value_set() const {
    if (kind_ == Kind::set) return *this;
    if (kind_ == Kind::unbound) throw EvalError("unbound value has no set form");
    return set({*this});
}

Value Value::scalarized() const {
    if (kind_ == Kind::set && elems_->size() == 1) return (*elems_)[0];
    return *this;
}

static std::string format_real(double d) {
    if (d == static_cast<int64_t>(d) && std::abs(d) < 1e15) {
        std::ostringstream os;
        os << static_cast<int64_t>(d) << ".0";
        return os.str();
    }
    std::ostringstream os;
    os.precision(15);
    os << d;
    return os.str();
}

std::string Value::to_display(const IdSpace* ids) const {
    switch (kind_) {
        case Kind::unbound: return "null";
        case Kind::boolean: return bool_ ? "true" : "false";
        case Kind::integer: return std::to_string(int_);
        case Kind::real: return format_real(real_);
        case Kind::string: return str_;
        case Kind::date: return str_;
        case Kind::id:
            if (ids) return ids->name(id_);
            return std::string(to_string(id_.kind)) + ":" + std::to_string(id_.value);
        case Kind::set: {
            if (elems_->size() == 1) return (*elems_)[0].to_display(ids);
            std::string out = "{";
            for (size_t i = 0; i < elems_->size(); ++i) {
                if (i) out += ", ";
                out += (*elems_)[i].to_display(ids);
            }
            return out + "}";
        }
        case Kind::list: {
            std::string out = "[";
            for (size_t i = 0; i < elems_->size(); ++i) {
                if (i) out += ", ";
                out += (*elems_)[i].to_display(ids);
            }
            return out + "]";
        }
    }
    return "?";
}

std::string Value::to_canonical(const IdSpace* ids) const {
    switch (kind_) {
        case Kind::unbound: return "N";
        case Kind::boolean: return bool_ ? "b1" : "b0";
        case Kind::integer: return "i" + std::to_string(int_);
        case Kind::real: return "r" + format_real(real_);
        case Kind::string: return "s" + str_;
        case Kind::date: return "d" + str_;
        case Kind::id: {
            std::string body = ids ? ids->name(id_) : std::to_string(id_.value);
            return std::string("#") + to_string(id_.kind) + ":" + body;
        }
        case Kind::set:
        case Kind::list: {
            std::string out = kind_ == Kind::set ? "S(" : "L(";
            for (const auto& e : *elems_) out += e.to_canonical(ids) + ";";
            return out + ")";
        }
    }
    return "?";
}

std::optional<int> query_compare(const Value& a0, const Value& b0) {
    Value a = a0.scalarized();
    Value b = b0.scalarized();
    if (a.is_unbound() || b.is_unbound()) return std::nullopt;
    if (a.is_numeric() && b.is_numeric()) {
        double x = a.as_real(), y = b.as_real();
        if (x < y) return -1;
        if (x > y) return 1;
        return 0;
    }
    if (a.kind() != b.kind()) return std::nullopt;
    switch (a.kind()) {
        case Value::Kind::string:
        case Value::Kind::date:
        case Value::Kind::boolean:
        case Value::Kind::id:
        case Value::Kind::list: return a.compare(b);
        default: return std::nullopt;  // sets are not ordered
    }
}

bool query_equals_scalar(const Value& a, const Value& b) {
    auto c = query_compare(a, b);
    return c.has_value() && *c == 0;
}

bool compare_multi_valued(SetCompareOp op, const Value& lhs, const Value& rhs) {
    if (lhs.is_unbound() || rhs.is_unbound()) return false;
    switch (op) {
        case SetCompareOp::equal: {
            Value a = lhs.to_value_set();
            Value b = rhs.to_value_set();
            const auto& ae = a.elements();
            const auto& be = b.elements();
            if (ae.size() != be.size()) return false;
            for (size_t i = 0; i < ae.size(); ++i)
                if (!query_equals_scalar(ae[i], be[i])) return false;
            return true;
        }
        case SetCompareOp::in: {
            if (!rhs.is_set() && !rhs.is_list()) {
                return query_equals_scalar(lhs.scalarized(), rhs);
            }
            Value needle = lhs.scalarized();
            for (const auto& e : rhs.elements())
                if (query_equals_scalar(needle, e)) return true;
            return false;
        }
        case SetCompareOp::subset_of: {
            Value a = lhs.to_value_set();
            Value b = rhs.to_value_set();
            for (const auto& e : a.elements()) {
                bool found = false;
                for (const auto& f : b.elements())
                    if (query_equals_scalar(e, f)) { found = true; break; }
                if (!found) return false;
            }
            return true;
        }
    }
    return false;
}

}  // namespace gcore
