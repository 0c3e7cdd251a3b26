#include "gcore/binding.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gcore {

namespace {
const Value kUnbound{};
}

void Binding::bind(const std::string& var, Value v) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                               [](const auto& e, const std::string& s) { return e.first < s; });
    if (it != entries_.end() && it->first == var) {
        it->second = std::move(v);
    } else {
        entries_.insert(it, {var, std::move(v)});
    }
}

const Value& Binding::get(const std::string& var) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                               [](const auto& e, const std::string& s) { return e.first < s; });
    if (it != entries_.end() && it->first == var && !it->second.is_unbound()) return it->second;
    return kUnbound;
}

bool Binding::bound(const std::string& var) const { return !get(var).is_unbound(); }

int Binding::compare(const Binding& other) const {
    size_t i = 0, j = 0;
    // Unbound entries are skipped so representations with and without
    // explicit unbound markers compare equal.
    auto skip = [](const std::vector<std::pair<std::string, Value>>& es, size_t& k) {
        while (k < es.size() && es[k].second.is_unbound()) ++k;
    };
    for (;;) {
        skip(entries_, i);
        skip(other.entries_, j);
        bool ae = i >= entries_.size(), be = j >= other.entries_.size();
        if (ae && be) return 0;
        if (ae) return -1;
        if (be) return 1;
        if (entries_[i].first != other.entries_[j].first)
            return entries_[i].first < other.entries_[j].first ? -1 : 1;
        int c = entries_[i].second.compare(other.entries_[j].second);
        if (c != 0) return c;
        ++i;
        ++j;
    }
}

bool compatible(const Binding& a, const Binding& b) {
    for (const auto& [var, v] : a.entries()) {
        if (v.is_unbound()) continue;
        const Value& w = b.get(var);
        if (!w.is_unbound() && v.compare(w) != 0) return false;
    }
    return true;
}

Binding merge_bindings(const Binding& a, const Binding& b) {
    Binding out = a;
    for (const auto& [var, v] : b.entries())
        if (!v.is_unbound() && !out.bound(var)) out.bind(var, v);
    return out;
}

BindingSet::BindingSet(std::vector<std::string> vars) : vars_(std::move(vars)) {
    std::sort(vars_.begin(), vars_.end());
    vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
    columns_.resize(vars_.size());
}

BindingSet BindingSet::unit() {
    BindingSet s;
    s.add(Binding{});
    return s;
}

void BindingSet::add_var(const std::string& var) {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it != vars_.end() && *it == var) return;
    size_t pos = static_cast<size_t>(it - vars_.begin());
    vars_.insert(it, var);
    columns_.insert(columns_.begin() + pos, std::vector<Value>(row_count_, kUnbound));
}

void BindingSet::add(const Binding& b) {
    for (const auto& [var, v] : b.entries())
        if (!v.is_unbound()) add_var(var);
    for (size_t c = 0; c < vars_.size(); ++c) columns_[c].push_back(b.get(vars_[c]));
    ++row_count_;
    dirty_ = true;
}

Binding BindingSet::row(size_t i) const {
    normalize();
    Binding b;
    for (size_t c = 0; c < vars_.size(); ++c)
        if (!columns_[c][i].is_unbound()) b.bind(vars_[c], columns_[c][i]);
    return b;
}

Value BindingSet::at(size_t row, const std::string& var) const {
    normalize();
    auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
    if (it == vars_.end() || *it != var) return kUnbound;
    return columns_[static_cast<size_t>(it - vars_.begin())][row];
}

void BindingSet::normalize() const {
    if (!dirty_) return;
    std::vector<size_t> order(row_count_);
    for (size_t i = 0; i < row_count_; ++i) order[i] = i;
    auto cmp_rows = [&](size_t a, size_t b) {
        for (size_t c = 0; c < columns_.size(); ++c) {
            int cv = columns_[c][a].compare(columns_[c][b]);
            if (cv != 0) return cv;
        }
        return 0;
    };
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return cmp_rows(a, b) < 0; });
    order.erase(std::unique(order.begin(), order.end(),
                            [&](size_t a, size_t b) { return cmp_rows(a, b) == 0; }),
                order.end());
    std::vector<std::vector<Value>> cols(columns_.size());
    for (size_t c = 0; c < columns_.size(); ++c) {
        cols[c].reserve(order.size());
        for (size_t i : order) cols[c].push_back(columns_[c][i]);
    }
    columns_ = std::move(cols);
    row_count_ = order.size();
    dirty_ = false;
}

std::string BindingSet::to_table(const IdSpace* ids) const {
    normalize();
    std::vector<size_t> widths(vars_.size());
    std::vector<std::vector<std::string>> cells(row_count_, std::vector<std::string>(vars_.size()));
    for (size_t c = 0; c < vars_.size(); ++c) {
        widths[c] = vars_[c].size();
        for (size_t r = 0; r < row_count_; ++r) {
            cells[r][c] = columns_[c][r].is_unbound() ? "" : columns_[c][r].to_display(ids);
            widths[c] = std::max(widths[c], cells[r][c].size());
        }
    }
    std::ostringstream os;
    auto rule = [&] {
        os << '+';
        for (size_t c = 0; c < vars_.size(); ++c) os << std::string(widths[c] + 2, '-') << '+';
        os << '\n';
    };
    auto line = [&](const std::vector<std::string>& row) {
        os << '|';
        for (size_t c = 0; c < vars_.size(); ++c)
            os << ' ' << row[c] << std::string(widths[c] - row[c].size(), ' ') << " |";
        os << '\n';
    };
    rule();
    line(vars_);
    rule();
    for (size_t r = 0; r < row_count_; ++r) line(cells[r]);
    rule();
    return os.str();
}

BindingSet join(const BindingSet& a, const BindingSet& b) {
    BindingSet out;
    for (size_t i = 0; i < a.size(); ++i) {
        Binding ra = a.row(i);
        for (size_t j = 0; j < b.size(); ++j) {
            Binding rb = b.row(j);
            if (compatible(ra, rb)) out.add(merge_bindings(ra, rb));
        }
    }
    return out;
}

BindingSet union_all(const BindingSet& a, const BindingSet& b) {
    BindingSet out;
    for (size_t i = 0; i < a.size(); ++i) out.add(a.row(i));
    for (size_t j = 0; j < b.size(); ++j) out.add(b.row(j));
    return out;
}

BindingSet semijoin(const BindingSet& a, const BindingSet& b) {
    BindingSet out;
    for (size_t i = 0; i < a.size(); ++i) {
        Binding ra = a.row(i);
        for (size_t j = 0; j < b.size(); ++j) {
            if (compatible(ra, b.row(j))) {
                out.add(ra);
                break;
            }
        }
    }
    return out;
}

BindingSet antijoin(const BindingSet& a, const BindingSet& b) {
    BindingSet out;
    for (size_t i = 0; i < a.size(); ++i) {
        Binding ra = a.row(i);
        bool found = false;
        for (size_t j = 0; j < b.size() && !found; ++j) found = compatible(ra, b.row(j));
        if (!found) out.add(ra);
    }
    return out;
}

BindingSet left_outer_join(const BindingSet& a, const BindingSet& b) {
    return union_all(join(a, b), antijoin(a, b));
}

BindingSet project(const BindingSet& omega, const std::set<std::string>& vars) {
    BindingSet out;
    for (size_t i = 0; i < omega.size(); ++i) {
        Binding b;
        for (const auto& v : vars) {
            Value val = omega.at(i, v);
            if (!val.is_unbound()) b.bind(v, val);
        }
        out.add(b);
    }
    return out;
}

std::vector<BindingSet> group_by(const BindingSet& omega, const std::vector<std::string>& gamma) {
    std::map<std::vector<Value>, BindingSet> classes;
    for (size_t i = 0; i < omega.size(); ++i) {
        std::vector<Value> key;
        key.reserve(gamma.size());
        for (const auto& g : gamma) key.push_back(omega.at(i, g));
        classes[key].add(omega.row(i));
    }
    std::vector<BindingSet> out;
    out.reserve(classes.size());
    for (auto& [k, v] : classes) out.push_back(std::move(v));
    return out;
}

}  // namespace gcore
