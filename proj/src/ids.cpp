#include "gcore/ids.hpp"

#include <stdexcept>

namespace gcore {

const char* to_string(ObjKind kind) {
    switch (kind) {
        case ObjKind::node: return "node";
        case ObjKind::edge: return "edge";
        case ObjKind::path: return "path";
    }
    return "?";
}

ObjId IdSpace::intern(ObjKind kind, const std::string& name) {
    std::lock_guard<std::mutex> lock(mu_);
    Table& t = table(kind);
    auto it = t.by_name.find(name);
    if (it != t.by_name.end()) return {kind, it->second};
    int64_t v = static_cast<int64_t>(t.names.size());
    t.by_name.emplace(name, v);
    t.names.push_back(name);
    return {kind, v};
}

std::optional<ObjId> IdSpace::lookup(ObjKind kind, const std::string& name) const {
    std::lock_guard<std::mutex> lock(mu_);
    const Table& t = table(kind);
    auto it = t.by_name.find(name);
    if (it == t.by_name.end()) return std::nullopt;
    return ObjId{kind, it->second};
}

std::string IdSpace::name(ObjId id) const {
    std::lock_guard<std::mutex> lock(mu_);
    const Table& t = table(id.kind);
    if (id.value < 0 || id.value >= static_cast<int64_t>(t.names.size()))
        throw std::out_of_range("IdSpace: unknown surrogate");
    return t.names[static_cast<size_t>(id.value)];
}

ObjId IdSpace::make_fresh(ObjKind kind, const std::string& hint) {
    std::lock_guard<std::mutex> lock(mu_);
    Table& t = table(kind);
    std::string candidate = hint;
    int suffix = 1;
    while (t.by_name.count(candidate) > 0) {
        candidate = hint + "_" + std::to_string(suffix++);
    }
    int64_t v = static_cast<int64_t>(t.names.size());
    t.by_name.emplace(candidate, v);
    t.names.push_back(candidate);
    return {kind, v};
}

size_t IdSpace::size(ObjKind kind) const {
    std::lock_guard<std::mutex> lock(mu_);
    return table(kind).names.size();
}

}  // namespace gcore
