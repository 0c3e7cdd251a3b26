#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gcore {

enum class ObjKind : uint8_t { node = 0, edge = 1, path = 2 };

const char* to_string(ObjKind kind);

// Surrogate identifier for a graph object. Identifiers of different kinds
// never compare equal; within a kind the surrogate order is the order in
// which the names were interned, which is deterministic for a fixed input.
struct ObjId {
    ObjKind kind = ObjKind::node;
    int64_t value = 0;

    friend bool operator==(const ObjId& a, const ObjId& b) {
        return a.kind == b.kind && a.value == b.value;
    }
    friend auto operator<=>(const ObjId& a, const ObjId& b) = default;
};

struct ObjIdHash {
    size_t operator()(const ObjId& id) const {
        return std::hash<int64_t>()(id.value * 4 + static_cast<int64_t>(id.kind));
    }
};

// Interner mapping persistent string ids to surrogates, one namespace per
// kind. Append-only and shared by every graph of a catalog so that equal
// names denote the same object across graphs.
class IdSpace {
public:
    ObjId intern(ObjKind kind, const std::string& name);
    std::optional<ObjId> lookup(ObjKind kind, const std::string& name) const;
    // By value: interning from another thread may grow the name table.
    std::string name(ObjId id) const;

    // Allocates an id whose name does not collide with anything interned so
    // far, based on `hint` (probing with numeric suffixes when taken).
    ObjId make_fresh(ObjKind kind, const std::string& hint);

    size_t size(ObjKind kind) const;

private:
    struct Table {
        std::unordered_map<std::string, int64_t> by_name;
        std::vector<std::string> names;
    };
    Table& table(ObjKind kind) { return tables_[static_cast<size_t>(kind)]; }
    const Table& table(ObjKind kind) const { return tables_[static_cast<size_t>(kind)]; }

    mutable std::mutex mu_;
    Table tables_[3];
};

}  // namespace gcore
