#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gcore/ast.hpp"
#include "gcore/graph.hpp"

namespace gcore {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ImportOptions {
    std::string label;  // label attached to every row node; defaults to the graph name
    enum class ColumnType { text, integer, real };
    std::map<std::string, ColumnType> column_types;
};

// Named graphs, named view definitions and the optional default graph: the
// function gr of the semantics. Graphs are immutable snapshots; views are
// re-evaluated against the current catalog on every reference.
class Catalog {
public:
    Catalog() : ids_(std::make_shared<IdSpace>()) {}

    const std::shared_ptr<IdSpace>& ids() const { return ids_; }

    void register_graph(const std::string& name, Graph g);
    // Registers a view definition; rejects duplicate names and cyclic
    // view-to-view references.
    void register_view(const std::string& name, QueryPtr definition);

    bool has_graph(const std::string& name) const { return graphs_.count(name) > 0; }
    bool has_view(const std::string& name) const { return views_.count(name) > 0; }
    std::shared_ptr<const Graph> graph(const std::string& name) const;
    QueryPtr view(const std::string& name) const;

    void set_default_graph(const std::string& name);
    // The explicitly chosen default, or the only loaded graph when exactly
    // one exists.
    std::string default_graph_name() const;
    std::shared_ptr<const Graph> default_graph() const;

    std::vector<std::string> graph_names() const;
    std::vector<std::string> view_names() const;

    // ---- persistence ----
    Graph load_graph_file(const std::string& path) const;          // parse + validate
    void load_graph(const std::string& name, const std::string& path);
    void save_graph(const Graph& g, const std::string& path) const;
    Graph import_table_file(const std::string& name, const std::string& path,
                            const ImportOptions& opts) const;
    void import_table(const std::string& name, const std::string& path,
                      const ImportOptions& opts);

    // Directory layout: one <name>.json per graph, one <name>.view (query
    // text) per view definition.
    void load_directory(const std::string& dir);

private:
    std::vector<std::string> view_references(const QueryAst& q) const;

    std::shared_ptr<IdSpace> ids_;
    std::map<std::string, std::shared_ptr<const Graph>> graphs_;
    std::map<std::string, QueryPtr> views_;
    std::string default_name_;
};

// Graph JSON (de)serialization against a shared id space.
Graph graph_from_json(const std::string& json_text, const std::shared_ptr<IdSpace>& ids);
std::string graph_to_json(const Graph& g);

}  // namespace gcore
