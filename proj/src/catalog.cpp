#include "gcore/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>

#include "gcore/parser.hpp"

namespace gcore {

namespace fs = std::filesystem;

void Catalog::register_graph(const std::string& name, Graph g) {
    if (views_.count(name)) throw EvalError("name '" + name + "' already names a view");
    graphs_[name] = std::make_shared<const Graph>(std::move(g));
}

namespace {
void collect_gids_full(const FullGraphQuery& f, std::vector<std::string>& out);

void collect_gids_query(const QueryAst& q, std::vector<std::string>& out) {
    for (const auto& h : q.head)
        if (h.kind == HeadClause::Kind::graph) collect_gids_query(*h.graph.body, out);
    if (q.body) collect_gids_full(*q.body, out);
}

void collect_gids_expr(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == Expr::Kind::exists && e.subquery) collect_gids_query(*e.subquery, out);
    if (e.base) collect_gids_expr(*e.base, out);
    if (e.lhs) collect_gids_expr(*e.lhs, out);
    if (e.rhs) collect_gids_expr(*e.rhs, out);
    for (const auto& a : e.args) collect_gids_expr(*a, out);
    for (const auto& arm : e.arms) {
        collect_gids_expr(*arm.when, out);
        collect_gids_expr(*arm.then, out);
    }
    if (e.else_arm) collect_gids_expr(*e.else_arm, out);
    for (const auto& lc : e.patterns)
        if (lc.on && !lc.on->is_query()) out.push_back(lc.on->gid);
}

void collect_gids_full(const FullGraphQuery& f, std::vector<std::string>& out) {
    switch (f.op) {
        case FullGraphQuery::Op::graph_ref: out.push_back(f.gid); return;
        case FullGraphQuery::Op::basic: {
            for (const auto& item : f.basic->construct.items)
                if (item.is_gid) out.push_back(item.gid);
            auto scan_chains = [&](const std::vector<LocatedChain>& chains) {
                for (const auto& lc : chains) {
                    if (!lc.on) continue;
                    if (lc.on->is_query())
                        collect_gids_full(*lc.on->subquery, out);
                    else
                        out.push_back(lc.on->gid);
                }
            };
            scan_chains(f.basic->match.chains);
            for (const auto& ob : f.basic->match.optionals) scan_chains(ob.chains);
            if (f.basic->match.where) collect_gids_expr(*f.basic->match.where, out);
            for (const auto& ob : f.basic->match.optionals)
                if (ob.where) collect_gids_expr(*ob.where, out);
            for (const auto& item : f.basic->construct.items) {
                if (item.when) collect_gids_expr(*item.when, out);
                for (const auto& s : item.sets)
                    if (s.value) collect_gids_expr(*s.value, out);
            }
            return;
        }
        default:
            collect_gids_full(*f.left, out);
            collect_gids_full(*f.right, out);
            return;
    }
}
}  // namespace

std::vector<std::string> Catalog::view_references(const QueryAst& q) const {
    std::vector<std::string> out;
    collect_gids_query(q, out);
    return out;
}

void Catalog::register_view(const std::string& name, QueryPtr definition) {
    if (graphs_.count(name)) throw EvalError("name '" + name + "' already names a graph");
    // Cycle check by DFS over view-to-view references, the new one included.
    std::map<std::string, QueryPtr> all = views_;
    all[name] = definition;
    std::set<std::string> visiting, done;
    std::function<void(const std::string&)> dfs = [&](const std::string& v) {
        if (done.count(v)) return;
        if (!visiting.insert(v).second)
            throw EvalError("cyclic view definition involving '" + v + "'");
        auto it = all.find(v);
        if (it != all.end()) {
            for (const auto& ref : view_references(*it->second))
                if (all.count(ref)) dfs(ref);
        }
        visiting.erase(v);
        done.insert(v);
    };
    dfs(name);
    views_[name] = std::move(definition);
}

std::shared_ptr<const Graph> Catalog::graph(const std::string& name) const {
    auto it = graphs_.find(name);
    return it == graphs_.end() ? nullptr : it->second;
}

QueryPtr Catalog::view(const std::string& name) const {
    auto it = views_.find(name);
    return it == views_.end() ? nullptr : it->second;
}

void Catalog::set_default_graph(const std::string& name) {
    if (!graphs_.count(name) && !views_.count(name))
        throw EvalError("unknown graph '" + name + "'");
    default_name_ = name;
}

std::string Catalog::default_graph_name() const {
    if (!default_name_.empty()) return default_name_;
    // The session-local "_last" result does not count towards "exactly one
    // loaded graph".
    std::string only;
    for (const auto& [name, g] : graphs_) {
        if (name == "_last") continue;
        if (!only.empty()) return "";
        only = name;
    }
    return only;
}

std::shared_ptr<const Graph> Catalog::default_graph() const {
    std::string name = default_graph_name();
    if (name.empty()) return nullptr;
    return graph(name);
}

std::vector<std::string> Catalog::graph_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : graphs_) out.push_back(k);
    return out;
}

std::vector<std::string> Catalog::view_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : views_) out.push_back(k);
    return out;
}

Graph Catalog::load_graph_file(const std::string& path) const {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return graph_from_json(text, ids_);
    } catch (const IoError& e) {
        throw IoError(std::string(e.what()) + " [" + path + "]");
    }
}

void Catalog::load_graph(const std::string& name, const std::string& path) {
    register_graph(name, load_graph_file(path));
}

void Catalog::save_graph(const Graph& g, const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << graph_to_json(g);
    if (!out) throw IoError("write failed for '" + path + "'");
}

void Catalog::import_table(const std::string& name, const std::string& path,
                           const ImportOptions& opts) {
    register_graph(name, import_table_file(name, path, opts));
}

void Catalog::load_directory(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
    std::vector<fs::path> graph_files, view_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".json") graph_files.push_back(entry.path());
        if (entry.path().extension() == ".view") view_files.push_back(entry.path());
    }
    std::sort(graph_files.begin(), graph_files.end());
    std::sort(view_files.begin(), view_files.end());
    for (const auto& p : graph_files) load_graph(p.stem().string(), p.string());
    for (const auto& p : view_files) {
        std::ifstream in(p);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        register_view(p.stem().string(), parse_query(text));
    }
}

}  // namespace gcore
