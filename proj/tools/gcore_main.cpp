#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gcore/catalog.hpp"
#include "gcore/evaluator.hpp"
#include "gcore/parser.hpp"

namespace {

using namespace gcore;

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string graph_to_dot(const Graph& g) {
    const IdSpace& ids = *g.ids();
    std::ostringstream os;
    auto meta_label = [&](ObjId id) {
        std::string label = dot_escape(ids.name(id));
        for (const auto& l : g.labels(id)) label += "\\n:" + dot_escape(l);
        for (const auto& [k, vs] : g.all_properties(id))
            label += "\\n" + dot_escape(k) + ": " + dot_escape(Value::set(vs).to_display(&ids));
        return label;
    };
    os << "digraph G {\n";
    for (ObjId n : g.nodes())
        os << "  \"" << dot_escape(ids.name(n)) << "\" [label=\"" << meta_label(n) << "\"];\n";
    for (ObjId e : g.edges()) {
        auto ep = g.endpoints(e);
        os << "  \"" << dot_escape(ids.name(ep.src)) << "\" -> \""
           << dot_escape(ids.name(ep.dst)) << "\" [label=\"" << meta_label(e) << "\"];\n";
    }
    // Stored paths have no native DOT form; list each one's edge sequence in
    // a labeled cluster.
    size_t k = 0;
    for (ObjId p : g.paths()) {
        std::string label = "path " + dot_escape(ids.name(p));
        for (const auto& l : g.labels(p)) label += " :" + dot_escape(l);
        label += " =";
        for (ObjId e : g.path_edges(p)) label += " " + dot_escape(ids.name(e));
        os << "  subgraph cluster_path" << k++ << " { label=\"" << label << "\"; }\n";
    }
    os << "}\n";
    return os.str();
}

std::string graph_to_table(const Graph& g) {
    const IdSpace& ids = *g.ids();
    std::ostringstream os;
    os << "nodes (" << g.nodes().size() << "):\n";
    for (ObjId n : g.nodes()) {
        os << "  " << ids.name(n);
        for (const auto& l : g.labels(n)) os << " :" << l;
        for (const auto& [k, vs] : g.all_properties(n))
            os << " " << k << "=" << Value::set(vs).to_display(&ids);
        os << "\n";
    }
    os << "edges (" << g.edges().size() << "):\n";
    for (ObjId e : g.edges()) {
        auto ep = g.endpoints(e);
        os << "  " << ids.name(e) << ": " << ids.name(ep.src) << " -> " << ids.name(ep.dst);
        for (const auto& l : g.labels(e)) os << " :" << l;
        for (const auto& [k, vs] : g.all_properties(e))
            os << " " << k << "=" << Value::set(vs).to_display(&ids);
        os << "\n";
    }
    os << "paths (" << g.paths().size() << "):\n";
    for (ObjId p : g.paths()) {
        os << "  " << ids.name(p) << ":";
        for (ObjId el : g.path_body(p)) os << " " << ids.name(el);
        for (const auto& l : g.labels(p)) os << " :" << l;
        for (const auto& [k, vs] : g.all_properties(p))
            os << " " << k << "=" << Value::set(vs).to_display(&ids);
        os << "\n";
    }
    return os.str();
}

struct CliConfig {
    std::string catalog_dir;
    std::string default_name;
    std::string format = "json";
    std::string out_file;
    bool bindings = false;
    bool explain = false;
    bool materialize = false;
    uint64_t seed = 0;
    std::vector<std::string> loads;    // name=path
    std::vector<std::string> imports;  // name=path
};

void write_output(const CliConfig& cfg, const std::string& text) {
    if (cfg.out_file.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out_file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + cfg.out_file + "'");
    out << text;
}

std::string format_graph(const CliConfig& cfg, const Graph& g) {
    if (cfg.format == "dot") return graph_to_dot(g);
    if (cfg.format == "table") return graph_to_table(g);
    return graph_to_json(g);
}

int run_batch(Catalog& catalog, const CliConfig& cfg, const std::string& query_file) {
    std::ifstream in(query_file, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open '" << query_file << "'\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    QueryPtr ast;
    try {
        ast = parse_query(text);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    }
    if (cfg.explain) {
        write_output(cfg, ast_to_json(*ast) + "\n");
        return 0;
    }
    try {
        Evaluator ev(catalog, EvalOptions{cfg.seed, cfg.materialize});
        auto result = ev.eval(*ast);
        if (cfg.bindings) {
            for (const auto& entry : ev.binding_trace())
                std::cout << entry.label << "\n"
                          << entry.bindings.to_table(catalog.ids().get());
        }
        write_output(cfg, format_graph(cfg, *result));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int repl(Catalog& catalog, const CliConfig& cfg) {
    Evaluator ev(catalog, EvalOptions{cfg.seed, cfg.materialize});
    std::cout << "gcore interactive shell; \\quit to exit, queries end with ';'\n";
    std::string buffer;
    std::string line;
    while (std::cout << (buffer.empty() ? "gcore> " : "   ... ") && std::getline(std::cin, line)) {
        if (buffer.empty() && !line.empty() && line[0] == '\\') {
            std::istringstream cmd(line.substr(1));
            std::string op;
            cmd >> op;
            try {
                if (op == "quit" || op == "q") {
                    break;
                } else if (op == "load") {
                    std::string name, file;
                    cmd >> name >> file;
                    if (name.empty() || file.empty()) throw IoError("usage: \\load NAME FILE");
                    catalog.load_graph(name, file);
                    std::cout << "loaded graph '" << name << "'\n";
                } else if (op == "import") {
                    std::string name, file;
                    cmd >> name >> file;
                    if (name.empty() || file.empty()) throw IoError("usage: \\import NAME FILE");
                    catalog.import_table(name, file, ImportOptions{});
                    std::cout << "imported table '" << name << "'\n";
                } else if (op == "graphs") {
                    for (const auto& n : catalog.graph_names()) std::cout << n << "\n";
                    for (const auto& n : catalog.view_names()) std::cout << n << " (view)\n";
                } else if (op == "default") {
                    std::string name;
                    cmd >> name;
                    catalog.set_default_graph(name);
                    std::cout << "default graph is '" << name << "'\n";
                } else if (op == "view") {
                    std::string name;
                    cmd >> name;
                    if (name.empty()) throw IoError("usage: \\view NAME <query...>;");
                    std::string rest;
                    std::getline(cmd, rest);
                    std::string def = rest;
                    while (def.find(';') == std::string::npos && std::getline(std::cin, line))
                        def += "\n" + line;
                    if (auto pos = def.find(';'); pos != std::string::npos) def.resize(pos);
                    catalog.register_view(name, parse_query(def));
                    std::cout << "registered view '" << name << "'\n";
                } else if (op == "save") {
                    std::string name, file;
                    cmd >> name >> file;
                    auto g = ev.resolve(name);
                    catalog.save_graph(*g, file);
                    std::cout << "saved '" << name << "' to " << file << "\n";
                } else {
                    std::cout << "unknown command '\\" << op << "'\n";
                }
            } catch (const std::exception& e) {
                std::cout << "error: " << e.what() << "\n";
            }
            continue;
        }
        buffer += line + "\n";
        if (buffer.find(';') == std::string::npos) continue;
        std::string text = buffer;
        buffer.clear();
        try {
            QueryPtr ast = parse_query(text);
            auto result = ev.eval(*ast);
            if (cfg.bindings) {
                for (const auto& entry : ev.binding_trace())
                    std::cout << entry.label << "\n"
                              << entry.bindings.to_table(catalog.ids().get());
            }
            catalog.register_graph("_last", *result);
            std::cout << "result: " << result->nodes().size() << " nodes, "
                      << result->edges().size() << " edges, " << result->paths().size()
                      << " paths (available as _last)\n";
            if (cfg.format == "table") std::cout << graph_to_table(*result);
        } catch (const std::exception& e) {
            std::cout << "error: " << e.what() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"G-CORE interpreter: graph queries in, property graphs with paths out"};
    CliConfig cfg;
    std::string query_file;

    app.add_option("query", query_file, "query file to execute (omit for the interactive shell)");
    app.add_option("--catalog", cfg.catalog_dir,
                   "directory of <name>.json graphs and <name>.view definitions");
    app.add_option("--default", cfg.default_name, "name of the default graph");
    app.add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "dot", "table"}));
    app.add_option("--out", cfg.out_file, "write the result graph to this file");
    app.add_flag("--bindings", cfg.bindings, "print the MATCH binding tables");
    app.add_flag("--explain", cfg.explain, "print the parsed query as JSON and exit");
    app.add_flag("--materialize-views", cfg.materialize,
                 "memoize view evaluation for the session");
    app.add_option("--seed", cfg.seed, "seed for generated object identifiers");
    app.add_option("--load", cfg.loads, "load a graph, as NAME=FILE (repeatable)")
        ->allow_extra_args(false);
    app.add_option("--import", cfg.imports, "import a CSV table as NAME=FILE (repeatable)")
        ->allow_extra_args(false);
    CLI11_PARSE(app, argc, argv);

    gcore::Catalog catalog;
    try {
        if (!cfg.catalog_dir.empty()) catalog.load_directory(cfg.catalog_dir);
        for (const auto& spec : cfg.loads) {
            auto eq = spec.find('=');
            if (eq == std::string::npos) throw gcore::IoError("--load expects NAME=FILE");
            catalog.load_graph(spec.substr(0, eq), spec.substr(eq + 1));
        }
        for (const auto& spec : cfg.imports) {
            auto eq = spec.find('=');
            if (eq == std::string::npos) throw gcore::IoError("--import expects NAME=FILE");
            catalog.import_table(spec.substr(0, eq), spec.substr(eq + 1), gcore::ImportOptions{});
        }
        if (!cfg.default_name.empty()) catalog.set_default_graph(cfg.default_name);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (query_file.empty()) return repl(catalog, cfg);
    return run_batch(catalog, cfg, query_file);
}
