#include <fstream>

#include "gcore/catalog.hpp"
#include "json.hpp"

namespace gcore {

using nlohmann::json;

namespace {

Value value_from_json(const json& j) {
    if (j.is_string()) return Value::string(j.get<std::string>());
    if (j.is_boolean()) return Value::boolean(j.get<bool>());
    if (j.is_number_integer()) return Value::integer(j.get<int64_t>());
    if (j.is_number_float()) return Value::real(j.get<double>());
    throw IoError("unsupported property value type in graph file");
}

json value_to_json(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::boolean: return v.as_bool();
        case Value::Kind::integer: return v.as_integer();
        case Value::Kind::real: return v.as_real();
        case Value::Kind::string:
        case Value::Kind::date: return v.as_string();
        default: throw IoError("unsupported property value type for serialization");
    }
}

void read_meta(const json& obj, GraphBuilder& b, ObjId id) {
    if (obj.contains("labels")) {
        for (const auto& l : obj.at("labels")) b.add_label(id, l.get<std::string>());
    }
    if (obj.contains("properties")) {
        for (auto it = obj.at("properties").begin(); it != obj.at("properties").end(); ++it) {
            if (!it.value().is_array())
                throw IoError("property '" + it.key() + "' must be an array of values");
            for (const auto& v : it.value()) b.add_property_value(id, it.key(), value_from_json(v));
        }
    }
}

json meta_to_json(const Graph& g, ObjId id) {
    json obj;
    json labels = json::array();
    for (const auto& l : g.labels(id)) labels.push_back(l);
    obj["labels"] = std::move(labels);
    json props = json::object();
    for (const auto& [key, values] : g.all_properties(id)) {
        json arr = json::array();
        for (const auto& v : values) arr.push_back(value_to_json(v));
        props[key] = std::move(arr);
    }
    obj["properties"] = std::move(props);
    return obj;
}

}  // namespace

Graph graph_from_json(const std::string& json_text, const std::shared_ptr<IdSpace>& ids) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("graph file is not valid JSON: ") + e.what());
    }
    GraphBuilder b(ids);
    std::set<std::string> seen;
    auto check_dup = [&](const std::string& kind, const std::string& id) {
        if (!seen.insert(kind + "\n" + id).second)
            throw IoError("duplicate " + kind + " id '" + id + "' in graph file");
    };
    if (doc.contains("nodes")) {
        for (const auto& n : doc.at("nodes")) {
            std::string name = n.at("id").get<std::string>();
            check_dup("node", name);
            ObjId id = b.add_node(name);
            read_meta(n, b, id);
        }
    }
    if (doc.contains("edges")) {
        for (const auto& e : doc.at("edges")) {
            std::string name = e.at("id").get<std::string>();
            check_dup("edge", name);
            ObjId from = ids->intern(ObjKind::node, e.at("from").get<std::string>());
            ObjId to = ids->intern(ObjKind::node, e.at("to").get<std::string>());
            ObjId id = b.add_edge(name, from, to);
            read_meta(e, b, id);
        }
    }
    if (doc.contains("paths")) {
        for (const auto& p : doc.at("paths")) {
            std::string name = p.at("id").get<std::string>();
            check_dup("path", name);
            std::vector<ObjId> body;
            const auto& arr = p.at("body");
            for (size_t i = 0; i < arr.size(); ++i) {
                ObjKind kind = i % 2 == 0 ? ObjKind::node : ObjKind::edge;
                body.push_back(ids->intern(kind, arr[i].get<std::string>()));
            }
            ObjId id = b.add_path(name, std::move(body));
            read_meta(p, b, id);
        }
    }
    Graph g = b.finish();
    auto violations = g.validate();
    if (!violations.empty()) {
        std::string msg = "graph file violates the data model:";
        for (const auto& v : violations) msg += "\n  - " + v.message;
        throw IoError(msg);
    }
    return g;
}

std::string graph_to_json(const Graph& g) {
    const IdSpace& ids = *g.ids();
    json doc;
    json nodes = json::array();
    for (ObjId n : g.nodes()) {
        json obj = meta_to_json(g, n);
        obj["id"] = ids.name(n);
        nodes.push_back(std::move(obj));
    }
    json edges = json::array();
    for (ObjId e : g.edges()) {
        json obj = meta_to_json(g, e);
        obj["id"] = ids.name(e);
        auto ep = g.endpoints(e);
        obj["from"] = ids.name(ep.src);
        obj["to"] = ids.name(ep.dst);
        edges.push_back(std::move(obj));
    }
    json paths = json::array();
    for (ObjId p : g.paths()) {
        json obj = meta_to_json(g, p);
        obj["id"] = ids.name(p);
        json body = json::array();
        for (ObjId el : g.path_body(p)) body.push_back(ids.name(el));
        obj["body"] = std::move(body);
        paths.push_back(std::move(obj));
    }
    doc["nodes"] = std::move(nodes);
    doc["edges"] = std::move(edges);
    doc["paths"] = std::move(paths);
    return doc.dump(2) + "\n";
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    size_t i = 0;
    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(row);
        row.clear();
    };
    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field.push_back('"');
                i += 2;
                continue;
            }
            if (c == '"') {
                in_quotes = false;
                ++i;
                continue;
            }
            field.push_back(c);
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                ++i;
                break;
            case ',':
                end_field();
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                end_row();
                ++i;
                break;
            default:
                field.push_back(c);
                field_started = true;
                ++i;
                break;
        }
    }
    if (field_started || !field.empty() || !row.empty()) end_row();
    if (in_quotes) throw IoError("unterminated quoted field in CSV");
    return rows;
}

}  // namespace

Graph Catalog::import_table_file(const std::string& name, const std::string& path,
                                 const ImportOptions& opts) const {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto rows = parse_csv(text);
    if (rows.empty()) throw IoError("CSV file '" + path + "' is empty (a header row is required)");
    const auto& header = rows[0];
    std::string label = opts.label.empty() ? name : opts.label;

    GraphBuilder b(ids_);
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw IoError("CSV row " + std::to_string(r + 1) + " has " +
                          std::to_string(row.size()) + " fields, header has " +
                          std::to_string(header.size()));
        ObjId id = b.add_node(name + ":" + std::to_string(r));
        b.add_label(id, label);
        for (size_t c = 0; c < header.size(); ++c) {
            if (row[c].empty()) continue;  // absent property
            Value v = Value::string(row[c]);
            auto it = opts.column_types.find(header[c]);
            if (it != opts.column_types.end()) {
                try {
                    if (it->second == ImportOptions::ColumnType::integer)
                        v = Value::integer(std::stoll(row[c]));
                    else if (it->second == ImportOptions::ColumnType::real)
                        v = Value::real(std::stod(row[c]));
                } catch (...) {
                    throw IoError("CSV cell '" + row[c] + "' does not parse as " +
                                  (it->second == ImportOptions::ColumnType::integer ? "integer"
                                                                                    : "real"));
                }
            }
            b.add_property_value(id, header[c], v);
        }
    }
    return b.finish();
}

}  // namespace gcore
