#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gcore/catalog.hpp"
#include "gcore/evaluator.hpp"
#include "gcore/parser.hpp"
#include "test_support.hpp"

using namespace gcore;

namespace {

std::string temp_file(const std::string& name) { return "/tmp/gcore_test_" + name; }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

bool graphs_equal(const Graph& a, const Graph& b) {
    if (a.nodes() != b.nodes() || a.edges() != b.edges() || a.paths() != b.paths()) return false;
    for (ObjId n : a.nodes()) {
        if (a.labels(n) != b.labels(n)) return false;
        auto pa = a.all_properties(n), pb = b.all_properties(n);
        if (pa.size() != pb.size()) return false;
        for (size_t i = 0; i < pa.size(); ++i) {
            if (pa[i].first != pb[i].first) return false;
            if (pa[i].second.size() != pb[i].second.size()) return false;
            for (size_t k = 0; k < pa[i].second.size(); ++k)
                if (pa[i].second[k].compare(pb[i].second[k]) != 0) return false;
        }
    }
    for (ObjId e : a.edges())
        if (!(a.endpoints(e) == b.endpoints(e)) || a.labels(e) != b.labels(e)) return false;
    for (ObjId p : a.paths())
        if (a.path_body(p) != b.path_body(p)) return false;
    return true;
}

}  // namespace

TEST_CASE("loading the social graph fixture") {
    Catalog cat;
    cat.load_graph("social_graph", testsup::fixture_path("fig3.json"));
    auto g = cat.graph("social_graph");
    REQUIRE(g);
    CHECK(g->nodes().size() == 11);
    CHECK(g->edges().size() == 23);
    size_t persons = 0;
    for (ObjId n : g->nodes())
        if (g->labels(n).count("Person")) ++persons;
    CHECK(persons == 5);
    CHECK(cat.default_graph_name() == "social_graph");
}

TEST_CASE("malformed JSON is a format error") {
    std::string path = temp_file("bad.json");
    write_file(path, "{ nodes: oops");
    Catalog cat;
    CHECK_THROWS_WITH_AS(cat.load_graph("bad", path), doctest::Contains("not valid JSON"),
                         IoError);
}

TEST_CASE("duplicate ids in a graph file are rejected") {
    std::string path = temp_file("dup.json");
    write_file(path, R"({"nodes":[{"id":"a"},{"id":"a"}]})");
    Catalog cat;
    CHECK_THROWS_WITH_AS(cat.load_graph("dup", path), doctest::Contains("duplicate"), IoError);
}

TEST_CASE("files violating the data model are rejected") {
    std::string path = temp_file("dangling.json");
    write_file(path, R"({"nodes":[{"id":"a"}],"edges":[{"id":"e","from":"a","to":"ghost"}]})");
    Catalog cat;
    CHECK_THROWS_WITH_AS(cat.load_graph("dangling", path), doctest::Contains("dangling"),
                         IoError);
}

TEST_CASE("save/load round-trips the toy graph") {
    Catalog cat;
    cat.load_graph("fig1", testsup::fixture_path("fig1.json"));
    std::string path = temp_file("roundtrip.json");
    cat.save_graph(*cat.graph("fig1"), path);
    cat.load_graph("fig1_copy", path);
    CHECK(graphs_equal(*cat.graph("fig1"), *cat.graph("fig1_copy")));
}

TEST_CASE("query results with generated ids serialize as stable strings") {
    Catalog cat;
    cat.load_graph("social_graph", testsup::fixture_path("fig3.json"));
    Evaluator ev(cat);
    auto result = ev.eval_text(
        "CONSTRUCT (x GROUP e :Company {name:=e}) MATCH (n:Person {employer=e})");
    CHECK(result->nodes().size() == 4);
    std::string path = temp_file("skolems.json");
    cat.save_graph(*result, path);
    cat.load_graph("skolems", path);
    CHECK(graphs_equal(*result, *cat.graph("skolems")));
}

TEST_CASE("saving to an unwritable path is an I/O error") {
    Catalog cat;
    cat.load_graph("fig1", testsup::fixture_path("fig1.json"));
    CHECK_THROWS_AS(cat.save_graph(*cat.graph("fig1"), "/nonexistent_dir/out.json"), IoError);
}

TEST_CASE("importing a table yields isolated labeled nodes") {
    std::string path = temp_file("orders.csv");
    write_file(path,
               "custName,prodCode\n"
               "\"Doe, John\",p1\n"
               "Alice,\n"
               "Frank,p2\n");
    Catalog cat;
    cat.import_table("orders", path, ImportOptions{});
    auto g = cat.graph("orders");
    REQUIRE(g);
    CHECK(g->nodes().size() == 3);
    CHECK(g->edges().empty());
    size_t with_code = 0, labeled = 0, quoted = 0;
    for (ObjId n : g->nodes()) {
        if (!g->properties(n, "prodCode").empty()) ++with_code;
        if (g->labels(n).count("orders")) ++labeled;
        const auto& names = g->properties(n, "custName");
        if (names.size() == 1 && names[0].as_string() == "Doe, John") ++quoted;
    }
    CHECK(with_code == 2);  // the empty cell stays an absent property
    CHECK(labeled == 3);
    CHECK(quoted == 1);
}

TEST_CASE("header-only CSV gives an empty but valid graph") {
    std::string path = temp_file("empty.csv");
    write_file(path, "a,b\n");
    Catalog cat;
    cat.import_table("t", path, ImportOptions{});
    CHECK(cat.graph("t")->nodes().empty());
    CHECK(cat.graph("t")->validate().empty());
}

TEST_CASE("ragged and empty CSV files are errors") {
    Catalog cat;
    std::string ragged = temp_file("ragged.csv");
    write_file(ragged, "a,b\n1\n");
    CHECK_THROWS_WITH_AS(cat.import_table("r", ragged, ImportOptions{}),
                         doctest::Contains("fields"), IoError);
    std::string empty = temp_file("none.csv");
    write_file(empty, "");
    CHECK_THROWS_AS(cat.import_table("e", empty, ImportOptions{}), IoError);
}

TEST_CASE("tables queried as graphs support grouping construction") {
    // The customers/products workflow: rows become isolated nodes, grouping
    // builds one node per distinct value, edges connect them.
    std::string path = temp_file("orders2.csv");
    write_file(path,
               "custName,prodCode\n"
               "Ada,p1\n"
               "Ada,p2\n"
               "Grace,p1\n");
    Catalog cat;
    cat.import_table("orders", path, ImportOptions{});
    Evaluator ev(cat);
    auto result = ev.eval_text(
        "CONSTRUCT (cust GROUP cn :Customer {name:=cn}),"
        "          (prod GROUP pc :Product {code:=pc}),"
        "          (cust)-[:bought]->(prod)"
        "  MATCH (o {custName=cn, prodCode=pc}) ON orders");
    size_t customers = 0, products = 0;
    for (ObjId n : result->nodes()) {
        if (result->labels(n).count("Customer")) ++customers;
        if (result->labels(n).count("Product")) ++products;
    }
    CHECK(customers == 2);
    CHECK(products == 2);
    CHECK(result->edges().size() == 3);
    CHECK(result->validate().empty());
}

TEST_CASE("typed columns parse numbers") {
    std::string path = temp_file("typed.csv");
    write_file(path, "name,qty\nwidget,3\n");
    Catalog cat;
    ImportOptions opts;
    opts.column_types["qty"] = ImportOptions::ColumnType::integer;
    cat.import_table("typed", path, opts);
    auto g = cat.graph("typed");
    for (ObjId n : g->nodes()) {
        CHECK(g->properties(n, "qty")[0].as_integer() == 3);
        CHECK(g->properties(n, "name")[0].kind() == Value::Kind::string);
    }
}

TEST_CASE("views re-evaluate against the current catalog") {
    Catalog cat;
    cat.load_graph("social_graph", testsup::fixture_path("fig3.json"));
    cat.register_view("persons", parse_query("CONSTRUCT (n) MATCH (n:Person) ON social_graph"));
    Evaluator ev(cat);
    CHECK(ev.resolve("persons")->nodes().size() == 5);

    // Adding a graph under a new name does not disturb it; re-registering
    // social_graph's name is what the view tracks.
    Catalog cat2;
    cat2.load_graph("social_graph", testsup::fixture_path("fig1.json"));
    cat2.register_view("persons", parse_query("CONSTRUCT (n) MATCH (n:Person) ON social_graph"));
    Evaluator ev2(cat2);
    CHECK(ev2.resolve("persons")->nodes().size() == 4);
}

TEST_CASE("resolving an unknown name fails") {
    Catalog cat;
    Evaluator ev(cat);
    CHECK_THROWS_WITH_AS(ev.resolve("nosuch"), doctest::Contains("unknown graph"), EvalError);
}

TEST_CASE("view cycles are rejected at registration") {
    Catalog cat;
    cat.register_view("a", parse_query("CONSTRUCT (n) MATCH (n) ON b"));
    CHECK_THROWS_WITH_AS(cat.register_view("b", parse_query("CONSTRUCT (n) MATCH (n) ON a")),
                         doctest::Contains("cyclic"), EvalError);
    CHECK_THROWS_WITH_AS(cat.register_view("self", parse_query("CONSTRUCT (n) MATCH (n) ON self")),
                         doctest::Contains("cyclic"), EvalError);
}

TEST_CASE("catalog directories load graphs and views") {
    std::string dir = "/tmp/gcore_test_catdir";
    std::remove((dir + "/g.json").c_str());
    std::remove((dir + "/v.view").c_str());
    std::filesystem::create_directories(dir);
    {
        std::ifstream src(testsup::fixture_path("fig1.json"));
        std::ofstream dst(dir + "/g.json");
        dst << src.rdbuf();
    }
    write_file(dir + "/v.view", "CONSTRUCT (n) MATCH (n:Person) ON g");
    Catalog cat;
    cat.load_directory(dir);
    CHECK(cat.has_graph("g"));
    CHECK(cat.has_view("v"));
    Evaluator ev(cat);
    CHECK(ev.resolve("v")->nodes().size() == 4);
}
