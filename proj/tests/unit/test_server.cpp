#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/core/errors.hpp"
#include "atlas/fixtures/fixtures.hpp"
#include "atlas/ingest/records.hpp"
#include "atlas/server/api.hpp"
#include "atlas/server/dataset.hpp"
#include "support.hpp"

// After Eigen: resolv.h, pulled in here, defines a macro that clashes with Eigen internals.
#include <httplib.h>

using namespace atlas;
using namespace atlas::server;
using json = nlohmann::json;

namespace {

struct Fixture {
    support::TempDir dir{"atlas-server"};
    Dataset dataset;
    Fixture() {
        fixtures::FixtureParams params;
        params.seed = 3;
        fixtures::gen_dataset(params, dir.path());
        dataset = load_dataset(dir.path());
    }
};

const Fixture& synthetic() {
    static const Fixture fixture;
    return fixture;
}

Response call(const Api& api, const std::string& method, const std::string& path,
              std::map<std::string, std::string> query = {}, const std::string& body = "") {
    Request r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    r.body = body;
    return api.handle(r);
}

json body_of(const Response& r) { return json::parse(r.body); }

std::string graph_path(const std::string& rest) { return "/api/graphs/" + std::string(fixtures::kSyntheticGraphId) + rest; }

}  // namespace

TEST_SUITE("server") {

TEST_CASE("loading reports the generated counts") {
    const auto& d = synthetic().dataset;
    REQUIRE(d.graphs.size() == 1);
    const auto& g = d.graphs[0];
    CHECK(g.entry.id == fixtures::kSyntheticGraphId);
    CHECK(g.agent_records == 100);
    CHECK(g.statement_records == 400);
    CHECK(g.graph.agents.size() == 100);
    CHECK(d.corpus.size() == 500);
    CHECK(d.corpus.embeddings().cols() == 32);
    CHECK(d.corpus.coords().cols() == 2);
    CHECK(d.projected);
    CHECK(g.bundles.size() == g.graph.ontology.max_depth() + 1);
    CHECK(g.pack.leaf_count() >= g.graph.agents.size());
    CHECK(validate_dataset(g.graph).empty());
    CHECK(d.version == fnv1a_hex(serialize_precomputation(d)));
    CHECK(d.version.size() == 16);
    CHECK(d.graph("nope") == nullptr);
}

TEST_CASE("precomputation is byte-identical across loads") {
    const auto& f = synthetic();
    const auto again = load_dataset(f.dir.path());
    CHECK(serialize_precomputation(again) == serialize_precomputation(f.dataset));
    CHECK(again.version == f.dataset.version);
}

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("load errors name the offending file") {
    support::TempDir dir("atlas-broken");
    fixtures::FixtureParams params;
    params.n_docs = 60;
    fixtures::gen_dataset(params, dir.path());
    const auto emb = dir.path() / "corpus" / "embeddings.bin";
    std::filesystem::rename(emb, dir.path() / "moved.bin");
    try {
        load_dataset(dir.path());
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("corpus/embeddings.bin") != std::string::npos);
    }
    std::filesystem::rename(dir.path() / "moved.bin", emb);

    const auto statements = dir.path() / "graphs" / std::string(fixtures::kSyntheticGraphId) / "statements.jsonl";
    auto text = ingest::read_file(statements);
    const auto second_line = text.find('\n') + 1;
    text.insert(second_line, "{broken\n");
    ingest::write_file(statements, text);
    try {
        load_dataset(dir.path());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.source().find("statements.jsonl") != std::string::npos);
    }
}

TEST_CASE("graph routes") {
    const Api api(synthetic().dataset);
    const auto& d = synthetic().dataset;

    const auto graphs = call(api, "GET", "/api/graphs");
    CHECK(graphs.status == 200);
    CHECK(graphs.headers.at(kVersionHeader) == d.version);
    const auto list = body_of(graphs);
    REQUIRE(list.size() == 1);
    CHECK(list[0]["id"] == fixtures::kSyntheticGraphId);
    CHECK(list[0]["nodes"] == 100);
    for (const char* key : {"name", "edges", "maxDepth"}) CHECK(list[0].contains(key));

    const auto overview = body_of(call(api, "GET", graph_path("/overview"), {{"depth", "2"}}));
    CHECK(overview["depth"] == 2);
    CHECK(overview["circles"].is_array());
    CHECK(overview["hyperEdges"].is_array());
    for (const auto& h : overview["hyperEdges"]) {
        CHECK(h["level"] == 2);
        CHECK_FALSE(h["segments"].empty());
    }
    CHECK(call(api, "GET", graph_path("/overview"), {{"depth", "x"}}).status == 400);

    const auto& g = d.graphs[0].graph;
    const auto& e = g.edges.front();
    const auto q = call(api, "POST", graph_path("/query"), {},
                        R"({"chain":[{"facet":"edge","field":"evidence_count","op":">=","value":2}]})");
    CHECK(q.status == 200);
    const auto qr = body_of(q);
    for (const char* key : {"nodes", "edges", "highlight", "paths", "trace", "truncated"}) CHECK(qr.contains(key));
    for (const auto& id : qr["edges"]) CHECK(g.edges[g.edge_index(id.get<std::string>())].evidence_count >= 2);

    const auto bad = call(api, "POST", graph_path("/query"), {},
                          R"({"chain":[{"facet":"doc","dois":["x"]},{"facet":"node","field":"degree","op":"contains","value":1}]})");
    CHECK(bad.status == 400);
    CHECK(body_of(bad)["facet"] == 1);
    CHECK(body_of(bad)["code"] == "type-mismatch");
    CHECK(call(api, "POST", graph_path("/query"), {}, "not json").status == 400);

    const auto lay = call(api, "POST", graph_path("/layout"), {}, json{{"edges", {e.id}}}.dump());
    CHECK(lay.status == 200);
    const auto lj = body_of(lay);
    CHECK(lj["nodes"].size() == 2);
    CHECK(lj["edges"][0]["id"] == e.id);
    CHECK(call(api, "POST", graph_path("/layout"), {}, R"({"nodes":["nobody"]})").status == 400);
    CHECK(call(api, "POST", graph_path("/layout"), {}, "{}").status == 400);

    const auto node = call(api, "GET", graph_path("/nodes/" + e.subj), {{"direction", "out"}});
    CHECK(node.status == 200);
    const auto nj = body_of(node);
    CHECK(nj["node"]["id"] == e.subj);
    bool found = false;
    for (const auto& s : nj["suggestions"]) found |= s["edge"] == e.id;
    CHECK(found);
    const auto without = body_of(call(api, "GET", graph_path("/nodes/" + e.subj), {{"direction", "out"}, {"subgraph", e.id}}));
    CHECK(without["suggestions"].size() + 1 == nj["suggestions"].size());
    CHECK(call(api, "GET", graph_path("/nodes/" + e.subj), {{"direction", "sideways"}}).status == 400);
    CHECK(call(api, "GET", graph_path("/nodes/nobody")).status == 404);

    const auto ev = call(api, "GET", graph_path("/edges/" + e.id + "/evidence"));
    CHECK(ev.status == 200);
    const auto evj = body_of(ev);
    CHECK(evj["edge"]["evidence_count"] == e.evidence_count);
    CHECK(evj["evidence"].size() == e.evidence.size());
    for (const auto& item : evj["evidence"]) {
        for (const char* key : {"text", "doi", "source", "document", "neighbors"}) CHECK(item.contains(key));
    }
    CHECK(call(api, "GET", graph_path("/edges/x|Activation|y/evidence")).status == 404);

    CHECK(call(api, "GET", "/api/graphs/nope/overview").status == 404);
    CHECK(call(api, "GET", "/api/unknown").status == 404);
    CHECK(call(api, "DELETE", "/api/graphs").status == 404);
    CHECK(call(api, "GET", graph_path("/query")).status == 404);
}

TEST_CASE("corpus routes") {
    const Api api(synthetic().dataset);
    const auto& corpus = synthetic().dataset.corpus;
    const auto& doc = corpus.documents()[5];

    const auto page = body_of(call(api, "GET", "/api/corpus/documents", {{"page_size", "7"}, {"page", "1"}}));
    CHECK(page["total"] == 500);
    CHECK(page["documents"].size() == 7);
    CHECK(call(api, "GET", "/api/corpus/documents", {{"page_size", "501"}}).status == 400);
    CHECK(call(api, "GET", "/api/corpus/documents", {{"year_min", "abc"}}).status == 400);

    const auto one = body_of(call(api, "GET", "/api/corpus/documents/" + doc.doi));
    CHECK(one["doi"] == doc.doi);
    CHECK(one["title"] == doc.title);
    CHECK(call(api, "GET", "/api/corpus/documents/10.0/none").status == 404);

    const auto nb = body_of(call(api, "GET", "/api/corpus/documents/" + doc.doi + "/neighbors", {{"k", "4"}}));
    REQUIRE(nb["neighbors"].size() == 4);
    const auto direct = corpus.semantic_neighbors(doc.doi, 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(nb["neighbors"][i]["doi"] == corpus.documents()[direct[i].row].doi);
    CHECK(call(api, "GET", "/api/corpus/documents/" + doc.doi + "/neighbors", {{"k", "0"}}).status == 400);

    const auto links = body_of(call(api, "GET", "/api/corpus/documents/" + doc.doi + "/graphs"));
    CHECK(links.is_array());
    const auto expected = synthetic().dataset.doi_index.graphs_for_document(doc.doi);
    CHECK(links.size() == expected.size());

    const auto clusters = body_of(call(api, "GET", "/api/corpus/clusters", {{"level", "fine"}}));
    CHECK(clusters["points"].size() == 500);
    for (const auto& c : clusters["clusters"]) CHECK(c["level"] == "fine");
    CHECK(call(api, "GET", "/api/corpus/clusters", {{"level", "medium"}}).status == 400);
}

TEST_CASE("a zero embedding answers 422") {
    support::TempDir dir("atlas-zero");
    fixtures::FixtureParams params;
    params.n_docs = 60;
    fixtures::gen_dataset(params, dir.path());
    const auto path = dir.path() / "corpus" / "embeddings.bin";
    auto emb = ingest::read_matrix_bin(path);
    emb.row(0).setZero();
    ingest::write_matrix_bin(path, emb);
    const auto dataset = load_dataset(dir.path());
    const Api api(dataset);
    const auto& doi = dataset.corpus.documents()[0].doi;
    CHECK(call(api, "GET", "/api/corpus/documents/" + doi + "/neighbors").status == 422);
    const auto other = dataset.corpus.documents()[1].doi;
    const auto nb = body_of(call(api, "GET", "/api/corpus/documents/" + other + "/neighbors", {{"k", "59"}}));
    for (const auto& n : nb["neighbors"]) CHECK(n["doi"] != doi);
}

TEST_CASE("concurrent identical requests give identical bodies") {
    const Api api(synthetic().dataset);
    const std::string body = R"({"chain":[{"facet":"node","field":"degree","op":">=","value":8}]})";
    const auto reference = call(api, "POST", graph_path("/query"), {}, body).body;
    std::vector<std::string> results(8);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < results.size(); ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 5; ++i) results[t] = call(api, "POST", graph_path("/query"), {}, body).body;
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& r : results) CHECK(r == reference);
}

TEST_CASE("HTTP front end") {
    const auto& d = synthetic().dataset;
    ServeConfig config;
    config.port = 0;
    HttpServer server(d, config);
    REQUIRE(server.port() > 0);
    std::thread runner([&] { server.run(); });
    httplib::Client client("127.0.0.1", server.port());
    client.set_connection_timeout(5);
    auto res = client.Get("/api/graphs");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value(kVersionHeader) == d.version);
    CHECK(json::parse(res->body)[0]["id"] == fixtures::kSyntheticGraphId);
    const auto& doi = d.corpus.documents()[0].doi;
    res = client.Get("/api/corpus/documents/" + doi + "/neighbors?k=3");
    REQUIRE(res);
    CHECK(json::parse(res->body)["neighbors"].size() == 3);
    res = client.Post(graph_path("/query"), R"({"chain":[]})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    json many = {{"edges", json::array()}};
    for (const auto& e : d.graphs[0].graph.edges) many["edges"].push_back(e.id);
    REQUIRE(many.dump().size() > 8192);
    res = client.Post(graph_path("/layout"), many.dump(), "application/x-www-form-urlencoded");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["edges"].size() == d.graphs[0].graph.edges.size());
    res = client.Get("/api/nothing");
    REQUIRE(res);
    CHECK(res->status == 404);
    server.stop();
    runner.join();
}

}  // TEST_SUITE
