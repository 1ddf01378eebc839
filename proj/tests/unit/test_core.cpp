#include <doctest.h>

#include <algorithm>
#include <string>

#include "atlas/core/errors.hpp"
#include "atlas/core/model.hpp"
#include "atlas/ingest/assemble.hpp"
#include "support.hpp"

using namespace atlas;

TEST_SUITE("core") {

TEST_CASE("polarity table") {
    CHECK(polarity_of(StatementType::Inhibition) == PolarityInfo{Polarity::Negative, true});
    CHECK(polarity_of(StatementType::Activation) == PolarityInfo{Polarity::Positive, true});
    CHECK(polarity_of(StatementType::Complex) == PolarityInfo{Polarity::Unknown, false});
    for (const auto type : kAllStatementTypes) {
        const auto info = polarity_of(type);
        CHECK(info.directed == (info.polarity != Polarity::Unknown));
        CHECK(statement_type_from_string(to_string(type)) == type);
    }
    CHECK_FALSE(statement_type_from_string("inhibition").has_value());
    CHECK(polarity_from_string(to_string(Polarity::Negative)) == Polarity::Negative);
}

TEST_CASE("category paths") {
    CHECK(ancestor_at("root/protein/cytokine", 0) == "root");
    CHECK(ancestor_at("root/protein/cytokine", 2) == "root/protein/cytokine");
    CHECK(ancestor_at("root/protein", 9) == "root/protein");
    CHECK(ancestor_at("root/protein/cytokine", 1) == "root/protein");
    CHECK(category_depth("root") == 0);
    CHECK(category_depth("root/a/b/c") == 3);
    CHECK_THROWS_AS(split_category_path("protein/cytokine"), FormatError);
    CHECK_THROWS_AS(split_category_path("root//x"), FormatError);
    CHECK_THROWS_AS(split_category_path(""), FormatError);
    CHECK_THROWS_AS(split_category_path("root/x/"), FormatError);
}

TEST_CASE("ontology is the union of agent paths") {
    const std::vector<Agent> agents = {{"b", "B", "root/protein/kinase", ""},
                                       {"a", "A", "root/protein/cytokine", ""},
                                       {"c", "C", "root/chemical", ""}};
    const auto tree = build_ontology(agents, {"root/process/empty"});
    CHECK(tree.id == "root");
    REQUIRE(tree.children.size() == 3);
    CHECK(tree.children[0].id == "root/chemical");
    CHECK(tree.children[1].id == "root/process");
    CHECK(tree.children[2].id == "root/protein");
    CHECK(tree.max_depth() == 2);
    const auto* cytokine = tree.find("root/protein/cytokine");
    REQUIRE(cytokine != nullptr);
    CHECK(cytokine->is_leaf());
    CHECK(cytokine->member_agents == std::vector<std::string>{"a"});
    CHECK(tree.find("root/protein/missing") == nullptr);
    CHECK(tree.find("root/process/empty") != nullptr);
}

AssembledGraph three_node_graph() {
    const std::vector<Agent> agents = {{"A", "A", "root/chemical", ""},
                                       {"B", "B", "root/protein/x", ""},
                                       {"C", "C", "root/protein/y", ""}};
    std::vector<CausalStatement> sts = {
        {"s1", StatementType::Inhibition, "A", "B", 0.9, true, {{"t1", "10.1/a", "reach"}}},
        {"s2", StatementType::Activation, "A", "C", 0.8, false, {{"t2", "10.1/b", "reach"}}},
        {"s3", StatementType::Complex, "B", "C", 0.7, false, {{"t3", "10.1/b", "sparser"}}},
    };
    return ingest::assemble("g", sts, agents);
}

bool has_code(const ValidationReport& report, const std::string& code) {
    return std::any_of(report.begin(), report.end(), [&](const ValidationIssue& i) { return i.code == code; });
}

TEST_CASE("well-formed graph validates clean") {
    CHECK(validate_dataset(three_node_graph()).empty());
}

TEST_CASE("dangling endpoint is reported against the missing agent") {
    auto g = three_node_graph();
    auto& e = g.edges[0];
    e.obj = "X";
    e.id = edge_id(e.subj, e.type, e.obj);
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    g.reindex();
    const auto report = validate_dataset(g);
    REQUIRE_FALSE(report.empty());
    const auto it = std::find_if(report.begin(), report.end(),
                                 [](const ValidationIssue& i) { return i.code == "dangling-endpoint"; });
    REQUIRE(it != report.end());
    CHECK(it->severity == Severity::Error);
    CHECK(it->subject == "X");
}

TEST_CASE("corruption injector: every corruption class is detected") {
    struct Corruption {
        const char* code;
        void (*apply)(AssembledGraph&);
    };
    const std::vector<Corruption> classes = {
        {"duplicate-agent", [](AssembledGraph& g) { g.agents.insert(g.agents.begin() + 1, g.agents[0]); }},
        {"agents-unsorted", [](AssembledGraph& g) { std::swap(g.agents[0], g.agents[1]); }},
        {"belief-range", [](AssembledGraph& g) { g.edges[0].belief = 1.5; }},
        {"evidence-count", [](AssembledGraph& g) { g.edges[0].evidence_count += 1; }},
        {"polarity-mismatch", [](AssembledGraph& g) {
             g.edges[0].polarity = g.edges[0].polarity == Polarity::Positive ? Polarity::Negative : Polarity::Positive;
         }},
        {"doi-set", [](AssembledGraph& g) { g.edges[0].dois.push_back("10.999/not-cited"); }},
        {"empty-evidence", [](AssembledGraph& g) {
             g.edges[0].evidence.clear();
             g.edges[0].evidence_count = 0;
             g.edges[0].dois.clear();
         }},
        {"edge-id-mismatch", [](AssembledGraph& g) { g.edges[0].id += "x"; }},
        {"edges-unsorted", [](AssembledGraph& g) { std::swap(g.edges[0], g.edges[1]); }},
        {"adjacency-size", [](AssembledGraph& g) { g.adjacency.pop_back(); }},
        {"adjacency-missing", [](AssembledGraph& g) {
             auto& out = g.adjacency[g.edges[0].subj_index].outgoing;
             out.erase(std::find(out.begin(), out.end(), std::size_t{0}));
         }},
        {"unresolved-category", [](AssembledGraph& g) { g.agents[0].category_path = "root/nowhere/at-all"; }},
        {"bad-category", [](AssembledGraph& g) { g.agents[0].category_path = "nowhere"; }},
        {"empty-evidence-text", [](AssembledGraph& g) { g.edges[0].evidence[0].text.clear(); }},
    };
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        support::Rng rng(seed);
        auto g = support::random_graph(rng, 8 + rng.below(8), 20 + rng.below(20));
        REQUIRE(validate_dataset(g).empty());
        const auto& corruption = classes[seed % classes.size()];
        corruption.apply(g);
        const auto report = validate_dataset(g);
        INFO("seed " << seed << " class " << corruption.code);
        CHECK(has_code(report, corruption.code));
    }
}

}  // TEST_SUITE
